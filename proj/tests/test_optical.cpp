#include <doctest.h>

#include <cmath>

#include "autonoc/optical.hpp"

using namespace autonoc;
using namespace autonoc::optical;

namespace {

// A flat chain: N spans of identical loss, each followed by one compensating
// EDFA. Used to check the analytic OSNR form on equal spans.
BackboneConfig flat_config(int n_spans, double span_loss_db, double nf_db,
                           double launch_dbm, int n_channels = 1) {
    BackboneConfig cfg;
    for (int i = 0; i < n_spans; ++i) {
        Span s;
        s.id = "span" + std::to_string(i + 1);
        s.length_km = span_loss_db;
        s.loss_coeff_db_per_km = 1.0;
        cfg.spans.push_back(s);
    }
    for (int i = 0; i < n_spans; ++i) {
        Edfa e;
        e.id = "edfa" + std::to_string(i + 1);
        e.gain_db = span_loss_db;
        e.nf_db = nf_db;
        e.position = i;
        cfg.edfas.push_back(e);
    }
    for (int i = 0; i < n_channels; ++i) {
        WavelengthChannel ch;
        ch.index = i;
        ch.kind = i == 0 ? ChannelKind::Live : ChannelKind::Dummy;
        ch.launch_power_dbm = launch_dbm;
        if (i == 0) {
            ch.baud_gbd = 63.9;
            ch.bitrate_gbps = 400;
        }
        cfg.channels.push_back(ch);
    }
    return cfg;
}

// Independent dB-domain propagation for the total-power readings.
std::vector<double> profile_oracle(const BackboneModel& m) {
    double total_mw = 0.0;
    for (const auto& ch : m.channels)
        if (ch.active) total_mw += std::pow(10.0, ch.launch_power_dbm / 10.0);
    double cur = 10.0 * std::log10(total_mw);
    std::vector<double> out;
    for (const auto& el : m.chain) {
        if (el.kind == ChainElement::Kind::Span) {
            const Span& s = m.spans[el.index];
            cur -= s.length_km * s.loss_coeff_db_per_km + s.extra_loss_db;
        } else {
            out.push_back(cur);
            cur += m.edfas[el.index].gain_db;
            out.push_back(cur);
        }
    }
    return out;
}

} // namespace

TEST_CASE("standard backbone config builds the 440-km four-span link") {
    auto model = build_backbone(BackboneConfig::standard());
    CHECK(model.spans.size() == 4);
    double total_km = 0;
    for (const auto& s : model.spans) {
        CHECK(s.length_km == doctest::Approx(110.0));
        total_km += s.length_km;
    }
    CHECK(total_km == doctest::Approx(440.0));
    CHECK(model.edfas.size() == 6);
    CHECK(model.channels.size() == 30);
    int live = 0;
    for (const auto& ch : model.channels)
        if (ch.kind == ChannelKind::Live) ++live;
    CHECK(live == 6);
    CHECK(model.transponders.size() == 6);

    int a_spans = 0, a_edfas = 0;
    for (const auto& s : model.spans)
        if (s.domain == Domain::BackboneA) ++a_spans;
    for (const auto& e : model.edfas)
        if (e.domain == Domain::BackboneA) ++a_edfas;
    CHECK(a_spans == 2);
    CHECK(a_edfas == 3);
}

TEST_CASE("minimal one-span one-EDFA one-channel model is valid") {
    auto model = build_backbone(flat_config(1, 22.0, 5.0, 0.0));
    CHECK(model.spans.size() == 1);
    CHECK(model.edfas.size() == 1);
    CHECK(model.baseline_profile.size() == 2);
}

TEST_CASE("configuration errors name the offending field") {
    auto cfg = BackboneConfig::standard();
    cfg.spans[0].length_km = -5.0;
    CHECK_THROWS_WITH_AS(build_backbone(cfg), doctest::Contains("spans[0].length_km"),
                         ConfigError);

    cfg = BackboneConfig::standard();
    cfg.channels[3].index = 0; // duplicates channel 0
    CHECK_THROWS_AS(build_backbone(cfg), ConfigError);

    cfg = BackboneConfig::standard();
    cfg.edfas[1].gain_db = 40.0;
    CHECK_THROWS_WITH_AS(build_backbone(cfg), doctest::Contains("edfas[1].gain_db"), ConfigError);
}

TEST_CASE("power profile matches the dB-domain oracle on the standard link") {
    auto model = build_backbone(BackboneConfig::standard());
    auto profile = compute_power_profile(model);
    auto expect = profile_oracle(model);
    REQUIRE(profile.size() == expect.size());
    for (size_t i = 0; i < profile.size(); ++i) {
        CHECK(profile[i].total_power_dbm == doctest::Approx(expect[i]).epsilon(1e-12));
    }
    // 30 channels at 0 dBm: launch total 14.77 dBm, EDFA-1 input after a 22 dB
    // span is -7.23 dBm, its output with 22 dB gain 14.77 dBm.
    CHECK(profile[0].element_id == "edfa1");
    CHECK(profile[0].port == Port::Input);
    CHECK(profile[0].total_power_dbm == doctest::Approx(-7.23).epsilon(1e-3));
    CHECK(profile[1].port == Port::Output);
    CHECK(profile[1].total_power_dbm == doctest::Approx(14.77).epsilon(1e-3));
}

TEST_CASE("dark grid reports the floor value at every monitor") {
    auto cfg = BackboneConfig::standard(0);
    for (auto& ch : cfg.channels) ch.active = false;
    cfg.transponders.clear();
    auto model = build_backbone(cfg);
    for (const auto& r : compute_power_profile(model)) {
        CHECK(r.total_power_dbm == doctest::Approx(kPowerFloorDbm));
    }
}

TEST_CASE("span extra loss only moves downstream monitors") {
    auto base = build_backbone(BackboneConfig::standard());
    auto cfg = BackboneConfig::standard();
    cfg.spans[2].extra_loss_db = 3.0; // span3
    auto aged = build_backbone(cfg);
    auto before = compute_power_profile(base);
    auto after = compute_power_profile(aged);
    REQUIRE(before.size() == after.size());
    // Monitors 0..5 (EDFAs 1-3) sit upstream of span3; 6.. are downstream.
    for (size_t i = 0; i < before.size(); ++i) {
        double delta = after[i].total_power_dbm - before[i].total_power_dbm;
        if (i < 6) {
            CHECK(delta == doctest::Approx(0.0).epsilon(1e-12));
        } else {
            CHECK(delta == doctest::Approx(-3.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("power conservation holds across every intervening span") {
    auto model = build_backbone(BackboneConfig::standard());
    auto profile = compute_power_profile(model);
    size_t monitor = 0;
    double pending_loss = 0.0;
    double prev_output = 0.0;
    bool have_prev = false;
    for (const auto& el : model.chain) {
        if (el.kind == ChainElement::Kind::Span) {
            pending_loss += model.spans[el.index].loss_db();
            continue;
        }
        const auto& input = profile[monitor];
        if (have_prev) {
            CHECK(std::abs(input.total_power_dbm - (prev_output - pending_loss)) < 1e-9);
        }
        prev_output = profile[monitor + 1].total_power_dbm;
        have_prev = true;
        pending_loss = 0.0;
        monitor += 2;
    }
}

TEST_CASE("OSNR closed form on equal fully-compensated spans") {
    // 58 + 0 - 22 - 5 - 10 log10(4) = 24.98 dB
    auto model = build_backbone(flat_config(4, 22.0, 5.0, 0.0));
    CHECK(compute_osnr(model, 0) == doctest::Approx(24.98).epsilon(1e-3));

    auto single = build_backbone(flat_config(1, 22.0, 5.0, 0.0));
    CHECK(compute_osnr(single, 0) == doctest::Approx(31.0).epsilon(1e-3));
}

TEST_CASE("OSNR decreases strictly with span count") {
    double prev = 1e9;
    for (int n = 1; n <= 8; ++n) {
        auto model = build_backbone(flat_config(n, 22.0, 5.0, 0.0));
        double osnr = compute_osnr(model, 0);
        CHECK(osnr < prev);
        prev = osnr;
    }
}

TEST_CASE("noiseless amplifiers give very high OSNR") {
    auto model = build_backbone(flat_config(4, 22.0, -100.0, 0.0));
    CHECK(compute_osnr(model, 0) > 80.0);
}

TEST_CASE("OSNR rejects dummy channels") {
    auto model = build_backbone(BackboneConfig::standard());
    CHECK_THROWS_AS(compute_osnr(model, 29), UnsupportedChannelError);
    CHECK_THROWS_AS(compute_osnr(model, 123), UnsupportedChannelError);
}

TEST_CASE("MPI penalty closed form and monotonicity") {
    ImddLinkState link;
    link.link_id = "dc-link-1";
    CHECK(imdd_quality(link).penalty_db == doctest::Approx(0.0));

    link.mpi_ratio_db = -20.0;
    CHECK(imdd_quality(link).penalty_db == doctest::Approx(0.8715).epsilon(2e-3));

    ImddLinkState worse = link;
    worse.mpi_ratio_db = -13.0;
    CHECK(imdd_quality(worse).penalty_db > imdd_quality(link).penalty_db);

    double prev = 0.0;
    for (double ratio = -30.0; ratio <= -3.0; ratio += 1.0) {
        ImddLinkState l = link;
        l.mpi_ratio_db = ratio;
        double p = imdd_quality(l).penalty_db;
        CHECK(p > prev);
        prev = p;
    }

    link.mpi_ratio_db = 0.0;
    CHECK_THROWS_AS(imdd_quality(link), InvalidImpairmentError);
}

TEST_CASE("build_backbone is deterministic") {
    auto a = build_backbone(BackboneConfig::standard());
    auto b = build_backbone(BackboneConfig::standard());
    REQUIRE(a.baseline_profile.size() == b.baseline_profile.size());
    for (size_t i = 0; i < a.baseline_profile.size(); ++i) {
        CHECK(a.baseline_profile[i].element_id == b.baseline_profile[i].element_id);
        CHECK(a.baseline_profile[i].total_power_dbm == b.baseline_profile[i].total_power_dbm);
    }
}

TEST_CASE("standard metro topology: 14 nodes, 21 edges, connected") {
    auto metro = MetroTopology::standard14();
    CHECK(metro.nodes.size() == 14);
    CHECK(metro.edges.size() == 21);
    CHECK(metro.connected());
    CHECK(metro.num_wavelengths == 30);

    auto round = MetroTopology::from_json(metro.to_json());
    CHECK(round.nodes == metro.nodes);
    CHECK(round.edges.size() == metro.edges.size());
}

TEST_CASE("disconnected metro graph is rejected") {
    nlohmann::json j = {{"name", "bad"},
                        {"nodes", {"A", "B", "C"}},
                        {"edges", {{{"a", "A"}, {"b", "B"}, {"length_km", 10}}}}};
    CHECK_THROWS_AS(MetroTopology::from_json(j), ConfigError);
}

TEST_CASE("standard fabric wiring") {
    auto fabric = Fabric::standard();
    CHECK(fabric.num_leaves == 8);
    CHECK(fabric.num_spines == 4);
    CHECK(fabric.servers_per_leaf == 8);
    CHECK(fabric.links.size() == 32);
    CHECK(fabric.imdd_links.size() == 32);
    CHECK(fabric.link_index(1, 0) == 4);
    CHECK(fabric.links[4].id == "dc-link-5");
    CHECK(fabric.link_index_by_id("dc-link-5") == 4);
    CHECK(fabric.link_index_by_id("dc-link-99") == -1);
}
