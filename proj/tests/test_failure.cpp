#include <doctest.h>

#include <cmath>

#include "autonoc/failure.hpp"

using namespace autonoc;
using namespace autonoc::failure;
using namespace autonoc::optical;

namespace {

FailureSpec aging(const std::string& span, double delta) {
    FailureSpec s;
    s.kind = FailureSpec::Kind::FiberAging;
    s.element_id = span;
    s.delta_db = delta;
    return s;
}

FailureSpec mpi(const std::string& link, double ratio) {
    FailureSpec s;
    s.kind = FailureSpec::Kind::Mpi;
    s.element_id = link;
    s.ratio_db = ratio;
    return s;
}

FailureSpec outage(const std::string& transponder) {
    FailureSpec s;
    s.kind = FailureSpec::Kind::TransponderOutage;
    s.element_id = transponder;
    return s;
}

} // namespace

TEST_CASE("fiber aging shifts only downstream monitors by the injected loss") {
    auto world = World::standard();
    auto before = compute_power_profile(world.backbone);
    auto aged = inject_failure(world, aging("span3", 3.0));
    auto after = compute_power_profile(aged.backbone);

    // Oracle: rebuild the model with the extra loss in the config.
    auto cfg = BackboneConfig::standard();
    cfg.spans[2].extra_loss_db = 3.0;
    auto expect = compute_power_profile(build_backbone(cfg));
    REQUIRE(after.size() == expect.size());
    for (size_t i = 0; i < after.size(); ++i) {
        CHECK(after[i].total_power_dbm == doctest::Approx(expect[i].total_power_dbm));
    }
    // The input world is unchanged.
    auto again = compute_power_profile(world.backbone);
    for (size_t i = 0; i < before.size(); ++i) {
        CHECK(again[i].total_power_dbm == before[i].total_power_dbm);
    }
}

TEST_CASE("MPI injection degrades quality without touching monitors") {
    auto world = World::standard();
    auto hit = inject_failure(world, mpi("dc-link-5", -20.0));
    int idx = hit.fabric.link_index_by_id("dc-link-5");
    CHECK(imdd_quality(hit.fabric.imdd_links[idx]).penalty_db ==
          doctest::Approx(0.8715).epsilon(2e-3));
    auto before = compute_power_profile(world.backbone);
    auto after = compute_power_profile(hit.backbone);
    for (size_t i = 0; i < before.size(); ++i) {
        CHECK(after[i].total_power_dbm == before[i].total_power_dbm);
    }
}

TEST_CASE("injection validation") {
    auto world = World::standard();
    CHECK_THROWS_AS(inject_failure(world, aging("span9", 3.0)), NotFoundError);
    CHECK_THROWS_AS(inject_failure(world, mpi("dc-link-999", -20.0)), NotFoundError);
    auto once = inject_failure(world, aging("span2", 2.0));
    CHECK_THROWS_AS(inject_failure(once, aging("span2", 2.0)), ConflictError);
    CHECK_THROWS_AS(inject_failure(world, aging("span1", -1.0)), ConfigError);
    CHECK_THROWS_AS(inject_failure(world, mpi("dc-link-5", 3.0)), ConfigError);
}

TEST_CASE("injection is reversible") {
    auto world = World::standard();
    auto baseline = compute_power_profile(world.backbone);
    for (const auto& spec :
         {aging("span1", 6.0), mpi("dc-link-7", -15.0), outage("t2")}) {
        auto hit = inject_failure(world, spec);
        auto restored = remove_failure(hit, spec);
        CHECK(restored.active_failures.empty());
        auto profile = compute_power_profile(restored.backbone);
        for (size_t i = 0; i < baseline.size(); ++i) {
            CHECK(profile[i].total_power_dbm == baseline[i].total_power_dbm);
        }
        for (const auto& l : restored.fabric.imdd_links) CHECK(!l.mpi_ratio_db);
    }
}

TEST_CASE("detect_anomaly finds the first deviating monitor") {
    auto world = World::standard();
    auto baseline = compute_power_profile(world.backbone);

    SUBCASE("no failure, tol 1.0 -> none") {
        CHECK(!detect_anomaly(baseline, baseline, 1.0));
    }
    SUBCASE("3 dB aging on span3 -> first affected is EDFA-4 input") {
        auto hit = inject_failure(world, aging("span3", 3.0));
        auto anomaly = detect_anomaly(compute_power_profile(hit.backbone), baseline, 1.0);
        REQUIRE(anomaly);
        CHECK(anomaly->first_affected == 6);
        CHECK(anomaly->evidence.front().element_id == "edfa4");
        CHECK(anomaly->evidence.front().port == Port::Input);
        CHECK(anomaly->evidence.front().delta == doctest::Approx(-3.0));
        // Evidence is in propagation order.
        for (size_t i = 1; i < anomaly->evidence.size(); ++i) {
            CHECK(anomaly->evidence[i - 1].element_id <= anomaly->evidence[i].element_id);
        }
    }
    SUBCASE("sub-threshold aging is not detected") {
        auto hit = inject_failure(world, aging("span3", 0.5));
        CHECK(!detect_anomaly(compute_power_profile(hit.backbone), baseline, 1.0));
    }
    SUBCASE("mismatched monitor sets are rejected") {
        auto truncated = baseline;
        truncated.pop_back();
        CHECK_THROWS_AS(detect_anomaly(truncated, baseline, 1.0), InputError);
        CHECK_THROWS_AS(detect_anomaly(baseline, baseline, 0.0), InputError);
    }
}

TEST_CASE("detect_world returns none iff everything is within tolerance") {
    auto world = World::standard();
    CHECK(!detect_world(world, world));
    auto hit = inject_failure(world, mpi("dc-link-5", -20.0));
    auto anomaly = detect_world(hit, world);
    REQUIRE(anomaly);
    CHECK(anomaly->evidence.size() == 1);
    CHECK(anomaly->evidence[0].kind == EvidenceKind::Quality);
    CHECK(anomaly->evidence[0].element_id == "dc-link-5");

    // Sub-threshold MPI penalty (about 0.28 dB at -30 dB) stays silent.
    auto mild = inject_failure(world, mpi("dc-link-5", -30.0));
    CHECK(!detect_world(mild, world));
}

TEST_CASE("classification follows the evidence signature") {
    auto world = World::standard();

    SUBCASE("span aging -> PowerLoss") {
        auto hit = inject_failure(world, aging("span2", 3.0));
        auto anomaly = detect_world(hit, world);
        REQUIRE(anomaly);
        auto cls = classify_failure(*anomaly);
        CHECK(cls.label == FailureLabel::PowerLoss);
        CHECK(cls.confidence == doctest::Approx(1.0));
    }
    SUBCASE("MPI only -> Interference") {
        auto hit = inject_failure(world, mpi("dc-link-3", -18.0));
        auto anomaly = detect_world(hit, world);
        REQUIRE(anomaly);
        CHECK(classify_failure(*anomaly).label == FailureLabel::Interference);
    }
    SUBCASE("transponder outage -> TransmitterFault") {
        auto hit = inject_failure(world, outage("t1"));
        auto anomaly = detect_world(hit, world);
        REQUIRE(anomaly);
        CHECK(classify_failure(*anomaly).label == FailureLabel::TransmitterFault);
    }
    SUBCASE("empty anomaly cannot be classified") {
        CHECK_THROWS_AS(classify_failure(Anomaly{}), InputError);
    }
    SUBCASE("all three signatures at once is ambiguous") {
        Anomaly a;
        a.first_affected = 0;
        a.evidence.push_back({EvidenceKind::Power, "edfa1", Port::Input, -10, -7, -3});
        a.evidence.push_back({EvidenceKind::Quality, "dc-link-5", Port::Output, 0.9, 0, 0.9});
        a.evidence.push_back({EvidenceKind::Channel, "ch0", Port::Output, 0, 1, -1});
        CHECK_THROWS_AS(classify_failure(a), AmbiguousClassificationError);
    }
}

TEST_CASE("localization round trip over every span and magnitude") {
    auto world = World::standard();
    for (const auto& span : {"span1", "span2", "span3", "span4"}) {
        for (double delta : {1.5, 3.0, 6.0}) {
            auto hit = inject_failure(world, aging(span, delta));
            auto anomaly = detect_world(hit, world);
            REQUIRE(anomaly);
            CHECK(localize_failure(*anomaly, hit.backbone) == span);
        }
    }
}

TEST_CASE("localization needs power evidence") {
    auto world = World::standard();
    CHECK_THROWS_AS(localize_failure(Anomaly{}, world.backbone), CannotLocalizeError);
    auto hit = inject_failure(world, mpi("dc-link-5", -20.0));
    auto anomaly = detect_world(hit, world);
    REQUIRE(anomaly);
    CHECK_THROWS_AS(localize_failure(*anomaly, hit.backbone), CannotLocalizeError);
}

TEST_CASE("failure specs serialize round trip") {
    for (const auto& spec :
         {aging("span3", 3.0), mpi("dc-link-5", -20.0), outage("t4")}) {
        auto round = FailureSpec::from_json(spec.to_json());
        CHECK(round.kind == spec.kind);
        CHECK(round.element_id == spec.element_id);
        CHECK(round.delta_db == spec.delta_db);
        CHECK(round.ratio_db == spec.ratio_db);
    }
    CHECK_THROWS_AS(FailureSpec::from_json({{"kind", "Gremlins"}}), ConfigError);
}
