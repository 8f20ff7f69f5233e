#include "autonoc/optical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>

namespace autonoc::optical {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

// ---- backbone ----------------------------------------------------------------

BackboneConfig BackboneConfig::standard(int live_channels) {
    if (live_channels < 0 || live_channels > 6 || live_channels % 2 != 0) {
        throw ConfigError("live_channels: must be even and in [0, 6]");
    }
    BackboneConfig cfg;
    for (int i = 0; i < 4; ++i) {
        Span s;
        s.id = "span" + std::to_string(i + 1);
        s.domain = i < 2 ? Domain::BackboneA : Domain::BackboneB;
        s.length_km = 110.0;
        s.loss_coeff_db_per_km = 0.2; // G.652D, C band
        cfg.spans.push_back(s);
    }
    const double gains[6] = {22.0, 22.0, 0.0, 22.0, 22.0, 0.0};
    for (int i = 0; i < 6; ++i) {
        Edfa e;
        e.id = "edfa" + std::to_string(i + 1);
        e.domain = i < 3 ? Domain::BackboneA : Domain::BackboneB;
        e.gain_db = gains[i];
        e.nf_db = 5.0;
        e.position = i;
        cfg.edfas.push_back(e);
    }
    // Amplifier sites: spanN feeds the first monitor-bearing EDFA behind it.
    auto span = [](int i) { return ChainElement{ChainElement::Kind::Span, i}; };
    auto edfa = [](int i) { return ChainElement{ChainElement::Kind::Edfa, i}; };
    cfg.chain = {span(0), edfa(0), span(1), edfa(1), edfa(2),
                 span(2), edfa(3), span(3), edfa(4), edfa(5)};
    for (int i = 0; i < 30; ++i) {
        WavelengthChannel ch;
        ch.index = i;
        ch.launch_power_dbm = 0.0;
        if (i < live_channels) {
            ch.kind = ChannelKind::Live;
            ch.baud_gbd = 63.9;
            ch.bitrate_gbps = i < 4 ? 400 : 200;
        }
        cfg.channels.push_back(ch);
    }
    // 3 duplex pairs: (t1,t4) on ch0/ch1, (t2,t5) on ch2/ch3, (t3,t6) on ch4/ch5.
    const int tx_channel[6] = {0, 2, 4, 1, 3, 5};
    for (int i = 0; i < 6; ++i) {
        Transponder t;
        t.id = "t" + std::to_string(i + 1);
        t.domain = i < 3 ? Domain::BackboneA : Domain::BackboneB;
        if (tx_channel[i] < live_channels) {
            t.channel = tx_channel[i];
            t.rate_gbps = tx_channel[i] < 4 ? 400 : 200;
        }
        cfg.transponders.push_back(t);
    }
    return cfg;
}

int BackboneModel::span_index(const std::string& id) const {
    for (size_t i = 0; i < spans.size(); ++i)
        if (spans[i].id == id) return static_cast<int>(i);
    return -1;
}

int BackboneModel::edfa_index(const std::string& id) const {
    for (size_t i = 0; i < edfas.size(); ++i)
        if (edfas[i].id == id) return static_cast<int>(i);
    return -1;
}

int BackboneModel::channel_pos(int index) const {
    for (size_t i = 0; i < channels.size(); ++i)
        if (channels[i].index == index) return static_cast<int>(i);
    return -1;
}

int BackboneModel::transponder_index(const std::string& id) const {
    for (size_t i = 0; i < transponders.size(); ++i)
        if (transponders[i].id == id) return static_cast<int>(i);
    return -1;
}

BackboneModel build_backbone(const BackboneConfig& config) {
    if (config.spans.empty()) throw ConfigError("spans: at least one span required");
    if (config.edfas.empty()) throw ConfigError("edfas: at least one EDFA required");
    for (size_t i = 0; i < config.spans.size(); ++i) {
        const Span& s = config.spans[i];
        const std::string at = "spans[" + std::to_string(i) + "]";
        if (s.length_km <= 0) throw ConfigError(at + ".length_km: must be > 0");
        if (s.loss_coeff_db_per_km < 0) throw ConfigError(at + ".loss_coeff_db_per_km: must be >= 0");
        if (s.extra_loss_db < 0) throw ConfigError(at + ".extra_loss_db: must be >= 0");
    }
    for (size_t i = 0; i < config.edfas.size(); ++i) {
        const Edfa& e = config.edfas[i];
        const std::string at = "edfas[" + std::to_string(i) + "]";
        if (e.gain_db < 0 || e.gain_db > 35) throw ConfigError(at + ".gain_db: must be in [0, 35]");
        // nf_db <= -99 is the noiseless sentinel used by limit checks.
        if (e.nf_db > -99 && (e.nf_db < 3 || e.nf_db > 10))
            throw ConfigError(at + ".nf_db: must be in [3, 10]");
    }
    std::vector<int> seen_idx;
    for (size_t i = 0; i < config.channels.size(); ++i) {
        const WavelengthChannel& ch = config.channels[i];
        const std::string at = "channels[" + std::to_string(i) + "]";
        if (ch.index < 0) throw ConfigError(at + ".index: must be >= 0");
        if (std::find(seen_idx.begin(), seen_idx.end(), ch.index) != seen_idx.end())
            throw ConfigError(at + ".index: duplicate channel index " + std::to_string(ch.index));
        seen_idx.push_back(ch.index);
        if (ch.kind == ChannelKind::Live && ch.bitrate_gbps != 400 && ch.bitrate_gbps != 200)
            throw ConfigError(at + ".bitrate_gbps: live channel must be 400 or 200");
    }

    BackboneModel model;
    model.spans = config.spans;
    model.edfas = config.edfas;
    model.channels = config.channels;
    model.transponders = config.transponders;

    for (size_t i = 0; i < model.transponders.size(); ++i) {
        const Transponder& t = model.transponders[i];
        if (t.channel) {
            int pos = model.channel_pos(*t.channel);
            const std::string at = "transponders[" + std::to_string(i) + "]";
            if (pos < 0) throw ConfigError(at + ".channel: no such channel index");
            if (model.channels[pos].kind != ChannelKind::Live)
                throw ConfigError(at + ".channel: transponder on a dummy channel");
        }
    }

    if (config.chain.empty()) {
        size_t n = std::max(config.spans.size(), config.edfas.size());
        for (size_t i = 0; i < n; ++i) {
            if (i < config.spans.size())
                model.chain.push_back({ChainElement::Kind::Span, static_cast<int>(i)});
            if (i < config.edfas.size())
                model.chain.push_back({ChainElement::Kind::Edfa, static_cast<int>(i)});
        }
    } else {
        std::vector<bool> span_seen(config.spans.size(), false);
        std::vector<bool> edfa_seen(config.edfas.size(), false);
        for (const ChainElement& el : config.chain) {
            auto& seen = el.kind == ChainElement::Kind::Span ? span_seen : edfa_seen;
            if (el.index < 0 || el.index >= static_cast<int>(seen.size()))
                throw ConfigError("chain: element index out of range");
            if (seen[el.index]) throw ConfigError("chain: element listed twice");
            seen[el.index] = true;
        }
        if (std::find(span_seen.begin(), span_seen.end(), false) != span_seen.end())
            throw ConfigError("chain: missing span");
        if (std::find(edfa_seen.begin(), edfa_seen.end(), false) != edfa_seen.end())
            throw ConfigError("chain: missing EDFA");
        model.chain = config.chain;
    }

    model.baseline_profile = compute_power_profile(model);
    return model;
}

std::vector<MonitorReading> compute_power_profile(const BackboneModel& model) {
    double total_mw = 0.0;
    for (const WavelengthChannel& ch : model.channels) {
        if (ch.active) total_mw += dbm_to_mw(ch.launch_power_dbm);
    }
    const bool dark = total_mw <= 0.0;
    double cur = dark ? kPowerFloorDbm : mw_to_dbm(total_mw);

    std::vector<MonitorReading> out;
    for (const ChainElement& el : model.chain) {
        if (el.kind == ChainElement::Kind::Span) {
            if (!dark) cur -= model.spans[el.index].loss_db();
        } else {
            const Edfa& e = model.edfas[el.index];
            out.push_back({e.id, Port::Input, dark ? kPowerFloorDbm : cur, 0});
            if (!dark) cur += e.gain_db;
            out.push_back({e.id, Port::Output, dark ? kPowerFloorDbm : cur, 0});
        }
    }
    return out;
}

double compute_osnr(const BackboneModel& model, int channel_index) {
    int pos = model.channel_pos(channel_index);
    if (pos < 0)
        throw UnsupportedChannelError("no channel with index " + std::to_string(channel_index));
    const WavelengthChannel& ch = model.channels[pos];
    if (ch.kind != ChannelKind::Live || !ch.active)
        throw UnsupportedChannelError("channel " + std::to_string(channel_index) +
                                      " is not a live active channel");

    const double href_mw = dbm_to_mw(-kOsnrRefDb); // h*nu*B_ref in mW
    double p_mw = dbm_to_mw(ch.launch_power_dbm);
    double ase_mw = 0.0;
    for (const ChainElement& el : model.chain) {
        if (el.kind == ChainElement::Kind::Span) {
            double f = db_to_lin(model.spans[el.index].loss_db());
            p_mw /= f;
            ase_mw /= f;
        } else {
            const Edfa& e = model.edfas[el.index];
            double g = db_to_lin(e.gain_db);
            p_mw *= g;
            ase_mw = ase_mw * g + db_to_lin(e.nf_db) * g * href_mw;
        }
    }
    if (ase_mw < 1e-30) return 200.0;
    return 10.0 * std::log10(p_mw / ase_mw);
}

QualityReport imdd_quality(const ImddLinkState& link) {
    if (!link.mpi_ratio_db) return {0.0};
    if (*link.mpi_ratio_db >= 0)
        throw InvalidImpairmentError("mpi_ratio_db: must be < 0 dB");
    double r = db_to_lin(*link.mpi_ratio_db);
    double sq = std::sqrt(r);
    return {10.0 * std::log10((1.0 + sq) / (1.0 - sq))};
}

// ---- metro -------------------------------------------------------------------

int MetroTopology::node_index(const std::string& n) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == n) return static_cast<int>(i);
    return -1;
}

int MetroTopology::find_edge(int u, int v) const {
    int a = std::min(u, v), b = std::max(u, v);
    for (size_t i = 0; i < edges.size(); ++i)
        if (edges[i].a == a && edges[i].b == b) return static_cast<int>(i);
    return -1;
}

bool MetroTopology::connected() const {
    if (nodes.empty()) return false;
    std::vector<bool> seen(nodes.size(), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    size_t count = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (const MetroEdge& e : edges) {
            int other = e.a == u ? e.b : (e.b == u ? e.a : -1);
            if (other >= 0 && !seen[other]) {
                seen[other] = true;
                ++count;
                q.push(other);
            }
        }
    }
    return count == nodes.size();
}

MetroTopology MetroTopology::from_json(const nlohmann::json& j) {
    MetroTopology t;
    t.name = j.value("name", "metro");
    t.num_wavelengths = j.value("wavelengths", 30);
    for (const auto& n : j.at("nodes")) t.nodes.push_back(n.get<std::string>());
    for (const auto& je : j.at("edges")) {
        MetroEdge e;
        e.a = t.node_index(je.at("a").get<std::string>());
        e.b = t.node_index(je.at("b").get<std::string>());
        if (e.a < 0 || e.b < 0) throw ConfigError("edges: endpoint not in node list");
        if (e.a == e.b) throw ConfigError("edges: self loop");
        if (e.a > e.b) std::swap(e.a, e.b);
        e.length_km = je.at("length_km").get<double>();
        if (e.length_km <= 0) throw ConfigError("edges: length_km must be > 0");
        e.occupancy[0].assign(t.num_wavelengths, 0);
        e.occupancy[1].assign(t.num_wavelengths, 0);
        t.edges.push_back(e);
    }
    if (!t.connected()) throw ConfigError("topology: graph must be connected");
    return t;
}

nlohmann::json MetroTopology::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["wavelengths"] = num_wavelengths;
    j["nodes"] = nodes;
    j["edges"] = nlohmann::json::array();
    for (const MetroEdge& e : edges) {
        j["edges"].push_back({{"a", nodes[e.a]}, {"b", nodes[e.b]}, {"length_km", e.length_km}});
    }
    return j;
}

MetroTopology MetroTopology::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open topology file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

MetroTopology MetroTopology::standard14() {
    nlohmann::json j;
    j["name"] = "metro14";
    j["wavelengths"] = 30;
    auto nodes = nlohmann::json::array();
    for (int i = 1; i <= 14; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "N%02d", i);
        nodes.push_back(std::string(buf));
    }
    j["nodes"] = nodes;
    // The classic 14-node / 21-link US research-backbone graph.
    const int e[21][3] = {
        {1, 2, 1100},  {1, 3, 1600},  {1, 8, 2800}, {2, 3, 600},   {2, 4, 1000},
        {3, 6, 2000},  {4, 5, 600},   {4, 11, 2400}, {5, 6, 1100}, {5, 7, 800},
        {6, 10, 1200}, {6, 13, 2000}, {7, 8, 700},  {8, 9, 700},   {9, 10, 900},
        {9, 12, 500},  {9, 14, 500},  {11, 12, 800}, {11, 13, 1000}, {12, 14, 300},
        {13, 14, 300}};
    auto edges = nlohmann::json::array();
    for (const auto& row : e) {
        edges.push_back({{"a", nodes[row[0] - 1]}, {"b", nodes[row[1] - 1]}, {"length_km", row[2]}});
    }
    j["edges"] = edges;
    return from_json(j);
}

// ---- fabric ------------------------------------------------------------------

int Fabric::link_index(int leaf, int spine) const {
    if (leaf < 0 || leaf >= num_leaves || spine < 0 || spine >= num_spines) return -1;
    return leaf * num_spines + spine;
}

int Fabric::link_index_by_id(const std::string& id) const {
    for (size_t i = 0; i < links.size(); ++i)
        if (links[i].id == id) return static_cast<int>(i);
    return -1;
}

Fabric Fabric::standard(int num_spines, double capacity_gbps) {
    if (num_spines < 1) throw ConfigError("num_spines: must be >= 1");
    Fabric f;
    f.num_spines = num_spines;
    for (int leaf = 0; leaf < f.num_leaves; ++leaf) {
        for (int spine = 0; spine < num_spines; ++spine) {
            FabricLink l;
            l.id = "dc-link-" + std::to_string(leaf * num_spines + spine + 1);
            l.leaf = leaf;
            l.spine = spine;
            l.capacity_gbps = capacity_gbps;
            f.links.push_back(l);
            ImddLinkState s;
            s.link_id = l.id;
            f.imdd_links.push_back(s);
        }
    }
    return f;
}

} // namespace autonoc::optical
