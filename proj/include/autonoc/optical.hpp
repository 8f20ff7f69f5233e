#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "autonoc/domain.hpp"
#include "autonoc/errors.hpp"

namespace autonoc::optical {

inline constexpr double kPowerFloorDbm = -99.0;
// 10*log10(h*nu*B_ref / 1 mW) at 1550 nm, 0.1 nm reference bandwidth.
inline constexpr double kOsnrRefDb = 58.0;

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);
double db_to_lin(double db);

enum class ChannelKind { Live, Dummy };

struct WavelengthChannel {
    int index = 0; // slot on the 50 GHz grid, 0-based
    ChannelKind kind = ChannelKind::Dummy;
    double baud_gbd = 0.0;      // 63.9 for live channels
    int bitrate_gbps = 0;       // 400 or 200 for live channels
    double launch_power_dbm = 0.0;
    bool active = true;         // cleared by a transponder outage
};

struct Span {
    std::string id;
    Domain domain = Domain::BackboneA;
    double length_km = 0.0;
    double loss_coeff_db_per_km = 0.2;
    double extra_loss_db = 0.0; // failure-injected aging

    double loss_db() const { return length_km * loss_coeff_db_per_km + extra_loss_db; }
};

struct Edfa {
    std::string id;
    Domain domain = Domain::BackboneA;
    double gain_db = 0.0;
    double nf_db = 5.0;
    int position = 0; // ordinal along propagation direction
};

enum class Port { Input, Output };

struct MonitorReading {
    std::string element_id;
    Port port = Port::Input;
    double total_power_dbm = kPowerFloorDbm;
    std::uint64_t timestamp = 0;
};

struct Transponder {
    std::string id;
    Domain domain = Domain::BackboneA;
    std::optional<int> channel; // tx channel index when configured
    int rate_gbps = 0;
};

// One element of the propagation chain, in order from launch to receive.
struct ChainElement {
    enum class Kind { Span, Edfa };
    Kind kind = Kind::Span;
    int index = 0; // into BackboneModel::spans or ::edfas
};

struct BackboneConfig {
    std::vector<Span> spans;
    std::vector<Edfa> edfas;
    std::vector<WavelengthChannel> channels;
    std::vector<Transponder> transponders;
    std::vector<ChainElement> chain; // empty: alternate span/EDFA, append leftovers

    // 440-km / 4-span / 6-EDFA link with a 30-slot grid. live_channels live
    // slots are terminated by transponder pairs; the rest carry ASE dummies.
    static BackboneConfig standard(int live_channels = 6);
};

struct BackboneModel {
    std::vector<Span> spans;
    std::vector<Edfa> edfas;
    std::vector<WavelengthChannel> channels;
    std::vector<Transponder> transponders;
    std::vector<ChainElement> chain;
    std::vector<MonitorReading> baseline_profile;

    int span_index(const std::string& id) const;       // -1 if absent
    int edfa_index(const std::string& id) const;       // -1 if absent
    int channel_pos(int index) const;                  // -1 if absent
    int transponder_index(const std::string& id) const;
};

BackboneModel build_backbone(const BackboneConfig& config);

// Total power at every EDFA port, in propagation order (input then output per
// EDFA). dB-domain arithmetic: launch total minus span losses plus gains.
std::vector<MonitorReading> compute_power_profile(const BackboneModel& model);

// OSNR in dB (0.1 nm reference) for a live channel, accumulating ASE
// amplifier by amplifier.
double compute_osnr(const BackboneModel& model, int channel_index);

struct ImddLinkState {
    std::string link_id;
    double bitrate_gbps = 53.0; // PAM-4
    std::optional<double> mpi_ratio_db; // reflected-to-signal ratio, < 0
};

struct QualityReport {
    double penalty_db = 0.0;
};

// Worst-case interferometric eye-closure penalty for multipath interference.
QualityReport imdd_quality(const ImddLinkState& link);

// ---- DCI metro -------------------------------------------------------------

struct MetroEdge {
    int a = 0;
    int b = 0; // node indices, a < b
    double length_km = 0.0;
    // occupancy[dir][wavelength] = number of committed lightpaths.
    // dir 0: a->b, dir 1: b->a. Counts >1 are double-bookings.
    std::vector<int> occupancy[2];
};

struct MetroTopology {
    std::string name;
    std::vector<std::string> nodes;
    std::vector<MetroEdge> edges;
    int num_wavelengths = 30;

    int node_index(const std::string& n) const; // -1 if absent
    int find_edge(int u, int v) const;          // -1 if absent
    bool connected() const;

    static MetroTopology from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static MetroTopology load_file(const std::string& path);
    // The shipped 14-node / 21-edge default graph.
    static MetroTopology standard14();
};

// ---- intra-DC fabric -------------------------------------------------------

struct FabricLink {
    std::string id; // "dc-link-<n>"
    int leaf = 0;
    int spine = 0;
    double capacity_gbps = 400.0;
    double load_gbps = 0.0;
};

struct Fabric {
    int num_leaves = 8;
    int num_spines = 4;
    int servers_per_leaf = 8;
    std::vector<FabricLink> links;          // leaf-major order
    std::vector<ImddLinkState> imdd_links;  // parallel to links

    int link_index(int leaf, int spine) const;
    int link_index_by_id(const std::string& id) const; // -1 if absent

    static Fabric standard(int num_spines = 4, double capacity_gbps = 400.0);
};

} // namespace autonoc::optical
