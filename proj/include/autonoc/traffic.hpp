#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autonoc/optical.hpp"

namespace autonoc::traffic {

struct WorkloadSpec {
    enum class Kind { RingAllReduce, UniformRandom };
    Kind kind = Kind::RingAllReduce;
    double payload_gbps = 0.0; // RingAllReduce
    double max_gbps = 0.0;     // UniformRandom
    int groups = 8;
};

struct DemandMatrix {
    int epoch = 0;
    size_t n = 0;
    std::vector<double> gbps; // row-major n*n, diagonal zero

    double at(size_t i, size_t j) const { return gbps[i * n + j]; }
    double& at(size_t i, size_t j) { return gbps[i * n + j]; }
    // Tabular text with a header row of group ids, for golden-file tests.
    std::string to_table(const std::vector<std::string>& labels = {}) const;
};

// Deterministic in (spec, epoch, seed).
DemandMatrix generate_demands(const WorkloadSpec& spec, int epoch, std::uint64_t seed);

struct Flow {
    int src = 0;
    int dst = 0;
    double gbps = 0.0;
    int spine = -1;
};

struct Violation {
    std::string kind; // "capacity" | "double-booking"
    std::string element_id;
    int wavelength = -1;
    std::string detail;
};

struct FlowAllocation {
    std::vector<Flow> flows;
    std::vector<double> link_loads; // parallel to Fabric::links
    std::vector<Violation> violations;
};

// Least-loaded-spine routing of every inter-group demand. Does not mutate the
// fabric; the controller commits via apply_allocation.
FlowAllocation allocate_intra_dc(const DemandMatrix& matrix, const optical::Fabric& fabric);

// Same heuristic with one fabric link excluded (degraded-link reroute).
FlowAllocation allocate_intra_dc_avoiding(const DemandMatrix& matrix,
                                          const optical::Fabric& fabric,
                                          const std::string& avoid_link_id);

struct LightpathDemand {
    std::string id;
    int src = 0;
    int dst = 0;
    double gbps = 0.0;
};

struct LightpathAssignment {
    std::string demand_id;
    std::vector<int> path; // node indices, src first
    int wavelength = -1;
};

struct FailedElement {
    enum class Kind { Edge, Node };
    Kind kind = Kind::Edge;
    int a = -1, b = -1; // Edge endpoints
    int node = -1;      // Node
};

// All loop-free paths from src to dst ordered by (length, lexicographic node
// sequence), truncated to k. Optionally skips a failed element.
std::vector<std::vector<int>> k_shortest_paths(const optical::MetroTopology& metro, int src,
                                               int dst, int k,
                                               const FailedElement* avoid = nullptr);

// First-fit RWA over the k shortest paths; commits occupancy on success.
// Empty result means the demand is blocked.
std::optional<LightpathAssignment> rwa_first_fit(const LightpathDemand& demand,
                                                 optical::MetroTopology& metro, int k = 3,
                                                 const FailedElement* avoid = nullptr);

void release_assignment(const LightpathAssignment& assignment, optical::MetroTopology& metro);

struct ReplanResult {
    std::vector<LightpathAssignment> moved;
    std::vector<LightpathAssignment> unmovable; // released, could not be re-placed
    std::vector<LightpathAssignment> untouched;
};

ReplanResult reroute_avoiding(const std::vector<LightpathAssignment>& assignments,
                              const FailedElement& failed, optical::MetroTopology& metro,
                              int k = 3);

// Committed fabric loads against capacities.
std::vector<Violation> capacity_check(const optical::Fabric& fabric);
// A computed allocation against the fabric's capacities.
std::vector<Violation> capacity_check(const optical::Fabric& fabric, const FlowAllocation& alloc);
// Wavelength double-bookings on metro edges.
std::vector<Violation> capacity_check(const optical::MetroTopology& metro);

// Raised when local DCI compute is insufficient: the epoch's allocation is
// infeasible, or aggregate demand exceeds capacity_fraction of the fabric
// bisection bandwidth.
bool needs_backbone_spectrum(const DemandMatrix& matrix, const optical::Fabric& fabric,
                             double capacity_fraction = 0.8);

} // namespace autonoc::traffic
