#include "autonoc/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace autonoc::traffic {

using optical::Fabric;
using optical::MetroEdge;
using optical::MetroTopology;

std::string DemandMatrix::to_table(const std::vector<std::string>& labels) const {
    std::vector<std::string> names = labels;
    if (names.size() != n) {
        names.clear();
        for (size_t i = 0; i < n; ++i) names.push_back("G" + std::to_string(i + 1));
    }
    std::ostringstream out;
    out << "src/dst";
    for (const auto& name : names) out << '\t' << name;
    out << '\n';
    for (size_t i = 0; i < n; ++i) {
        out << names[i];
        for (size_t j = 0; j < n; ++j) out << '\t' << at(i, j);
        out << '\n';
    }
    return out.str();
}

DemandMatrix generate_demands(const WorkloadSpec& spec, int epoch, std::uint64_t seed) {
    if (epoch < 0) throw ConfigError("epoch: must be >= 0");
    if (spec.groups < 1) throw ConfigError("groups: must be >= 1");
    DemandMatrix m;
    m.epoch = epoch;
    m.n = static_cast<size_t>(spec.groups);
    m.gbps.assign(m.n * m.n, 0.0);
    switch (spec.kind) {
    case WorkloadSpec::Kind::RingAllReduce:
        if (spec.payload_gbps < 0) throw ConfigError("payload_gbps: must be >= 0");
        if (spec.payload_gbps > 0) {
            for (size_t i = 0; i < m.n; ++i) m.at(i, (i + 1) % m.n) = spec.payload_gbps;
        }
        break;
    case WorkloadSpec::Kind::UniformRandom: {
        if (spec.max_gbps < 0) throw ConfigError("max_gbps: must be >= 0");
        std::seed_seq seq{seed, static_cast<std::uint64_t>(epoch)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> dist(0.0, spec.max_gbps);
        for (size_t i = 0; i < m.n; ++i) {
            for (size_t j = 0; j < m.n; ++j) {
                if (i != j) m.at(i, j) = dist(rng);
            }
        }
        break;
    }
    }
    return m;
}

static FlowAllocation allocate_impl(const DemandMatrix& matrix, const Fabric& fabric,
                                    int avoid_link) {
    if (matrix.n != static_cast<size_t>(fabric.num_leaves))
        throw InputError("demand matrix size does not match leaf count");

    FlowAllocation alloc;
    alloc.link_loads.assign(fabric.links.size(), 0.0);

    for (size_t src = 0; src < matrix.n; ++src) {
        for (size_t dst = 0; dst < matrix.n; ++dst) {
            double gbps = matrix.at(src, dst);
            if (src == dst || gbps <= 0) continue;
            double cap = 0.0;
            // A single flow must fit one uplink and one downlink.
            int best_spine = -1;
            double best_max = 0.0;
            for (int s = 0; s < fabric.num_spines; ++s) {
                int up = fabric.link_index(static_cast<int>(src), s);
                int down = fabric.link_index(static_cast<int>(dst), s);
                if (up == avoid_link || down == avoid_link) continue;
                cap = std::min(fabric.links[up].capacity_gbps, fabric.links[down].capacity_gbps);
                if (gbps > cap) {
                    throw InfeasibleDemandError(
                        "flow G" + std::to_string(src + 1) + "->G" + std::to_string(dst + 1) +
                        " of " + std::to_string(gbps) + " Gbps exceeds link capacity");
                }
                double trial_max = 0.0;
                for (size_t l = 0; l < alloc.link_loads.size(); ++l) {
                    double load = alloc.link_loads[l];
                    if (static_cast<int>(l) == up) load += gbps;
                    if (static_cast<int>(l) == down) load += gbps;
                    trial_max = std::max(trial_max, load);
                }
                if (best_spine < 0 || trial_max < best_max) {
                    best_spine = s;
                    best_max = trial_max;
                }
            }
            if (best_spine < 0)
                throw InfeasibleDemandError("flow G" + std::to_string(src + 1) + "->G" +
                                            std::to_string(dst + 1) + " has no usable spine");
            alloc.flows.push_back({static_cast<int>(src), static_cast<int>(dst), gbps, best_spine});
            alloc.link_loads[fabric.link_index(static_cast<int>(src), best_spine)] += gbps;
            alloc.link_loads[fabric.link_index(static_cast<int>(dst), best_spine)] += gbps;
        }
    }
    alloc.violations = capacity_check(fabric, alloc);
    return alloc;
}

FlowAllocation allocate_intra_dc(const DemandMatrix& matrix, const Fabric& fabric) {
    return allocate_impl(matrix, fabric, -1);
}

FlowAllocation allocate_intra_dc_avoiding(const DemandMatrix& matrix, const Fabric& fabric,
                                          const std::string& avoid_link_id) {
    int idx = fabric.link_index_by_id(avoid_link_id);
    if (idx < 0) throw NotFoundError("no fabric link named " + avoid_link_id);
    return allocate_impl(matrix, fabric, idx);
}

static bool path_uses(const std::vector<int>& path, const FailedElement& failed) {
    if (failed.kind == FailedElement::Kind::Node) {
        return std::find(path.begin(), path.end(), failed.node) != path.end();
    }
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        int a = std::min(path[i], path[i + 1]);
        int b = std::max(path[i], path[i + 1]);
        if (a == std::min(failed.a, failed.b) && b == std::max(failed.a, failed.b)) return true;
    }
    return false;
}

static void enumerate_paths(const MetroTopology& metro, int u, int dst,
                            std::vector<int>& path, std::vector<bool>& visited,
                            const FailedElement* avoid,
                            std::vector<std::vector<int>>& out) {
    if (u == dst) {
        out.push_back(path);
        return;
    }
    for (const MetroEdge& e : metro.edges) {
        int v = e.a == u ? e.b : (e.b == u ? e.a : -1);
        if (v < 0 || visited[v]) continue;
        if (avoid && avoid->kind == FailedElement::Kind::Node && v == avoid->node) continue;
        if (avoid && avoid->kind == FailedElement::Kind::Edge &&
            std::min(e.a, e.b) == std::min(avoid->a, avoid->b) &&
            std::max(e.a, e.b) == std::max(avoid->a, avoid->b))
            continue;
        visited[v] = true;
        path.push_back(v);
        enumerate_paths(metro, v, dst, path, visited, avoid, out);
        path.pop_back();
        visited[v] = false;
    }
}

static double path_length(const MetroTopology& metro, const std::vector<int>& path) {
    double len = 0.0;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        len += metro.edges[metro.find_edge(path[i], path[i + 1])].length_km;
    }
    return len;
}

std::vector<std::vector<int>> k_shortest_paths(const MetroTopology& metro, int src, int dst,
                                               int k, const FailedElement* avoid) {
    if (k < 1) throw InputError("k: must be >= 1");
    if (src == dst) throw InputError("src and dst must differ");
    if (src < 0 || src >= static_cast<int>(metro.nodes.size()) || dst < 0 ||
        dst >= static_cast<int>(metro.nodes.size()))
        throw NotFoundError("path endpoint not in topology");
    if (avoid && avoid->kind == FailedElement::Kind::Node &&
        (avoid->node == src || avoid->node == dst))
        return {};

    std::vector<std::vector<int>> all;
    std::vector<int> path{src};
    std::vector<bool> visited(metro.nodes.size(), false);
    visited[src] = true;
    enumerate_paths(metro, src, dst, path, visited, avoid, all);

    std::sort(all.begin(), all.end(), [&](const auto& x, const auto& y) {
        double lx = path_length(metro, x), ly = path_length(metro, y);
        if (lx != ly) return lx < ly;
        return x < y; // lexicographic node order
    });
    if (static_cast<int>(all.size()) > k) all.resize(k);
    return all;
}

static int edge_direction(const MetroEdge& e, int from) { return from == e.a ? 0 : 1; }

std::optional<LightpathAssignment> rwa_first_fit(const LightpathDemand& demand,
                                                 MetroTopology& metro, int k,
                                                 const FailedElement* avoid) {
    auto paths = k_shortest_paths(metro, demand.src, demand.dst, k, avoid);
    for (const auto& path : paths) {
        for (int lambda = 0; lambda < metro.num_wavelengths; ++lambda) {
            bool free = true;
            for (size_t i = 0; i + 1 < path.size() && free; ++i) {
                const MetroEdge& e = metro.edges[metro.find_edge(path[i], path[i + 1])];
                if (e.occupancy[edge_direction(e, path[i])][lambda] != 0) free = false;
            }
            if (!free) continue;
            for (size_t i = 0; i + 1 < path.size(); ++i) {
                MetroEdge& e = metro.edges[metro.find_edge(path[i], path[i + 1])];
                ++e.occupancy[edge_direction(e, path[i])][lambda];
            }
            return LightpathAssignment{demand.id, path, lambda};
        }
    }
    return std::nullopt; // blocked
}

void release_assignment(const LightpathAssignment& assignment, MetroTopology& metro) {
    for (size_t i = 0; i + 1 < assignment.path.size(); ++i) {
        MetroEdge& e = metro.edges[metro.find_edge(assignment.path[i], assignment.path[i + 1])];
        --e.occupancy[edge_direction(e, assignment.path[i])][assignment.wavelength];
    }
}

ReplanResult reroute_avoiding(const std::vector<LightpathAssignment>& assignments,
                              const FailedElement& failed, MetroTopology& metro, int k) {
    ReplanResult result;
    for (const LightpathAssignment& a : assignments) {
        if (!path_uses(a.path, failed)) {
            result.untouched.push_back(a);
            continue;
        }
        release_assignment(a, metro);
        LightpathDemand d{a.demand_id, a.path.front(), a.path.back(), 0.0};
        if (auto moved = rwa_first_fit(d, metro, k, &failed)) {
            result.moved.push_back(*moved);
        } else {
            result.unmovable.push_back(a);
        }
    }
    return result;
}

std::vector<Violation> capacity_check(const Fabric& fabric) {
    std::vector<Violation> out;
    for (const auto& link : fabric.links) {
        if (link.load_gbps > link.capacity_gbps) {
            out.push_back({"capacity", link.id, -1,
                           "load " + std::to_string(link.load_gbps) + " Gbps exceeds " +
                               std::to_string(link.capacity_gbps) + " Gbps"});
        }
    }
    return out;
}

std::vector<Violation> capacity_check(const Fabric& fabric, const FlowAllocation& alloc) {
    std::vector<Violation> out;
    for (size_t i = 0; i < alloc.link_loads.size() && i < fabric.links.size(); ++i) {
        if (alloc.link_loads[i] > fabric.links[i].capacity_gbps) {
            out.push_back({"capacity", fabric.links[i].id, -1,
                           "load " + std::to_string(alloc.link_loads[i]) + " Gbps exceeds " +
                               std::to_string(fabric.links[i].capacity_gbps) + " Gbps"});
        }
    }
    return out;
}

std::vector<Violation> capacity_check(const MetroTopology& metro) {
    std::vector<Violation> out;
    for (const MetroEdge& e : metro.edges) {
        for (int dir = 0; dir < 2; ++dir) {
            for (int lambda = 0; lambda < metro.num_wavelengths; ++lambda) {
                if (e.occupancy[dir][lambda] > 1) {
                    std::string id = metro.nodes[e.a] + "-" + metro.nodes[e.b];
                    out.push_back({"double-booking", id, lambda,
                                   "wavelength " + std::to_string(lambda) + " booked " +
                                       std::to_string(e.occupancy[dir][lambda]) + " times"});
                }
            }
        }
    }
    return out;
}

bool needs_backbone_spectrum(const DemandMatrix& matrix, const Fabric& fabric,
                             double capacity_fraction) {
    double aggregate = 0.0;
    for (size_t i = 0; i < matrix.n; ++i) {
        for (size_t j = 0; j < matrix.n; ++j) {
            if (i != j) aggregate += matrix.at(i, j);
        }
    }
    double bisection = 0.0;
    for (const auto& link : fabric.links) bisection += link.capacity_gbps;
    bisection /= 2.0; // each inter-group flow burns one uplink and one downlink
    if (aggregate > capacity_fraction * bisection) return true;
    try {
        return !allocate_intra_dc(matrix, fabric).violations.empty();
    } catch (const InfeasibleDemandError&) {
        return true;
    }
}

} // namespace autonoc::traffic
