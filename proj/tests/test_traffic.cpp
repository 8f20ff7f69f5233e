#include <doctest.h>

#include <algorithm>
#include <random>

#include "autonoc/traffic.hpp"

using namespace autonoc;
using namespace autonoc::traffic;
using namespace autonoc::optical;

namespace {

MetroTopology make_metro(const std::vector<std::string>& nodes,
                         const std::vector<std::tuple<std::string, std::string, double>>& edges,
                         int wavelengths = 30) {
    nlohmann::json j;
    j["name"] = "test";
    j["wavelengths"] = wavelengths;
    j["nodes"] = nodes;
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b, len] : edges) {
        j["edges"].push_back({{"a", a}, {"b", b}, {"length_km", len}});
    }
    return MetroTopology::from_json(j);
}

// Brute force over every spine choice: the minimum achievable max link load.
double optimal_max_load(const DemandMatrix& m, const Fabric& fabric) {
    std::vector<std::pair<int, int>> flows;
    for (size_t i = 0; i < m.n; ++i)
        for (size_t j = 0; j < m.n; ++j)
            if (i != j && m.at(i, j) > 0) flows.push_back({int(i), int(j)});
    double best = 1e18;
    std::vector<int> choice(flows.size(), 0);
    while (true) {
        std::vector<double> loads(fabric.links.size(), 0.0);
        for (size_t f = 0; f < flows.size(); ++f) {
            double g = m.at(flows[f].first, flows[f].second);
            loads[fabric.link_index(flows[f].first, choice[f])] += g;
            loads[fabric.link_index(flows[f].second, choice[f])] += g;
        }
        best = std::min(best, *std::max_element(loads.begin(), loads.end()));
        size_t f = 0;
        while (f < flows.size() && ++choice[f] == fabric.num_spines) choice[f++] = 0;
        if (f == flows.size()) break;
    }
    return best;
}

} // namespace

TEST_CASE("ring all-reduce demand matrix") {
    WorkloadSpec spec;
    spec.kind = WorkloadSpec::Kind::RingAllReduce;
    spec.payload_gbps = 100.0;
    auto m = generate_demands(spec, 0, 1);
    REQUIRE(m.n == 8);
    int nonzero = 0;
    for (size_t i = 0; i < m.n; ++i) {
        for (size_t j = 0; j < m.n; ++j) {
            if (m.at(i, j) > 0) {
                ++nonzero;
                CHECK(j == (i + 1) % m.n);
                CHECK(m.at(i, j) == doctest::Approx(100.0));
            }
        }
        CHECK(m.at(i, i) == 0.0);
    }
    CHECK(nonzero == 8);

    spec.payload_gbps = 0.0;
    auto zero = generate_demands(spec, 0, 1);
    CHECK(std::all_of(zero.gbps.begin(), zero.gbps.end(), [](double g) { return g == 0.0; }));
}

TEST_CASE("uniform random demands are a pure function of spec, epoch and seed") {
    WorkloadSpec spec;
    spec.kind = WorkloadSpec::Kind::UniformRandom;
    spec.max_gbps = 50.0;
    auto a = generate_demands(spec, 3, 7);
    auto b = generate_demands(spec, 3, 7);
    CHECK(a.gbps == b.gbps);
    auto c = generate_demands(spec, 4, 7);
    CHECK(a.gbps != c.gbps);
    for (size_t i = 0; i < a.n; ++i) CHECK(a.at(i, i) == 0.0);
    CHECK(*std::max_element(a.gbps.begin(), a.gbps.end()) <= 50.0);
}

TEST_CASE("demand matrix tabular form has a header row of group ids") {
    WorkloadSpec spec;
    spec.kind = WorkloadSpec::Kind::RingAllReduce;
    spec.payload_gbps = 10.0;
    spec.groups = 3;
    auto m = generate_demands(spec, 0, 1);
    CHECK(m.to_table() == "src/dst\tG1\tG2\tG3\n"
                          "G1\t0\t10\t0\n"
                          "G2\t0\t0\t10\n"
                          "G3\t10\t0\t0\n");
}

TEST_CASE("intra-DC allocation of the symmetric ring matches the brute-force optimum") {
    WorkloadSpec spec;
    spec.kind = WorkloadSpec::Kind::RingAllReduce;
    spec.payload_gbps = 100.0;
    auto m = generate_demands(spec, 0, 1);
    auto fabric = Fabric::standard();
    auto alloc = allocate_intra_dc(m, fabric);
    CHECK(alloc.violations.empty());
    CHECK(alloc.flows.size() == 8);
    double max_load = *std::max_element(alloc.link_loads.begin(), alloc.link_loads.end());
    CHECK(max_load <= 200.0);
    CHECK(max_load == doctest::Approx(optimal_max_load(m, fabric)));
}

TEST_CASE("zero matrix allocates nothing") {
    DemandMatrix m;
    m.n = 8;
    m.gbps.assign(64, 0.0);
    auto alloc = allocate_intra_dc(m, Fabric::standard());
    CHECK(alloc.flows.empty());
    CHECK(std::all_of(alloc.link_loads.begin(), alloc.link_loads.end(),
                      [](double l) { return l == 0.0; }));
    CHECK(alloc.violations.empty());
}

TEST_CASE("a single oversized flow is infeasible") {
    DemandMatrix m;
    m.n = 8;
    m.gbps.assign(64, 0.0);
    m.at(0, 3) = 500.0;
    CHECK_THROWS_WITH_AS(allocate_intra_dc(m, Fabric::standard()),
                         doctest::Contains("G1->G4"), InfeasibleDemandError);
}

TEST_CASE("spine ties break toward the lowest spine id") {
    DemandMatrix m;
    m.n = 8;
    m.gbps.assign(64, 0.0);
    m.at(0, 1) = 50.0;
    auto alloc = allocate_intra_dc(m, Fabric::standard());
    REQUIRE(alloc.flows.size() == 1);
    CHECK(alloc.flows[0].spine == 0);
}

TEST_CASE("first-fit RWA on an empty network picks the shortest path and wavelength 0") {
    auto metro = MetroTopology::standard14();
    LightpathDemand d{"d1", metro.node_index("N01"), metro.node_index("N02"), 400.0};
    auto a = rwa_first_fit(d, metro);
    REQUIRE(a);
    CHECK(a->path == std::vector<int>{0, 1});
    CHECK(a->wavelength == 0);

    // A second identical demand shares the edge and lands on wavelength 1.
    auto b = rwa_first_fit({"d2", d.src, d.dst, 400.0}, metro);
    REQUIRE(b);
    CHECK(b->path == std::vector<int>{0, 1});
    CHECK(b->wavelength == 1);
}

TEST_CASE("RWA blocks when every cut wavelength is taken") {
    auto metro = make_metro({"A", "B"}, {{"A", "B", 10.0}}, 2);
    CHECK(rwa_first_fit({"d1", 0, 1, 1.0}, metro));
    CHECK(rwa_first_fit({"d2", 0, 1, 1.0}, metro));
    CHECK(!rwa_first_fit({"d3", 0, 1, 1.0}, metro));
    // Opposite direction is independent.
    CHECK(rwa_first_fit({"d4", 1, 0, 1.0}, metro));
}

TEST_CASE("wavelength continuity is enforced end to end") {
    auto metro = make_metro({"A", "B", "C"}, {{"A", "B", 10.0}, {"B", "C", 10.0}}, 2);
    // Occupy lambda 0 on B->C only.
    int e = metro.find_edge(1, 2);
    metro.edges[e].occupancy[0][0] = 1;
    auto a = rwa_first_fit({"d1", 0, 2, 1.0}, metro);
    REQUIRE(a);
    CHECK(a->wavelength == 1); // lambda 0 is not continuous across both hops
}

TEST_CASE("reroute avoids the failed element") {
    auto metro = make_metro({"A", "B", "C", "D"},
                            {{"A", "B", 10.0}, {"B", "D", 10.0}, {"A", "C", 12.0},
                             {"C", "D", 12.0}});
    auto a = rwa_first_fit({"d1", 0, 3, 1.0}, metro);
    REQUIRE(a);
    CHECK(a->path == std::vector<int>{0, 1, 3});

    FailedElement failed;
    failed.kind = FailedElement::Kind::Edge;
    failed.a = 0;
    failed.b = 1;
    auto result = reroute_avoiding({*a}, failed, metro);
    REQUIRE(result.moved.size() == 1);
    CHECK(result.unmovable.empty());
    CHECK(result.moved[0].path == std::vector<int>{0, 2, 3});
    CHECK(capacity_check(metro).empty());
    // The old path's occupancy was released.
    CHECK(metro.edges[metro.find_edge(0, 1)].occupancy[0][a->wavelength] == 0);
}

TEST_CASE("reroute leaves non-traversing assignments untouched") {
    auto metro = MetroTopology::standard14();
    auto a = rwa_first_fit({"d1", 0, 1, 1.0}, metro);
    REQUIRE(a);
    FailedElement failed;
    failed.kind = FailedElement::Kind::Edge;
    failed.a = metro.node_index("N09");
    failed.b = metro.node_index("N12");
    auto result = reroute_avoiding({*a}, failed, metro);
    CHECK(result.moved.empty());
    CHECK(result.unmovable.empty());
    REQUIRE(result.untouched.size() == 1);
    CHECK(result.untouched[0].path == a->path);
    CHECK(result.untouched[0].wavelength == a->wavelength);
}

TEST_CASE("a bridge failure leaves the demand unmovable") {
    auto metro = make_metro({"A", "B", "C"}, {{"A", "B", 10.0}, {"B", "C", 10.0}});
    auto a = rwa_first_fit({"d1", 0, 2, 1.0}, metro);
    REQUIRE(a);
    FailedElement failed;
    failed.kind = FailedElement::Kind::Edge;
    failed.a = 0;
    failed.b = 1;
    auto result = reroute_avoiding({*a}, failed, metro);
    CHECK(result.moved.empty());
    REQUIRE(result.unmovable.size() == 1);
    CHECK(result.unmovable[0].demand_id == "d1");
}

TEST_CASE("capacity_check flags overloads and double bookings") {
    auto fabric = Fabric::standard();
    CHECK(capacity_check(fabric).empty());
    fabric.links[3].load_gbps = 401.0;
    auto v = capacity_check(fabric);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "capacity");
    CHECK(v[0].element_id == "dc-link-4");

    auto metro = make_metro({"A", "B"}, {{"A", "B", 10.0}});
    CHECK(capacity_check(metro).empty());
    metro.edges[0].occupancy[0][7] = 2;
    auto mv = capacity_check(metro);
    REQUIRE(mv.size() == 1);
    CHECK(mv[0].kind == "double-booking");
    CHECK(mv[0].element_id == "A-B");
    CHECK(mv[0].wavelength == 7);
}

TEST_CASE("no committed metro state ever fails capacity_check") {
    auto metro = MetroTopology::standard14();
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> node(0, 13);
    std::vector<LightpathAssignment> live;
    for (int i = 0; i < 200; ++i) {
        int s = node(rng), t = node(rng);
        if (s == t) continue;
        if (auto a = rwa_first_fit({"d" + std::to_string(i), s, t, 100.0}, metro)) {
            live.push_back(*a);
        }
        CHECK(capacity_check(metro).empty());
        if (live.size() > 40) {
            release_assignment(live.front(), metro);
            live.erase(live.begin());
            CHECK(capacity_check(metro).empty());
        }
    }
}

TEST_CASE("backbone spectrum trigger") {
    auto fabric = Fabric::standard();
    WorkloadSpec spec;
    spec.kind = WorkloadSpec::Kind::RingAllReduce;
    spec.payload_gbps = 100.0;
    CHECK(!needs_backbone_spectrum(generate_demands(spec, 0, 1), fabric));
    // 8 ring flows of 700 Gbps ask for 5600 Gbps, past 80% of the 6400 Gbps
    // bisection.
    spec.payload_gbps = 700.0;
    CHECK(needs_backbone_spectrum(generate_demands(spec, 0, 1), fabric));
    // 390 Gbps flows fit: one spine per flow keeps every link under 400 Gbps.
    spec.payload_gbps = 390.0;
    CHECK(!needs_backbone_spectrum(generate_demands(spec, 0, 1), fabric));
}

TEST_CASE("k shortest paths are ordered by length then lexicographic nodes") {
    auto metro = make_metro({"A", "B", "C", "D"},
                            {{"A", "B", 10.0}, {"B", "D", 10.0}, {"A", "C", 10.0},
                             {"C", "D", 10.0}, {"A", "D", 50.0}});
    auto paths = k_shortest_paths(metro, 0, 3, 3);
    REQUIRE(paths.size() == 3);
    CHECK(paths[0] == std::vector<int>{0, 1, 3}); // ties: B before C
    CHECK(paths[1] == std::vector<int>{0, 2, 3});
    CHECK(paths[2] == std::vector<int>{0, 3});
    CHECK_THROWS_AS(k_shortest_paths(metro, 0, 0, 3), InputError);
    CHECK_THROWS_AS(k_shortest_paths(metro, 0, 3, 0), InputError);
}
