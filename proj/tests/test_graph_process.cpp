#include "bfgraph/error.hpp"
#include "bfgraph/graph_process.hpp"
#include "bfgraph/ode_engine.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

using namespace bfgraph;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::io;
}

} // namespace

TEST_CASE("new process starts empty") {
    ProcessState p(4, ProcessRule::bohman_frieze(), 1);
    CHECK(p.m() == 0);
    CHECK(p.forest().isolated_count() == 4);
    CHECK(susceptibility(p, 1) == 1.0);
    CHECK(kind_of([] { ProcessState(1, ProcessRule::bohman_frieze(), 0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("two vertices have a single possible edge") {
    ProcessState p(2, ProcessRule::erdos_renyi(), 7);
    const StepOutcome o = p.step();
    CHECK(o.edge == VertexPair{0, 1});
    CHECK(o.merged);
    CHECK(kind_of([&] { p.sample_candidate_pair(); }) == ErrorKind::process_exhausted);
}

TEST_CASE("single absent edge is drawn twice") {
    ProcessState p(3, ProcessRule::bohman_frieze(), 3);
    p.add_edge(0, 1);
    p.add_edge(1, 2);
    for (int k = 0; k < 20; ++k) {
        const CandidatePair c = p.sample_candidate_pair();
        CHECK(c.first == VertexPair{0, 2});
        CHECK(c.second == VertexPair{0, 2});
    }
}

TEST_CASE("candidates never are loops or present edges") {
    ProcessState p(30, ProcessRule::erdos_renyi(), 11);
    for (int k = 0; k < 300; ++k) p.step();
    for (int k = 0; k < 5000; ++k) {
        const CandidatePair c = p.sample_candidate_pair();
        for (const VertexPair& e : {c.first, c.second}) {
            CHECK(e.u < e.v);
            CHECK_FALSE(p.has_edge(e.u, e.v));
        }
    }
}

TEST_CASE("first candidate touches a vertex block at rate 2/n") {
    const std::uint32_t n = 100000, block = 1000;
    ProcessState p(n, ProcessRule::erdos_renyi(), 2024);
    const int samples = 1000000;
    long hits = 0;
    for (int k = 0; k < samples; ++k) {
        const CandidatePair c = p.sample_candidate_pair();
        hits += (c.first.u < block) + (c.first.v < block);
    }
    const double expected = samples * 2.0 * block / n;
    CHECK(std::abs(hits - expected) < 5.0 * std::sqrt(expected));
}

TEST_CASE("Bohman-Frieze choice") {
    ProcessState p(10, ProcessRule::bohman_frieze(), 5);
    SUBCASE("isolated endpoints take the first edge") {
        const StepOutcome o = p.apply({{0, 1}, {2, 3}});
        CHECK(o.chosen == Choice::first);
        CHECK(o.edge == VertexPair{0, 1});
    }
    SUBCASE("a size-2 endpoint takes the second edge") {
        p.add_edge(0, 1);
        const StepOutcome o = p.apply({{1, 2}, {3, 4}});
        CHECK(o.chosen == Choice::second);
        CHECK(o.edge == VertexPair{3, 4});
    }
    SUBCASE("equal candidates add the edge once") {
        p.add_edge(0, 1);
        const StepOutcome o = p.apply({{1, 2}, {1, 2}});
        CHECK(o.edge == VertexPair{1, 2});
        CHECK(p.m() == 2);
    }
}

TEST_CASE("Erdos-Renyi always takes the first edge") {
    ProcessState p(10, ProcessRule::erdos_renyi(), 5);
    p.add_edge(0, 1);
    CHECK(p.apply({{1, 2}, {3, 4}}).chosen == Choice::first);
}

TEST_CASE("bounded-size table lookup") {
    ProcessState p(12, ProcessRule::bounded_size(2), 5);
    p.add_edge(0, 1);
    CHECK(p.apply({{1, 2}, {5, 6}}).chosen == Choice::first);  // caps (2,1): both <= 2
    CHECK(p.apply({{2, 3}, {7, 8}}).chosen == Choice::second); // size-3 component is large
}

TEST_CASE("bounded-size K=1 table reproduces the dedicated Bohman-Frieze trajectory") {
    CHECK(ProcessRule::bohman_frieze_table().is_bohman_frieze_equivalent());
    ProcessState a(5000, ProcessRule::bohman_frieze(), 99);
    ProcessState b(5000, ProcessRule::bohman_frieze_table(), 99);
    for (int k = 0; k < 4000; ++k) {
        const StepOutcome x = a.step(), y = b.step();
        REQUIRE(x.edge == y.edge);
        REQUIRE(x.chosen == y.chosen);
    }
}

TEST_CASE("rule parsing") {
    CHECK(ProcessRule::parse("er").kind() == RuleKind::erdos_renyi);
    CHECK(ProcessRule::parse("bf").kind() == RuleKind::bohman_frieze);
    CHECK(ProcessRule::parse("bounded:3").cutoff() == 3);
    CHECK(kind_of([] { ProcessRule::parse("bounded:x"); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { ProcessRule::parse("foo"); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { ProcessRule::bounded_size(2, std::vector<Choice>(5)); }) == ErrorKind::invalid_argument);
}

TEST_CASE("run_until executes floor(t n / 2) steps") {
    ProcessState p(10000, ProcessRule::bohman_frieze(), 1);
    CHECK(p.run_until(1.0).m == 5000);
    CHECK(kind_of([&] { p.run_until(0.5); }) == ErrorKind::invalid_argument);
    ProcessState q(7, ProcessRule::erdos_renyi(), 1);
    q.run_until(0.9);
    CHECK(q.m() == 3);
}

TEST_CASE("Erdos-Renyi susceptibility at t = 0.5 is near 2") {
    double acc = 0, acc2 = 0;
    const int runs = 20;
    for (int r = 0; r < runs; ++r) {
        ProcessState p(100000, ProcessRule::erdos_renyi(), 1000 + r);
        const double s = p.run_until(0.5).s_k[0];
        acc += s;
        acc2 += s * s;
    }
    const double mean = acc / runs, se = std::sqrt((acc2 / runs - mean * mean) / (runs - 1));
    CHECK(std::abs(mean - 2.0) < 3.0 * se + 1e-3);
}

TEST_CASE("Bohman-Frieze isolated fraction follows x1 at t = 1") {
    ProcessState p(100000, ProcessRule::bohman_frieze(), 8);
    const GraphStats s = p.run_until(1.0);
    OdeConfig cfg;
    cfg.i_max = 8;
    cfg.assert_conservation = false;
    const double x1 = integrate_profile(ProcessRule::bohman_frieze(), 1.0, cfg).back().x[0];
    CHECK(std::abs(s.x_fraction[0] - x1) < 0.005);
}

TEST_CASE("susceptibility on small configurations") {
    ProcessState p(4, ProcessRule::erdos_renyi(), 1);
    CHECK(susceptibility(p, 3) == 1.0);
    p.add_edge(0, 1);
    CHECK(susceptibility(p, 1) == doctest::Approx(1.5));
    CHECK(kind_of([&] { susceptibility(p, 0); }) == ErrorKind::invalid_argument);
    ProcessState q(5, ProcessRule::erdos_renyi(), 1);
    for (std::uint32_t v = 1; v < 5; ++v) q.add_edge(0, v);
    CHECK(susceptibility(q, 2) == doctest::Approx(25.0));
}

TEST_CASE("restricted susceptibility") {
    ProcessState p(7, ProcessRule::erdos_renyi(), 1);
    for (std::uint32_t v = 1; v < 5; ++v) p.add_edge(0, v);
    p.add_edge(5, 6);
    CHECK(restricted_susceptibility(p, 3) == doctest::Approx(4.0 / 7.0));
    CHECK(restricted_susceptibility(p, 5) == doctest::Approx(susceptibility(p, 1)));
    ProcessState q(9, ProcessRule::erdos_renyi(), 1);
    CHECK(restricted_susceptibility(q, 1) == 1.0);
}

TEST_CASE("component census classes") {
    ProcessState p(10, ProcessRule::erdos_renyi(), 1);
    Census c = component_census(p);
    CHECK(c.trees == 10);
    CHECK(c.unicyclic + c.complex == 0);
    p.add_edge(0, 1);
    p.add_edge(1, 2);
    const StepOutcome closing = p.add_edge(0, 2);
    CHECK(closing.cycle_created);
    CHECK_FALSE(closing.merged);
    c = component_census(p);
    CHECK(c.unicyclic == 1);
    CHECK(c.unicyclic_sizes == std::vector<std::uint64_t>{3});
    for (auto [u, v] : std::vector<std::pair<int, int>>{{3, 4}, {3, 5}, {3, 6}, {4, 5}, {4, 6}, {5, 6}}) p.add_edge(u, v);
    c = component_census(p);
    CHECK(c.complex == 1);
    CHECK(c.complex_outside_largest == 0);
    CHECK(c.largest == 4);
    CHECK(c.second_largest == 3);
}

TEST_CASE("forest invariants along a trajectory") {
    ProcessState p(3000, ProcessRule::bohman_frieze(), 17);
    double last_s = 1.0;
    std::uint64_t last_iso = p.forest().isolated_count();
    for (int k = 0; k < 3000; ++k) {
        const std::uint64_t before = p.forest().component_count();
        const StepOutcome o = p.step();
        CHECK(o.merged != o.cycle_created);
        CHECK(p.forest().component_count() == before - (o.merged ? 1 : 0));
        const double s = susceptibility(p, 1);
        CHECK(s >= last_s);
        CHECK(p.forest().isolated_count() <= last_iso);
        last_s = s;
        last_iso = p.forest().isolated_count();
        if (k % 500 == 0) {
            std::uint64_t vertices = 0, edges = 0;
            auto& f = p.forest();
            for (std::uint32_t v = 0; v < f.vertex_count(); ++v)
                if (f.is_root(v)) {
                    vertices += f.root_size(v);
                    edges += f.root_edges(v);
                    CHECK(f.root_edges(v) + 1 >= f.root_size(v));
                }
            CHECK(vertices == 3000);
            CHECK(edges == p.m());
            CHECK(f.isolated_count() == f.components_of_size(1));
        }
    }
    const GraphStats s = p.stats();
    double sum = 0;
    p.forest().for_each_size([&](std::uint64_t size, std::uint64_t count) { sum += double(size * size * count) / 3000; });
    CHECK(s.s_k[0] == doctest::Approx(sum));
    CHECK(s.c1 >= s.c2);
    CHECK(s.s_L <= double(s.restrict_L));
}

TEST_CASE("same seed gives the same trajectory") {
    ProcessState a(2000, ProcessRule::bohman_frieze(), 42), b(2000, ProcessRule::bohman_frieze(), 42);
    for (int k = 0; k < 1500; ++k) REQUIRE(a.step().edge == b.step().edge);
}

TEST_CASE("Erdos-Renyi on 6 vertices after 3 edges matches exact enumeration") {
    const oracles::ChiSquare c = oracles::er_six_vertices_three_edges(100000, 77);
    CHECK(c.support_ok);
    CHECK(c.dof >= 3.0);
    CHECK(c.p_value > 1e-3);
}
