#include "bfgraph/graph_process.hpp"

#include "bfgraph/error.hpp"

#include <algorithm>
#include <cmath>

namespace bfgraph {

ProcessState::ProcessState(std::uint32_t n, ProcessRule rule, std::uint64_t seed, std::uint32_t track_limit)
    : rule_(std::move(rule)), seed_(seed), forest_(n, track_limit), edges_(n / 2 + 16), rng_(seed) {
    if (n < 2) fail(ErrorKind::invalid_argument, "process needs n >= 2 vertices, got " + std::to_string(n));
}

ProcessState new_process(std::uint32_t n, const ProcessRule& rule, std::uint64_t seed, std::uint32_t track_limit) {
    return ProcessState(n, rule, seed, track_limit);
}

VertexPair ProcessState::sample_absent_edge() {
    const std::uint32_t n = forest_.vertex_count();
    for (;;) {
        auto u = static_cast<std::uint32_t>(rng_.below(n));
        auto v = static_cast<std::uint32_t>(rng_.below(n - 1));
        if (v >= u) ++v;
        if (u > v) std::swap(u, v);
        if (!edges_.contains(u, v)) return {u, v};
    }
}

CandidatePair ProcessState::sample_candidate_pair() {
    if (exhausted()) fail(ErrorKind::process_exhausted, "graph is complete; no absent edge left");
    CandidatePair c;
    c.first = sample_absent_edge();
    c.second = sample_absent_edge();
    return c;
}

StepOutcome ProcessState::apply(const CandidatePair& c) {
    Choice choice = Choice::first;
    switch (rule_.kind()) {
    case RuleKind::erdos_renyi:
        break;
    case RuleKind::bohman_frieze:
        choice = (forest_.size_of(c.first.u) == 1 && forest_.size_of(c.first.v) == 1) ? Choice::first
                                                                                        : Choice::second;
        break;
    case RuleKind::bounded_size:
        choice = rule_.decide(rule_.cap(forest_.size_of(c.first.u)), rule_.cap(forest_.size_of(c.first.v)),
                              rule_.cap(forest_.size_of(c.second.u)), rule_.cap(forest_.size_of(c.second.v)));
        break;
    }
    const VertexPair e = choice == Choice::first ? c.first : c.second;
    StepOutcome out = add_edge(e.u, e.v);
    out.chosen = choice;
    return out;
}

StepOutcome ProcessState::add_edge(std::uint32_t u, std::uint32_t v) {
    if (u == v || u >= n() || v >= n()) fail(ErrorKind::invalid_argument, "invalid edge");
    if (u > v) std::swap(u, v);
    if (!edges_.insert(u, v)) fail(ErrorKind::invalid_argument, "edge already present");
    const LinkResult r = forest_.link(u, v);
    StepOutcome out;
    out.edge = {u, v};
    out.merged = r.merged;
    out.cycle_created = !r.merged;
    out.resulting_class = r.resulting_class;
    return out;
}

std::uint64_t steps_for_time(double t, std::uint32_t n) {
    return static_cast<std::uint64_t>(std::floor(t * static_cast<double>(n) / 2.0));
}

GraphStats ProcessState::run_until(double t_target, const StatsOptions& opts) {
    if (!(t_target >= 0.0) || !std::isfinite(t_target))
        fail(ErrorKind::invalid_argument, "target time must be finite and >= 0");
    const std::uint64_t target = steps_for_time(t_target, n());
    if (target < m())
        fail(ErrorKind::invalid_argument, "target time " + std::to_string(t_target) + " is before current time");
    if (target > max_edges()) fail(ErrorKind::process_exhausted, "target exceeds the complete graph");
    while (m() < target) step();
    return stats(opts);
}

double susceptibility(const ProcessState& state, int k) {
    if (k < 1) fail(ErrorKind::invalid_argument, "susceptibility order must be >= 1");
    const auto& f = state.forest();
    if (k == 1) return static_cast<double>(f.sum_squares()) / f.vertex_count();
    long double acc = 0.0L;
    f.for_each_size([&](std::uint64_t s, std::uint64_t count) {
        acc += static_cast<long double>(count) * std::pow(static_cast<long double>(s), k + 1);
    });
    return static_cast<double>(acc / f.vertex_count());
}

double restricted_susceptibility(const ProcessState& state, std::uint64_t L) {
    if (L < 1) fail(ErrorKind::invalid_argument, "restricted susceptibility cap must be >= 1");
    const auto& f = state.forest();
    std::uint64_t acc = 0;
    f.for_each_size([&](std::uint64_t s, std::uint64_t count) {
        if (s <= L) acc += count * s * s;
    });
    return static_cast<double>(acc) / f.vertex_count();
}

Census component_census(ProcessState& state) {
    auto& f = state.forest();
    Census c;
    std::uint32_t largest_root = 0;
    std::uint64_t largest = 0;
    for (std::uint32_t v = 0; v < f.vertex_count(); ++v) {
        if (!f.is_root(v)) continue;
        const std::uint64_t size = f.root_size(v);
        switch (classify(size, f.root_edges(v))) {
        case ComponentClass::tree: ++c.trees; break;
        case ComponentClass::unicyclic:
            ++c.unicyclic;
            c.unicyclic_sizes.push_back(size);
            break;
        case ComponentClass::complex: ++c.complex; break;
        }
        if (size > largest) {
            largest = size;
            largest_root = v;
        }
    }
    c.complex_outside_largest = c.complex;
    if (classify(f.root_size(largest_root), f.root_edges(largest_root)) == ComponentClass::complex)
        --c.complex_outside_largest;
    std::sort(c.unicyclic_sizes.begin(), c.unicyclic_sizes.end());
    auto [c1, c2] = f.largest_two();
    c.largest = c1;
    c.second_largest = c2;
    return c;
}

GraphStats ProcessState::stats(const StatsOptions& opts) {
    GraphStats g;
    g.n = n();
    g.m = m();
    g.t = t();
    const double nn = n();
    const std::uint32_t cutoff = std::min<std::uint32_t>(opts.x_cutoff, forest_.track_limit());
    g.x_fraction.resize(cutoff);
    for (std::uint32_t i = 1; i <= cutoff; ++i)
        g.x_fraction[i - 1] = static_cast<double>(forest_.components_of_size(i) * i) / nn;
    for (int k = 1; k <= opts.k_max; ++k) g.s_k.push_back(susceptibility(*this, k));
    g.restrict_L = opts.restrict_L;
    g.s_L = restricted_susceptibility(*this, std::max<std::uint64_t>(1, opts.restrict_L));
    g.census = component_census(*this);
    g.c1 = g.census.largest;
    g.c2 = g.census.second_largest;
    return g;
}

} // namespace bfgraph
