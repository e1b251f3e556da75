#pragma once

#include "bfgraph/component_forest.hpp"
#include "bfgraph/edge_set.hpp"
#include "bfgraph/process_rule.hpp"
#include "bfgraph/rng.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bfgraph {

struct VertexPair {
    std::uint32_t u = 0;
    std::uint32_t v = 0;  // u < v
    friend bool operator==(const VertexPair&, const VertexPair&) = default;
};

struct CandidatePair {
    VertexPair first;
    VertexPair second;
};

struct StepOutcome {
    Choice chosen = Choice::first;
    VertexPair edge;
    bool merged = false;
    bool cycle_created = false;
    ComponentClass resulting_class = ComponentClass::tree;
};

struct Census {
    std::uint64_t trees = 0;
    std::uint64_t unicyclic = 0;
    std::uint64_t complex = 0;
    /// Complex components other than the (size-ranked) largest one.
    std::uint64_t complex_outside_largest = 0;
    std::uint64_t largest = 0;
    std::uint64_t second_largest = 0;
    std::vector<std::uint64_t> unicyclic_sizes;  // ascending
};

struct StatsOptions {
    int k_max = 3;                  // susceptibility moments S_1..S_kmax
    std::uint64_t restrict_L = 64;  // cap for the restricted susceptibility
    std::uint32_t x_cutoff = 32;    // X_i/n reported for i <= x_cutoff
};

struct GraphStats {
    double t = 0.0;
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::vector<double> x_fraction;  // index i-1 holds X_i / n
    std::vector<double> s_k;         // index k-1 holds S_k
    std::uint64_t restrict_L = 0;
    double s_L = 0.0;
    std::uint64_t c1 = 0;
    std::uint64_t c2 = 0;
    Census census;
};

/// One realisation of an Achlioptas process on n vertices.
///
/// Confined to one thread at a time; the trajectory is a pure function of
/// (n, rule, seed).
class ProcessState {
public:
    ProcessState(std::uint32_t n, ProcessRule rule, std::uint64_t seed, std::uint32_t track_limit = 2048);

    std::uint32_t n() const noexcept { return forest_.vertex_count(); }
    std::uint64_t m() const noexcept { return forest_.edge_count(); }
    double t() const noexcept { return 2.0 * static_cast<double>(m()) / n(); }
    std::uint64_t seed() const noexcept { return seed_; }
    const ProcessRule& rule() const noexcept { return rule_; }
    std::uint64_t max_edges() const noexcept { return static_cast<std::uint64_t>(n()) * (n() - 1) / 2; }
    bool exhausted() const noexcept { return m() >= max_edges(); }

    ComponentForest& forest() noexcept { return forest_; }
    const ComponentForest& forest() const noexcept { return forest_; }
    bool has_edge(std::uint32_t u, std::uint32_t v) const noexcept { return edges_.contains(u, v); }

    /// Two independent uniform draws from the absent edges (equal draws allowed).
    CandidatePair sample_candidate_pair();

    /// Applies the rule to a given candidate pair; does not touch the generator.
    StepOutcome apply(const CandidatePair& candidates);

    StepOutcome step() { return apply(sample_candidate_pair()); }

    /// Inserts a specific edge outside the rule (scenario construction).
    StepOutcome add_edge(std::uint32_t u, std::uint32_t v);

    /// Runs until floor(t_target * n / 2) edges are present.
    GraphStats run_until(double t_target, const StatsOptions& opts = {});

    GraphStats stats(const StatsOptions& opts = {});

private:
    VertexPair sample_absent_edge();

    ProcessRule rule_;
    std::uint64_t seed_;
    ComponentForest forest_;
    EdgeSet edges_;
    Rng rng_;
};

ProcessState new_process(std::uint32_t n, const ProcessRule& rule, std::uint64_t seed,
                         std::uint32_t track_limit = 2048);

/// S_k = (1/n) Σ_C |C|^{k+1}.
double susceptibility(const ProcessState& state, int k);

/// S_L = (1/n) Σ_{|C| <= L} |C|^2.
double restricted_susceptibility(const ProcessState& state, std::uint64_t L);

Census component_census(ProcessState& state);

std::uint64_t steps_for_time(double t, std::uint32_t n);

} // namespace bfgraph
