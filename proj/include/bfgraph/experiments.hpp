#pragma once

#include "bfgraph/graph_process.hpp"
#include "bfgraph/process_rule.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bfgraph {

struct EnsembleConfig {
    ProcessRule rule = ProcessRule::bohman_frieze();
    std::vector<std::uint32_t> n_list;
    int replicas = 2;
    std::uint64_t base_seed = 1;
    std::vector<double> checkpoints;
    std::vector<double> epsilon_list;
    std::uint64_t L = 64;
    std::uint32_t x_cutoff = 10;
    /// Separates the seed streams of different campaigns.
    std::string campaign = "ensemble";
    int threads = 0;  // 0 keeps the OpenMP default
    bool parallel = true;

    void validate() const;
};

/// Seed of one replica: mix(base_seed + replica, mix(hash(campaign), n)).
std::uint64_t replica_seed(std::uint64_t base_seed, const std::string& campaign, std::uint32_t n, int replica);

/// Integer observables of one realisation at one checkpoint.
struct CheckpointSample {
    std::uint64_t m = 0;
    std::vector<std::uint64_t> x_counts;  // vertices in components of size i, i = 1..x_cutoff
    std::uint64_t sum_squares = 0;        // n S_1
    std::uint64_t restricted_sum = 0;     // n S_L
    std::uint64_t c1 = 0, c2 = 0;
    std::uint64_t trees = 0, unicyclic = 0, complex = 0, complex_outside_largest = 0;
    std::uint64_t components = 0;
};

/// Exact first and second moments of a non-negative integer observable.
struct MomentSum {
    unsigned __int128 sum = 0;
    unsigned __int128 sum_sq = 0;
    std::uint64_t count = 0;

    void add(std::uint64_t v) {
        sum += v;
        sum_sq += static_cast<unsigned __int128>(v) * v;
        ++count;
    }
    void merge(const MomentSum& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
    }
    double mean(double scale = 1.0) const;
    /// Unbiased sample variance (count - 1 degrees of freedom).
    double variance(double scale = 1.0) const;
    double std_error(double scale = 1.0) const;
    friend bool operator==(const MomentSum&, const MomentSum&) = default;
};

struct CheckpointAggregate {
    std::uint32_t n = 0;
    double t = 0.0;
    std::uint64_t m = 0;
    std::vector<MomentSum> x_counts;
    MomentSum sum_squares, restricted_sum, c1, c2, trees, unicyclic, complex, complex_outside_largest;
    std::vector<std::uint64_t> unicyclic_histogram;  // runs with k unicyclic components
    std::uint64_t acyclic_runs = 0;                   // runs with no cycle at all
    std::uint64_t unresolved_runs = 0;                // c2 > c1 / 2
    std::uint64_t invariant_violations = 0;           // c2 > c1 or census total != component count

    void add(const CheckpointSample& s);
    void merge(const CheckpointAggregate& o);
    friend bool operator==(const CheckpointAggregate&, const CheckpointAggregate&) = default;
};

struct ReplicaRecord {
    std::uint32_t n = 0;
    int replica = 0;
    std::uint64_t seed = 0;
};

struct EnsembleResult {
    EnsembleConfig config;
    std::vector<ReplicaRecord> records;
    std::vector<CheckpointAggregate> aggregates;  // n-major, then checkpoint order

    const CheckpointAggregate& at(std::uint32_t n, double t) const;
};

CheckpointSample sample_checkpoint(ProcessState& state, std::uint32_t x_cutoff, std::uint64_t L);

std::vector<ReplicaRecord> replica_records(std::uint64_t base_seed, const std::string& campaign,
                                           const std::vector<std::uint32_t>& n_list, int replicas);

/// One realisation observed at every checkpoint.
std::vector<CheckpointSample> run_replica(const ProcessRule& rule, std::uint32_t n, std::uint64_t seed,
                                          const std::vector<double>& checkpoints, std::uint32_t x_cutoff,
                                          std::uint64_t L);

/// Runs replicas [first, first + count) of every n. Aggregation is exact, so
/// the result does not depend on thread count or on how replica ranges are
/// later merged.
EnsembleResult run_ensemble(const EnsembleConfig& config, int first_replica = 0, int count = -1);
EnsembleResult run_ensemble_serial(const EnsembleConfig& config, int first_replica = 0, int count = -1);
EnsembleResult merge(const EnsembleResult& a, const EnsembleResult& b);

struct ConcentrationRow {
    std::uint32_t n = 0;
    double t = 0.0;
    std::string observable;  // "x_i" or "S_1"
    int i = 0;
    double mean = 0.0, std_error = 0.0, expected = 0.0, z = 0.0;
};

struct ConcentrationReport {
    EnsembleResult ensemble;
    std::vector<ConcentrationRow> rows;
    double max_abs_z = 0.0;
};

/// Compares mean X_i/n (i <= x_cutoff) and mean S_1 with the density ODE.
ConcentrationReport concentration_experiment(const EnsembleConfig& config);
/// Compares mean S_1 with 1/r(t) only.
ConcentrationReport susceptibility_concentration(const EnsembleConfig& config);

struct CycleReport {
    std::string rule;
    double epsilon = 0.0, t = 0.0;
    std::uint32_t n = 0;
    int replicas = 0;
    std::uint64_t base_seed = 0;
    double mean = 0.0, variance = 0.0, variance_over_mean = 0.0;
    double mu = 0.0;              // multigraph-limit mean
    double mu_simple = 0.0;       // mean over absent internal pairs only
    double acyclic_fraction = 0.0;
    double acyclic_expected = 0.0;  // e^{-mu}
    double acyclic_std_error = 0.0; // binomial, at the expected probability
    double acyclic_z = 0.0;
    double mean_rel_error = 0.0;  // |mean - mu| / mu
    std::uint64_t complex_total = 0;
    std::vector<std::uint64_t> histogram;
    EnsembleResult ensemble;
};

CycleReport cycle_census(const ProcessRule& rule, double epsilon, std::uint32_t n, int replicas,
                         std::uint64_t base_seed, int threads = 0);

struct LinearFit {
    double slope = 0.0, intercept = 0.0, r_squared = 0.0;
    double slope_std_error = 0.0;
    std::size_t points = 0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingRow {
    std::uint32_t n = 0;
    double epsilon = 0.0, t = 0.0;
    double mean = 0.0, std_error = 0.0;
    double c1_fraction = 0.0;
    std::uint64_t complex_total = 0;
    std::uint64_t complex_outside_largest = 0;
    std::uint64_t unresolved_runs = 0;
};

struct ScalingReport {
    std::string observable;  // "c1" or "c2"
    std::string side;        // "sub" or "super"
    std::vector<ScalingRow> rows;
    LinearFit fit_log_n;     // mean vs ln n at fixed ε
    LinearFit fit_inv_eps2;  // mean vs ε^{-2} at fixed n
    std::vector<double> halving_ratios;  // mean(ε/2) / mean(ε) when both are present
    std::vector<EnsembleResult> ensembles;
};

struct ScalingConfig {
    ProcessRule rule = ProcessRule::bohman_frieze();
    std::vector<double> epsilons;
    std::vector<std::uint32_t> n_grid;
    int replicas = 20;
    std::uint64_t base_seed = 1;
    int threads = 0;
};

/// Largest component at t_c - ε; n sweep per ε with a log-n fit for the
/// first ε, ε sweep at the largest n.
ScalingReport c1_scaling(const ScalingConfig& config);
/// Second-largest component at t_c + ε.
ScalingReport c2_scaling(const ScalingConfig& config);

struct GrowthRow {
    double epsilon = 0.0;
    double mean_fraction = 0.0, std_error = 0.0;
    int used_runs = 0;
    std::uint64_t unresolved_runs = 0;
};

struct GrowthReport {
    std::string rule;
    std::uint32_t n = 0;
    int replicas = 0;
    std::vector<GrowthRow> rows;
    double gamma_origin = 0.0;  // c1/n = γ ε
    double gamma_quadratic = 0.0, kappa_quadratic = 0.0;  // c1/n = γ ε + κ ε²
    double gamma_four_thirds = 0.0, k_four_thirds = 0.0;  // c1/n = γ ε - K ε^{4/3}
    std::vector<double> residuals_origin;
    double gamma_hat = 0.0;  // headline estimate, the quadratic fit
    std::vector<ReplicaRecord> records;
};

GrowthReport giant_growth(const ProcessRule& rule, const std::vector<double>& epsilons, std::uint32_t n,
                          int replicas, std::uint64_t base_seed, int threads = 0);

struct CriticalGiantRow {
    std::uint32_t n = 0;
    double mean_fraction = 0.0, std_error = 0.0;
};

/// c1/n exactly at t_c over an n sweep.
std::vector<CriticalGiantRow> critical_giant(const ProcessRule& rule, const std::vector<std::uint32_t>& n_grid,
                                             int replicas, std::uint64_t base_seed, int threads = 0);

} // namespace bfgraph
