#include "bfgraph/experiments.hpp"

#include "bfgraph/error.hpp"
#include "bfgraph/ode_engine.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bfgraph {
namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double critical_time(const ProcessRule& rule) { return find_tc(rule, 1e-10).t_c; }

double z_score(double mean, double se, double expected) {
    const double d = mean - expected;
    if (se > 0.0) return d / se;
    return d == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), d);
}

struct ThreadScope {
    explicit ThreadScope(int threads) : saved(omp_get_max_threads()) {
        if (threads > 0) omp_set_num_threads(threads);
    }
    ~ThreadScope() { omp_set_num_threads(saved); }
    int saved;
};

EnsembleResult run_impl(const EnsembleConfig& cfg, int first, int count, bool parallel) {
    cfg.validate();
    if (first < 0) fail(ErrorKind::invalid_argument, "first replica must be >= 0");
    if (count < 0) count = cfg.replicas - first;
    EnsembleResult out;
    out.config = cfg;
    ThreadScope scope(cfg.threads);
    for (std::uint32_t n : cfg.n_list) {
        std::vector<std::vector<CheckpointSample>> samples(count);
        std::vector<std::uint64_t> seeds(count);
        for (int r = 0; r < count; ++r) seeds[r] = replica_seed(cfg.base_seed, cfg.campaign, n, first + r);
        if (parallel) {
            std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
            for (int r = 0; r < count; ++r) {
                try {
                    samples[r] = run_replica(cfg.rule, n, seeds[r], cfg.checkpoints, cfg.x_cutoff, cfg.L);
                } catch (...) {
#pragma omp critical
                    error = std::current_exception();
                }
            }
            if (error) std::rethrow_exception(error);
        } else {
            for (int r = 0; r < count; ++r)
                samples[r] = run_replica(cfg.rule, n, seeds[r], cfg.checkpoints, cfg.x_cutoff, cfg.L);
        }
        for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) {
            CheckpointAggregate agg;
            agg.n = n;
            agg.t = cfg.checkpoints[c];
            agg.m = steps_for_time(agg.t, n);
            agg.x_counts.resize(cfg.x_cutoff);
            for (int r = 0; r < count; ++r) agg.add(samples[r][c]);
            out.aggregates.push_back(std::move(agg));
        }
        for (int r = 0; r < count; ++r) out.records.push_back({n, first + r, seeds[r]});
    }
    return out;
}

EnsembleConfig single(const ProcessRule& rule, std::uint32_t n, int replicas, std::uint64_t seed,
                      std::vector<double> checkpoints, const std::string& campaign, int threads) {
    EnsembleConfig cfg;
    cfg.rule = rule;
    cfg.n_list = {n};
    cfg.replicas = replicas;
    cfg.base_seed = seed;
    cfg.checkpoints = std::move(checkpoints);
    cfg.campaign = campaign;
    cfg.threads = threads;
    return cfg;
}

} // namespace

void EnsembleConfig::validate() const {
    if (replicas < 2) fail(ErrorKind::invalid_argument, "ensemble needs at least 2 replicas");
    if (n_list.empty()) fail(ErrorKind::invalid_argument, "n_list must not be empty");
    for (auto n : n_list)
        if (n < 2) fail(ErrorKind::invalid_argument, "every n must be >= 2");
    if (checkpoints.empty()) fail(ErrorKind::invalid_argument, "at least one checkpoint is required");
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
        fail(ErrorKind::invalid_argument, "checkpoints must be sorted");
    for (double t : checkpoints)
        if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::invalid_argument, "checkpoints must be finite and >= 0");
    if (L < 1) fail(ErrorKind::invalid_argument, "L must be >= 1");
}

std::uint64_t replica_seed(std::uint64_t base_seed, const std::string& campaign, std::uint32_t n, int replica) {
    return mix_seed(base_seed + static_cast<std::uint64_t>(replica), mix_seed(fnv1a(campaign), n));
}

std::vector<ReplicaRecord> replica_records(std::uint64_t base_seed, const std::string& campaign,
                                           const std::vector<std::uint32_t>& n_list, int replicas) {
    std::vector<ReplicaRecord> out;
    for (std::uint32_t n : n_list)
        for (int r = 0; r < replicas; ++r) out.push_back({n, r, replica_seed(base_seed, campaign, n, r)});
    return out;
}

double MomentSum::mean(double scale) const {
    if (count == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(static_cast<long double>(sum) / count) * scale;
}

double MomentSum::variance(double scale) const {
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    // n Σv² - (Σv)² is exact in 128 bits for the ranges used here
    const unsigned __int128 num = sum_sq * count - sum * sum;
    const long double v = static_cast<long double>(num) / (static_cast<long double>(count) * (count - 1));
    return static_cast<double>(v) * scale * scale;
}

double MomentSum::std_error(double scale) const {
    return std::sqrt(variance(scale) / static_cast<double>(count));
}

void CheckpointAggregate::add(const CheckpointSample& s) {
    for (std::size_t i = 0; i < x_counts.size() && i < s.x_counts.size(); ++i) x_counts[i].add(s.x_counts[i]);
    sum_squares.add(s.sum_squares);
    restricted_sum.add(s.restricted_sum);
    c1.add(s.c1);
    c2.add(s.c2);
    trees.add(s.trees);
    unicyclic.add(s.unicyclic);
    complex.add(s.complex);
    complex_outside_largest.add(s.complex_outside_largest);
    if (unicyclic_histogram.size() <= s.unicyclic) unicyclic_histogram.resize(s.unicyclic + 1, 0);
    ++unicyclic_histogram[s.unicyclic];
    if (s.unicyclic == 0 && s.complex == 0) ++acyclic_runs;
    if (2 * s.c2 > s.c1) ++unresolved_runs;
    if (s.c2 > s.c1 || s.trees + s.unicyclic + s.complex != s.components) ++invariant_violations;
}

void CheckpointAggregate::merge(const CheckpointAggregate& o) {
    if (o.n != n || o.t != t || o.x_counts.size() != x_counts.size())
        fail(ErrorKind::invalid_argument, "cannot merge aggregates of different checkpoints");
    for (std::size_t i = 0; i < x_counts.size(); ++i) x_counts[i].merge(o.x_counts[i]);
    sum_squares.merge(o.sum_squares);
    restricted_sum.merge(o.restricted_sum);
    c1.merge(o.c1);
    c2.merge(o.c2);
    trees.merge(o.trees);
    unicyclic.merge(o.unicyclic);
    complex.merge(o.complex);
    complex_outside_largest.merge(o.complex_outside_largest);
    if (unicyclic_histogram.size() < o.unicyclic_histogram.size())
        unicyclic_histogram.resize(o.unicyclic_histogram.size(), 0);
    for (std::size_t k = 0; k < o.unicyclic_histogram.size(); ++k) unicyclic_histogram[k] += o.unicyclic_histogram[k];
    acyclic_runs += o.acyclic_runs;
    unresolved_runs += o.unresolved_runs;
    invariant_violations += o.invariant_violations;
}

const CheckpointAggregate& EnsembleResult::at(std::uint32_t n, double t) const {
    for (const auto& a : aggregates)
        if (a.n == n && a.t == t) return a;
    fail(ErrorKind::invalid_argument, "no aggregate for n=" + std::to_string(n) + " t=" + std::to_string(t));
}

CheckpointSample sample_checkpoint(ProcessState& state, std::uint32_t x_cutoff, std::uint64_t L) {
    auto& f = state.forest();
    CheckpointSample s;
    s.m = state.m();
    s.x_counts.resize(x_cutoff);
    for (std::uint32_t i = 1; i <= x_cutoff; ++i) s.x_counts[i - 1] = f.components_of_size(i) * i;
    s.sum_squares = f.sum_squares();
    f.for_each_size([&](std::uint64_t size, std::uint64_t count) {
        if (size <= L) s.restricted_sum += count * size * size;
    });
    const Census c = component_census(state);
    s.c1 = c.largest;
    s.c2 = c.second_largest;
    s.trees = c.trees;
    s.unicyclic = c.unicyclic;
    s.complex = c.complex;
    s.complex_outside_largest = c.complex_outside_largest;
    s.components = f.component_count();
    return s;
}

std::vector<CheckpointSample> run_replica(const ProcessRule& rule, std::uint32_t n, std::uint64_t seed,
                                          const std::vector<double>& checkpoints, std::uint32_t x_cutoff,
                                          std::uint64_t L) {
    ProcessState state(n, rule, seed, std::max<std::uint32_t>(x_cutoff, 64));
    std::vector<CheckpointSample> out;
    out.reserve(checkpoints.size());
    for (double t : checkpoints) {
        const std::uint64_t target = steps_for_time(t, n);
        if (target > state.max_edges()) fail(ErrorKind::process_exhausted, "checkpoint exceeds the complete graph");
        while (state.m() < target) state.step();
        out.push_back(sample_checkpoint(state, x_cutoff, L));
    }
    return out;
}

EnsembleResult run_ensemble(const EnsembleConfig& config, int first, int count) {
    return run_impl(config, first, count, config.parallel);
}

EnsembleResult run_ensemble_serial(const EnsembleConfig& config, int first, int count) {
    return run_impl(config, first, count, false);
}

EnsembleResult merge(const EnsembleResult& a, const EnsembleResult& b) {
    if (a.aggregates.size() != b.aggregates.size() || !(a.config.rule == b.config.rule) ||
        a.config.n_list != b.config.n_list || a.config.checkpoints != b.config.checkpoints)
        fail(ErrorKind::invalid_argument, "cannot merge ensembles with different configurations");
    EnsembleResult out = a;
    for (std::size_t i = 0; i < out.aggregates.size(); ++i) out.aggregates[i].merge(b.aggregates[i]);
    out.records.insert(out.records.end(), b.records.begin(), b.records.end());
    std::sort(out.records.begin(), out.records.end(), [&](const ReplicaRecord& x, const ReplicaRecord& y) {
        const auto ix = std::find(a.config.n_list.begin(), a.config.n_list.end(), x.n);
        const auto iy = std::find(a.config.n_list.begin(), a.config.n_list.end(), y.n);
        return ix != iy ? ix < iy : x.replica < y.replica;
    });
    for (std::size_t i = 1; i < out.records.size(); ++i)
        if (out.records[i].n == out.records[i - 1].n && out.records[i].replica == out.records[i - 1].replica)
            fail(ErrorKind::invalid_argument, "merged ensembles share replica indices");
    return out;
}

ConcentrationReport concentration_experiment(const EnsembleConfig& config) {
    config.validate();
    const double tc = critical_time(config.rule);
    for (double t : config.checkpoints)
        if (t >= tc - 0.05)
            fail(ErrorKind::invalid_argument, "concentration checkpoints must lie below t_c - 0.05");
    ConcentrationReport rep;
    rep.ensemble = run_ensemble(config);
    OdeConfig ode;
    ode.checkpoints = config.checkpoints;
    ode.abs_tol = 1e-14;
    const auto profiles = integrate_profile(config.rule, config.checkpoints.back(), ode);
    const auto profile_at = [&](double t) -> const SmallCompProfile& {
        for (const auto& p : profiles)
            if (p.t == t) return p;
        fail(ErrorKind::invalid_argument, "missing profile checkpoint");
    };
    for (const auto& agg : rep.ensemble.aggregates) {
        const double inv_n = 1.0 / agg.n;
        const SmallCompProfile& p = profile_at(agg.t);
        for (std::size_t i = 0; i < agg.x_counts.size(); ++i) {
            ConcentrationRow row{agg.n, agg.t, "x_i", static_cast<int>(i + 1), agg.x_counts[i].mean(inv_n),
                                 agg.x_counts[i].std_error(inv_n), i < p.x.size() ? p.x[i] : 0.0, 0.0};
            row.z = z_score(row.mean, row.std_error, row.expected);
            rep.rows.push_back(row);
        }
        ConcentrationRow s1{agg.n, agg.t, "S_1", 1, agg.sum_squares.mean(inv_n), agg.sum_squares.std_error(inv_n),
                            susceptibility_at(config.rule, agg.t), 0.0};
        s1.z = z_score(s1.mean, s1.std_error, s1.expected);
        rep.rows.push_back(s1);
    }
    for (const auto& r : rep.rows) rep.max_abs_z = std::max(rep.max_abs_z, std::abs(r.z));
    return rep;
}

ConcentrationReport susceptibility_concentration(const EnsembleConfig& config) {
    config.validate();
    const double tc = critical_time(config.rule);
    for (double t : config.checkpoints)
        if (t > tc - 0.1) fail(ErrorKind::invalid_argument, "susceptibility checkpoints must lie at or below t_c - 0.1");
    ConcentrationReport rep;
    rep.ensemble = run_ensemble(config);
    for (const auto& agg : rep.ensemble.aggregates) {
        const double inv_n = 1.0 / agg.n;
        ConcentrationRow s1{agg.n, agg.t, "S_1", 1, agg.sum_squares.mean(inv_n), agg.sum_squares.std_error(inv_n),
                            susceptibility_at(config.rule, agg.t), 0.0};
        s1.z = z_score(s1.mean, s1.std_error, s1.expected);
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(s1.z));
        rep.rows.push_back(s1);
    }
    return rep;
}

CycleReport cycle_census(const ProcessRule& rule, double epsilon, std::uint32_t n, int replicas,
                         std::uint64_t base_seed, int threads) {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) fail(ErrorKind::invalid_argument, "epsilon must lie in (0, 0.5]");
    const double tc = critical_time(rule);
    CycleReport rep;
    rep.rule = rule.name();
    rep.epsilon = epsilon;
    rep.t = tc - epsilon;
    rep.n = n;
    rep.replicas = replicas;
    rep.base_seed = base_seed;
    rep.ensemble = run_ensemble(single(rule, n, replicas, base_seed, {rep.t}, "cycle-census", threads));
    const CheckpointAggregate& agg = rep.ensemble.aggregates.front();
    rep.mean = agg.unicyclic.mean();
    rep.variance = agg.unicyclic.variance();
    rep.variance_over_mean = rep.variance / rep.mean;
    rep.mu = mu_epsilon(epsilon, rule);
    rep.mu_simple = mu_epsilon_simple_graph(epsilon, rule);
    rep.mean_rel_error = std::abs(rep.mean - rep.mu) / rep.mu;
    rep.acyclic_fraction = static_cast<double>(agg.acyclic_runs) / replicas;
    rep.acyclic_expected = std::exp(-rep.mu);
    rep.acyclic_std_error = std::sqrt(rep.acyclic_expected * (1.0 - rep.acyclic_expected) / replicas);
    rep.acyclic_z = z_score(rep.acyclic_fraction, rep.acyclic_std_error, rep.acyclic_expected);
    rep.complex_total = static_cast<std::uint64_t>(agg.complex.sum);
    rep.histogram = agg.unicyclic_histogram;
    return rep;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::invalid_argument, "fit needs two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) fail(ErrorKind::invalid_argument, "fit abscissae are all equal");
    LinearFit f;
    f.points = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const double ss_res = std::max(0.0, syy - f.slope * sxy);
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    f.slope_std_error = x.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
    return f;
}

namespace {

ScalingReport size_scaling(const ScalingConfig& cfg, bool supercritical) {
    if (cfg.epsilons.empty() || cfg.n_grid.empty()) fail(ErrorKind::invalid_argument, "empty scaling grid");
    const double tc = critical_time(cfg.rule);
    ScalingReport rep;
    rep.observable = supercritical ? "c2" : "c1";
    rep.side = supercritical ? "super" : "sub";
    const auto row_for = [&](double eps, std::uint32_t n) {
        const double t = supercritical ? tc + eps : tc - eps;
        EnsembleResult e = run_ensemble(single(cfg.rule, n, cfg.replicas, cfg.base_seed, {t},
                                                supercritical ? "c2-scaling" : "c1-scaling", cfg.threads));
        const CheckpointAggregate& a = e.aggregates.front();
        const MomentSum& obs = supercritical ? a.c2 : a.c1;
        ScalingRow row;
        row.n = n;
        row.epsilon = eps;
        row.t = t;
        row.mean = obs.mean();
        row.std_error = obs.std_error();
        row.c1_fraction = a.c1.mean(1.0 / n);
        row.complex_total = static_cast<std::uint64_t>(a.complex.sum);
        row.complex_outside_largest = static_cast<std::uint64_t>(a.complex_outside_largest.sum);
        row.unresolved_runs = a.unresolved_runs;
        rep.rows.push_back(row);
        rep.ensembles.push_back(std::move(e));
        return row;
    };
    std::vector<double> log_n, by_n;
    for (std::uint32_t n : cfg.n_grid) {
        const ScalingRow r = row_for(cfg.epsilons.front(), n);
        log_n.push_back(std::log(static_cast<double>(n)));
        by_n.push_back(r.mean);
    }
    if (log_n.size() >= 2) rep.fit_log_n = least_squares(log_n, by_n);
    const std::uint32_t n_big = *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());
    std::vector<double> inv_e2{1.0 / (cfg.epsilons.front() * cfg.epsilons.front())}, by_eps{by_n.back()};
    if (cfg.n_grid.back() != n_big) by_eps.front() = row_for(cfg.epsilons.front(), n_big).mean;
    for (std::size_t k = 1; k < cfg.epsilons.size(); ++k) {
        const ScalingRow r = row_for(cfg.epsilons[k], n_big);
        inv_e2.push_back(1.0 / (cfg.epsilons[k] * cfg.epsilons[k]));
        by_eps.push_back(r.mean);
    }
    if (inv_e2.size() >= 2) rep.fit_inv_eps2 = least_squares(inv_e2, by_eps);
    for (std::size_t a = 0; a < cfg.epsilons.size(); ++a)
        for (std::size_t b = 0; b < cfg.epsilons.size(); ++b)
            if (std::abs(cfg.epsilons[b] - 0.5 * cfg.epsilons[a]) < 1e-12) rep.halving_ratios.push_back(by_eps[b] / by_eps[a]);
    return rep;
}

} // namespace

ScalingReport c1_scaling(const ScalingConfig& config) { return size_scaling(config, false); }
ScalingReport c2_scaling(const ScalingConfig& config) { return size_scaling(config, true); }

GrowthReport giant_growth(const ProcessRule& rule, const std::vector<double>& epsilons, std::uint32_t n,
                          int replicas, std::uint64_t base_seed, int threads) {
    if (epsilons.size() < 2) fail(ErrorKind::invalid_argument, "growth fit needs two or more epsilons");
    for (double e : epsilons)
        if (!(e > 0.0 && e <= 0.3)) fail(ErrorKind::invalid_argument, "epsilon grid must lie in (0, 0.3]");
    const double tc = critical_time(rule);
    GrowthReport rep;
    rep.rule = rule.name();
    rep.n = n;
    rep.replicas = replicas;
    std::vector<double> checkpoints;
    for (double e : epsilons) checkpoints.push_back(tc + e);
    std::vector<std::size_t> order(epsilons.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return checkpoints[a] < checkpoints[b]; });
    std::vector<double> sorted;
    for (auto i : order) sorted.push_back(checkpoints[i]);

    // per-run values are needed to drop unresolved runs, so replicas are run here directly
    EnsembleConfig cfg = single(rule, n, replicas, base_seed, sorted, "giant-growth", threads);
    cfg.validate();
    std::vector<std::vector<CheckpointSample>> runs(replicas);
    {
        ThreadScope scope(threads);
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
        for (int r = 0; r < replicas; ++r) {
            try {
                runs[r] = run_replica(rule, n, replica_seed(base_seed, cfg.campaign, n, r), sorted, 1, 1);
            } catch (...) {
#pragma omp critical
                error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
    }
    for (std::size_t c = 0; c < sorted.size(); ++c) {
        MomentSum used;
        GrowthRow row;
        row.epsilon = epsilons[order[c]];
        for (int r = 0; r < replicas; ++r) {
            const auto& s = runs[r][c];
            if (2 * s.c2 > s.c1) ++row.unresolved_runs;
            else used.add(s.c1);
        }
        row.used_runs = static_cast<int>(used.count);
        row.mean_fraction = used.mean(1.0 / n);
        row.std_error = used.count >= 2 ? used.std_error(1.0 / n) : std::numeric_limits<double>::quiet_NaN();
        rep.rows.push_back(row);
    }
    std::sort(rep.rows.begin(), rep.rows.end(), [](const GrowthRow& a, const GrowthRow& b) { return a.epsilon < b.epsilon; });

    // least squares without intercept on one or two basis functions
    double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0, s33 = 0, s13 = 0, b3 = 0;
    for (const auto& r : rep.rows) {
        if (r.used_runs == 0) continue;
        const double e = r.epsilon, y = r.mean_fraction, e2 = e * e, e43 = std::pow(e, 4.0 / 3.0);
        s11 += e * e;
        s12 += e * e2;
        s22 += e2 * e2;
        b1 += e * y;
        b2 += e2 * y;
        s33 += e43 * e43;
        s13 += e * e43;
        b3 += e43 * y;
    }
    rep.gamma_origin = b1 / s11;
    const double det2 = s11 * s22 - s12 * s12;
    rep.gamma_quadratic = (b1 * s22 - b2 * s12) / det2;
    rep.kappa_quadratic = (s11 * b2 - s12 * b1) / det2;
    const double det3 = s11 * s33 - s13 * s13;
    rep.gamma_four_thirds = (b1 * s33 - b3 * s13) / det3;
    rep.k_four_thirds = -(s11 * b3 - s13 * b1) / det3;
    for (const auto& r : rep.rows) rep.residuals_origin.push_back(r.mean_fraction - rep.gamma_origin * r.epsilon);
    rep.gamma_hat = rep.gamma_quadratic;
    rep.records = replica_records(base_seed, cfg.campaign, {n}, replicas);
    return rep;
}

std::vector<CriticalGiantRow> critical_giant(const ProcessRule& rule, const std::vector<std::uint32_t>& n_grid,
                                             int replicas, std::uint64_t base_seed, int threads) {
    const double tc = critical_time(rule);
    std::vector<CriticalGiantRow> out;
    for (std::uint32_t n : n_grid) {
        const EnsembleResult e = run_ensemble(single(rule, n, replicas, base_seed, {tc}, "critical-giant", threads));
        const auto& a = e.aggregates.front();
        out.push_back({n, a.c1.mean(1.0 / n), a.c1.std_error(1.0 / n)});
    }
    return out;
}

} // namespace bfgraph
