#include "bfgraph/serialization.hpp"

#include <charconv>
#include <cmath>

namespace bfgraph {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

double u128(unsigned __int128 v) { return static_cast<double>(v); }

std::string joined(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    return s;
}

std::string f(double v) { return format_double(v); }
std::string f(std::uint64_t v) { return std::to_string(v); }

} // namespace

void to_json(json& j, const Census& c) {
    j = json{{"trees", c.trees},
             {"unicyclic", c.unicyclic},
             {"complex", c.complex},
             {"complex_outside_largest", c.complex_outside_largest},
             {"largest", c.largest},
             {"second_largest", c.second_largest},
             {"unicyclic_sizes", c.unicyclic_sizes}};
}

void to_json(json& j, const GraphStats& s) {
    j = json{{"t", s.t},   {"m", s.m},   {"n", s.n},   {"c1", s.c1},           {"c2", s.c2},
             {"s_k", s.s_k}, {"restrict_L", s.restrict_L}, {"s_L", s.s_L}, {"x_fraction", s.x_fraction},
             {"census", s.census}};
}

void to_json(json& j, const SmallCompProfile& p) {
    j = json{{"t", p.t}, {"i_max", p.i_max()}, {"tail_mass", p.tail_mass}, {"x", p.x}};
}

void to_json(json& j, const CriticalPoint& c) {
    j = json{{"rule", c.rule.name()}, {"t_c", c.t_c}, {"bracket_width", c.bracket_width}, {"x1_at_tc", c.x1_at_tc}};
}

void to_json(json& j, const SingularLocus& l) {
    j = json{{"t", l.t},
             {"rho", l.rho},
             {"tau", l.tau},
             {"amplitude", l.amplitude},
             {"amplitude_quadrature", l.amplitude_quadrature},
             {"gamma", l.gamma},
             {"c", l.c},
             {"y0_star", l.y0_star},
             {"z_ss", l.z_ss},
             {"y_s", l.y_s},
             {"beta", l.acc.beta},
             {"log_u", l.acc.log_u},
             {"v", l.acc.v},
             {"q", l.acc.q}};
}

void to_json(json& j, const AsymptoticCoeffs& c) {
    j = json{{"epsilon", c.epsilon}, {"side", to_string(c.side)}, {"t", c.t}, {"C", c.C}, {"D", c.D}, {"locus", c.locus}};
}

void to_json(json& j, const FitReport& r) {
    j = json{{"epsilon", r.epsilon},
             {"side", to_string(r.side)},
             {"i_lo", r.i_lo},
             {"i_hi", r.i_hi},
             {"points", r.points},
             {"i_max_required", r.i_max_required},
             {"fitted_slope", r.fitted_slope},
             {"fitted_intercept", r.fitted_intercept},
             {"expected_slope", r.expected_slope},
             {"expected_intercept", r.expected_intercept},
             {"slope_rel_error", r.slope_rel_error},
             {"intercept_abs_error", r.intercept_abs_error},
             {"fitted_D", r.fitted_D},
             {"coeffs", r.coeffs}};
}

void to_json(json& j, const MomentSum& m) {
    j = json{{"count", m.count}, {"sum", u128(m.sum)}, {"mean", m.mean()}, {"variance", m.variance()},
             {"std_error", m.std_error()}};
}

void to_json(json& j, const CheckpointAggregate& a) {
    const double inv_n = 1.0 / a.n;
    json x = json::array();
    for (std::size_t i = 0; i < a.x_counts.size(); ++i)
        x.push_back({{"i", i + 1}, {"mean", a.x_counts[i].mean(inv_n)}, {"std_error", a.x_counts[i].std_error(inv_n)}});
    j = json{{"n", a.n},
             {"t", a.t},
             {"m", a.m},
             {"replicas", a.c1.count},
             {"x_fraction", x},
             {"S_1", {{"mean", a.sum_squares.mean(inv_n)}, {"std_error", a.sum_squares.std_error(inv_n)}}},
             {"S_L", {{"mean", a.restricted_sum.mean(inv_n)}, {"std_error", a.restricted_sum.std_error(inv_n)}}},
             {"c1", a.c1},
             {"c1_fraction", {{"mean", a.c1.mean(inv_n)}, {"std_error", a.c1.std_error(inv_n)}}},
             {"c2", a.c2},
             {"trees", a.trees},
             {"unicyclic", a.unicyclic},
             {"complex", a.complex},
             {"complex_outside_largest", a.complex_outside_largest},
             {"unicyclic_histogram", a.unicyclic_histogram},
             {"acyclic_runs", a.acyclic_runs},
             {"unresolved_runs", a.unresolved_runs},
             {"invariant_violations", a.invariant_violations}};
}

void to_json(json& j, const ReplicaRecord& r) { j = json{{"n", r.n}, {"replica", r.replica}, {"seed", r.seed}}; }

void to_json(json& j, const EnsembleResult& e) {
    j = json{{"rule", e.config.rule.name()},
             {"replicas", e.config.replicas},
             {"base_seed", e.config.base_seed},
             {"campaign", e.config.campaign},
             {"n_list", e.config.n_list},
             {"checkpoints", e.config.checkpoints},
             {"records", e.records},
             {"aggregates", e.aggregates}};
}

void to_json(json& j, const ConcentrationRow& r) {
    j = json{{"n", r.n},       {"t", r.t},     {"observable", r.observable}, {"i", r.i}, {"mean", r.mean},
             {"std_error", r.std_error}, {"expected", r.expected}, {"z", r.z}};
}

void to_json(json& j, const ConcentrationReport& r) {
    j = json{{"max_abs_z", r.max_abs_z}, {"rows", r.rows}, {"ensemble", r.ensemble}};
}

void to_json(json& j, const CycleReport& r) {
    j = json{{"rule", r.rule},
             {"epsilon", r.epsilon},
             {"t", r.t},
             {"n", r.n},
             {"replicas", r.replicas},
             {"base_seed", r.base_seed},
             {"mean", r.mean},
             {"variance", r.variance},
             {"variance_over_mean", r.variance_over_mean},
             {"mu", r.mu},
             {"mu_simple", r.mu_simple},
             {"mean_rel_error", r.mean_rel_error},
             {"acyclic_fraction", r.acyclic_fraction},
             {"acyclic_expected", r.acyclic_expected},
             {"acyclic_std_error", r.acyclic_std_error},
             {"acyclic_z", r.acyclic_z},
             {"complex_total", r.complex_total},
             {"histogram", r.histogram},
             {"ensemble", r.ensemble}};
}

void to_json(json& j, const LinearFit& f) {
    j = json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared},
             {"slope_std_error", f.slope_std_error}, {"points", f.points}};
}

void to_json(json& j, const ScalingRow& r) {
    j = json{{"n", r.n},
             {"epsilon", r.epsilon},
             {"t", r.t},
             {"mean", r.mean},
             {"std_error", r.std_error},
             {"c1_fraction", r.c1_fraction},
             {"complex_total", r.complex_total},
             {"complex_outside_largest", r.complex_outside_largest},
             {"unresolved_runs", r.unresolved_runs}};
}

void to_json(json& j, const ScalingReport& r) {
    j = json{{"observable", r.observable}, {"side", r.side},         {"rows", r.rows},
             {"fit_log_n", r.fit_log_n},   {"fit_inv_eps2", r.fit_inv_eps2}, {"halving_ratios", r.halving_ratios},
             {"ensembles", r.ensembles}};
}

void to_json(json& j, const GrowthRow& r) {
    j = json{{"epsilon", r.epsilon}, {"mean_fraction", r.mean_fraction}, {"std_error", r.std_error},
             {"used_runs", r.used_runs}, {"unresolved_runs", r.unresolved_runs}};
}

void to_json(json& j, const GrowthReport& r) {
    j = json{{"rule", r.rule},
             {"n", r.n},
             {"replicas", r.replicas},
             {"rows", r.rows},
             {"gamma_hat", r.gamma_hat},
             {"gamma_origin", r.gamma_origin},
             {"gamma_quadratic", r.gamma_quadratic},
             {"kappa_quadratic", r.kappa_quadratic},
             {"gamma_four_thirds", r.gamma_four_thirds},
             {"k_four_thirds", r.k_four_thirds},
             {"residuals_origin", r.residuals_origin}};
}

void to_json(json& j, const CriticalGiantRow& r) {
    j = json{{"n", r.n}, {"mean_fraction", r.mean_fraction}, {"std_error", r.std_error}};
}

void write_csv_preamble(std::ostream& os, const json& config) {
    os << "# format_version=" << format_version << '\n';
    os << "# config=" << config.dump() << '\n';
}

void write_stats_csv(std::ostream& os, const std::vector<GraphStats>& rows) {
    std::vector<std::string> head{"t", "m", "n", "c1", "c2"};
    const std::size_t k = rows.empty() ? 0 : rows.front().s_k.size();
    const std::size_t xc = rows.empty() ? 0 : rows.front().x_fraction.size();
    for (std::size_t i = 1; i <= k; ++i) head.push_back("S_" + std::to_string(i));
    head.insert(head.end(), {"S_L", "trees", "unicyclic", "complex", "complex_outside_largest"});
    for (std::size_t i = 1; i <= xc; ++i) head.push_back("x_" + std::to_string(i));
    os << joined(head) << '\n';
    for (const auto& s : rows) {
        std::vector<std::string> c{f(s.t), f(s.m), f(s.n), f(s.c1), f(s.c2)};
        for (double v : s.s_k) c.push_back(f(v));
        c.insert(c.end(), {f(s.s_L), f(s.census.trees), f(s.census.unicyclic), f(s.census.complex),
                           f(s.census.complex_outside_largest)});
        for (double v : s.x_fraction) c.push_back(f(v));
        os << joined(c) << '\n';
    }
}

void write_profile_csv(std::ostream& os, const std::vector<SmallCompProfile>& profiles) {
    os << "t,i,x_i\n";
    for (const auto& p : profiles)
        for (std::size_t i = 0; i < p.x.size(); ++i) os << f(p.t) << ',' << (i + 1) << ',' << f(p.x[i]) << '\n';
}

void write_locus_csv(std::ostream& os, const std::vector<SingularLocus>& loci) {
    os << "t,rho,tau,amplitude,gamma,c\n";
    for (const auto& l : loci)
        os << joined({f(l.t), f(l.rho), f(l.tau), f(l.amplitude), f(l.gamma), f(l.c)}) << '\n';
}

void write_concentration_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows) {
    os << "n,t,observable,i,mean,std_error,expected,z\n";
    for (const auto& r : rows)
        os << joined({f(std::uint64_t{r.n}), f(r.t), r.observable, std::to_string(r.i), f(r.mean), f(r.std_error),
                      f(r.expected), f(r.z)})
           << '\n';
}

void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
    os << "n,epsilon,t,mean,std_error,c1_fraction,complex_total,complex_outside_largest,unresolved_runs\n";
    for (const auto& r : rows)
        os << joined({f(std::uint64_t{r.n}), f(r.epsilon), f(r.t), f(r.mean), f(r.std_error), f(r.c1_fraction),
                      f(r.complex_total), f(r.complex_outside_largest), f(r.unresolved_runs)})
           << '\n';
}

void write_growth_csv(std::ostream& os, const std::vector<GrowthRow>& rows) {
    os << "epsilon,mean_fraction,std_error,used_runs,unresolved_runs\n";
    for (const auto& r : rows)
        os << joined({f(r.epsilon), f(r.mean_fraction), f(r.std_error), std::to_string(r.used_runs),
                      f(r.unresolved_runs)})
           << '\n';
}

} // namespace bfgraph
