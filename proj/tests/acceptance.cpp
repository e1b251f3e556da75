#include "bfgraph/cli.hpp"
#include "bfgraph/experiments.hpp"
#include "bfgraph/ode_engine.hpp"
#include "bfgraph/singularity.hpp"
#include "oracles.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace bfgraph;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string num(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<void(Verdict&)>& body) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(secs < budget_s, "runtime " + num(secs, 3) + " s < " + num(budget_s, 3) + " s");
    if (!v.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
}

const ProcessRule bf = ProcessRule::bohman_frieze();
const ProcessRule er = ProcessRule::erdos_renyi();
const std::vector<std::uint32_t> n_grid{10000, 30000, 100000, 300000, 1000000};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

int main() {
    const double tc_bf = find_tc(bf, 1e-12).t_c;

    criterion(1, "ER density ODE vs exact formula", 10.0, [](Verdict& v) {
        OdeConfig cfg;
        cfg.i_max = 64;
        cfg.abs_tol = 1e-30;
        cfg.checkpoints = {0.3, 0.6};
        double worst = 0.0;
        for (const auto& p : integrate_profile(er, 0.9, cfg))
            for (int i = 1; i <= 50; ++i) worst = std::max(worst, rel(p.x[i - 1], er_exact_xi(p.t, i)));
        v.require(worst <= 1e-6, "max rel error " + num(worst, 3) + " <= 1e-6 over t in {0.3,0.6,0.9}, i <= 50");
    });

    criterion(2, "critical points", 5.0, [](Verdict& v) {
        const CriticalPoint e = find_tc(er, 1e-7);
        v.require(std::abs(e.t_c - 1.0) <= 1e-6, "t_c(er) = " + num(e.t_c, 12));
        const CriticalPoint b = find_tc(bf, 1e-7);
        v.require(b.t_c >= 1.17 && b.t_c <= 1.18, "t_c(bf) = " + num(b.t_c, 12) + " in [1.17, 1.18]");
        v.require(b.bracket_width <= 1e-6, "bracket " + num(b.bracket_width, 3) + " <= 1e-6");
        IntegratorOptions half;
        half.rel_tol = 0.5e-10;
        half.abs_tol = 0.5e-12;
        const double shift = std::abs(find_tc(bf, 1e-7, half).t_c - b.t_c);
        v.require(shift <= 1e-4, "tolerance-halving shift " + num(shift, 3) + " <= 1e-4");
    });

    criterion(3, "ER singularity oracle", 30.0, [](Verdict& v) {
        double worst = 0.0;
        for (double t : {0.5, 0.8, 1.0, 1.2}) {
            const SingularLocus L = find_singular_point(t, er);
            worst = std::max({worst, rel(L.rho, std::exp(t - 1.0) / t), rel(L.tau, 1.0 / t), rel(L.c, std::sqrt(2.0) / t)});
        }
        v.require(worst <= 1e-6, "max rel error of rho, tau, c " + num(worst, 3) + " <= 1e-6");
        const RhoDerivatives d = rho_derivatives(1.0, er);
        v.require(std::abs(d.d1) <= 1e-4, "rho'(1) = " + num(d.d1, 3));
        v.require(std::abs(d.d2 - 1.0) <= 1e-2, "rho''(1) = " + num(d.d2, 8));
    });

    criterion(4, "BF singularity structure", 120.0, [&](Verdict& v) {
        const RhoDerivatives d = rho_derivatives(tc_bf, bf);
        v.require(std::abs(d.d1) <= 1e-3, "rho'(t_c) = " + num(d.d1, 3));
        v.require(d.d2 > 0.0, "rho''(t_c) = " + num(d.d2, 6) + " > 0 (h/2: " + num(d.d2_half, 6) +
                                  ", closed form " + num(rho_pp_closed_form(tc_bf, bf), 6) + ")");
        v.require(std::abs(d.rho - 1.0) <= 1e-4 && std::abs(d.tau - 1.0) <= 1e-4,
                  "rho(t_c) = " + num(d.rho, 10) + ", tau(t_c) = " + num(d.tau, 10));
        bool positive = true;
        double worst = 0.0, worst_t = 0.0;
        for (int k = -4; k <= 4; ++k) {
            const SingularLocus L = find_singular_point(tc_bf + 0.05 * k, bf);
            positive = positive && L.amplitude > 0.0 && L.amplitude_quadrature > 0.0;
            const double diff = rel(L.amplitude_quadrature, L.amplitude);
            if (diff > worst) {
                worst = diff;
                worst_t = L.t;
            }
        }
        v.require(positive, "amplitudes positive on t_c + 0.05k, |k| <= 4");
        v.require(worst <= 1e-4, "parametric vs quadrature amplitude max rel diff " + num(worst, 4) + " at t = " +
                                     num(worst_t, 6) + " <= 1e-4");
    });

    criterion(5, "coefficient asymptotics vs ODE profile", 300.0, [&](Verdict& v) {
        for (double eps : {0.2, 0.1, 0.05}) {
            const AsymptoticCoeffs c = asymptotic_coeffs(eps, Side::subcritical, bf, tc_bf);
            OdeConfig cfg;
            cfg.i_max = required_i_max(c);
            cfg.abs_tol = 1e-30;
            const FitReport r = verify_against_profile(integrate_profile(bf, c.t, cfg).back(), c);
            v.require(r.slope_rel_error <= 0.01, "bf eps " + num(eps, 3) + ": fitted slope " + num(r.fitted_slope, 8) +
                                                     " vs " + num(r.expected_slope, 8) + " rel " + num(r.slope_rel_error, 3));
        }
        const AsymptoticCoeffs c = asymptotic_coeffs(0.1, Side::supercritical, er);
        OdeConfig cfg;
        cfg.i_max = required_i_max(c);
        cfg.abs_tol = 1e-30;
        cfg.assert_conservation = false;
        const FitReport r = verify_against_profile(integrate_profile(er, c.t, cfg).back(), c);
        v.require(r.fitted_D >= 0.45 && r.fitted_D <= 0.55, "er eps 0.1 super: fitted D " + num(r.fitted_D, 6));
    });

    criterion(6, "concentration of small-component densities", 180.0, [](Verdict& v) {
        EnsembleConfig e;
        e.rule = bf;
        e.n_list = {100000};
        e.replicas = 50;
        e.base_seed = 2011;
        e.checkpoints = {1.0};
        e.campaign = "acceptance-concentration";
        const ConcentrationReport r = concentration_experiment(e);
        double worst_x = 0.0, s1_z = 0.0;
        for (const auto& row : r.rows) {
            if (row.observable == "x_i") worst_x = std::max(worst_x, std::abs(row.z));
            else s1_z = row.z;
        }
        v.require(worst_x <= 3.0, "max |z| over x_1..x_10 = " + num(worst_x, 3));
        v.require(std::abs(s1_z) <= 3.0, "S_1 z = " + num(s1_z, 3));
    });

    criterion(7, "cycle counts below the critical point", 900.0, [](Verdict& v) {
        const CycleReport r = cycle_census(bf, 0.2, 100000, 400, 2012);
        v.require(r.mean_rel_error <= 0.1, "mean " + num(r.mean, 4) + " vs mu " + num(r.mu, 6) + " (simple-graph mu " +
                                               num(r.mu_simple, 6) + ")");
        v.require(r.variance_over_mean >= 0.8 && r.variance_over_mean <= 1.2,
                  "variance/mean " + num(r.variance_over_mean, 4));
        v.require(std::abs(r.acyclic_z) <= 3.0, "acyclic fraction " + num(r.acyclic_fraction, 4) + " vs e^-mu " +
                                                    num(r.acyclic_expected, 4) + " (z " + num(r.acyclic_z, 3) + ")");
        v.require(r.complex_total == 0, "complex components " + std::to_string(r.complex_total));
    });

    criterion(8, "second component above the critical point", 1800.0, [](Verdict& v) {
        ScalingConfig s;
        s.rule = bf;
        s.epsilons = {0.2};
        s.n_grid = n_grid;
        s.replicas = 20;
        s.base_seed = 2013;
        const ScalingReport r = c2_scaling(s);
        std::uint64_t outside = 0;
        for (const auto& row : r.rows) outside += row.complex_outside_largest;
        v.require(r.fit_log_n.r_squared >= 0.9, "|C2| vs ln n R^2 " + num(r.fit_log_n.r_squared, 4) + ", slope " +
                                                    num(r.fit_log_n.slope, 4));
        v.require(outside == 0, "complex components outside C1 " + std::to_string(outside));
    });

    criterion(9, "largest component below the critical point", 1800.0, [](Verdict& v) {
        ScalingConfig s;
        s.rule = bf;
        s.epsilons = {0.2, 0.1};
        s.n_grid = n_grid;
        s.replicas = 20;
        s.base_seed = 2014;
        const ScalingReport r = c1_scaling(s);
        std::uint64_t complex = 0;
        for (const auto& row : r.rows) complex += row.complex_total;
        v.require(r.fit_log_n.r_squared >= 0.9, "|C1| vs ln n R^2 " + num(r.fit_log_n.r_squared, 4));
        const double ratio = r.halving_ratios.empty() ? 0.0 : r.halving_ratios.front();
        v.require(ratio >= 2.5 && ratio <= 6.0, "ratio mean|C1|(0.1)/mean|C1|(0.2) at n=1e6 " + num(ratio, 4));
        v.require(complex == 0, "complex components " + std::to_string(complex));
    });

    criterion(10, "giant growth rate", 1200.0, [](Verdict& v) {
        const std::vector<double> grid{0.05, 0.1, 0.15, 0.2};
        const GrowthReport b = giant_growth(bf, grid, 1000000, 20, 2015);
        const GrowthReport e = giant_growth(er, grid, 1000000, 20, 2016);
        v.require(b.gamma_hat >= 2.1 && b.gamma_hat <= 2.8,
                  "bf gamma " + num(b.gamma_hat, 4) + " (through-origin " + num(b.gamma_origin, 4) + ")");
        v.require(e.gamma_hat >= 1.8 && e.gamma_hat <= 2.2,
                  "er gamma " + num(e.gamma_hat, 4) + " (through-origin " + num(e.gamma_origin, 4) + ")");
    });

    criterion(11, "engineering", 60.0, [](Verdict& v) {
        omp_set_num_threads(1);
        const auto start = std::chrono::steady_clock::now();
        ProcessState p(1000000, bf, 2017);
        p.run_until(1.3);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        v.require(secs < 5.0, "n=1e6 bf to t=1.3 in " + num(secs, 3) + " s");
        cli::RunConfig c;
        c.command = "simulate";
        c.rule = "er";
        c.n = 1000;
        c.t = 0.5;
        c.checkpoints = {0.25, 0.5};
        c.seed = 42;
        c.threads = 1;
        const bool same = cli::execute(c).body == cli::execute(c).body;
        v.require(same, "repeated seeded runs byte-identical");
        const oracles::ChiSquare chi = oracles::er_six_vertices_three_edges(100000, 2018);
        v.require(chi.support_ok && chi.p_value > 1e-3, "n=6 m=3 chi^2 " + num(chi.statistic, 4) + " on " +
                                                            num(chi.dof, 2) + " dof, p = " + num(chi.p_value, 3));
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
