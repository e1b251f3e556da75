#include "bfgraph/error.hpp"
#include "bfgraph/ode_engine.hpp"
#include "bfgraph/singularity.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bfgraph;

namespace {

const ProcessRule bf = ProcessRule::bohman_frieze();
const ProcessRule er = ProcessRule::erdos_renyi();

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::io;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("constant characteristic") {
    for (const auto& rule : {bf, er})
        for (double t : {0.5, 1.0, 2.0}) {
            const auto r = characteristic_flow(1.0, t, rule);
            CHECK(std::abs(r.state.z - 1.0) < 1e-10);
            CHECK(std::abs(r.state.y - 1.0) < 1e-10);
        }
    const CriticalPoint cp = find_tc(bf, 1e-10);
    const auto r = characteristic_flow(1.0, cp.t_c, bf);
    CHECK(std::isfinite(r.acc.log_u));
    CHECK(std::isfinite(r.acc.v));
    CHECK(std::isfinite(r.acc.q));
    CHECK(r.acc.beta > 0.0);
}

TEST_CASE("Erdos-Renyi characteristic closed form") {
    const auto r = characteristic_flow(0.8, 0.5, er);
    CHECK(rel(r.state.z, 0.8 * std::exp(0.1)) < 1e-12);
    CHECK(r.state.y == 0.8);
    CHECK(r.state.y_s == 1.0);
    CHECK(r.state.y_ss == 0.0);
    CHECK(rel(r.state.x1, std::exp(-0.5)) < 1e-12);
}

TEST_CASE("sensitivities match finite differences") {
    const double h = 1e-5;
    for (const auto& rule : {bf, er})
        for (double y0 : {0.7, 1.3, 2.0}) {
            const double t = 1.1;
            const auto c = characteristic_flow(y0, t, rule);
            const auto p = characteristic_flow(y0 + h, t, rule), m = characteristic_flow(y0 - h, t, rule);
            CHECK(rel(c.state.z_s, (p.state.z - m.state.z) / (2 * h)) < 1e-4);
            CHECK(std::abs(c.state.y_s - (p.state.y - m.state.y) / (2 * h)) < 1e-4 * std::max(1.0, std::abs(c.state.y_s)));
            CHECK(rel(c.state.z_ss, (p.state.z_s - m.state.z_s) / (2 * h)) < 1e-4);
            // a second difference of z needs a wider spacing to stay above integrator noise
            const double H = 1e-3;
            const auto P = characteristic_flow(y0 + H, t, rule), M = characteristic_flow(y0 - H, t, rule);
            CHECK(rel(c.state.z_ss, (P.state.z - 2 * c.state.z + M.state.z) / (H * H)) < 1e-4);
        }
}

TEST_CASE("Erdos-Renyi singular locus matches the closed forms") {
    for (double t : {0.5, 0.8, 1.0, 1.2}) {
        const SingularLocus L = find_singular_point(t, er);
        CHECK(rel(L.rho, std::exp(t - 1.0) / t) < 1e-6);
        CHECK(rel(L.tau, 1.0 / t) < 1e-6);
        CHECK(rel(L.c, std::sqrt(2.0) / t) < 1e-6);
        CHECK(rel(L.amplitude_quadrature, L.amplitude) < 1e-6);
        CHECK(L.gamma * L.rho == 1.0);
    }
    const SingularLocus half = find_singular_point(0.5, er);
    CHECK(half.tau == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(half.rho == doctest::Approx(1.21306).epsilon(1e-5));
}

TEST_CASE("Erdos-Renyi coefficient asymptotics from the locus") {
    const double t = 1.1;
    const SingularLocus L = find_singular_point(t, er);
    const double i = 1e4;
    const double predicted = L.c / (2.0 * std::sqrt(std::numbers::pi)) * std::pow(i, -1.5) * std::pow(L.rho, -i);
    CHECK(rel(er_exact_xi(t, 10000), predicted) < 0.01);
}

TEST_CASE("Erdos-Renyi curvature of the singularity at t = 1") {
    const RhoDerivatives d = rho_derivatives(1.0, er);
    CHECK(std::abs(d.d1) < 1e-4);
    CHECK(std::abs(d.d2 - 1.0) < 1e-2);
    CHECK(std::abs(d.d2 - d.d2_half) < 1e-3);
    CHECK(rho_pp_closed_form(1.0, er) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Bohman-Frieze singularity at the critical point") {
    const double tc = find_tc(bf, 1e-12).t_c;
    const SingularLocus L = find_singular_point(tc, bf);
    CHECK(std::abs(L.rho - 1.0) < 1e-4);
    CHECK(std::abs(L.tau - 1.0) < 1e-4);
    CHECK(L.amplitude > 0.0);
    const RhoDerivatives d = rho_derivatives(tc, bf);
    CHECK(std::abs(d.d1) < 1e-3);
    CHECK(d.d2 > 0.0);
    CHECK(std::abs(d.d2 - d.d2_half) < 1e-3 * d.d2);
}

TEST_CASE("rho curve on a uniform grid") {
    std::vector<double> grid;
    for (int k = -3; k <= 3; ++k) grid.push_back(1.0 + 0.01 * k);
    const RhoCurve c = rho_curve(grid, er);
    REQUIRE(c.loci.size() == grid.size());
    CHECK(std::isnan(c.rho_d1.front()));
    CHECK(std::abs(c.rho_d1[3]) < 1e-4);
    CHECK(c.rho_d2[3] == doctest::Approx(1.0).epsilon(1e-3));
    for (const auto& L : c.loci) CHECK(L.gamma * L.rho == 1.0);
}

TEST_CASE("asymptotic coefficients") {
    const AsymptoticCoeffs sup = asymptotic_coeffs(0.1, Side::supercritical, er);
    CHECK(sup.D > 0.45);
    CHECK(sup.D < 0.55);
    CHECK(sup.C > 0.36);
    CHECK(sup.C < 0.44);
    const double tc = find_tc(bf, 1e-12).t_c;
    double prev = 0.0, prev_diff = 0.0;
    int k = 0;
    for (double eps : {0.2, 0.1, 0.05}) {
        const AsymptoticCoeffs c = asymptotic_coeffs(eps, Side::subcritical, bf, tc);
        CHECK(c.C > 0.0);
        CHECK(c.D > 0.0);
        if (k >= 1) {
            const double diff = std::abs(c.D - prev);
            if (k == 2) CHECK(diff < 0.75 * prev_diff);
            prev_diff = diff;
        }
        prev = c.D;
        ++k;
    }
    CHECK(kind_of([] { asymptotic_coeffs(0.0, Side::subcritical, er); }) == ErrorKind::invalid_argument);
}

TEST_CASE("profile fit reproduces the singularity decay rate") {
    SUBCASE("Erdos-Renyi subcritical") {
        const AsymptoticCoeffs c = asymptotic_coeffs(0.1, Side::subcritical, er);
        OdeConfig cfg;
        cfg.i_max = required_i_max(c);
        cfg.abs_tol = 1e-30;
        const FitReport r = verify_against_profile(integrate_profile(er, c.t, cfg).back(), c);
        CHECK(r.slope_rel_error < 0.01);
        CHECK(r.points >= 16);
    }
    SUBCASE("Bohman-Frieze subcritical") {
        const AsymptoticCoeffs c = asymptotic_coeffs(0.2, Side::subcritical, bf);
        OdeConfig cfg;
        cfg.i_max = required_i_max(c);
        cfg.abs_tol = 1e-30;
        const FitReport r = verify_against_profile(integrate_profile(bf, c.t, cfg).back(), c);
        CHECK(r.slope_rel_error < 0.01);
        CHECK(r.intercept_abs_error < 0.05);
    }
    SUBCASE("degenerate profile") {
        AsymptoticCoeffs c = asymptotic_coeffs(0.1, Side::subcritical, er);
        SmallCompProfile p;
        p.x.assign(required_i_max(c), 0.0);
        p.x[0] = 1.0;
        CHECK(kind_of([&] { verify_against_profile(p, c); }) == ErrorKind::insufficient_range);
        p.x.resize(100);
        CHECK(kind_of([&] { verify_against_profile(p, c); }) == ErrorKind::insufficient_range);
    }
}

TEST_CASE("unsupported rules and bad inputs") {
    CHECK(kind_of([] { find_singular_point(1.0, ProcessRule::bounded_size(2)); }) == ErrorKind::unsupported_rule);
    CHECK(kind_of([] { characteristic_flow(-1.0, 1.0, er); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { find_singular_point(1.0, er, characteristic_defaults(), SingularSearch{2.0, 4.0, 16}); }) ==
          ErrorKind::no_singularity);
    CHECK(parse_side("super") == Side::supercritical);
    CHECK(kind_of([] { parse_side("x"); }) == ErrorKind::invalid_argument);
}
