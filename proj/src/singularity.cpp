#include "bfgraph/singularity.hpp"

#include "bfgraph/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace bfgraph {
namespace {

enum Idx { Z, Y, ZS, YS, ZSS, YSS, X1, BETA, LOGU, V, Q, DIM };

void require_supported(const ProcessRule& rule) {
    if (rule.kind() == RuleKind::erdos_renyi) return;
    if (rule.is_bohman_frieze_equivalent()) return;
    fail(ErrorKind::unsupported_rule, "singularity analysis supports er and bf only, got " + rule.name());
}

void char_rhs(bool er, std::span<const double> s, std::span<double> d) {
    const double x1 = s[X1];
    const double a = er ? 1.0 : 1.0 - x1 * x1;
    const double b = er ? 0.0 : x1 * x1;
    const double z = s[Z], y = s[Y], zs = s[ZS], ys = s[YS], zss = s[ZSS], yss = s[YSS];
    d[Z] = -a * z * (y - 1.0);
    d[Y] = b * z * (z - 1.0);
    d[ZS] = -a * (zs * (y - 1.0) + z * ys);
    d[YS] = b * (2.0 * z - 1.0) * zs;
    d[ZSS] = -a * (zss * (y - 1.0) + 2.0 * zs * ys + z * yss);
    d[YSS] = b * (2.0 * zs * zs + (2.0 * z - 1.0) * zss);
    d[X1] = er ? -x1 : -x1 - x1 * x1 + x1 * x1 * x1;
    d[BETA] = a;
    d[LOGU] = a * (y - 1.0);
    d[V] = b * z * (z - 1.0);
    d[Q] = b * (2.0 * z - 1.0);
}

double fold_amplitude(const CharState& s) { return std::abs(s.y_s) * std::sqrt(2.0 * s.z / std::abs(s.z_ss)); }

} // namespace

IntegratorOptions characteristic_defaults() {
    IntegratorOptions o;
    o.rel_tol = 1e-13;
    o.abs_tol = 1e-15;
    o.h_max = 0.05;
    return o;
}

CharacteristicResult characteristic_flow(double y0, double t, const ProcessRule& rule, const IntegratorOptions& opts) {
    require_supported(rule);
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::invalid_argument, "time must be finite and >= 0");
    if (!(y0 > 0.0) || !std::isfinite(y0)) fail(ErrorKind::invalid_argument, "y0 must be positive");
    const bool er = rule.kind() == RuleKind::erdos_renyi;
    std::vector<double> s0(DIM, 0.0);
    s0[Z] = s0[Y] = y0;
    s0[ZS] = s0[YS] = 1.0;
    s0[X1] = 1.0;
    Dopri5 ode([er](double, std::span<const double> s, std::span<double> d) { char_rhs(er, s, d); }, 0.0,
               std::move(s0), opts);
    ode.advance_to(t);
    const auto s = ode.state();
    for (double v : s)
        if (!std::isfinite(v)) fail(ErrorKind::blow_up, "characteristic diverged");
    CharacteristicResult r;
    r.state = {t, s[Z], s[Y], s[ZS], s[YS], s[ZSS], s[YSS], s[X1]};
    r.acc = {s[BETA], s[LOGU], s[V], s[Q]};
    return r;
}

SingularLocus find_singular_point(double t, const ProcessRule& rule, const IntegratorOptions& opts,
                                  const SingularSearch& search) {
    require_supported(rule);
    if (!(t > 0.0)) fail(ErrorKind::invalid_argument, "singular point requires t > 0");
    const auto zs_at = [&](double y0) {
        try {
            return characteristic_flow(y0, t, rule, opts).state.z_s;
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    const int n = std::max(search.grid_points, 8);
    const double lmin = std::log(search.y0_min), lmax = std::log(search.y0_max);
    double best_lo = 0.0, best_hi = 0.0, best_dist = std::numeric_limits<double>::infinity();
    double prev_y = 0.0, prev_f = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < n; ++k) {
        const double y0 = std::exp(lmin + (lmax - lmin) * k / (n - 1));
        const double f = zs_at(y0);
        if (std::isfinite(f) && std::isfinite(prev_f) && (prev_f > 0.0) != (f > 0.0)) {
            const double dist = std::abs(0.5 * (prev_y + y0) - 1.0);
            if (dist < best_dist) {
                best_dist = dist;
                best_lo = prev_y;
                best_hi = y0;
            }
        }
        if (f == 0.0) {
            best_lo = best_hi = y0;
            best_dist = 0.0;
        }
        prev_y = y0;
        prev_f = f;
    }
    if (!std::isfinite(best_dist))
        fail(ErrorKind::no_singularity, "no fold of the characteristic map in y0 range at t=" + std::to_string(t));

    double lo = best_lo, hi = best_hi;
    double f_lo = zs_at(lo);
    while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double f = zs_at(mid);
        if (!std::isfinite(f)) fail(ErrorKind::no_singularity, "characteristic diverged inside fold bracket");
        if ((f > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    double y0 = 0.5 * (lo + hi);
    CharacteristicResult res = characteristic_flow(y0, t, rule, opts);
    for (int it = 0; it < 8; ++it) {
        const double step = res.state.z_s / res.state.z_ss;
        const double next = y0 - step;
        if (!std::isfinite(next) || next < best_lo || next > best_hi) break;
        y0 = next;
        res = characteristic_flow(y0, t, rule, opts);
        if (std::abs(step) < 1e-15 * y0) break;
    }

    SingularLocus L;
    L.t = t;
    L.y0_star = y0;
    L.rho = res.state.z;
    L.tau = res.state.y;
    L.z_ss = res.state.z_ss;
    L.y_s = res.state.y_s;
    L.acc = res.acc;
    if (!(L.rho > 0.0) || res.state.z_ss == 0.0)
        fail(ErrorKind::no_singularity, "degenerate fold at t=" + std::to_string(t));
    L.amplitude = fold_amplitude(res.state);
    const double u = std::exp(res.acc.log_u);
    const double f_z = u + res.acc.q;
    const double f_yy = res.acc.beta * res.acc.beta * L.rho * u;
    L.amplitude_quadrature = std::sqrt(2.0 * L.rho * f_z / f_yy);
    L.gamma = 1.0 / L.rho;
    L.c = L.amplitude;
    return L;
}

RhoCurve rho_curve(const std::vector<double>& t_grid, const ProcessRule& rule, const IntegratorOptions& opts) {
    RhoCurve out;
    out.loci.reserve(t_grid.size());
    for (double t : t_grid) out.loci.push_back(find_singular_point(t, rule, opts));
    const std::size_t n = t_grid.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.rho_d1.assign(n, nan);
    out.rho_d2.assign(n, nan);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double h = t_grid[i + 1] - t_grid[i];
        bool uniform = h > 0.0;
        for (std::size_t j = i - 2; j < i + 2 && uniform; ++j)
            uniform = std::abs((t_grid[j + 1] - t_grid[j]) - h) <= 1e-9 * h;
        if (!uniform) continue;
        const double m2 = out.loci[i - 2].rho, m1 = out.loci[i - 1].rho, c0 = out.loci[i].rho,
                     p1 = out.loci[i + 1].rho, p2 = out.loci[i + 2].rho;
        out.rho_d1[i] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        out.rho_d2[i] = (-m2 + 16.0 * m1 - 30.0 * c0 + 16.0 * p1 - p2) / (12.0 * h * h);
    }
    return out;
}

RhoDerivatives rho_derivatives(double t, const ProcessRule& rule, double h, const IntegratorOptions& opts) {
    if (!(h > 0.0) || !(t - 2.0 * h > 0.0)) fail(ErrorKind::invalid_argument, "stencil must stay in t > 0");
    const auto stencil = [&](double hh, double& d1, double& d2, double& rho, double& tau) {
        double r[5];
        for (int k = -2; k <= 2; ++k) {
            const SingularLocus L = find_singular_point(t + k * hh, rule, opts);
            r[k + 2] = L.rho;
            if (k == 0) {
                rho = L.rho;
                tau = L.tau;
            }
        }
        d1 = (r[0] - 8.0 * r[1] + 8.0 * r[3] - r[4]) / (12.0 * hh);
        d2 = (-r[0] + 16.0 * r[1] - 30.0 * r[2] + 16.0 * r[3] - r[4]) / (12.0 * hh * hh);
    };
    RhoDerivatives d;
    d.t = t;
    d.h = h;
    stencil(h, d.d1, d.d2, d.rho, d.tau);
    double rho2, tau2;
    stencil(0.5 * h, d.d1_half, d.d2_half, rho2, tau2);
    return d;
}

double rho_pp_closed_form(double t_c, const ProcessRule& rule, const IntegratorOptions& opts) {
    const CharacteristicResult r = characteristic_flow(1.0, t_c, rule, opts);
    const bool er = rule.kind() == RuleKind::erdos_renyi;
    const double x1 = r.state.x1;
    const double a = er ? 1.0 : 1.0 - x1 * x1;
    return a * a / ((1.0 + r.acc.q) * r.acc.beta * r.acc.beta);
}

std::string to_string(Side s) { return s == Side::subcritical ? "sub" : "super"; }

Side parse_side(const std::string& s) {
    if (s == "sub" || s == "subcritical") return Side::subcritical;
    if (s == "super" || s == "supercritical") return Side::supercritical;
    fail(ErrorKind::invalid_argument, "side must be sub or super, got '" + s + "'");
}

AsymptoticCoeffs asymptotic_coeffs(double epsilon, Side side, const ProcessRule& rule, double t_c,
                                 const IntegratorOptions& opts) {
    if (!(epsilon > 0.0) || !(epsilon < t_c)) fail(ErrorKind::invalid_argument, "epsilon must lie in (0, t_c)");
    AsymptoticCoeffs c;
    c.epsilon = epsilon;
    c.side = side;
    c.t = side == Side::subcritical ? t_c - epsilon : t_c + epsilon;
    c.locus = find_singular_point(c.t, rule, opts);
    c.C = c.locus.c / (2.0 * std::sqrt(std::numbers::pi));
    c.D = std::log(c.locus.rho) / (epsilon * epsilon);
    return c;
}

AsymptoticCoeffs asymptotic_coeffs(double epsilon, Side side, const ProcessRule& rule) {
    require_supported(rule);
    const CriticalPoint cp = find_tc(rule, 1e-12);
    return asymptotic_coeffs(epsilon, side, rule, cp.t_c);
}

int required_i_max(const AsymptoticCoeffs& coeffs) {
    return static_cast<int>(std::ceil(20.0 / (coeffs.D * coeffs.epsilon * coeffs.epsilon)));
}

FitReport verify_against_profile(const SmallCompProfile& profile, const AsymptoticCoeffs& coeffs) {
    FitReport rep;
    rep.epsilon = coeffs.epsilon;
    rep.side = coeffs.side;
    rep.coeffs = coeffs;
    rep.i_max_required = required_i_max(coeffs);
    if (!(coeffs.D > 0.0)) fail(ErrorKind::insufficient_range, "non-positive decay rate");
    if (profile.i_max() < rep.i_max_required)
        fail(ErrorKind::insufficient_range, "profile truncated at " + std::to_string(profile.i_max()) +
                                                 ", fit window needs " + std::to_string(rep.i_max_required));
    const double de2 = coeffs.D * coeffs.epsilon * coeffs.epsilon;
    rep.i_lo = std::max(10, static_cast<int>(std::ceil(2.0 / de2)));
    rep.i_hi = std::min(profile.i_max(), static_cast<int>(std::floor(20.0 / de2)));

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = rep.i_lo; i <= rep.i_hi; ++i) {
        const double x = profile.x[i - 1];
        if (!(x > 0.0)) continue;
        const double yv = std::log(x) + 1.5 * std::log(static_cast<double>(i));
        sx += i;
        sy += yv;
        sxx += static_cast<double>(i) * i;
        sxy += i * yv;
        ++n;
    }
    rep.points = n;
    if (n < 16) fail(ErrorKind::insufficient_range, "fit window holds " + std::to_string(n) + " positive entries");
    if (std::abs(profile.t - coeffs.t) > 1e-9 * std::max(1.0, coeffs.t))
        fail(ErrorKind::invalid_argument, "profile time does not match the coefficient time");
    const double det = n * sxx - sx * sx;
    rep.fitted_slope = (n * sxy - sx * sy) / det;
    rep.fitted_intercept = (sy - rep.fitted_slope * sx) / n;
    rep.expected_slope = -std::log(coeffs.locus.rho);
    rep.expected_intercept = std::log(coeffs.C);
    rep.slope_rel_error = std::abs(rep.fitted_slope - rep.expected_slope) / std::abs(rep.expected_slope);
    rep.intercept_abs_error = std::abs(rep.fitted_intercept - rep.expected_intercept);
    rep.fitted_D = -rep.fitted_slope / (coeffs.epsilon * coeffs.epsilon);
    return rep;
}

} // namespace bfgraph
