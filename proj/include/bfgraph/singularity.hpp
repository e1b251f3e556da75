#pragma once

#include "bfgraph/dopri.hpp"
#include "bfgraph/ode_engine.hpp"
#include "bfgraph/process_rule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bfgraph {

/// Point on the characteristic started at z(0) = y(0) = y0, with first and
/// second sensitivities with respect to y0.
struct CharState {
    double t = 0.0;
    double z = 0.0, y = 0.0;
    double z_s = 1.0, y_s = 1.0;
    double z_ss = 0.0, y_ss = 0.0;
    double x1 = 1.0;
};

/// Integrals taken along the same characteristic:
///   beta  = ∫ (1 - x1²) ds          log_u = ∫ (1 - x1²)(y - 1) ds
///   v     = ∫ z(z - 1) x1² ds       q     = ∫ (2z - 1) x1² ds
/// For Erdos-Renyi the factors (1 - x1²) and x1² are replaced by 1 and 0.
struct QuadratureAccumulators {
    double beta = 0.0;
    double log_u = 0.0;
    double v = 0.0;
    double q = 0.0;
};

struct CharacteristicResult {
    CharState state;
    QuadratureAccumulators acc;
};

/// Integration settings for the characteristic system; tighter than the
/// density defaults since ρ is differenced twice.
IntegratorOptions characteristic_defaults();

CharacteristicResult characteristic_flow(double y0, double t, const ProcessRule& rule,
                                         const IntegratorOptions& opts = characteristic_defaults());

/// Square-root singularity of z -> P(t, z): the fold of the parametric curve
/// y0 -> (z(t; y0), y(t; y0)), i.e. the root of z_s closest to y0 = 1.
struct SingularLocus {
    double t = 0.0;
    double rho = 0.0;
    double tau = 0.0;
    double amplitude = 0.0;             // y_s * sqrt(2ρ / |z_ss|) at the fold
    double amplitude_quadrature = 0.0;  // sqrt(2ρ F_z / F_yy) from F_z = u + q, F_yy = β² ρ u
    double gamma = 0.0;                 // 1 / ρ
    double c = 0.0;                     // amplitude used in the coefficient asymptotics
    double y0_star = 0.0;
    double z_ss = 0.0;
    double y_s = 0.0;
    QuadratureAccumulators acc;
};

struct SingularSearch {
    double y0_min = 0.01;
    double y0_max = 4.0;
    int grid_points = 96;
};

SingularLocus find_singular_point(double t, const ProcessRule& rule,
                                  const IntegratorOptions& opts = characteristic_defaults(),
                                  const SingularSearch& search = {});

struct RhoCurve {
    std::vector<SingularLocus> loci;
    /// Five-point central differences, NaN where the stencil does not fit
    /// or the grid is not uniform around the point.
    std::vector<double> rho_d1;
    std::vector<double> rho_d2;
};

RhoCurve rho_curve(const std::vector<double>& t_grid, const ProcessRule& rule,
                   const IntegratorOptions& opts = characteristic_defaults());

struct RhoDerivatives {
    double t = 0.0;
    double h = 0.0;
    double d1 = 0.0, d2 = 0.0;           // spacing h
    double d1_half = 0.0, d2_half = 0.0; // spacing h/2
    double rho = 0.0, tau = 0.0;
};

/// ρ'(t), ρ''(t) by five-point stencils at spacings h and h/2.
RhoDerivatives rho_derivatives(double t, const ProcessRule& rule, double h = 1e-3,
                               const IntegratorOptions& opts = characteristic_defaults());

/// Closed form ρ''(t_c) = G13 G31 / (G2 G33) evaluated on the constant
/// characteristic at t_c: (1 - x1²)² / ((1 + ∫ x1²) β²).
double rho_pp_closed_form(double t_c, const ProcessRule& rule,
                          const IntegratorOptions& opts = characteristic_defaults());

enum class Side { subcritical, supercritical };
std::string to_string(Side s);
Side parse_side(const std::string& s);

struct AsymptoticCoeffs {
    double epsilon = 0.0;
    Side side = Side::subcritical;
    double t = 0.0;
    double C = 0.0;  // c(t) / (2 sqrt(pi))
    double D = 0.0;  // -ln γ(t) / ε²
    SingularLocus locus;
};

AsymptoticCoeffs asymptotic_coeffs(double epsilon, Side side, const ProcessRule& rule, double t_c,
                                 const IntegratorOptions& opts = characteristic_defaults());
AsymptoticCoeffs asymptotic_coeffs(double epsilon, Side side, const ProcessRule& rule);

struct FitReport {
    double epsilon = 0.0;
    Side side = Side::subcritical;
    int i_lo = 0, i_hi = 0, points = 0;
    int i_max_required = 0;
    double fitted_slope = 0.0;
    double fitted_intercept = 0.0;
    double expected_slope = 0.0;      // ln γ(t) = -D ε²
    double expected_intercept = 0.0;  // ln C
    double slope_rel_error = 0.0;
    double intercept_abs_error = 0.0;
    double fitted_D = 0.0;
    AsymptoticCoeffs coeffs;
};

/// Minimum truncation order for verify_against_profile: 20 / (D ε²).
int required_i_max(const AsymptoticCoeffs& coeffs);

/// Least-squares fit of ln(x_i i^{3/2}) against i over
/// [2/(Dε²), 20/(Dε²)] compared with the singularity prediction.
FitReport verify_against_profile(const SmallCompProfile& profile, const AsymptoticCoeffs& coeffs);

} // namespace bfgraph
