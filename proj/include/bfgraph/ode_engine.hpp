#pragma once

#include "bfgraph/convolution.hpp"
#include "bfgraph/dopri.hpp"
#include "bfgraph/process_rule.hpp"

#include <span>
#include <vector>

namespace bfgraph {

struct OdeConfig {
    int i_max = 2048;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_max = 0.05;
    std::vector<double> checkpoints;
    ConvolutionKernel kernel = ConvolutionKernel::automatic;
    /// Refuse t_end >= t_c(rule), where Σ x_i = 1 no longer holds.
    bool assert_conservation = true;

    IntegratorOptions integrator() const {
        IntegratorOptions o;
        o.rel_tol = rel_tol;
        o.abs_tol = abs_tol;
        o.h_max = h_max;
        return o;
    }
    void validate() const;
};

/// Truncated component-size densities x_1..x_imax at time t.
struct SmallCompProfile {
    double t = 0.0;
    std::vector<double> x;  // x[i-1] = x_i
    double tail_mass = 0.0;

    int i_max() const noexcept { return static_cast<int>(x.size()); }
};

struct MomentResult {
    double value = 0.0;          // Σ_{i<=imax} i^k x_i
    double tail_estimate = 0.0;  // tail_mass * (imax+1)^k, a lower bound on the missing part
    bool tail_flagged = false;   // tail_mass exceeded abs_tol
};

struct SusceptibilitySample {
    double t = 0.0;
    double r = 1.0;  // 1 / s_1(t)
    double x1 = 1.0;
};

struct SusceptibilityTrace {
    std::vector<SusceptibilitySample> samples;
};

struct CriticalPoint {
    double t_c = 0.0;
    double bracket_width = 0.0;
    ProcessRule rule = ProcessRule::bohman_frieze();
    double x1_at_tc = 0.0;
    SusceptibilityTrace trace;
};

// Right-hand sides of the density systems. Input and output are indexed by
// size-1; entries past the truncation order are treated as zero.
std::vector<double> rhs_bf(std::span<const double> x);
std::vector<double> rhs_er(std::span<const double> x);
/// Generic bounded-size system derived from the rule's decision table.
std::vector<double> rhs_bounded(const ProcessRule& rule, std::span<const double> x);

/// Reusable evaluator holding the convolution scratch for one truncation order.
class DensitySystem {
public:
    DensitySystem(ProcessRule rule, std::size_t i_max, ConvolutionKernel kernel = ConvolutionKernel::automatic);

    const ProcessRule& rule() const noexcept { return rule_; }
    std::size_t size() const noexcept { return size_; }
    ConvolutionKernel kernel() const noexcept { return convolver_.kernel(); }
    void operator()(std::span<const double> x, std::span<double> dx);

private:
    void bounded(std::span<const double> x, std::span<double> dx);

    ProcessRule rule_;
    std::size_t size_;
    SelfConvolver convolver_;
    std::vector<double> conv_;
};

std::vector<double> initial_profile(std::size_t i_max);

/// Integrates the density system to t_end, returning profiles at every
/// checkpoint <= t_end and at t_end itself, in increasing t.
std::vector<SmallCompProfile> integrate_profile(const ProcessRule& rule, double t_end, const OdeConfig& config);

MomentResult moment(const SmallCompProfile& profile, int k, double abs_tol = 1e-12);

/// Integrates r = 1/s_1 with the co-evolving small-size densities and
/// locates r(t_c) = 0 by bisection to within `precision`.
CriticalPoint find_tc(const ProcessRule& rule, double precision = 1e-8, const IntegratorOptions& opts = {},
                      double t_max = 10.0);

/// Trace of (t, r, x1) on [0, t_end] (t_end < t_c); grid points are the
/// accepted integrator steps plus the requested checkpoints.
SusceptibilityTrace susceptibility_trace(const ProcessRule& rule, double t_end,
                                         std::span<const double> checkpoints = {},
                                         const IntegratorOptions& opts = {});

/// s_1(t) for t < t_c from the r system.
double susceptibility_at(const ProcessRule& rule, double t, const IntegratorOptions& opts = {});

/// μ_ε = ½ ∫_0^{t_c-ε} (1 - x_1²) s dt, integrated as (1 - x_1²)/r.
/// For Erdos-Renyi the selection factor (1 - x_1²) is 1.
double mu_epsilon(double epsilon, const ProcessRule& rule = ProcessRule::bohman_frieze(),
                  const IntegratorOptions& opts = {});

/// Same integral with the pair count restricted to absent internal pairs:
/// ½ ∫ (1 - x_1²)(s - 1 - t) dt. This is the mean number of internal edges
/// on a simple graph, which is what the simulator counts.
double mu_epsilon_simple_graph(double epsilon, const ProcessRule& rule = ProcessRule::bohman_frieze(),
                               const IntegratorOptions& opts = {});

/// e^{-ti} (ti)^{i-1} / i!, evaluated in log space.
double er_exact_xi(double t, long i);

} // namespace bfgraph
