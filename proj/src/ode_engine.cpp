#include "bfgraph/ode_engine.hpp"

#include "bfgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bfgraph {

void OdeConfig::validate() const {
    if (i_max < 2) fail(ErrorKind::invalid_argument, "i_max must be >= 2");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) fail(ErrorKind::invalid_argument, "tolerances must be > 0");
    if (!(h_max > 0.0)) fail(ErrorKind::invalid_argument, "h_max must be > 0");
}

namespace {

// Capped-size class probabilities p_1..p_K, p_{K+1} = 1 - Σ_{c<=K} x_c.
std::vector<double> cap_probabilities(int cutoff, std::span<const double> x) {
    std::vector<double> p(static_cast<std::size_t>(cutoff) + 1, 0.0);
    double small = 0.0;
    for (int c = 1; c <= cutoff; ++c) {
        p[c - 1] = static_cast<std::size_t>(c) <= x.size() ? x[c - 1] : 0.0;
        small += p[c - 1];
    }
    p[cutoff] = 1.0 - small;
    return p;
}

// w(a,b): conditional weight that the added edge has endpoint classes (a,b),
// given that one candidate has those classes. Row-major (K+1)x(K+1).
std::vector<double> pair_weights(const ProcessRule& rule, std::span<const double> p) {
    const int b = rule.cutoff() + 1;
    std::vector<double> w(static_cast<std::size_t>(b) * b, 0.0);
    for (int ca = 1; ca <= b; ++ca)
        for (int cb = 1; cb <= b; ++cb) {
            double acc = 0.0;
            for (int c = 1; c <= b; ++c)
                for (int d = 1; d <= b; ++d) {
                    const double pp = p[c - 1] * p[d - 1];
                    if (rule.decide(ca, cb, c, d) == Choice::first) acc += pp;
                    if (rule.decide(c, d, ca, cb) == Choice::second) acc += pp;
                }
            w[(ca - 1) * b + (cb - 1)] = acc;
        }
    return w;
}

// r' for the generic bounded-size susceptibility; x holds x_1..x_K.
double bounded_r_derivative(const ProcessRule& rule, std::span<const double> x, double r,
                            std::span<const double> w) {
    const int K = rule.cutoff();
    const int b = K + 1;
    std::vector<double> mt(static_cast<std::size_t>(b));
    double small = 0.0;
    for (int a = 1; a <= K; ++a) {
        mt[a - 1] = r * a * x[a - 1];
        small += mt[a - 1];
    }
    mt[K] = 1.0 - small;
    double acc = 0.0;
    for (int a = 0; a < b; ++a)
        for (int c = 0; c < b; ++c) acc += mt[a] * mt[c] * w[a * b + c];
    return -acc;
}

double bf_rate(double x1) { return -x1 - x1 * x1 + x1 * x1 * x1; }

enum class TraceMode { find_root, to_time };

struct ReducedSystem {
    ProcessRule rule;
    std::size_t x_dims;  // densities carried alongside r

    explicit ReducedSystem(const ProcessRule& r)
        : rule(r), x_dims(r.kind() == RuleKind::bounded_size ? static_cast<std::size_t>(r.cutoff()) : 1) {}

    std::vector<double> initial() const {
        std::vector<double> s(x_dims + 1, 0.0);
        s[0] = 1.0;
        s[x_dims] = 1.0;
        return s;
    }

    void operator()(double, std::span<const double> s, std::span<double> ds) const {
        const double r = s[x_dims];
        switch (rule.kind()) {
        case RuleKind::erdos_renyi:
            ds[0] = -s[0];
            ds[1] = -1.0;
            return;
        case RuleKind::bohman_frieze: {
            const double x1 = s[0];
            ds[0] = bf_rate(x1);
            ds[1] = -x1 * x1 * r * r - (1.0 - x1 * x1);
            return;
        }
        case RuleKind::bounded_size: {
            auto x = s.first(x_dims);
            auto dx = rhs_bounded(rule, x);
            std::copy(dx.begin(), dx.end(), ds.begin());
            const auto p = cap_probabilities(rule.cutoff(), x);
            const auto w = pair_weights(rule, p);
            ds[x_dims] = bounded_r_derivative(rule, x, r, w);
            return;
        }
        }
    }
};

} // namespace

std::vector<double> rhs_bf(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> conv(n), dx(n, 0.0);
    if (n == 0) return dx;
    self_convolve_reference(x, conv);
    const double x1 = x[0];
    const double a = 1.0 - x1 * x1;
    dx[0] = bf_rate(x1);
    if (n >= 2) dx[1] = 2.0 * x1 * x1 - x1 * x1 * x1 * x1 - 2.0 * a * x[1];
    for (std::size_t j = 2; j < n; ++j) {
        const double i = static_cast<double>(j + 1);
        dx[j] = 0.5 * i * a * conv[j] - i * a * x[j];
    }
    return dx;
}

std::vector<double> rhs_er(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> conv(n), dx(n, 0.0);
    self_convolve_reference(x, conv);
    for (std::size_t j = 0; j < n; ++j) {
        const double i = static_cast<double>(j + 1);
        dx[j] = -i * x[j] + 0.5 * i * conv[j];
    }
    return dx;
}

std::vector<double> rhs_bounded(const ProcessRule& rule, std::span<const double> x) {
    DensitySystem sys(rule, x.size(), ConvolutionKernel::reference);
    std::vector<double> dx(x.size());
    sys(x, dx);
    return dx;
}

DensitySystem::DensitySystem(ProcessRule rule, std::size_t i_max, ConvolutionKernel kernel)
    : rule_(std::move(rule)), size_(i_max), convolver_(i_max, kernel), conv_(i_max) {}

void DensitySystem::operator()(std::span<const double> x, std::span<double> dx) {
    const std::size_t n = size_;
    if (n == 0) return;
    convolver_(x, conv_);
    switch (rule_.kind()) {
    case RuleKind::erdos_renyi:
        for (std::size_t j = 0; j < n; ++j) {
            const double i = static_cast<double>(j + 1);
            dx[j] = -i * x[j] + 0.5 * i * conv_[j];
        }
        return;
    case RuleKind::bohman_frieze: {
        const double x1 = x[0];
        const double a = 1.0 - x1 * x1;
        dx[0] = bf_rate(x1);
        if (n >= 2) dx[1] = 2.0 * x1 * x1 - x1 * x1 * x1 * x1 - 2.0 * a * x[1];
        for (std::size_t j = 2; j < n; ++j) {
            const double i = static_cast<double>(j + 1);
            dx[j] = 0.5 * i * a * conv_[j] - i * a * x[j];
        }
        return;
    }
    case RuleKind::bounded_size:
        bounded(x, dx);
        return;
    }
}

void DensitySystem::bounded(std::span<const double> x, std::span<double> dx) {
    // x_k' = ½ k Σ_{i+j=k} x_i x_j w(ci,cj) - ½ k x_k Σ_c p_c (w(ck,c) + w(c,ck))
    const int K = rule_.cutoff();
    const int b = K + 1;
    const auto n = static_cast<long>(size_);
    const auto p = cap_probabilities(K, x);
    const auto w = pair_weights(rule_, p);
    auto weight = [&](int ca, int cb) { return w[(ca - 1) * b + (cb - 1)]; };
    const double w_large = weight(b, b);

    std::vector<double> loss(static_cast<std::size_t>(b), 0.0);
    for (int ca = 1; ca <= b; ++ca)
        for (int c = 1; c <= b; ++c) loss[ca - 1] += p[c - 1] * (weight(ca, c) + weight(c, ca));

    for (long j = 0; j < n; ++j) dx[j] = w_large * conv_[j];
    // ordered pairs with a small first endpoint, then small second endpoint only
    for (int i = 1; i <= K && i <= n; ++i)
        for (long s = i + 1; s <= n; ++s) {
            const long other = s - i;
            const int co = rule_.cap(static_cast<std::uint64_t>(other));
            dx[s - 1] += (weight(i, co) - w_large) * x[i - 1] * x[other - 1];
        }
    for (int jv = 1; jv <= K && jv <= n; ++jv)
        for (long s = jv + K + 1; s <= n; ++s) {
            const long other = s - jv;  // > K
            dx[s - 1] += (weight(b, jv) - w_large) * x[other - 1] * x[jv - 1];
        }
    for (long j = 0; j < n; ++j) {
        const double k = static_cast<double>(j + 1);
        const int ck = rule_.cap(static_cast<std::uint64_t>(j + 1));
        dx[j] = 0.5 * k * dx[j] - 0.5 * k * x[j] * loss[ck - 1];
    }
}

std::vector<double> initial_profile(std::size_t i_max) {
    std::vector<double> x(i_max, 0.0);
    if (i_max > 0) x[0] = 1.0;
    return x;
}

namespace {

SmallCompProfile make_profile(double t, std::span<const double> x, double abs_tol) {
    SmallCompProfile p;
    p.t = t;
    p.x.assign(x.begin(), x.end());
    // round-off below the absolute tolerance can leave entries slightly negative
    for (double& v : p.x)
        if (v < 0.0 && v > -abs_tol) v = 0.0;
    long double sum = 0.0L;
    for (double v : x) sum += v;
    p.tail_mass = std::max(0.0, static_cast<double>(1.0L - sum));
    return p;
}

} // namespace

std::vector<SmallCompProfile> integrate_profile(const ProcessRule& rule, double t_end, const OdeConfig& config) {
    config.validate();
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail(ErrorKind::invalid_argument, "t_end must be finite and >= 0");
    if (config.assert_conservation) {
        const CriticalPoint cp = find_tc(rule, 1e-10, config.integrator());
        if (t_end >= cp.t_c)
            fail(ErrorKind::blow_up, "t_end=" + std::to_string(t_end) + " is at or past the susceptibility blow-up t_c=" +
                                         std::to_string(cp.t_c) + "; conservation of the densities fails there");
    }

    std::vector<double> grid;
    for (double c : config.checkpoints)
        if (c >= 0.0 && c < t_end) grid.push_back(c);
    grid.push_back(t_end);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    DensitySystem sys(rule, static_cast<std::size_t>(config.i_max), config.kernel);
    Dopri5 solver([&sys](double, std::span<const double> x, std::span<double> dx) { sys(x, dx); }, 0.0,
                  initial_profile(static_cast<std::size_t>(config.i_max)), config.integrator());

    std::vector<SmallCompProfile> out;
    out.reserve(grid.size());
    for (double t : grid) {
        solver.advance_to(t);
        out.push_back(make_profile(t, solver.state(), config.abs_tol));
    }
    return out;
}

MomentResult moment(const SmallCompProfile& profile, int k, double abs_tol) {
    if (k < 0) fail(ErrorKind::invalid_argument, "moment order must be >= 0");
    long double acc = 0.0L;
    for (std::size_t j = 0; j < profile.x.size(); ++j)
        acc += std::pow(static_cast<long double>(j + 1), k) * profile.x[j];
    MomentResult m;
    m.value = static_cast<double>(acc);
    m.tail_estimate = profile.tail_mass * std::pow(static_cast<double>(profile.x.size() + 1), k);
    m.tail_flagged = profile.tail_mass > abs_tol;
    return m;
}

CriticalPoint find_tc(const ProcessRule& rule, double precision, const IntegratorOptions& opts, double t_max) {
    if (!(precision > 0.0)) fail(ErrorKind::invalid_argument, "precision must be > 0");
    ReducedSystem sys(rule);
    const std::size_t r_idx = sys.x_dims;
    IntegratorOptions o = opts;
    o.h_max = std::min(o.h_max, 0.05);
    Dopri5 solver(sys, 0.0, sys.initial(), o);

    CriticalPoint cp;
    cp.rule = rule;
    cp.trace.samples.push_back({0.0, 1.0, 1.0});
    for (;;) {
        Dopri5 previous = solver;
        solver.step(t_max);
        const auto s = solver.state();
        if (s[r_idx] <= 0.0) {
            double lo = previous.t();
            double hi = solver.t();
            double x1_hi = s[0];
            while (hi - lo > precision) {
                const double mid = 0.5 * (lo + hi);
                const auto probe = previous.trial(mid - previous.t());
                if (probe[r_idx] > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                    x1_hi = probe[0];
                }
            }
            cp.t_c = 0.5 * (lo + hi);
            cp.bracket_width = hi - lo;
            cp.x1_at_tc = x1_hi;
            cp.trace.samples.push_back({cp.t_c, 0.0, x1_hi});
            return cp;
        }
        cp.trace.samples.push_back({solver.t(), s[r_idx], s[0]});
        if (solver.t() >= t_max)
            fail(ErrorKind::no_blowup,
                 "susceptibility of rule " + rule.name() + " did not blow up before t=" + std::to_string(t_max));
    }
}

SusceptibilityTrace susceptibility_trace(const ProcessRule& rule, double t_end, std::span<const double> checkpoints,
                                         const IntegratorOptions& opts) {
    ReducedSystem sys(rule);
    const std::size_t r_idx = sys.x_dims;
    Dopri5 solver(sys, 0.0, sys.initial(), opts);
    std::vector<double> grid(checkpoints.begin(), checkpoints.end());
    grid.push_back(t_end);
    std::sort(grid.begin(), grid.end());
    SusceptibilityTrace trace;
    trace.samples.push_back({0.0, 1.0, 1.0});
    for (double target : grid) {
        if (target <= solver.t()) continue;
        while (solver.t() < target) {
            solver.step(target);
            const auto s = solver.state();
            if (s[r_idx] <= 0.0)
                fail(ErrorKind::blow_up, "susceptibility blew up before t=" + std::to_string(target));
            trace.samples.push_back({solver.t(), s[r_idx], s[0]});
        }
    }
    return trace;
}

double susceptibility_at(const ProcessRule& rule, double t, const IntegratorOptions& opts) {
    if (t == 0.0) return 1.0;
    const auto trace = susceptibility_trace(rule, t, {}, opts);
    return 1.0 / trace.samples.back().r;
}

namespace {

double cycle_integral(double epsilon, const ProcessRule& rule, const IntegratorOptions& opts, bool simple_graph) {
    if (rule.kind() == RuleKind::bounded_size)
        fail(ErrorKind::unsupported_rule, "cycle-count mean is implemented for er and bf only");
    const CriticalPoint cp = find_tc(rule, 1e-12, opts);
    if (!(epsilon > 0.0) || !(epsilon < cp.t_c))
        fail(ErrorKind::invalid_argument, "epsilon must lie in (0, t_c)");
    if (epsilon < 1e3 * cp.bracket_width || epsilon < 1e-7)
        fail(ErrorKind::resolution, "epsilon=" + std::to_string(epsilon) + " is below the critical-point resolution");
    const bool er = rule.kind() == RuleKind::erdos_renyi;
    ReducedSystem reduced(rule);
    auto f = [&](double t, std::span<const double> s, std::span<double> ds) {
        reduced(t, s.first(2), ds.first(2));
        const double x1 = s[0];
        const double sel = er ? 1.0 : 1.0 - x1 * x1;
        const double pairs = simple_graph ? 1.0 / s[1] - 1.0 - t : 1.0 / s[1];
        ds[2] = 0.5 * sel * pairs;
    };
    Dopri5 solver(f, 0.0, {1.0, 1.0, 0.0}, opts);
    solver.advance_to(cp.t_c - epsilon);
    return solver.state()[2];
}

} // namespace

double mu_epsilon(double epsilon, const ProcessRule& rule, const IntegratorOptions& opts) {
    return cycle_integral(epsilon, rule, opts, false);
}

double mu_epsilon_simple_graph(double epsilon, const ProcessRule& rule, const IntegratorOptions& opts) {
    return cycle_integral(epsilon, rule, opts, true);
}

double er_exact_xi(double t, long i) {
    if (!(t > 0.0) || i < 1) fail(ErrorKind::invalid_argument, "er_exact_xi needs t > 0 and i >= 1");
    const double di = static_cast<double>(i);
    return std::exp(-t * di + (di - 1.0) * std::log(t * di) - std::lgamma(di + 1.0));
}

} // namespace bfgraph
