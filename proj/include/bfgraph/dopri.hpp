#pragma once

#include "bfgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace bfgraph {

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_max = std::numeric_limits<double>::infinity();
    double h_init = 0.0;  // 0 selects a starting step automatically
    std::size_t max_steps = 50'000'000;
};

/// Dormand-Prince 5(4) embedded Runge-Kutta pair with FSAL and max-norm
/// error control. Steps never overshoot the requested target, so
/// checkpoints are hit exactly.
class Dopri5 {
public:
    using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;

    Dopri5(Rhs f, double t0, std::vector<double> x0, IntegratorOptions opts = {})
        : f_(std::move(f)), opts_(opts), t_(t0), x_(std::move(x0)) {
        const std::size_t n = x_.size();
        for (auto& k : k_) k.resize(n);
        stage_.resize(n);
        x_new_.resize(n);
        err_.resize(n);
        eval(t_, x_, k_[0]);
        h_ = opts_.h_init > 0.0 ? opts_.h_init : initial_step();
    }

    double t() const noexcept { return t_; }
    std::span<const double> state() const noexcept { return x_; }
    std::span<const double> derivative() const noexcept { return k_[0]; }
    double step_size() const noexcept { return h_; }
    std::size_t accepted_steps() const noexcept { return accepted_; }
    std::size_t rejected_steps() const noexcept { return rejected_; }
    std::size_t evaluations() const noexcept { return evaluations_; }

    /// Takes one accepted step, truncated so that t never passes t_limit.
    void step(double t_limit) {
        for (;;) {
            double h = std::min({h_, opts_.h_max, t_limit - t_});
            const bool clipped = h < h_;
            if (h <= min_step()) {
                if (t_limit - t_ <= min_step()) {
                    // remaining sliver: take it without error control
                    attempt(t_limit - t_);
                    commit(t_limit);
                    return;
                }
                throw StiffnessError("step size underflow at t=" + std::to_string(t_), t_);
            }
            const double err = attempt(h);
            if (err <= 1.0) {
                const double next_t = clipped && h == t_limit - t_ ? t_limit : t_ + h;
                commit(next_t);
                const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (!clipped) h_ = h * factor;
                else h_ = std::max(h_, h * factor);
                return;
            }
            ++rejected_;
            h_ = h * std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.5);
            if (++attempts_since_accept_ > 1000)
                throw StiffnessError("no accepted step after 1000 attempts at t=" + std::to_string(t_), t_);
        }
    }

    void advance_to(double t_target) {
        std::size_t guard = 0;
        while (t_ < t_target) {
            step(t_target);
            if (++guard > opts_.max_steps)
                throw StiffnessError("step budget exhausted at t=" + std::to_string(t_), t_);
        }
    }

    /// Fifth-order solution after a single unchecked step of size h from the
    /// current state; the integrator itself is left untouched.
    std::vector<double> trial(double h) {
        attempt(h);
        return x_new_;
    }

private:
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    // b - b_hat
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    void eval(double t, std::span<const double> x, std::span<double> dx) {
        ++evaluations_;
        f_(t, x, dx);
    }

    double min_step() const noexcept { return 1e-13 * std::max(1.0, std::abs(t_)); }

    double initial_step() {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const double sc = opts_.abs_tol + opts_.rel_tol * std::abs(x_[i]);
            d0 = std::max(d0, std::abs(x_[i]) / sc);
            d1 = std::max(d1, std::abs(k_[0][i]) / sc);
        }
        double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        // the step controller corrects an optimistic guess within a few rejections
        return std::min({std::max(h, 1e-8), opts_.h_max, 0.1});
    }

    double attempt(double h) {
        const std::size_t n = x_.size();
        auto& k1 = k_[0];
        auto& k2 = k_[1];
        auto& k3 = k_[2];
        auto& k4 = k_[3];
        auto& k5 = k_[4];
        auto& k6 = k_[5];
        auto& k7 = k_[6];
        for (std::size_t i = 0; i < n; ++i) stage_[i] = x_[i] + h * a21 * k1[i];
        eval(t_ + c2 * h, stage_, k2);
        for (std::size_t i = 0; i < n; ++i) stage_[i] = x_[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(t_ + c3 * h, stage_, k3);
        for (std::size_t i = 0; i < n; ++i) stage_[i] = x_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(t_ + c4 * h, stage_, k4);
        for (std::size_t i = 0; i < n; ++i)
            stage_[i] = x_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval(t_ + c5 * h, stage_, k5);
        for (std::size_t i = 0; i < n; ++i)
            stage_[i] = x_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        eval(t_ + h, stage_, k6);
        for (std::size_t i = 0; i < n; ++i)
            x_new_[i] = x_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        eval(t_ + h, x_new_, k7);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(x_[i]), std::abs(x_new_[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        if (!std::isfinite(err)) err = 1e10;
        return err;
    }

    void commit(double next_t) {
        t_ = next_t;
        x_.swap(x_new_);
        k_[0].swap(k_[6]);
        ++accepted_;
        attempts_since_accept_ = 0;
    }

    Rhs f_;
    IntegratorOptions opts_;
    double t_;
    std::vector<double> x_;
    std::vector<double> k_[7];
    std::vector<double> stage_, x_new_, err_;
    double h_ = 0.0;
    std::size_t accepted_ = 0, rejected_ = 0, evaluations_ = 0, attempts_since_accept_ = 0;
};

} // namespace bfgraph
