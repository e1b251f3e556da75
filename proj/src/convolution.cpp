#include "bfgraph/convolution.hpp"

#include "bfgraph/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <string>

namespace bfgraph {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr std::size_t automatic_fft_threshold = 768;

} // namespace

ConvolutionKernel parse_kernel(std::string_view name) {
    if (name == "reference") return ConvolutionKernel::reference;
    if (name == "openmp") return ConvolutionKernel::openmp;
    if (name == "fft") return ConvolutionKernel::fft;
    if (name == "auto" || name == "automatic") return ConvolutionKernel::automatic;
    fail(ErrorKind::invalid_argument, "unknown convolution kernel '" + std::string(name) + "'");
}

std::string_view to_string(ConvolutionKernel k) {
    switch (k) {
    case ConvolutionKernel::reference: return "reference";
    case ConvolutionKernel::openmp: return "openmp";
    case ConvolutionKernel::fft: return "fft";
    case ConvolutionKernel::automatic: return "auto";
    }
    return "?";
}

void self_convolve_reference(std::span<const double> x, std::span<double> out) {
    const std::size_t n = std::min(x.size(), out.size());
    for (std::size_t j = 0; j < n; ++j) {
        // size s = j+1; pairs (a, s-a) with a = 1..s-1, i.e. x[a-1] x[s-a-1]
        double acc = 0.0;
        for (std::size_t a = 0; a + 1 <= j; ++a) acc += x[a] * x[j - 1 - a];
        out[j] = acc;
    }
}

void self_convolve_openmp(std::span<const double> x, std::span<double> out) {
    const auto n = static_cast<long>(std::min(x.size(), out.size()));
    const double* xs = x.data();
    double* os = out.data();
#pragma omp parallel for schedule(dynamic, 64)
    for (long j = 0; j < n; ++j) {
        // symmetric pairs counted twice, middle term once
        double acc = 0.0;
        const long half = j / 2;
        for (long a = 0; a < half; ++a) acc += xs[a] * xs[j - 1 - a];
        acc *= 2.0;
        if (j % 2 == 1) acc += xs[half] * xs[half];
        os[j] = acc;
    }
}

struct FftConvolver::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    fftw_complex* spectrum = nullptr;
    double* real = nullptr;
};

FftConvolver::FftConvolver(std::size_t length) : length_(length), plans_(std::make_unique<Plans>()) {
    fft_size_ = 16;
    while (fft_size_ < 2 * length_) fft_size_ <<= 1;
    std::lock_guard lock(planner_mutex());
    plans_->real = fftw_alloc_real(fft_size_);
    plans_->spectrum = fftw_alloc_complex(fft_size_ / 2 + 1);
    const int size = static_cast<int>(fft_size_);
    // ESTIMATE keeps plans (and therefore results) identical from run to run
    plans_->forward = fftw_plan_dft_r2c_1d(size, plans_->real, plans_->spectrum, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_1d(size, plans_->spectrum, plans_->real, FFTW_ESTIMATE);
    buffer_.resize(length_);
}

FftConvolver::~FftConvolver() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plans_->forward);
    fftw_destroy_plan(plans_->backward);
    fftw_free(plans_->spectrum);
    fftw_free(plans_->real);
}

void FftConvolver::operator()(std::span<const double> x, std::span<double> out) {
    const std::size_t n = std::min({x.size(), out.size(), length_});
    if (n == 0) return;

    double log_theta = 0.0;
    if (x[0] != 0.0) {
        const double log_x1 = std::log(std::abs(x[0]));
        double bound = INFINITY;
        for (std::size_t j = 1; j < n; ++j)
            if (x[j] != 0.0) bound = std::min(bound, (log_x1 - std::log(std::abs(x[j]))) / static_cast<double>(j));
        if (std::isfinite(bound)) log_theta = std::max(0.0, bound);
    }

    double* real = plans_->real;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = x[j];
        real[j] = v == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(v)) + log_theta * j), v);
    }
    std::fill(real + n, real + fft_size_, 0.0);
    fftw_execute(plans_->forward);
    auto* spec = reinterpret_cast<std::complex<double>*>(plans_->spectrum);
    const double scale = 1.0 / static_cast<double>(fft_size_);
    for (std::size_t k = 0; k <= fft_size_ / 2; ++k) spec[k] = spec[k] * spec[k] * scale;
    fftw_execute(plans_->backward);

    // real[m] = θ^m Σ_{a+b=m} x[a] x[b] corresponds to size m+2
    out[0] = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        const double v = real[j - 1];
        const double shift = log_theta * static_cast<double>(j - 1);
        out[j] = v == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(v)) - shift), v);
    }
}

SelfConvolver::SelfConvolver(std::size_t length, ConvolutionKernel kernel) : kernel_(kernel) {
    if (kernel_ == ConvolutionKernel::automatic)
        kernel_ = length >= automatic_fft_threshold ? ConvolutionKernel::fft : ConvolutionKernel::openmp;
    if (kernel_ == ConvolutionKernel::fft) fft_ = std::make_unique<FftConvolver>(length);
}

void SelfConvolver::operator()(std::span<const double> x, std::span<double> out) {
    switch (kernel_) {
    case ConvolutionKernel::reference: self_convolve_reference(x, out); break;
    case ConvolutionKernel::openmp: self_convolve_openmp(x, out); break;
    case ConvolutionKernel::fft:
    case ConvolutionKernel::automatic: (*fft_)(x, out); break;
    }
}

} // namespace bfgraph
