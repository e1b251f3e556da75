#include "bfgraph/convolution.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace bfgraph;

namespace {

std::vector<double> geometric_profile(std::size_t n, double decay, unsigned seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> jitter(0.5, 1.5);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = jitter(g) * std::pow(static_cast<double>(i + 1), -1.5) * std::exp(-decay * static_cast<double>(i));
    return x;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0 && b[i] == 0.0) continue;
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::abs(a[i]));
    }
    return worst;
}

} // namespace

TEST_CASE("direct convolution on a small vector") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> out(4);
    self_convolve_reference(x, out);
    CHECK(out == std::vector<double>{0.0, 1.0, 4.0, 10.0});
    std::vector<double> par(4);
    self_convolve_openmp(x, par);
    CHECK(par == out);
}

TEST_CASE("kernels agree entrywise in relative terms") {
    for (std::size_t n : {7u, 64u, 1000u, 4096u}) {
        for (double decay : {0.0, 0.01, 0.05}) {
            const auto x = geometric_profile(n, decay, static_cast<unsigned>(n));
            std::vector<double> ref(n), omp(n), fft(n);
            self_convolve_reference(x, ref);
            self_convolve_openmp(x, omp);
            FftConvolver conv(n);
            conv(x, fft);
            CHECK(max_rel_diff(ref, omp) < 1e-12);
            CHECK(max_rel_diff(ref, fft) < 1e-9);
        }
    }
}

TEST_CASE("automatic selection switches to the transform at long lengths") {
    CHECK(SelfConvolver(64, ConvolutionKernel::automatic).kernel() == ConvolutionKernel::openmp);
    CHECK(SelfConvolver(4096, ConvolutionKernel::automatic).kernel() == ConvolutionKernel::fft);
    CHECK(SelfConvolver(64, ConvolutionKernel::reference).kernel() == ConvolutionKernel::reference);
}

TEST_CASE("kernel names round-trip") {
    for (auto k : {ConvolutionKernel::reference, ConvolutionKernel::openmp, ConvolutionKernel::fft,
                   ConvolutionKernel::automatic})
        CHECK(parse_kernel(to_string(k)) == k);
}
