#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace bfgraph {

/// Self-convolution of a size-indexed density vector.
///
/// Input x[j] holds the density of size j+1. Output out[j] holds
///   c_{j+1} = Σ_{a+b=j+1, a,b>=1} x_a x_b,
/// so out[0] = 0 and out[1] = x_1^2. Only sizes up to x.size() are produced.
enum class ConvolutionKernel { reference, openmp, fft, automatic };

ConvolutionKernel parse_kernel(std::string_view name);
std::string_view to_string(ConvolutionKernel k);

/// Serial direct sum; the ground truth the other kernels are tested against.
void self_convolve_reference(std::span<const double> x, std::span<double> out);

/// Direct sum with the outer size loop split across OpenMP threads.
void self_convolve_openmp(std::span<const double> x, std::span<double> out);

/// FFT convolution on an exponentially tilted copy of x.
///
/// The sequence is rescaled by θ^j, with θ >= 1 the largest factor keeping
/// every tilted entry below |x_1|. Geometric tails become flat, so round-off
/// stays relative to each output entry instead of to x_1^2.
class FftConvolver {
public:
    explicit FftConvolver(std::size_t length);
    ~FftConvolver();
    FftConvolver(const FftConvolver&) = delete;
    FftConvolver& operator=(const FftConvolver&) = delete;

    std::size_t length() const noexcept { return length_; }
    void operator()(std::span<const double> x, std::span<double> out);

private:
    struct Plans;
    std::size_t length_;
    std::size_t fft_size_;
    std::unique_ptr<Plans> plans_;
    std::vector<double> buffer_;
};

/// Owns whatever scratch the chosen kernel needs.
class SelfConvolver {
public:
    SelfConvolver(std::size_t length, ConvolutionKernel kernel);

    ConvolutionKernel kernel() const noexcept { return kernel_; }
    void operator()(std::span<const double> x, std::span<double> out);

private:
    ConvolutionKernel kernel_;
    std::unique_ptr<FftConvolver> fft_;
};

} // namespace bfgraph
