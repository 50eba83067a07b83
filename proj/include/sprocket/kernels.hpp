#pragma once

#include <cstdint>
#include <vector>

#include "sprocket/core.hpp"
#include "sprocket/features.hpp"

namespace sprocket {

// Random dilated convolutional kernel. Weights are mean-centered standard
// normals; padding is either off or the symmetric half-span ((l_k-1)*d)/2.
struct Kernel {
    std::vector<double> weights;
    double bias = 0.0;
    std::uint32_t dilation = 1;
    std::uint32_t padding = 0;
    std::uint32_t channel = 0;
};

struct KernelSet {
    std::vector<Kernel> kernels;
    std::size_t input_length = 0;
};

// Draw order per kernel (substream "kernel", i): length, weights, bias,
// dilation exponent, padding coin, channel. Candidate lengths are the subset
// of {7, 9, 11} not exceeding input_length so the dilation exponent bound
// log2((l_in-1)/(l_k-1)) stays nonnegative.
KernelSet generate_kernels(std::size_t count, std::size_t input_length,
                           std::size_t channel_count, const RandomStream& stream);

// Output length l + 2p - (l_k-1)*d; KernelTooWide when nonpositive.
std::size_t activation_length(const Kernel& k, std::size_t input_length);

// out[t] = bias + sum_j weights[j] * x[channel][t + j*d - p], zero-extended.
void apply_kernel(const Kernel& k, const TimeSeries& x, std::vector<double>& out);
std::vector<double> apply_kernel(const Kernel& k, const TimeSeries& x);

struct PooledFeatures {
    double ppv = 0.0;  // fraction of strictly positive entries
    double max = 0.0;
};

PooledFeatures pool_features(std::span<const double> activation);

// Pooled-feature baseline: shape (n, 2K), kernel-major columns, (ppv, max)
// within each kernel.
FeatureMatrix rocket_transform(const TimeSeriesDataset& dataset, const KernelSet& kernel_set,
                               unsigned threads = 1);

}  // namespace sprocket
