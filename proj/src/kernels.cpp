#include "sprocket/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace sprocket {

KernelSet generate_kernels(std::size_t count, std::size_t input_length,
                           std::size_t channel_count, const RandomStream& stream) {
    if (count < 1) fail(ErrorCode::InvalidArgument, "kernel count must be positive");
    if (channel_count < 1) fail(ErrorCode::InvalidArgument, "channel count must be positive");
    if (input_length < 9)
        fail(ErrorCode::InputTooShort,
             "input length " + std::to_string(input_length) + " is below the minimum of 9");

    std::vector<std::size_t> candidates;
    for (std::size_t s : {7, 9, 11})
        if (s <= input_length) candidates.push_back(s);

    KernelSet set;
    set.input_length = input_length;
    set.kernels.resize(count);

    for (std::size_t i = 0; i < count; ++i) {
        RandomStream rs = stream.derive("kernel", i);
        Kernel& k = set.kernels[i];

        const std::size_t lk = candidates[rs.next_below(candidates.size())];

        k.weights.resize(lk);
        double mean = 0.0;
        for (double& w : k.weights) {
            w = rs.next_normal();
            mean += w;
        }
        mean /= static_cast<double>(lk);
        for (double& w : k.weights) w -= mean;

        k.bias = rs.next_uniform(-1.0, 1.0);

        const double ratio = static_cast<double>(input_length - 1) / static_cast<double>(lk - 1);
        const double x = rs.next_unit() * std::log2(ratio);
        std::uint64_t d = static_cast<std::uint64_t>(std::exp2(x));
        if (d < 1) d = 1;
        const std::uint64_t dmax = (input_length - 1) / (lk - 1);
        if (d > dmax) d = dmax;
        k.dilation = static_cast<std::uint32_t>(d);

        const bool pad = rs.next_below(2) == 1;
        k.padding = pad ? static_cast<std::uint32_t>(((lk - 1) * d) / 2) : 0;

        k.channel = static_cast<std::uint32_t>(rs.next_below(channel_count));
    }
    return set;
}

std::size_t activation_length(const Kernel& k, std::size_t input_length) {
    const std::int64_t span =
        static_cast<std::int64_t>(k.weights.size() - 1) * static_cast<std::int64_t>(k.dilation);
    const std::int64_t out =
        static_cast<std::int64_t>(input_length) + 2 * static_cast<std::int64_t>(k.padding) - span;
    if (out <= 0)
        fail(ErrorCode::KernelTooWide,
             "kernel spans " + std::to_string(span) + " over length " +
                 std::to_string(input_length));
    return static_cast<std::size_t>(out);
}

void apply_kernel(const Kernel& k, const TimeSeries& x, std::vector<double>& out) {
    if (k.channel >= x.channels)
        fail(ErrorCode::ShapeMismatch, "kernel reads channel " + std::to_string(k.channel) +
                                           " of a " + std::to_string(x.channels) +
                                           "-channel series");
    const std::size_t l_out = activation_length(k, x.length);
    const std::span<const double> sig = x.channel(k.channel);
    const std::int64_t l = static_cast<std::int64_t>(x.length);
    const std::int64_t d = k.dilation;
    const std::int64_t p = k.padding;
    const std::size_t lk = k.weights.size();

    out.assign(l_out, 0.0);
    for (std::size_t t = 0; t < l_out; ++t) {
        double s = k.bias;
        std::int64_t idx = static_cast<std::int64_t>(t) - p;
        for (std::size_t j = 0; j < lk; ++j, idx += d) {
            if (idx >= 0 && idx < l) s += k.weights[j] * sig[static_cast<std::size_t>(idx)];
        }
        out[t] = s;
    }
}

std::vector<double> apply_kernel(const Kernel& k, const TimeSeries& x) {
    std::vector<double> out;
    apply_kernel(k, x, out);
    return out;
}

PooledFeatures pool_features(std::span<const double> activation) {
    if (activation.empty())
        fail(ErrorCode::EmptyActivation, "cannot pool an empty activation");
    PooledFeatures f;
    f.max = activation[0];
    std::size_t positive = 0;
    for (double v : activation) {
        if (v > 0.0) ++positive;
        if (v > f.max) f.max = v;
    }
    f.ppv = static_cast<double>(positive) / static_cast<double>(activation.size());
    return f;
}

FeatureMatrix rocket_transform(const TimeSeriesDataset& dataset, const KernelSet& kernel_set,
                               unsigned threads) {
    dataset.validate();
    if (dataset.length() != kernel_set.input_length)
        fail(ErrorCode::ShapeMismatch, "kernel set was generated for length " +
                                           std::to_string(kernel_set.input_length));
    const std::size_t n = dataset.size();
    const std::size_t K = kernel_set.kernels.size();
    FeatureMatrix out(n, 2 * K);

    parallel_for(K, threads, [&](std::size_t i) {
        const Kernel& k = kernel_set.kernels[i];
        std::vector<double> act;
        for (std::size_t j = 0; j < n; ++j) {
            apply_kernel(k, dataset.series[j], act);
            const PooledFeatures f = pool_features(act);
            out.at(j, 2 * i) = f.ppv;
            out.at(j, 2 * i + 1) = f.max;
        }
        out.columns()[2 * i] = {"rocket", static_cast<std::uint32_t>(i), -1, "ppv"};
        out.columns()[2 * i + 1] = {"rocket", static_cast<std::uint32_t>(i), -1, "max"};
    });
    return out;
}

}  // namespace sprocket
