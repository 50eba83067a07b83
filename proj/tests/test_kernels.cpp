#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "sprocket/core.hpp"
#include "sprocket/kernels.hpp"

using namespace sprocket;

TEST_CASE("generate_kernels honors count and the admissible lengths") {
    RandomStream stream(3);
    auto set = generate_kernels(512, 100, 1, stream);
    REQUIRE(set.kernels.size() == 512);
    CHECK(set.input_length == 100);
    for (const auto& k : set.kernels) {
        const std::size_t lk = k.weights.size();
        CHECK((lk == 7 || lk == 9 || lk == 11));
        // mean-centered weights
        const double mean =
            std::accumulate(k.weights.begin(), k.weights.end(), 0.0) /
            static_cast<double>(lk);
        CHECK(std::abs(mean) <= 1e-12);
        CHECK(k.bias >= -1.0);
        CHECK(k.bias <= 1.0);
        CHECK(k.dilation >= 1);
        const std::uint32_t span = static_cast<std::uint32_t>(lk - 1) * k.dilation;
        CHECK((k.padding == 0 || k.padding == span / 2));
        CHECK(span <= 99 + 2 * k.padding);
        CHECK(k.channel == 0);
    }
}

TEST_CASE("generate_kernels is deterministic in the stream") {
    RandomStream stream(42);
    auto a = generate_kernels(32, 64, 2, stream);
    auto b = generate_kernels(32, 64, 2, stream);
    REQUIRE(a.kernels.size() == b.kernels.size());
    for (std::size_t i = 0; i < a.kernels.size(); ++i) {
        CHECK(a.kernels[i].weights == b.kernels[i].weights);
        CHECK(a.kernels[i].bias == b.kernels[i].bias);
        CHECK(a.kernels[i].dilation == b.kernels[i].dilation);
        CHECK(a.kernels[i].padding == b.kernels[i].padding);
        CHECK(a.kernels[i].channel == b.kernels[i].channel);
    }
}

TEST_CASE("boundary input length 9 keeps every kernel admissible") {
    RandomStream stream(5);
    auto set = generate_kernels(1000, 9, 1, stream);
    for (const auto& k : set.kernels) {
        const std::uint32_t span =
            static_cast<std::uint32_t>(k.weights.size() - 1) * k.dilation;
        CHECK(span <= 8 + 2 * k.padding);
        CHECK(activation_length(k, 9) >= 1);
    }
    CHECK_THROWS_AS((void)generate_kernels(8, 8, 1, stream), Error);
}

TEST_CASE("kernel length frequencies are near uniform") {
    RandomStream stream(1007);
    auto set = generate_kernels(10000, 100, 1, stream);
    std::size_t c7 = 0, c9 = 0, c11 = 0;
    for (const auto& k : set.kernels) {
        if (k.weights.size() == 7) ++c7;
        if (k.weights.size() == 9) ++c9;
        if (k.weights.size() == 11) ++c11;
    }
    const double third = 1.0 / 3.0;
    CHECK(std::abs(c7 / 10000.0 - third) <= 0.02);
    CHECK(std::abs(c9 / 10000.0 - third) <= 0.02);
    CHECK(std::abs(c11 / 10000.0 - third) <= 0.02);
}

TEST_CASE("multichannel kernels draw channels uniformly") {
    RandomStream stream(2024);
    auto set = generate_kernels(9000, 50, 3, stream);
    std::vector<std::size_t> per_channel(3, 0);
    for (const auto& k : set.kernels) {
        REQUIRE(k.channel < 3);
        ++per_channel[k.channel];
    }
    for (std::size_t c = 0; c < 3; ++c)
        CHECK(std::abs(per_channel[c] / 9000.0 - 1.0 / 3.0) <= 0.03);
}

TEST_CASE("apply_kernel matches the activation length formula") {
    Kernel k;
    k.weights.assign(9, 0.0);
    k.dilation = 4;
    k.padding = 0;
    CHECK(activation_length(k, 100) == 100 - 32);

    k.padding = 16;  // ((9-1)*4)/2
    CHECK(activation_length(k, 100) == 100);

    Kernel wide;
    wide.weights.assign(11, 0.0);
    wide.dilation = 2;
    wide.padding = 0;
    CHECK_THROWS_AS((void)activation_length(wide, 20), Error);
    CHECK_THROWS_AS(apply_kernel(wide, TimeSeries::univariate(std::vector<double>(20, 0.0))),
                    Error);
}

TEST_CASE("zero weights give a constant activation at the bias") {
    Kernel k;
    k.weights.assign(7, 0.0);
    k.bias = 0.5;
    k.dilation = 1;
    k.padding = 0;
    auto out = apply_kernel(k, TimeSeries::univariate({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}));
    REQUIRE(out.size() == 6);
    for (double v : out) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("mean-centered kernels annihilate constant series away from padding") {
    RandomStream stream(8);
    auto set = generate_kernels(64, 30, 1, stream);
    TimeSeries flat = TimeSeries::univariate(std::vector<double>(30, 3.25));
    std::size_t unpadded = 0;
    for (const auto& k : set.kernels) {
        const auto out = apply_kernel(k, flat);
        // positions whose receptive field reads zero padding see a truncated
        // weight sum, so only fully-interior positions collapse to the bias
        const std::size_t span = (k.weights.size() - 1) * k.dilation;
        for (std::size_t t = k.padding; t + span < k.padding + flat.length; ++t)
            CHECK(out[t] == doctest::Approx(k.bias).epsilon(1e-9));
        if (k.padding == 0) ++unpadded;
    }
    CHECK(unpadded > 0);  // the property is exercised end-to-end on some kernels
}

TEST_CASE("hand-computed convolution on a length-12 series") {
    Kernel k;
    k.weights = {0.5, -1.0, 0.25, 0.25, 0.5, -1.0, 0.5};  // sums to 0
    k.bias = 0.125;
    k.dilation = 1;
    k.padding = 0;
    std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8};
    auto out = apply_kernel(k, TimeSeries::univariate(x));
    REQUIRE(out.size() == 6);
    for (std::size_t t = 0; t < out.size(); ++t) {
        double expect = k.bias;
        for (std::size_t j = 0; j < 7; ++j) expect += k.weights[j] * x[t + j];
        CHECK(out[t] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("dilated padded convolution agrees with direct evaluation") {
    Kernel k;
    k.weights = {1.0, -2.0, 1.0};  // length 3 is fine for apply even if not generated
    k.bias = -0.5;
    k.dilation = 3;
    k.padding = 3;  // ((3-1)*3)/2
    std::vector<double> x{2, -1, 0, 4, 3, -2, 1, 0, 2, 5, -1, 3};
    auto out = apply_kernel(k, TimeSeries::univariate(x));
    const std::size_t l_out = 12 + 2 * 3 - 2 * 3;
    REQUIRE(out.size() == l_out);
    for (std::size_t t = 0; t < out.size(); ++t) {
        double expect = k.bias;
        for (std::size_t j = 0; j < 3; ++j) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(t) -
                                       static_cast<std::ptrdiff_t>(k.padding) +
                                       static_cast<std::ptrdiff_t>(j * k.dilation);
            const double xv =
                (idx >= 0 && idx < 12) ? x[static_cast<std::size_t>(idx)] : 0.0;
            expect += k.weights[j] * xv;
        }
        CHECK(out[t] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("shift covariance without padding") {
    Kernel k;
    k.weights = {0.3, -0.6, 0.1, 0.2};
    k.bias = 0.0;
    k.dilation = 2;
    k.padding = 0;
    RandomStream rng(17);
    auto x = testutil::random_series(20, rng);
    std::vector<double> shifted(x.begin() + 3, x.end());
    auto full = apply_kernel(k, TimeSeries::univariate(x));
    auto part = apply_kernel(k, TimeSeries::univariate(shifted));
    for (std::size_t t = 0; t < part.size(); ++t)
        CHECK(part[t] == doctest::Approx(full[t + 3]).epsilon(1e-12));
}

TEST_CASE("pooling computes ppv and max") {
    std::vector<double> act{-1.0, 1.0, 2.0};
    auto pooled = pool_features(act);
    CHECK(pooled.ppv == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(pooled.max == 2.0);

    std::vector<double> neg{-5.0, -0.25, -1.0};
    CHECK(pool_features(neg).ppv == 0.0);
    CHECK(pool_features(neg).max == -0.25);

    std::vector<double> empty;
    CHECK_THROWS_AS((void)pool_features(empty), Error);

    RandomStream rng(33);
    std::vector<double> sym(1000);
    for (auto& v : sym) v = rng.next_uniform(-1.0, 1.0);
    CHECK(std::abs(pool_features(sym).ppv - 0.5) <= 0.05);
}

TEST_CASE("rocket_transform shape and row identity") {
    auto ds = testutil::random_dataset(5, 40, 2, 7);
    ds.series[3] = ds.series[1];  // duplicate instance
    RandomStream stream(77);
    auto set = generate_kernels(512, 40, 1, stream);
    auto features = rocket_transform(ds, set);
    CHECK(features.rows() == 5);
    CHECK(features.cols() == 1024);
    REQUIRE(features.columns().size() == 1024);
    CHECK(features.columns()[0].pooling == "ppv");
    CHECK(features.columns()[1].pooling == "max");
    CHECK(features.columns()[2].kernel == 1);
    for (std::size_t c = 0; c < features.cols(); ++c)
        CHECK(features.at(1, c) == features.at(3, c));

    auto threaded = rocket_transform(ds, set, 4);
    CHECK(threaded.values() == features.values());
}

TEST_CASE("rocket_transform single kernel equals direct pooling") {
    auto ds = testutil::random_dataset(3, 12, 2, 5);
    RandomStream stream(9);
    KernelSet set;
    set.input_length = 12;
    Kernel k;
    k.weights = {0.25, -0.75, 0.5, 0.25, -0.25, 0.25, -0.25};
    k.bias = 0.1;
    k.dilation = 1;
    k.padding = 0;
    set.kernels.push_back(k);
    auto features = rocket_transform(ds, set);
    REQUIRE(features.cols() == 2);
    for (std::size_t r = 0; r < 3; ++r) {
        auto pooled = pool_features(apply_kernel(k, ds.series[r]));
        CHECK(features.at(r, 0) == pooled.ppv);
        CHECK(features.at(r, 1) == pooled.max);
    }
}
