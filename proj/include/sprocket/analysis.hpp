#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sprocket/core.hpp"
#include "sprocket/distances.hpp"

namespace sprocket {

// Per-instance 0/1 correctness for one (algorithm, dataset, seed).
using CorrectnessVector = std::vector<int>;

struct PairwiseStats {
    std::optional<double> correlation;  // absent when either vector is constant
    std::optional<double> q_statistic;  // absent when N11*N00 + N01*N10 = 0
    double disagreement = 0.0;
    double double_fault = 0.0;
};

// Joint-correctness diversity statistics of two classifiers.
PairwiseStats pairwise_stats(const CorrectnessVector& a, const CorrectnessVector& b);

struct RankSummary {
    std::vector<double> mean_ranks;          // rank 1 = highest accuracy
    std::vector<std::size_t> best_finishes;  // strict-or-tied firsts per algorithm
};

// accuracy[algorithm][dataset]; ties share the mean of their rank positions.
RankSummary average_ranks(const std::vector<std::vector<double>>& accuracy);

// One-sided exact binomial tail P[X >= wins] with X ~ Bin(wins+losses, 1/2),
// log-domain binomials so counts up to 10^4 stay finite.
double sign_test(std::uint64_t wins, std::uint64_t losses);

// Expected distance calls of one fit: k * n * ceil(log_base n) * m, the
// integer form the instrumented counter realizes exactly (k = kernels per
// channel).
std::uint64_t predict_distance_calls(std::uint64_t kernels_per_channel, std::uint64_t n,
                                     double base, std::uint64_t channels);

// Relative cost units of the distance phase: elastic measures scale with
// l*w, the non-elastic baseline with l alone.
double predict_transform_cost(std::uint64_t kernels_per_channel, std::uint64_t n, double base,
                              std::uint64_t channels, std::uint64_t length, std::uint64_t window,
                              DistanceKind kind);

}  // namespace sprocket
