#include "sprocket/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sprocket/prototypes.hpp"

namespace sprocket {

PairwiseStats pairwise_stats(const CorrectnessVector& a, const CorrectnessVector& b) {
    if (a.size() != b.size() || a.empty())
        fail(ErrorCode::LengthMismatch, "correctness vectors must share a positive length");
    double n11 = 0, n00 = 0, n10 = 0, n01 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] != 0 && a[i] != 1) || (b[i] != 0 && b[i] != 1))
            fail(ErrorCode::InvalidArgument, "correctness entries must be 0 or 1");
        if (a[i] == 1 && b[i] == 1) ++n11;
        else if (a[i] == 0 && b[i] == 0) ++n00;
        else if (a[i] == 1) ++n10;
        else ++n01;
    }
    const double n = static_cast<double>(a.size());

    PairwiseStats s;
    s.disagreement = (n01 + n10) / n;
    s.double_fault = n00 / n;

    const double q_denom = n11 * n00 + n01 * n10;
    if (q_denom > 0.0) s.q_statistic = (n11 * n00 - n01 * n10) / q_denom;

    const double mean_a = (n11 + n10) / n;
    const double mean_b = (n11 + n01) / n;
    const double var_a = mean_a * (1.0 - mean_a);
    const double var_b = mean_b * (1.0 - mean_b);
    if (var_a > 0.0 && var_b > 0.0) {
        const double cov = n11 / n - mean_a * mean_b;
        s.correlation = cov / std::sqrt(var_a * var_b);
    }
    return s;
}

RankSummary average_ranks(const std::vector<std::vector<double>>& accuracy) {
    if (accuracy.size() < 2)
        fail(ErrorCode::EmptyTable, "need at least two algorithms to rank");
    const std::size_t datasets = accuracy.front().size();
    if (datasets < 1) fail(ErrorCode::EmptyTable, "need at least one dataset to rank");
    for (const auto& row : accuracy)
        if (row.size() != datasets)
            fail(ErrorCode::LengthMismatch, "ragged accuracy table");

    const std::size_t algos = accuracy.size();
    RankSummary out;
    out.mean_ranks.assign(algos, 0.0);
    out.best_finishes.assign(algos, 0);

    std::vector<std::size_t> order(algos);
    for (std::size_t d = 0; d < datasets; ++d) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return accuracy[x][d] > accuracy[y][d];
        });
        // walk tie groups; a group spanning positions [i, j) gets the mean
        // rank (i+1 + j) / 2
        std::size_t i = 0;
        while (i < algos) {
            std::size_t j = i + 1;
            while (j < algos && accuracy[order[j]][d] == accuracy[order[i]][d]) ++j;
            const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
            for (std::size_t t = i; t < j; ++t) out.mean_ranks[order[t]] += rank;
            if (i == 0)
                for (std::size_t t = i; t < j; ++t) ++out.best_finishes[order[t]];
            i = j;
        }
    }
    for (double& r : out.mean_ranks) r /= static_cast<double>(datasets);
    return out;
}

double sign_test(std::uint64_t wins, std::uint64_t losses) {
    const std::uint64_t n = wins + losses;
    if (n < 1) fail(ErrorCode::InvalidArgument, "sign test needs at least one trial");
    if (wins == 0) return 1.0;
    const long double log_half_n = static_cast<long double>(n) * std::log(2.0L);
    const long double lg_n1 = std::lgamma(static_cast<long double>(n) + 1.0L);
    long double p = 0.0L;
    for (std::uint64_t i = n + 1; i-- > wins;) {
        const long double lg = lg_n1 - std::lgamma(static_cast<long double>(i) + 1.0L) -
                               std::lgamma(static_cast<long double>(n - i) + 1.0L) - log_half_n;
        p += std::exp(lg);
    }
    if (p > 1.0L) p = 1.0L;
    return static_cast<double>(p);
}

std::uint64_t predict_distance_calls(std::uint64_t kernels_per_channel, std::uint64_t n,
                                     double base, std::uint64_t channels) {
    const std::uint64_t m = prototype_count(static_cast<std::size_t>(n), base);
    return kernels_per_channel * n * m * channels;
}

double predict_transform_cost(std::uint64_t kernels_per_channel, std::uint64_t n, double base,
                              std::uint64_t channels, std::uint64_t length, std::uint64_t window,
                              DistanceKind kind) {
    double cost = static_cast<double>(predict_distance_calls(kernels_per_channel, n, base, channels)) *
                  static_cast<double>(length);
    if (is_elastic(kind)) cost *= static_cast<double>(window);
    return cost;
}

}  // namespace sprocket
