#include "sprocket/prototypes.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace sprocket {

std::size_t prototype_count(std::size_t n, double base) {
    if (n < 2) fail(ErrorCode::InvalidArgument, "prototype count needs n >= 2");
    if (!(base > 1.0)) fail(ErrorCode::InvalidArgument, "log base must exceed 1");
    std::size_t m = 1;
    long double acc = base;
    while (acc < static_cast<long double>(n)) {
        acc *= base;
        ++m;
    }
    return m;
}

std::vector<std::size_t> select_uniform(std::size_t n, std::size_t m, RandomStream& stream) {
    if (m > n)
        fail(ErrorCode::TooFewInstances,
             "cannot select " + std::to_string(m) + " of " + std::to_string(n));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t t = 0; t < m; ++t) {
        const std::size_t j = t + stream.next_below(n - t);
        std::swap(idx[t], idx[j]);
    }
    idx.resize(m);
    return idx;
}

std::vector<std::size_t> select_stratified(const std::vector<int>& labels, std::size_t m,
                                           RandomStream& stream) {
    const std::size_t n = labels.size();
    if (m > n)
        fail(ErrorCode::TooFewInstances,
             "cannot select " + std::to_string(m) + " of " + std::to_string(n));

    int max_label = 0;
    for (int lab : labels) {
        if (lab < 0) fail(ErrorCode::LabelMismatch, "labels must be dense nonnegative");
        max_label = std::max(max_label, lab);
    }
    const std::size_t c = static_cast<std::size_t>(max_label) + 1;
    std::vector<std::vector<std::size_t>> members(c);
    for (std::size_t i = 0; i < n; ++i)
        members[static_cast<std::size_t>(labels[i])].push_back(i);

    // quota_k = floor(m*n_k/n) with remainder m*n_k mod n, all integer.
    std::vector<std::size_t> quota(c);
    std::vector<std::size_t> rem(c);
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < c; ++k) {
        const std::size_t prod = m * members[k].size();
        quota[k] = prod / n;
        rem[k] = prod % n;
        assigned += quota[k];
    }
    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    std::size_t leftover = m - assigned;
    while (leftover > 0) {
        bool progressed = false;
        for (std::size_t k : order) {
            if (leftover == 0) break;
            if (quota[k] < members[k].size()) {
                ++quota[k];
                --leftover;
                progressed = true;
            }
        }
        if (!progressed) break;  // unreachable when m <= n
    }

    std::vector<std::size_t> out;
    out.reserve(m);
    for (std::size_t k = 0; k < c; ++k) {
        auto& pool = members[k];
        for (std::size_t t = 0; t < quota[k]; ++t) {
            const std::size_t j = t + stream.next_below(pool.size() - t);
            std::swap(pool[t], pool[j]);
            out.push_back(pool[t]);
        }
    }
    return out;
}

std::vector<std::size_t> select_kmeanspp_init(const std::vector<std::vector<double>>& points,
                                              std::size_t m, const DistanceMeasure& measure,
                                              RandomStream& stream,
                                              DistanceCallCounter* counter) {
    const std::size_t n = points.size();
    if (m > n)
        fail(ErrorCode::TooFewInstances,
             "cannot select " + std::to_string(m) + " of " + std::to_string(n));

    std::vector<std::size_t> chosen;
    chosen.reserve(m);
    std::vector<bool> taken(n, false);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    CostMatrixWorkspace ws;

    std::size_t center = stream.next_below(n);
    chosen.push_back(center);
    taken[center] = true;

    while (chosen.size() < m) {
        // Fold the newest center into the nearest-center distances: n - |C|
        // calls per added center.
        for (std::size_t x = 0; x < n; ++x) {
            if (taken[x]) continue;
            const double d = compute_distance(measure, points[x], points[center], counter, &ws);
            nearest[x] = std::min(nearest[x], d);
        }
        double total = 0.0;
        for (std::size_t x = 0; x < n; ++x)
            if (!taken[x]) total += nearest[x];

        std::size_t pick = n;
        if (total > 0.0) {
            const double r = stream.next_unit() * total;
            double acc = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                if (taken[x]) continue;
                acc += nearest[x];
                if (acc > r) {
                    pick = x;
                    break;
                }
            }
            if (pick == n) {  // float tail: last untaken candidate
                for (std::size_t x = n; x-- > 0;) {
                    if (!taken[x]) {
                        pick = x;
                        break;
                    }
                }
            }
        } else {
            // All remaining candidates coincide with a center: uniform choice.
            std::size_t remaining = 0;
            for (std::size_t x = 0; x < n; ++x)
                if (!taken[x]) ++remaining;
            std::size_t step = stream.next_below(remaining);
            for (std::size_t x = 0; x < n; ++x) {
                if (taken[x]) continue;
                if (step == 0) {
                    pick = x;
                    break;
                }
                --step;
            }
        }
        chosen.push_back(pick);
        taken[pick] = true;
        center = pick;
    }
    return chosen;
}

}  // namespace sprocket
