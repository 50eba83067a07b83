#include "sprocket/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sprocket {

const char* distance_kind_name(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::Euclidean: return "euclidean";
        case DistanceKind::Dtw:       return "dtw";
        case DistanceKind::Wdtw:      return "wdtw";
        case DistanceKind::Adtw:      return "adtw";
        case DistanceKind::Erp:       return "erp";
        case DistanceKind::Twe:       return "twe";
        case DistanceKind::Msm:       return "msm";
    }
    return "?";
}

DistanceKind distance_kind_from_name(std::string_view name) {
    if (name == "euclidean") return DistanceKind::Euclidean;
    if (name == "dtw")       return DistanceKind::Dtw;
    if (name == "wdtw")      return DistanceKind::Wdtw;
    if (name == "adtw")      return DistanceKind::Adtw;
    if (name == "erp")       return DistanceKind::Erp;
    if (name == "twe")       return DistanceKind::Twe;
    if (name == "msm")       return DistanceKind::Msm;
    fail(ErrorCode::ParseError, "unknown distance measure '" + std::string(name) + "'");
}

bool is_elastic(DistanceKind kind) {
    return kind != DistanceKind::Euclidean;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Effective band half-width. The admissibility test for cell (i,j) with
// i in 1..p, j in 1..q is |i*q - j*p| <= W*q, all in integers. W is widened
// to |p-q| so the corner cell (p,q) is always admissible.
struct Band {
    bool active = false;
    std::uint64_t W = 0;
    std::uint64_t p = 0;
    std::uint64_t q = 0;

    Band(std::size_t p_, std::size_t q_, std::optional<std::uint32_t> window)
        : p(p_), q(q_) {
        if (!window) return;
        const std::uint64_t diff = p > q ? p - q : q - p;
        W = std::max<std::uint64_t>(*window, diff);
        if (W < std::max(p, q)) active = true;
    }

    // Admissible column range [lo, hi] for row i, clamped to 1..q.
    // Empty range is signalled by lo > hi (cannot happen for 1 <= i <= p
    // once W >= |p-q|, but kept defensive).
    void row_range(std::uint64_t i, std::uint64_t& lo, std::uint64_t& hi) const {
        if (!active) {
            lo = 1;
            hi = q;
            return;
        }
        const std::uint64_t iq = i * q;
        const std::uint64_t wq = W * q;
        lo = iq > wq ? (iq - wq + p - 1) / p : 1;
        if (lo < 1) lo = 1;
        hi = (iq + wq) / p;
        if (hi > q) hi = q;
    }

    // Border admissibility: column 0 of row i, and row 0 at column j.
    bool col0(std::uint64_t i) const { return !active || i <= W; }
    bool row0(std::uint64_t j) const { return !active || j * p <= W * q; }
};

CostMatrixWorkspace& local_workspace(CostMatrixWorkspace* ws) {
    static thread_local CostMatrixWorkspace fallback;
    return ws ? *ws : fallback;
}

void check_nonempty(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        fail(ErrorCode::EmptySeries, "distance requires nonempty series");
}

double finish(double d) {
    if (std::isinf(d))
        fail(ErrorCode::BandTooNarrow, "no admissible warping path inside the band");
    return d;
}

}  // namespace

double euclidean(std::span<const double> a, std::span<const double> b) {
    check_nonempty(a, b);
    if (a.size() != b.size())
        fail(ErrorCode::LengthMismatch, "euclidean requires equal-length series");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double dtw(std::span<const double> a, std::span<const double> b,
           std::optional<std::uint32_t> window, CostMatrixWorkspace* ws) {
    check_nonempty(a, b);
    const std::size_t p = a.size(), q = b.size();
    const Band band(p, q, window);
    auto& w = local_workspace(ws);
    w.ensure(q + 1);
    double* prev = w.prev.data();
    double* curr = w.curr.data();

    std::fill(prev, prev + q + 1, kInf);
    prev[0] = 0.0;
    for (std::uint64_t i = 1; i <= p; ++i) {
        std::uint64_t lo, hi;
        band.row_range(i, lo, hi);
        std::fill(curr, curr + q + 1, kInf);
        for (std::uint64_t j = lo; j <= hi; ++j) {
            const double d = a[i - 1] - b[j - 1];
            const double best = std::min({prev[j - 1], prev[j], curr[j - 1]});
            curr[j] = d * d + best;
        }
        std::swap(prev, curr);
    }
    return finish(prev[q]);
}

double wdtw(std::span<const double> a, std::span<const double> b, double g,
            std::optional<std::uint32_t> window, CostMatrixWorkspace* ws) {
    check_nonempty(a, b);
    const std::size_t p = a.size(), q = b.size();
    const Band band(p, q, window);
    auto& w = local_workspace(ws);
    w.ensure(q + 1);
    double* prev = w.prev.data();
    double* curr = w.curr.data();

    // weight(delta) over the largest possible |i-j|; midpoint is half the
    // first series' length.
    const std::size_t dmax = std::max(p, q);
    if (w.aux.size() < dmax) w.aux.resize(dmax);
    const double mid = static_cast<double>(p) / 2.0;
    for (std::size_t d = 0; d < dmax; ++d)
        w.aux[d] = 1.0 / (1.0 + std::exp(-g * (static_cast<double>(d) - mid)));

    std::fill(prev, prev + q + 1, kInf);
    prev[0] = 0.0;
    for (std::uint64_t i = 1; i <= p; ++i) {
        std::uint64_t lo, hi;
        band.row_range(i, lo, hi);
        std::fill(curr, curr + q + 1, kInf);
        for (std::uint64_t j = lo; j <= hi; ++j) {
            const double d = a[i - 1] - b[j - 1];
            const std::uint64_t delta = i > j ? i - j : j - i;
            const double best = std::min({prev[j - 1], prev[j], curr[j - 1]});
            curr[j] = w.aux[delta] * d * d + best;
        }
        std::swap(prev, curr);
    }
    return finish(prev[q]);
}

double adtw(std::span<const double> a, std::span<const double> b, double omega,
            std::optional<std::uint32_t> window, CostMatrixWorkspace* ws) {
    check_nonempty(a, b);
    const std::size_t p = a.size(), q = b.size();
    const Band band(p, q, window);
    auto& w = local_workspace(ws);
    w.ensure(q + 1);
    double* prev = w.prev.data();
    double* curr = w.curr.data();

    std::fill(prev, prev + q + 1, kInf);
    prev[0] = 0.0;
    for (std::uint64_t i = 1; i <= p; ++i) {
        std::uint64_t lo, hi;
        band.row_range(i, lo, hi);
        std::fill(curr, curr + q + 1, kInf);
        for (std::uint64_t j = lo; j <= hi; ++j) {
            const double d = a[i - 1] - b[j - 1];
            const double best = std::min({prev[j - 1], prev[j] + omega, curr[j - 1] + omega});
            curr[j] = d * d + best;
        }
        std::swap(prev, curr);
    }
    return finish(prev[q]);
}

double erp(std::span<const double> a, std::span<const double> b, double gap,
           std::optional<std::uint32_t> window, CostMatrixWorkspace* ws) {
    check_nonempty(a, b);
    const std::size_t p = a.size(), q = b.size();
    const Band band(p, q, window);
    auto& w = local_workspace(ws);
    w.ensure(q + 1);
    double* prev = w.prev.data();
    double* curr = w.curr.data();

    prev[0] = 0.0;
    for (std::uint64_t j = 1; j <= q; ++j)
        prev[j] = band.row0(j) ? prev[j - 1] + std::abs(b[j - 1] - gap) : kInf;
    double col0 = 0.0;
    for (std::uint64_t i = 1; i <= p; ++i) {
        std::uint64_t lo, hi;
        band.row_range(i, lo, hi);
        std::fill(curr, curr + q + 1, kInf);
        col0 += std::abs(a[i - 1] - gap);
        curr[0] = band.col0(i) ? col0 : kInf;
        for (std::uint64_t j = lo; j <= hi; ++j) {
            const double match = prev[j - 1] + std::abs(a[i - 1] - b[j - 1]);
            const double drop_a = prev[j] + std::abs(a[i - 1] - gap);
            const double drop_b = curr[j - 1] + std::abs(b[j - 1] - gap);
            curr[j] = std::min({match, drop_a, drop_b});
        }
        std::swap(prev, curr);
    }
    return finish(prev[q]);
}

double twe(std::span<const double> a, std::span<const double> b, double nu, double lambda,
           std::optional<std::uint32_t> window, CostMatrixWorkspace* ws) {
    check_nonempty(a, b);
    const std::size_t p = a.size(), q = b.size();
    const Band band(p, q, window);
    auto& w = local_workspace(ws);
    w.ensure(q + 1);
    double* prev = w.prev.data();
    double* curr = w.curr.data();

    // Sequences behave as if prepended with a zero sample: a[0]=b[0]=0,
    // real values at indices 1..p / 1..q.
    auto av = [&](std::uint64_t i) { return i == 0 ? 0.0 : a[i - 1]; };
    auto bv = [&](std::uint64_t j) { return j == 0 ? 0.0 : b[j - 1]; };

    std::fill(prev, prev + q + 1, kInf);
    prev[0] = 0.0;
    for (std::uint64_t i = 1; i <= p; ++i) {
        std::uint64_t lo, hi;
        band.row_range(i, lo, hi);
        std::fill(curr, curr + q + 1, kInf);
        for (std::uint64_t j = lo; j <= hi; ++j) {
            const double dij = static_cast<double>(i > j ? i - j : j - i);
            const double match = prev[j - 1] + std::abs(av(i) - bv(j)) +
                                 std::abs(av(i - 1) - bv(j - 1)) + 2.0 * nu * dij;
            const double del_a = prev[j] + std::abs(av(i) - av(i - 1)) + lambda + nu;
            const double del_b = curr[j - 1] + std::abs(bv(j) - bv(j - 1)) + lambda + nu;
            curr[j] = std::min({match, del_a, del_b});
        }
        std::swap(prev, curr);
    }
    return finish(prev[q]);
}

namespace {

// Split/merge cost: c when u lies between v and t, otherwise c plus the
// distance from u to the nearer of the two.
double msm_cost(double u, double v, double t, double c) {
    if ((v <= u && u <= t) || (v >= u && u >= t)) return c;
    return c + std::min(std::abs(u - v), std::abs(u - t));
}

}  // namespace

double msm(std::span<const double> a, std::span<const double> b, double c,
           std::optional<std::uint32_t> window, CostMatrixWorkspace* ws) {
    check_nonempty(a, b);
    const std::size_t p = a.size(), q = b.size();
    const Band band(p, q, window);
    auto& w = local_workspace(ws);
    w.ensure(q + 1);
    double* prev = w.prev.data();
    double* curr = w.curr.data();

    // Row 1 runs along b with merge costs; column 0 stays +inf so the
    // 1-based recurrences below never step outside the matrix. Cell (1,1)
    // is always admissible because W >= |p-q|.
    std::fill(prev, prev + q + 1, kInf);
    {
        std::uint64_t lo, hi;
        band.row_range(1, lo, hi);
        prev[1] = std::abs(a[0] - b[0]);
        for (std::uint64_t j = std::max<std::uint64_t>(2, lo); j <= hi; ++j)
            prev[j] = prev[j - 1] + msm_cost(b[j - 1], b[j - 2], a[0], c);
    }
    for (std::uint64_t i = 2; i <= p; ++i) {
        std::uint64_t lo, hi;
        band.row_range(i, lo, hi);
        std::fill(curr, curr + q + 1, kInf);
        if (lo <= 1 && 1 <= hi)
            curr[1] = prev[1] + msm_cost(a[i - 1], a[i - 2], b[0], c);
        for (std::uint64_t j = std::max<std::uint64_t>(2, lo); j <= hi; ++j) {
            const double move = prev[j - 1] + std::abs(a[i - 1] - b[j - 1]);
            const double split = prev[j] + msm_cost(a[i - 1], a[i - 2], b[j - 1], c);
            const double merge = curr[j - 1] + msm_cost(b[j - 1], b[j - 2], a[i - 1], c);
            curr[j] = std::min({move, split, merge});
        }
        std::swap(prev, curr);
    }
    return finish(prev[q]);
}

double compute_distance(const DistanceMeasure& measure,
                        std::span<const double> a, std::span<const double> b,
                        DistanceCallCounter* counter, CostMatrixWorkspace* ws) {
    if (counter) counter->add();
    switch (measure.kind) {
        case DistanceKind::Euclidean:
            return euclidean(a, b);
        case DistanceKind::Dtw:
            return dtw(a, b, measure.window, ws);
        case DistanceKind::Wdtw:
            return wdtw(a, b, measure.params.wdtw_g, measure.window, ws);
        case DistanceKind::Adtw:
            return adtw(a, b, measure.params.adtw_omega, measure.window, ws);
        case DistanceKind::Erp:
            return erp(a, b, measure.params.erp_gap, measure.window, ws);
        case DistanceKind::Twe:
            return twe(a, b, measure.params.twe_nu, measure.params.twe_lambda,
                       measure.window, ws);
        case DistanceKind::Msm:
            return msm(a, b, measure.params.msm_c, measure.window, ws);
    }
    fail(ErrorCode::InvalidArgument, "unhandled distance kind");
}

}  // namespace sprocket
