#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sprocket/core.hpp"

namespace sprocket {

// ---------------------------------------------------------------------------
// Measure descriptors
// ---------------------------------------------------------------------------

enum class DistanceKind {
    Euclidean,
    Dtw,
    Wdtw,
    Adtw,
    Erp,
    Twe,
    Msm,
};

const char* distance_kind_name(DistanceKind kind);
DistanceKind distance_kind_from_name(std::string_view name);  // ParseError on unknown

// Everything except euclidean is an elastic (DP) measure.
bool is_elastic(DistanceKind kind);

struct DistanceParams {
    double wdtw_g = 0.05;
    double adtw_omega = 1.0;
    double erp_gap = 0.0;
    double twe_nu = 0.001;
    double twe_lambda = 1.0;
    double msm_c = 1.0;
};

// window is the Sakoe-Chiba half-width in elements; nullopt = unconstrained.
// Euclidean ignores it.
struct DistanceMeasure {
    DistanceKind kind = DistanceKind::Msm;
    DistanceParams params{};
    std::optional<std::uint32_t> window{};
};

// Shared running total of pointwise distance evaluations. One increment per
// pair-level distance call, whatever the measure.
struct DistanceCallCounter {
    std::atomic<std::uint64_t> calls{0};

    void add(std::uint64_t n = 1) { calls.fetch_add(n, std::memory_order_relaxed); }
    std::uint64_t value() const { return calls.load(std::memory_order_relaxed); }
    void reset() { calls.store(0, std::memory_order_relaxed); }
};

// Two rolling DP rows plus measure-specific scratch (wdtw weight table),
// reused across calls to avoid per-call allocation. Contents are meaningless
// between calls.
struct CostMatrixWorkspace {
    std::vector<double> prev;
    std::vector<double> curr;
    std::vector<double> aux;

    void ensure(std::size_t cols) {
        if (prev.size() < cols) {
            prev.resize(cols);
            curr.resize(cols);
        }
    }
};

// ---------------------------------------------------------------------------
// Measures
//
// DP totals are returned as-is: squared-cost measures (dtw, wdtw, adtw) do
// not take a final square root, absolute-cost measures (erp, twe, msm) are
// plain sums. Euclidean is the usual L2 norm of the difference.
//
// Band admissibility for a cell (i, j), i in 1..|a|, j in 1..|b|, uses exact
// integer arithmetic: |i*|b| - j*|a|| <= W*|b| with W = max(window, ||a|-|b||),
// so edge cells never flip on float rounding.
// ---------------------------------------------------------------------------

double euclidean(std::span<const double> a, std::span<const double> b);

double dtw(std::span<const double> a, std::span<const double> b,
           std::optional<std::uint32_t> window = {}, CostMatrixWorkspace* ws = nullptr);

double wdtw(std::span<const double> a, std::span<const double> b, double g,
            std::optional<std::uint32_t> window = {}, CostMatrixWorkspace* ws = nullptr);

double adtw(std::span<const double> a, std::span<const double> b, double omega,
            std::optional<std::uint32_t> window = {}, CostMatrixWorkspace* ws = nullptr);

double erp(std::span<const double> a, std::span<const double> b, double gap,
           std::optional<std::uint32_t> window = {}, CostMatrixWorkspace* ws = nullptr);

double twe(std::span<const double> a, std::span<const double> b, double nu, double lambda,
           std::optional<std::uint32_t> window = {}, CostMatrixWorkspace* ws = nullptr);

double msm(std::span<const double> a, std::span<const double> b, double c,
           std::optional<std::uint32_t> window = {}, CostMatrixWorkspace* ws = nullptr);

// Dispatch on measure.kind. Bumps counter by one when given.
double compute_distance(const DistanceMeasure& measure,
                        std::span<const double> a, std::span<const double> b,
                        DistanceCallCounter* counter = nullptr,
                        CostMatrixWorkspace* ws = nullptr);

}  // namespace sprocket
