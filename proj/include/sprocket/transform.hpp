#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sprocket/config.hpp"
#include "sprocket/features.hpp"
#include "sprocket/kernels.hpp"
#include "sprocket/prototypes.hpp"

namespace sprocket {

// Band half-width from the ORIGINAL series length (not the activation
// length). nullopt = unconstrained.
std::optional<std::uint32_t> window_for(std::size_t length, const WindowRule& rule);

// Fitted transform: kernels plus, per kernel, its prototype activations and
// the (window-resolved) measure that scores against them.
struct PrototypeModel {
    RunConfig config;
    KernelSet kernel_set;
    std::vector<DistanceMeasure> measures;
    std::vector<PrototypeSet> prototypes;
    std::size_t input_length = 0;
    std::size_t channel_count = 0;
    std::size_t prototypes_per_kernel = 0;

    std::size_t feature_count() const {
        return kernel_set.kernels.size() * prototypes_per_kernel;
    }
    void validate() const;
};

// Accumulated per-kernel phase seconds plus distance-call tallies. The calls
// split feature scoring from prototype selection (kmeans++ is the only
// strategy that spends distance calls selecting).
struct TransformStats {
    double convolution_seconds = 0.0;
    double selection_seconds = 0.0;
    double distance_seconds = 0.0;
    std::uint64_t distance_calls = 0;
    std::uint64_t selection_distance_calls = 0;
};

struct FitResult {
    PrototypeModel model;
    FeatureMatrix features;
    TransformStats stats;
};

// Fit prototypes on training activations and emit the training feature
// matrix, shape (n, K*M) with M = prototype_count(n, base). An external
// counter, when given, receives every distance call (features + selection).
FitResult fit_sprocket(const TimeSeriesDataset& train, const RunConfig& config,
                       DistanceCallCounter* counter = nullptr);

// Score a dataset against a fitted model; on the training set this
// reproduces the fit-time matrix bit-exactly.
FeatureMatrix apply_sprocket(const PrototypeModel& model, const TimeSeriesDataset& data,
                             DistanceCallCounter* counter = nullptr,
                             TransformStats* stats = nullptr);

// JSON model container; load(save(m)) preserves apply_sprocket outputs
// bit-exactly.
void save_model(const PrototypeModel& model, const std::string& path);
PrototypeModel load_model(const std::string& path);

}  // namespace sprocket
