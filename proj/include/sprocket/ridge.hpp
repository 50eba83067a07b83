#pragma once

#include <vector>

#include "sprocket/core.hpp"
#include "sprocket/features.hpp"

namespace sprocket {

// Linear one-vs-rest classifier on standardized features. Binary problems
// carry a single discriminant (positive score = second class in `classes`).
struct RidgeModel {
    std::vector<double> mean;    // per feature
    std::vector<double> scale;   // per feature, > 0 (constant columns get 1)
    std::vector<std::vector<double>> weights;  // one vector per discriminant
    std::vector<double> intercepts;
    std::vector<int> classes;    // sorted distinct training labels
    double alpha = 1.0;
};

// Per-alpha leave-one-out curve, exposed for verification.
struct RidgeCvReport {
    std::vector<double> alphas;
    std::vector<double> loo_sse;
};

// Standardize features (training mean / population std), encode targets as
// +-1 one-vs-rest centered by their mean, pick alpha by closed-form
// leave-one-out squared error (hat-matrix identity on the Gram
// eigendecomposition; no per-fold refits), then refit at the winner.
// Ties in the LOO curve go to the smaller alpha.
RidgeModel fit_ridge_cv(const FeatureMatrix& X, const std::vector<int>& y,
                        const std::vector<double>& alphas = {0.1, 1.0, 10.0},
                        RidgeCvReport* report = nullptr);

// argmax of per-class scores w_c . x_std + b_c, ties to the lowest class.
std::vector<int> predict(const RidgeModel& model, const FeatureMatrix& X);

// Decision scores, one row per instance, one column per discriminant.
std::vector<std::vector<double>> decision_scores(const RidgeModel& model, const FeatureMatrix& X);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace sprocket
