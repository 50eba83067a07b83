#include "sprocket/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Dense>

namespace sprocket {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Column standardization in place; returns (mean, scale) with population
// variance and scale 1 for constant columns.
void standardize(MatrixXd& X, std::vector<double>& mean, std::vector<double>& scale) {
    const auto n = static_cast<double>(X.rows());
    mean.resize(X.cols());
    scale.resize(X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const double mu = X.col(c).mean();
        const double var = (X.col(c).array() - mu).square().sum() / n;
        const double sd = std::sqrt(var);
        mean[c] = mu;
        scale[c] = sd > 0.0 ? sd : 1.0;
        X.col(c) = (X.col(c).array() - mu) / scale[c];
    }
}

}  // namespace

RidgeModel fit_ridge_cv(const FeatureMatrix& X, const std::vector<int>& y,
                        const std::vector<double>& alphas, RidgeCvReport* report) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    if (n < 2) fail(ErrorCode::InvalidArgument, "ridge needs at least 2 rows");
    if (y.size() != n)
        fail(ErrorCode::RowMismatch, std::to_string(y.size()) + " labels for " +
                                         std::to_string(n) + " rows");
    if (alphas.empty()) fail(ErrorCode::DegenerateAlphas, "no alphas given");
    for (double a : alphas)
        if (!(a > 0.0)) fail(ErrorCode::DegenerateAlphas, "alphas must be positive");

    std::set<int> distinct(y.begin(), y.end());
    if (distinct.size() < 2) fail(ErrorCode::SingleClass, "training labels are all one class");

    RidgeModel model;
    model.classes.assign(distinct.begin(), distinct.end());
    const std::size_t n_classes = model.classes.size();
    const std::size_t n_disc = n_classes == 2 ? 1 : n_classes;

    MatrixXd Xs(n, d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) Xs(r, c) = X.at(r, c);
    standardize(Xs, model.mean, model.scale);

    // +-1 one-vs-rest targets; binary keeps only the second class' column.
    MatrixXd Y(n, n_disc);
    for (std::size_t k = 0; k < n_disc; ++k) {
        const int cls = model.classes[n_classes == 2 ? 1 : k];
        for (std::size_t r = 0; r < n; ++r) Y(r, k) = y[r] == cls ? 1.0 : -1.0;
    }
    const Eigen::RowVectorXd y_mean = Y.colwise().mean();
    MatrixXd Yc = Y.rowwise() - y_mean;

    // Dual-form ridge on the Gram matrix: predictions and the hat diagonal
    // share the eigenbasis, so the leave-one-out curve costs one
    // eigendecomposition total.
    const MatrixXd G = Xs * Xs.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
    const VectorXd lambda = es.eigenvalues();
    const MatrixXd& Q = es.eigenvectors();
    const MatrixXd QtY = Q.transpose() * Yc;
    const MatrixXd Q2 = Q.array().square();

    double best_sse = 0.0;
    double best_alpha = 0.0;
    bool have_best = false;
    if (report) {
        report->alphas.clear();
        report->loo_sse.clear();
    }
    for (double alpha : alphas) {
        const VectorXd shrink = lambda.array() / (lambda.array() + alpha);
        const MatrixXd fitted = Q * (shrink.asDiagonal() * QtY);
        const VectorXd hat = Q2 * shrink;  // diagonal of G(G+aI)^-1
        double sse = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double denom = 1.0 - hat(static_cast<Eigen::Index>(r));
            for (std::size_t k = 0; k < n_disc; ++k) {
                const double e = (Yc(r, k) - fitted(r, k)) / denom;
                sse += e * e;
            }
        }
        if (report) {
            report->alphas.push_back(alpha);
            report->loo_sse.push_back(sse);
        }
        if (!have_best || sse < best_sse || (sse == best_sse && alpha < best_alpha)) {
            have_best = true;
            best_sse = sse;
            best_alpha = alpha;
        }
    }
    model.alpha = best_alpha;

    const VectorXd inv = (lambda.array() + best_alpha).inverse();
    const MatrixXd beta = Q * (inv.asDiagonal() * QtY);  // dual coefficients
    const MatrixXd W = Xs.transpose() * beta;            // (d, n_disc)

    model.weights.assign(n_disc, std::vector<double>(d));
    model.intercepts.resize(n_disc);
    for (std::size_t k = 0; k < n_disc; ++k) {
        for (std::size_t c = 0; c < d; ++c) model.weights[k][c] = W(c, k);
        model.intercepts[k] = y_mean(static_cast<Eigen::Index>(k));
    }
    return model;
}

std::vector<std::vector<double>> decision_scores(const RidgeModel& model, const FeatureMatrix& X) {
    const std::size_t d = model.mean.size();
    if (X.cols() != d)
        fail(ErrorCode::ShapeMismatch, std::to_string(X.cols()) + " columns against a model with " +
                                           std::to_string(d));
    std::vector<std::vector<double>> scores(X.rows(),
                                            std::vector<double>(model.weights.size(), 0.0));
    std::vector<double> std_row(d);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const auto row = X.row(r);
        for (std::size_t c = 0; c < d; ++c) std_row[c] = (row[c] - model.mean[c]) / model.scale[c];
        for (std::size_t k = 0; k < model.weights.size(); ++k) {
            double s = model.intercepts[k];
            const auto& w = model.weights[k];
            for (std::size_t c = 0; c < d; ++c) s += w[c] * std_row[c];
            scores[r][k] = s;
        }
    }
    return scores;
}

std::vector<int> predict(const RidgeModel& model, const FeatureMatrix& X) {
    const auto scores = decision_scores(model, X);
    std::vector<int> labels(X.rows());
    const bool binary = model.classes.size() == 2;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        if (binary) {
            labels[r] = scores[r][0] > 0.0 ? model.classes[1] : model.classes[0];
        } else {
            std::size_t best = 0;
            for (std::size_t k = 1; k < scores[r].size(); ++k)
                if (scores[r][k] > scores[r][best]) best = k;
            labels[r] = model.classes[best];
        }
    }
    return labels;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        fail(ErrorCode::LengthMismatch, "prediction/truth length mismatch");
    if (predicted.empty()) fail(ErrorCode::LengthMismatch, "empty prediction vector");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == truth[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace sprocket
