#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sprocket/core.hpp"

namespace sprocket {

// Column provenance: distance features carry (kernel, prototype), pooled
// baseline features carry (kernel, pooling name). source tags the transform
// a column came from so concatenated ensembles stay auditable.
struct FeatureColumn {
    std::string source;
    std::uint32_t kernel = 0;
    std::int32_t prototype = -1;  // -1 for pooled columns
    std::string pooling;          // "ppv" / "max" for pooled columns, else empty
};

// Dense row-major matrix: rows = instances, columns = features.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0), columns_(cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) {
        return {values_.data() + r * cols_, cols_};
    }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    const std::vector<FeatureColumn>& columns() const { return columns_; }
    std::vector<FeatureColumn>& columns() { return columns_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
    std::vector<FeatureColumn> columns_;
};

// Column-wise concatenation in argument order, descriptors preserved.
// RowMismatch if row counts differ.
FeatureMatrix concat_features(const std::vector<const FeatureMatrix*>& parts);

}  // namespace sprocket
