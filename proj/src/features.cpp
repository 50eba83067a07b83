#include "sprocket/features.hpp"

#include <string>

namespace sprocket {

FeatureMatrix concat_features(const std::vector<const FeatureMatrix*>& parts) {
    if (parts.empty()) fail(ErrorCode::InvalidArgument, "nothing to concatenate");
    const std::size_t rows = parts.front()->rows();
    std::size_t cols = 0;
    for (const FeatureMatrix* m : parts) {
        if (m->rows() != rows)
            fail(ErrorCode::RowMismatch,
                 "cannot concatenate " + std::to_string(m->rows()) + " rows with " +
                     std::to_string(rows));
        cols += m->cols();
    }
    FeatureMatrix out(rows, cols);
    std::size_t offset = 0;
    for (const FeatureMatrix* m : parts) {
        for (std::size_t c = 0; c < m->cols(); ++c)
            out.columns()[offset + c] = m->columns()[c];
        for (std::size_t r = 0; r < rows; ++r) {
            auto src = m->row(r);
            auto dst = out.row(r);
            for (std::size_t c = 0; c < src.size(); ++c) dst[offset + c] = src[c];
        }
        offset += m->cols();
    }
    return out;
}

}  // namespace sprocket
