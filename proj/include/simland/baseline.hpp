#ifndef SIMLAND_BASELINE_HPP
#define SIMLAND_BASELINE_HPP

#include <span>

#include "simland/matrix.hpp"
#include "simland/similarity.hpp"

namespace simland {

/**
 * Nadaraya-Watson kernel regression, f(x) = sum y_i K(x, x_i) / sum K(x, x_i),
 * applied verbatim to indefinite kernels. When |sum K| < 1e-9 the training
 * target mean is returned instead.
 */
class KrModel {
public:
    KrModel(Matrix features, Vector targets, SimilaritySpec spec);
    /** Ordinal variant: predictions are rounded and clamped to 1..r. */
    KrModel(Matrix features, Vector targets, SimilaritySpec spec, int num_labels);

    double predict(std::span<const double> x) const;
    Vector predict_all(const Matrix& xs) const;

    bool ordinal() const { return num_labels_ > 0; }
    int num_labels() const { return num_labels_; }

private:
    Matrix features_;
    Vector targets_;
    SimilaritySpec spec_;
    int num_labels_ = 0;
    double target_mean_ = 0.0;
};

inline constexpr double kKrDenominatorFloor = 1e-9;

} // namespace simland

#endif
