#include "simland/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simland/errors.hpp"

namespace simland {

KrModel::KrModel(Matrix features, Vector targets, SimilaritySpec spec)
    : features_(std::move(features)), targets_(std::move(targets)), spec_(std::move(spec)) {
    if (features_.rows() == 0) throw DataError("kernel regression needs at least one training point");
    if (features_.rows() != targets_.size()) throw DataError("feature and target counts differ");
    target_mean_ = std::accumulate(targets_.begin(), targets_.end(), 0.0) / static_cast<double>(targets_.size());
}

KrModel::KrModel(Matrix features, Vector targets, SimilaritySpec spec, int num_labels)
    : KrModel(std::move(features), std::move(targets), std::move(spec)) {
    if (num_labels < 1) throw ConfigError("ordinal kernel regression needs a label count");
    num_labels_ = num_labels;
}

double KrModel::predict(std::span<const double> x) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < features_.rows(); ++i) {
        double k = evaluate(spec_, x, features_.row(i));
        num += targets_[i] * k;
        den += k;
    }
    double f = std::abs(den) < kKrDenominatorFloor ? target_mean_ : num / den;
    if (!std::isfinite(f)) throw NumericError("kernel regression produced a non-finite prediction");
    if (ordinal()) {
        f = std::clamp(std::round(f), 1.0, static_cast<double>(num_labels_));
    }
    return f;
}

Vector KrModel::predict_all(const Matrix& xs) const {
    Vector out(xs.rows());
    for (std::size_t i = 0; i < xs.rows(); ++i) out[i] = predict(xs.row(i));
    return out;
}

} // namespace simland
