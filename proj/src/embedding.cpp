#include "simland/embedding.hpp"

#include <cmath>
#include <numeric>

#include "simland/data.hpp"
#include "simland/errors.hpp"

namespace simland {

std::string_view to_string(Normalization n) {
    return n == Normalization::scaled ? "scaled" : "unscaled";
}

Normalization parse_normalization(std::string_view name) {
    if (name == "scaled") return Normalization::scaled;
    if (name == "unscaled") return Normalization::unscaled;
    throw ConfigError("unknown normalization: " + std::string(name));
}

std::string_view to_string(LandmarkMode m) {
    return m == LandmarkMode::double_dip ? "double-dip" : "unlabeled-pool";
}

Embedder::Embedder(SimilaritySpec spec, Matrix landmarks, Normalization normalization, LandmarkMode mode,
                   std::vector<std::size_t> pool_indices)
    : spec_(std::move(spec)),
      landmarks_(std::move(landmarks)),
      normalization_(normalization),
      mode_(mode),
      pool_indices_(std::move(pool_indices)) {
    if (landmarks_.rows() == 0) throw ConfigError("embedder needs at least one landmark");
    if (!pool_indices_.empty() && pool_indices_.size() != landmarks_.rows()) {
        throw ConfigError("embedder: pool index count does not match landmark count");
    }
}

Vector Embedder::embed(std::span<const double> x) const {
    Vector out = similarity_row(spec_, x, landmarks_);
    if (normalization_ == Normalization::scaled) {
        const double s = 1.0 / std::sqrt(static_cast<double>(dim()));
        for (double& v : out) v *= s;
    }
    return out;
}

Matrix Embedder::embed_all(const Matrix& xs) const {
    Matrix out(xs.rows(), dim());
    for (std::size_t i = 0; i < xs.rows(); ++i) {
        Vector row = embed(xs.row(i));
        std::copy(row.begin(), row.end(), out.row(i).begin());
    }
    return out;
}

Embedder Embedder::prefix(std::size_t d) const {
    if (d == 0 || d > dim()) throw ConfigError("embedder prefix size out of range");
    std::vector<std::size_t> rows(d);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<std::size_t> idx;
    if (!pool_indices_.empty()) idx.assign(pool_indices_.begin(), pool_indices_.begin() + static_cast<long>(d));
    return Embedder(spec_, landmarks_.select_rows(rows), normalization_, mode_, std::move(idx));
}

Embedder Embedder::with_normalization(Normalization n) const {
    return Embedder(spec_, landmarks_, n, mode_, pool_indices_);
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (d > n) {
        throw ConfigError("cannot sample " + std::to_string(d) + " items from " + std::to_string(n));
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < d; ++i) {
        std::size_t j = i + rng.index(n - i);
        std::swap(perm[i], perm[j]);
    }
    perm.resize(d);
    return perm;
}

Embedder select_landmarks(const Matrix& pool, std::size_t d, LandmarkMode mode, std::uint64_t seed,
                          const SimilaritySpec& spec, Normalization normalization) {
    if (pool.rows() == 0) throw DataError("landmark pool is empty");
    if (d == 0) throw ConfigError("landmark count must be positive");
    if (d > pool.rows()) {
        throw ConfigError("landmark count " + std::to_string(d) + " exceeds pool size " +
                          std::to_string(pool.rows()));
    }
    auto idx = sample_without_replacement(pool.rows(), d, seed);
    Matrix landmarks = pool.select_rows(idx);
    return Embedder(spec, std::move(landmarks), normalization, mode, std::move(idx));
}

} // namespace simland
