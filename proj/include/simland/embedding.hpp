#ifndef SIMLAND_EMBEDDING_HPP
#define SIMLAND_EMBEDDING_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "simland/matrix.hpp"
#include "simland/similarity.hpp"

namespace simland {

/** scaled: Psi(x) = K(x, L) / sqrt(d).  unscaled: Psi(x) = K(x, L). */
enum class Normalization { scaled, unscaled };

/**
 * Where landmarks came from. `double_dip` means they were drawn from the
 * labeled training set itself and the learner may reuse them as examples.
 */
enum class LandmarkMode { unlabeled_pool, double_dip };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view name);
std::string_view to_string(LandmarkMode m);

/**
 * Fitted landmark map. Immutable once built; embed() is safe to call from
 * several threads.
 */
class Embedder {
public:
    Embedder(SimilaritySpec spec, Matrix landmarks, Normalization normalization,
             LandmarkMode mode = LandmarkMode::unlabeled_pool,
             std::vector<std::size_t> pool_indices = {});

    std::size_t dim() const { return landmarks_.rows(); }
    const Matrix& landmarks() const { return landmarks_; }
    const SimilaritySpec& spec() const { return spec_; }
    Normalization normalization() const { return normalization_; }
    LandmarkMode mode() const { return mode_; }
    /** Row indices of the landmarks in the pool they were sampled from, if known. */
    const std::vector<std::size_t>& pool_indices() const { return pool_indices_; }

    Vector embed(std::span<const double> x) const;
    Matrix embed_all(const Matrix& xs) const;

    /** The first d landmarks, same spec and normalization. */
    Embedder prefix(std::size_t d) const;
    Embedder with_normalization(Normalization n) const;

private:
    SimilaritySpec spec_;
    Matrix landmarks_;
    Normalization normalization_;
    LandmarkMode mode_;
    std::vector<std::size_t> pool_indices_;
};

/**
 * d distinct indices from [0, n), uniform without replacement. This is a
 * partial Fisher-Yates shuffle, so for a fixed seed the draw for d is a
 * prefix of the draw for any d' > d.
 */
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t d, std::uint64_t seed);

/** Samples d landmarks from the pool and builds the embedder. */
Embedder select_landmarks(const Matrix& pool, std::size_t d, LandmarkMode mode, std::uint64_t seed,
                          const SimilaritySpec& spec, Normalization normalization);

} // namespace simland

#endif
