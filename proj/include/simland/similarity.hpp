#ifndef SIMLAND_SIMILARITY_HPP
#define SIMLAND_SIMILARITY_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "simland/matrix.hpp"

namespace simland {

enum class SimilarityKind { sigmoid, manhattan, gaussian, euclidean, linear, precomputed };

std::string_view to_string(SimilarityKind kind);
SimilarityKind parse_similarity_kind(std::string_view name);

/**
 * A similarity function K(x, y) with its parameters. Nothing here is
 * assumed PSD; sigmoid, manhattan and euclidean are all indefinite.
 *
 *   sigmoid    tanh(a <x,y> + r)
 *   manhattan  -||x - y||_1
 *   gaussian   exp(-||x - y||^2 / (2 sigma^2))
 *   euclidean  -||x - y||^2
 *   linear     <x,y>
 *
 * Values are not rescaled into [-1, 1]; norm bounds on the learners absorb
 * the scale.
 *
 * For `precomputed`, points are one-element vectors holding a row index
 * into a square matrix, so K(x, y) = M(x[0], y[0]).
 */
class SimilaritySpec {
public:
    static SimilaritySpec sigmoid(double a, double r);
    static SimilaritySpec gaussian(double sigma);
    static SimilaritySpec manhattan();
    static SimilaritySpec euclidean();
    static SimilaritySpec linear();
    static SimilaritySpec precomputed(std::shared_ptr<const Matrix> gram);

    /** Builds from a kind plus named parameters, validating both. */
    static SimilaritySpec make(SimilarityKind kind, const std::map<std::string, double>& params,
                               std::shared_ptr<const Matrix> gram = nullptr);

    SimilarityKind kind() const { return kind_; }
    const std::map<std::string, double>& params() const { return params_; }
    double param(const std::string& name) const;
    const Matrix* gram() const { return gram_.get(); }
    std::shared_ptr<const Matrix> gram_handle() const { return gram_; }

    // Cached copies of params() for the hot path.
    double a() const { return a_; }
    double r() const { return r_; }
    double sigma() const { return sigma_; }

    /** "manhattan", "sigmoid(a=0.125,r=-1)" and so on. */
    std::string describe() const;

private:
    SimilaritySpec(SimilarityKind kind, std::map<std::string, double> params,
                   std::shared_ptr<const Matrix> gram);

    SimilarityKind kind_;
    std::map<std::string, double> params_;
    std::shared_ptr<const Matrix> gram_;
    double a_ = 0.0;
    double r_ = 0.0;
    double sigma_ = 1.0;
};

/** K(x, y). Throws DataError on dimension mismatch, NumericError on a non-finite value. */
double evaluate(const SimilaritySpec& spec, std::span<const double> x, std::span<const double> y);

/** Row of similarities between x and every landmark row. */
Vector similarity_row(const SimilaritySpec& spec, std::span<const double> x, const Matrix& landmarks);

/** Cap on the number of points used for the gaussian bandwidth estimate. */
inline constexpr std::size_t kSigmaSampleCap = 2000;

/**
 * Data-driven parameters: sigmoid gets a = 1/p and r = -1 (p = feature
 * count); gaussian gets sigma = mean pairwise Euclidean distance over the
 * dataset (over a seeded sample of kSigmaSampleCap points when larger).
 */
SimilaritySpec default_params(SimilarityKind kind, const Matrix& dataset, std::uint64_t seed = 0);

/** Mean Euclidean distance over all unordered pairs of rows. */
double mean_pairwise_distance(const Matrix& points);

/** Dense CSV of reals, row i column j = K(i, j). Must be square and finite. */
std::shared_ptr<const Matrix> load_precomputed_csv(const std::string& path);

} // namespace simland

#endif
