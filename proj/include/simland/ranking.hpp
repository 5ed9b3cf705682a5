#ifndef SIMLAND_RANKING_HPP
#define SIMLAND_RANKING_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "simland/data.hpp"
#include "simland/dense_reg.hpp"
#include "simland/embedding.hpp"
#include "simland/linear_model.hpp"

namespace simland {

/** One query with m documents; each row is a joint query-document feature vector. */
struct RankingInstance {
    std::string qid;
    Matrix documents;
    Vector relevance;
};

/** G(r) = 2^r - 1. */
double gain(double rel);
/** F(t) = ln(1 + t), t >= 1. */
double decay(std::size_t position);

/** max over permutations pi of sum_i v_i / F(pi(i)); attained by sorting v descending. */
double d_norm(std::span<const double> v);

/** G(r) / ||G(r)||_D. Throws DataError when every gain is zero. */
Vector eta_targets(std::span<const double> relevance);

/**
 * -(1 / ||G(r)||_D) sum_i G(r_i) / F(pi_s(i)), pi_s ranking the scores in
 * descending order with ties broken by index. Lies in [-1, 0].
 */
double ndcg_loss(std::span<const double> scores, std::span<const double> relevance);

struct RankerFit {
    LinearModel model;
    std::size_t skipped = 0;  // instances with zero total gain
};

/**
 * Flattens every query-document pair into one regression problem with
 * per-instance eta targets and minimizes the mean squared loss over
 * ||w||_2 <= B by projected gradient descent.
 */
RankerFit fit_ranker(std::span<const RankingInstance> instances, const Embedder& embedder, double norm_bound,
                     const SolverParams& params = {});

/** Mean ndcg_loss over instances with positive total gain. */
double eval_ranking(const LinearModel& model, std::span<const RankingInstance> instances, const Embedder& embedder);

/**
 * Grouped CSV: qid, f1..fd, rel. Consecutive rows sharing a qid form one
 * instance. Relevances are divided by the global maximum when it exceeds 1.
 */
std::vector<RankingInstance> load_ranking_csv(const std::string& path);

/** Groups consecutive rows with equal query id into instances. */
std::vector<RankingInstance> make_instances(const Dataset& ds);

} // namespace simland

#endif
