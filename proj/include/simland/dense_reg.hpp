#ifndef SIMLAND_DENSE_REG_HPP
#define SIMLAND_DENSE_REG_HPP

#include <cstdint>
#include <span>

#include "simland/linear_model.hpp"
#include "simland/matrix.hpp"

namespace simland {

struct SolverParams {
    std::size_t max_iters = 2000;
    std::uint64_t seed = 0;
    bool record_history = false;
};

/** (1/n) sum_i l_eps(<w, x_i>, y_i). */
double dense_objective(std::span<const double> w, const Matrix& x, std::span<const double> y, double eps);

/**
 * Empirical eps-insensitive risk minimization over the ball ||w||_2 <= B by
 * projected subgradient descent, step B / (G sqrt(t)) with G the largest
 * row norm. Returns the uniform average of the iterates, or the best
 * iterate seen if that has a lower objective (the start w = 0 included),
 * so the result never does worse than the zero predictor.
 */
LinearModel fit_dense(const Matrix& x_embedded, std::span<const double> y, double norm_bound, double eps,
                      const SolverParams& params = {});

/**
 * Picks B from `grid` by validation MSE on a seeded 20% carve-out, then
 * refits on all rows with the chosen B.
 */
LinearModel fit_dense_select(const Matrix& x_embedded, std::span<const double> y, std::span<const double> grid,
                             double eps, const SolverParams& params = {});

} // namespace simland

#endif
