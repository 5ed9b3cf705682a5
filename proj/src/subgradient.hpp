#ifndef SIMLAND_SUBGRADIENT_HPP
#define SIMLAND_SUBGRADIENT_HPP

#include <algorithm>
#include <cmath>

#include "simland/dense_reg.hpp"
#include "simland/errors.hpp"
#include "simland/linear_model.hpp"

namespace simland::detail {

inline void project_l2_ball(Vector& w, double radius) {
    double n = norm2(w);
    if (n > radius) {
        double s = radius / n;
        for (double& v : w) v *= s;
    }
}

/**
 * Projected subgradient descent from w = 0 over ||w||_2 <= radius with step
 * radius / (lipschitz sqrt(t)). `oracle(w, grad)` returns the objective at w
 * and writes a subgradient into grad. Returns the iterate average, or the
 * best iterate if that is strictly better.
 */
template <class Oracle>
LinearModel projected_subgradient(std::size_t dim, double radius, double lipschitz, const SolverParams& params,
                                  Oracle&& oracle) {
    LinearModel model;
    model.norm_bound = radius;
    Vector w(dim, 0.0);
    Vector grad(dim, 0.0);
    double obj = oracle(w, grad);
    if (!std::isfinite(obj)) throw NumericError("objective is not finite");
    Vector best_w = w;
    double best = obj;
    Vector avg(dim, 0.0);
    auto& diag = model.diagnostics;

    if (lipschitz > 0.0) {
        for (std::size_t t = 1; t <= params.max_iters; ++t) {
            double step = radius / (lipschitz * std::sqrt(static_cast<double>(t)));
            for (std::size_t j = 0; j < dim; ++j) w[j] -= step * grad[j];
            project_l2_ball(w, radius);
            obj = oracle(w, grad);
            if (!std::isfinite(obj)) throw NumericError("objective diverged");
            if (obj < best) {
                best = obj;
                best_w = w;
            }
            const double inv_t = 1.0 / static_cast<double>(t);
            for (std::size_t j = 0; j < dim; ++j) avg[j] += (w[j] - avg[j]) * inv_t;
            if (params.record_history) {
                diag.best_objective_history.push_back(best);
                diag.max_iterate_norm = std::max(diag.max_iterate_norm, norm2(w));
            }
        }
        diag.iterations = params.max_iters;
    }

    Vector scratch(dim, 0.0);
    double avg_obj = oracle(avg, scratch);
    if (avg_obj <= best) {
        model.w = std::move(avg);
        diag.objective = avg_obj;
    } else {
        model.w = std::move(best_w);
        diag.objective = best;
    }
    return model;
}

inline double max_row_norm(const Matrix& x) {
    double g = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) g = std::max(g, norm2(x.row(i)));
    return g;
}

inline void require_finite(const Matrix& x, std::span<const double> y) {
    for (double v : x.data()) {
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw DataError("non-finite target value");
    }
}

} // namespace simland::detail

#endif
