#include "simland/dense_reg.hpp"

#include <cmath>
#include <limits>

#include "simland/data.hpp"
#include "simland/errors.hpp"
#include "simland/loss.hpp"
#include "subgradient.hpp"

namespace simland {

namespace {

void check_problem(const Matrix& x, std::span<const double> y, double norm_bound) {
    if (x.rows() == 0) throw DataError("empty training set");
    if (y.size() != x.rows()) throw DataError("feature and target counts differ");
    if (!(norm_bound > 0.0) || !std::isfinite(norm_bound)) throw ConfigError("norm bound B must be positive");
    detail::require_finite(x, y);
}

} // namespace

double dense_objective(std::span<const double> w, const Matrix& x, std::span<const double> y, double eps) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        total += eps_insensitive(dot(w, x.row(i)), y[i], eps);
    }
    return total / static_cast<double>(x.rows());
}

LinearModel fit_dense(const Matrix& x_embedded, std::span<const double> y, double norm_bound, double eps,
                      const SolverParams& params) {
    check_problem(x_embedded, y, norm_bound);
    if (!(eps >= 0.0)) throw ConfigError("epsilon must be >= 0");
    const std::size_t n = x_embedded.rows();
    const std::size_t d = x_embedded.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    auto oracle = [&](const Vector& w, Vector& grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto xi = x_embedded.row(i);
            double f = dot(w, xi);
            total += eps_insensitive(f, y[i], eps);
            double g = eps_insensitive_grad(f, y[i], eps);
            if (g != 0.0) {
                for (std::size_t j = 0; j < d; ++j) grad[j] += g * xi[j];
            }
        }
        for (double& v : grad) v *= inv_n;
        return total * inv_n;
    };

    LinearModel m = detail::projected_subgradient(d, norm_bound, detail::max_row_norm(x_embedded), params, oracle);
    m.epsilon = eps;
    return m;
}

LinearModel fit_dense_select(const Matrix& x_embedded, std::span<const double> y, std::span<const double> grid,
                             double eps, const SolverParams& params) {
    if (grid.empty()) throw ConfigError("norm-bound grid is empty");
    check_problem(x_embedded, y, grid.front());
    const std::size_t n = x_embedded.rows();
    if (n < 5) return fit_dense(x_embedded, y, grid.front(), eps, params);

    const std::size_t n_val = std::max<std::size_t>(1, n / 5);
    auto perm = sample_without_replacement(n, n, derive_seed(params.seed, 0, SeedPurpose::validation));
    std::vector<std::size_t> val_idx(perm.begin(), perm.begin() + static_cast<long>(n_val));
    std::vector<std::size_t> fit_idx(perm.begin() + static_cast<long>(n_val), perm.end());
    Matrix x_fit = x_embedded.select_rows(fit_idx);
    Matrix x_val = x_embedded.select_rows(val_idx);
    Vector y_fit, y_val;
    for (auto i : fit_idx) y_fit.push_back(y[i]);
    for (auto i : val_idx) y_val.push_back(y[i]);

    double best_b = grid.front();
    double best_mse = std::numeric_limits<double>::infinity();
    for (double b : grid) {
        LinearModel m = fit_dense(x_fit, y_fit, b, eps, params);
        double mse = 0.0;
        for (std::size_t i = 0; i < x_val.rows(); ++i) mse += squared(predict(m, x_val.row(i)), y_val[i]);
        mse /= static_cast<double>(x_val.rows());
        if (mse < best_mse) {
            best_mse = mse;
            best_b = b;
        }
    }
    return fit_dense(x_embedded, y, best_b, eps, params);
}

} // namespace simland
