#ifndef SIMLAND_LOSS_HPP
#define SIMLAND_LOSS_HPP

#include <span>

namespace simland {

/** Hyperparameters shared by the losses. Positivity is checked by validate(). */
struct LossParams {
    double epsilon = 0.01;       // insensitivity half-width, >= 0
    double beta = 100.0;         // smoothing of the surrogate, > 0
    double gamma = 0.25;         // ordinal margin, > 0
    double delta_spacing = 1.0;  // threshold spacing, > 0

    void validate() const;
};

/** 0 inside the tube |a-b| < eps, |a-b| - eps outside. */
double eps_insensitive(double a, double b, double eps);

/** Subgradient in a; 0 on the tube boundary and at a == b. */
double eps_insensitive_grad(double a, double b, double eps);

/**
 * Smoothed eps-insensitive loss, inf_v [beta/2 v^2 + l_eps(a - v, b)]:
 *
 *   0                               |a-b| <= eps
 *   beta/2 (|a-b| - eps)^2          eps < |a-b| < eps + 1/beta
 *   |a-b| - eps - 1/(2 beta)        otherwise
 *
 * Satisfies 0 <= l_eps - smoothed_eps <= 1/(2 beta).
 */
double smoothed_eps(double a, double b, double eps, double beta);

/** d/da of smoothed_eps; beta-Lipschitz in a. */
double smoothed_eps_grad(double a, double b, double eps, double beta);

/** max(gamma - x, 0). */
double gamma_margin(double x, double gamma);

double absolute(double a, double b);
double squared(double a, double b);
/** ||s - r||_2^2. Throws on length mismatch. */
double squared(std::span<const double> s, std::span<const double> r);

/** (x + delta - 1) / delta. Maps margin-loss bounds onto ordinal error bounds. */
double psi_delta(double x, double delta);

} // namespace simland

#endif
