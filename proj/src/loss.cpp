#include "simland/loss.hpp"

#include <cmath>

#include "simland/errors.hpp"

namespace simland {

void LossParams::validate() const {
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
    if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
    if (!(delta_spacing > 0.0)) throw ConfigError("threshold spacing must be > 0");
}

double eps_insensitive(double a, double b, double eps) {
    double d = std::abs(a - b);
    return d < eps ? 0.0 : d - eps;
}

double eps_insensitive_grad(double a, double b, double eps) {
    double d = a - b;
    if (std::abs(d) <= eps || d == 0.0) return 0.0;
    return d > 0.0 ? 1.0 : -1.0;
}

double smoothed_eps(double a, double b, double eps, double beta) {
    double d = std::abs(a - b);
    if (d <= eps) return 0.0;
    const double excess = d - eps;
    const double half_step = 1.0 / (2.0 * beta);
    double value = excess < 1.0 / beta ? 0.5 * beta * excess * excess : excess - half_step;
    // keep excess - value <= 1/(2 beta) after rounding, not just in exact arithmetic
    while (excess - value > half_step) value = std::nextafter(value, excess);
    return value;
}

double smoothed_eps_grad(double a, double b, double eps, double beta) {
    double diff = a - b;
    double d = std::abs(diff);
    if (d <= eps) return 0.0;
    double sign = diff > 0.0 ? 1.0 : -1.0;
    double excess = d - eps;
    if (excess < 1.0 / beta) return beta * excess * sign;
    return sign;
}

double gamma_margin(double x, double gamma) { return gamma - x > 0.0 ? gamma - x : 0.0; }

double absolute(double a, double b) { return std::abs(a - b); }

double squared(double a, double b) { return (a - b) * (a - b); }

double squared(std::span<const double> s, std::span<const double> r) {
    if (s.size() != r.size()) throw DataError("squared loss: length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) total += squared(s[i], r[i]);
    return total;
}

double psi_delta(double x, double delta) {
    if (!(delta > 0.0)) throw ConfigError("psi_delta: spacing must be > 0");
    return x / delta + (delta - 1.0) / delta;
}

} // namespace simland
