#ifndef SIMLAND_SPARSE_REG_HPP
#define SIMLAND_SPARSE_REG_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "simland/linear_model.hpp"
#include "simland/matrix.hpp"

namespace simland {

enum class FgsVariant { plain, fully_corrective };
enum class FgsSurrogate { smoothed_eps, squared };

std::string_view to_string(FgsVariant v);
std::string_view to_string(FgsSurrogate s);
FgsVariant parse_fgs_variant(std::string_view name);
FgsSurrogate parse_fgs_surrogate(std::string_view name);

/** Forward greedy selection over the L1 ball of radius c_w. */
struct FgsConfig {
    double c_w = 1.0;
    double tolerance = 0.1;   // stop once the duality gap delta_t <= tolerance
    double beta = 100.0;      // smoothness used by the step rule
    double tube = 0.01;       // insensitivity width of the smoothed surrogate
    std::optional<std::size_t> max_sparsity;
    FgsVariant variant = FgsVariant::plain;
    FgsSurrogate surrogate = FgsSurrogate::smoothed_eps;
    std::size_t corrective_steps = 200;

    /** max_sparsity if set, else ceil(8 c_w^2 / tolerance^2). */
    std::size_t steps() const;
    void validate() const;
};

struct FgsStep {
    std::size_t t = 0;
    std::size_t coordinate = 0;
    double delta = 0.0;
    double eta = 0.0;
    double objective = 0.0;   // surrogate risk after the update
    double l1_norm = 0.0;
    std::size_t nonzeros = 0;
};

struct FgsTrace {
    std::vector<FgsStep> steps;
    double final_delta = 0.0;  // gap at the last evaluated iterate
    bool converged = false;    // stopped on delta <= tolerance
};

struct FgsResult {
    LinearModel model;
    FgsTrace trace;
};

/** Mean surrogate loss (1/n) sum_i l(<w, x_i>, y_i). */
double surrogate_risk(std::span<const double> w, const Matrix& x, std::span<const double> y, const FgsConfig& cfg);

/** Gradient of surrogate_risk in w. */
Vector surrogate_gradient(std::span<const double> w, const Matrix& x, std::span<const double> y,
                          const FgsConfig& cfg);

/**
 * Each iteration takes the risk gradient theta, picks r = argmax_j |theta_j|
 * (lowest index on ties), computes the gap
 *   delta = <theta, w> + c_w ||theta||_inf
 * and stops when delta <= tolerance. Otherwise the plain variant moves to
 *   (1 - eta) w + eta sign(-theta_r) c_w e_r,   eta = min(1, delta / (4 c_w^2 beta)),
 * while the fully-corrective variant adds r to the support and refits all
 * support weights (exact least squares for the squared surrogate, projected
 * gradient for the smoothed one), shrinking back into the L1 ball if needed.
 *
 * x_embedded is expected in the unscaled normalization.
 */
FgsResult fit_fgs(const Matrix& x_embedded, std::span<const double> y, const FgsConfig& cfg);

/** CSV with header t,r_t,delta_t,eta_t,objective. */
void write_trace_csv(std::ostream& out, const FgsTrace& trace);

/** Euclidean projection onto {w : ||w||_1 <= radius}. */
Vector project_l1_ball(std::span<const double> v, double radius);

} // namespace simland

#endif
