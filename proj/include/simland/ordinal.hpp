#ifndef SIMLAND_ORDINAL_HPP
#define SIMLAND_ORDINAL_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include "simland/dense_reg.hpp"
#include "simland/linear_model.hpp"

namespace simland {

/**
 * Linear scorer plus thresholds b_2 < ... < b_r. b_1 = -inf and
 * b_{r+1} = +inf are implicit and not stored. Labels run 1..r.
 */
struct OrdinalModel {
    LinearModel linear;
    Vector thresholds;
    double gamma = 0.25;
    int num_labels = 2;
};

/** b_i = i - 1 for i = 2..r, i.e. (1, 2, ..., r-1). */
Vector fixed_thresholds(int r);

/**
 * Mean over samples of l_gamma(f - b_y) + l_gamma(b_{y+1} - f); terms with
 * an infinite threshold vanish.
 */
double ordinal_objective(std::span<const double> w, const Matrix& x_embedded, std::span<const int> labels,
                         std::span<const double> thresholds, double gamma);

/** Projected subgradient descent on ordinal_objective over ||w||_2 <= B with fixed thresholds. */
OrdinalModel fit_ordinal(const Matrix& x_embedded, std::span<const int> labels, int r, double norm_bound,
                         double gamma, const SolverParams& params = {});

/** Largest i with f >= b_i. */
int label_for_score(double f, std::span<const double> thresholds);
int predict_label(const OrdinalModel& m, std::span<const double> x_embedded);

struct OrdinalErrors {
    double aae = 0.0;       // mean |pred - label|
    double mislabel = 0.0;  // mean 1{pred != label}
};

OrdinalErrors ordinal_errors(std::span<const int> preds, std::span<const int> labels);

/**
 * Linear format followed by
 *   r=<r>
 *   gamma=<gamma>
 *   thresholds <b_2> ... <b_r>
 */
void write_ordinal(std::ostream& out, const OrdinalModel& m);
OrdinalModel read_ordinal(std::istream& in);

} // namespace simland

#endif
