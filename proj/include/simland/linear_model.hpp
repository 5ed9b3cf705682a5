#ifndef SIMLAND_LINEAR_MODEL_HPP
#define SIMLAND_LINEAR_MODEL_HPP

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "simland/embedding.hpp"
#include "simland/matrix.hpp"

namespace simland {

struct TrainingDiagnostics {
    std::size_t iterations = 0;
    double objective = 0.0;
    // Filled only when the solver is asked to record history.
    std::vector<double> best_objective_history;
    double max_iterate_norm = 0.0;
};

/** Weight vector over a landmarked space. */
struct LinearModel {
    Vector w;
    double norm_bound = 0.0;
    double epsilon = 0.0;
    std::shared_ptr<const Embedder> embedder;
    TrainingDiagnostics diagnostics;

    std::size_t dim() const { return w.size(); }
};

/** <w, x>. Throws DataError on dimension mismatch. */
double predict(const LinearModel& m, std::span<const double> x_embedded);
Vector predict_all(const LinearModel& m, const Matrix& x_embedded);

/** Number of coordinates with |w_j| > 1e-12. */
std::size_t sparsity(const LinearModel& m);

/**
 * Text format:
 *   simland-linear v1 d=<d> B=<B> eps=<eps>
 *   <w_1>
 *   ...
 *   <w_d>
 * Values are written with 17 significant digits.
 */
void write_linear(std::ostream& out, const LinearModel& m);
LinearModel read_linear(std::istream& in);

} // namespace simland

#endif
