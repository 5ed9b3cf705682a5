#include "simland/ordinal.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "csv_util.hpp"
#include "simland/errors.hpp"
#include "simland/loss.hpp"
#include "subgradient.hpp"

namespace simland {

Vector fixed_thresholds(int r) {
    if (r < 2) throw ConfigError("ordinal regression needs at least two labels");
    Vector b;
    for (int i = 2; i <= r; ++i) b.push_back(static_cast<double>(i - 1));
    return b;
}

namespace {

void check_labels(std::span<const int> labels, int r) {
    for (int y : labels) {
        if (y < 1 || y > r) {
            throw DataError("ordinal label " + std::to_string(y) + " outside 1.." + std::to_string(r));
        }
    }
}

// b_y and b_{y+1} for label y; infinities for the implicit ends.
double lower_threshold(std::span<const double> b, int y) {
    return y >= 2 ? b[static_cast<std::size_t>(y - 2)] : -INFINITY;
}

double upper_threshold(std::span<const double> b, int y) {
    return static_cast<std::size_t>(y) <= b.size() ? b[static_cast<std::size_t>(y - 1)] : INFINITY;
}

} // namespace

double ordinal_objective(std::span<const double> w, const Matrix& x_embedded, std::span<const int> labels,
                         std::span<const double> thresholds, double gamma) {
    if (labels.size() != x_embedded.rows()) throw DataError("feature and label counts differ");
    check_labels(labels, static_cast<int>(thresholds.size()) + 1);
    if (x_embedded.rows() == 0) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < x_embedded.rows(); ++i) {
        double f = dot(w, x_embedded.row(i));
        int y = labels[i];
        if (y >= 2) total += gamma_margin(f - lower_threshold(thresholds, y), gamma);
        if (static_cast<std::size_t>(y) <= thresholds.size()) total += gamma_margin(upper_threshold(thresholds, y) - f, gamma);
    }
    return total / static_cast<double>(x_embedded.rows());
}

OrdinalModel fit_ordinal(const Matrix& x_embedded, std::span<const int> labels, int r, double norm_bound,
                         double gamma, const SolverParams& params) {
    if (x_embedded.rows() == 0) throw DataError("empty training set");
    if (labels.size() != x_embedded.rows()) throw DataError("feature and label counts differ");
    if (!(norm_bound > 0.0) || !std::isfinite(norm_bound)) throw ConfigError("norm bound B must be positive");
    if (!(gamma > 0.0)) throw ConfigError("margin gamma must be positive");
    Vector b = fixed_thresholds(r);
    check_labels(labels, r);
    detail::require_finite(x_embedded, {});

    const std::size_t n = x_embedded.rows();
    const std::size_t d = x_embedded.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    auto oracle = [&](const Vector& w, Vector& grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto xi = x_embedded.row(i);
            double f = dot(w, xi);
            int y = labels[i];
            double coef = 0.0;
            if (y >= 2) {
                double m = f - lower_threshold(b, y);
                total += gamma_margin(m, gamma);
                if (m < gamma) coef -= 1.0;
            }
            if (static_cast<std::size_t>(y) <= b.size()) {
                double m = upper_threshold(b, y) - f;
                total += gamma_margin(m, gamma);
                if (m < gamma) coef += 1.0;
            }
            if (coef != 0.0) {
                for (std::size_t j = 0; j < d; ++j) grad[j] += coef * xi[j];
            }
        }
        for (double& v : grad) v *= inv_n;
        return total * inv_n;
    };

    // two hinge terms per sample, so the subgradient norm is at most 2 max ||x_i||
    OrdinalModel m;
    m.linear = detail::projected_subgradient(d, norm_bound, 2.0 * detail::max_row_norm(x_embedded), params, oracle);
    m.thresholds = std::move(b);
    m.gamma = gamma;
    m.num_labels = r;
    return m;
}

int label_for_score(double f, std::span<const double> thresholds) {
    int label = 1;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (f >= thresholds[i]) label = static_cast<int>(i) + 2;
    }
    return label;
}

int predict_label(const OrdinalModel& m, std::span<const double> x_embedded) {
    return label_for_score(predict(m.linear, x_embedded), m.thresholds);
}

OrdinalErrors ordinal_errors(std::span<const int> preds, std::span<const int> labels) {
    if (preds.size() != labels.size()) throw DataError("prediction and label counts differ");
    OrdinalErrors e;
    if (preds.empty()) return e;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        e.aae += std::abs(preds[i] - labels[i]);
        e.mislabel += preds[i] != labels[i] ? 1.0 : 0.0;
    }
    e.aae /= static_cast<double>(preds.size());
    e.mislabel /= static_cast<double>(preds.size());
    return e;
}

void write_ordinal(std::ostream& out, const OrdinalModel& m) {
    write_linear(out, m.linear);
    out << "r=" << m.num_labels << '\n';
    out << "gamma=" << detail::format_double(m.gamma) << '\n';
    out << "thresholds";
    for (double b : m.thresholds) out << ' ' << detail::format_double(b);
    out << '\n';
}

OrdinalModel read_ordinal(std::istream& in) {
    OrdinalModel m;
    m.linear = read_linear(in);
    std::string line;
    auto keyed = [&](const char* key) {
        if (!std::getline(in, line) || line.rfind(std::string(key) + "=", 0) != 0) {
            throw DataError(std::string("ordinal model: missing '") + key + "=' line");
        }
        auto v = detail::parse_double(std::string_view(line).substr(std::string(key).size() + 1));
        if (!v) throw DataError(std::string("ordinal model: bad ") + key);
        return *v;
    };
    double r = keyed("r");
    if (r < 2 || r != std::floor(r)) throw DataError("ordinal model: bad label count");
    m.num_labels = static_cast<int>(r);
    m.gamma = keyed("gamma");
    if (!std::getline(in, line)) throw DataError("ordinal model: missing thresholds");
    std::istringstream ts(line);
    std::string tok;
    ts >> tok;
    if (tok != "thresholds") throw DataError("ordinal model: missing thresholds");
    while (ts >> tok) {
        auto v = detail::parse_double(tok);
        if (!v) throw DataError("ordinal model: bad threshold");
        m.thresholds.push_back(*v);
    }
    if (m.thresholds.size() != static_cast<std::size_t>(m.num_labels - 1)) {
        throw DataError("ordinal model: threshold count does not match r");
    }
    for (std::size_t i = 1; i < m.thresholds.size(); ++i) {
        if (!(m.thresholds[i] > m.thresholds[i - 1])) throw DataError("ordinal model: thresholds not increasing");
    }
    return m;
}

} // namespace simland
