#include "simland/sparse_reg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include <Eigen/Dense>

#include "csv_util.hpp"
#include "simland/errors.hpp"
#include "simland/loss.hpp"

namespace simland {

std::string_view to_string(FgsVariant v) { return v == FgsVariant::plain ? "plain" : "fully-corrective"; }

std::string_view to_string(FgsSurrogate s) { return s == FgsSurrogate::squared ? "squared" : "smoothed-eps"; }

FgsVariant parse_fgs_variant(std::string_view name) {
    if (name == "plain") return FgsVariant::plain;
    if (name == "fully-corrective") return FgsVariant::fully_corrective;
    throw ConfigError("unknown FGS variant: " + std::string(name));
}

FgsSurrogate parse_fgs_surrogate(std::string_view name) {
    if (name == "smoothed-eps") return FgsSurrogate::smoothed_eps;
    if (name == "squared") return FgsSurrogate::squared;
    throw ConfigError("unknown FGS surrogate: " + std::string(name));
}

std::size_t FgsConfig::steps() const {
    if (max_sparsity) return *max_sparsity;
    return static_cast<std::size_t>(std::ceil(8.0 * c_w * c_w / (tolerance * tolerance)));
}

void FgsConfig::validate() const {
    if (!(c_w > 0.0) || !std::isfinite(c_w)) throw ConfigError("C_W must be positive");
    if (!(tolerance > 0.0)) throw ConfigError("FGS tolerance must be positive");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (!(tube >= 0.0)) throw ConfigError("insensitivity width must be >= 0");
    if (max_sparsity && *max_sparsity == 0) throw ConfigError("max sparsity must be at least 1");
}

namespace {

double loss_value(double f, double y, const FgsConfig& cfg) {
    return cfg.surrogate == FgsSurrogate::squared ? squared(f, y) : smoothed_eps(f, y, cfg.tube, cfg.beta);
}

double loss_derivative(double f, double y, const FgsConfig& cfg) {
    return cfg.surrogate == FgsSurrogate::squared ? 2.0 * (f - y) : smoothed_eps_grad(f, y, cfg.tube, cfg.beta);
}

/** Gradient of the mean surrogate loss in w. */
Vector gradient_on(std::span<const double> w, const Matrix& x, std::span<const double> y, const FgsConfig& cfg) {
    const std::size_t n = x.rows();
    Vector grad(x.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = x.row(i);
        double g = loss_derivative(dot(w, xi), y[i], cfg);
        if (g == 0.0) continue;
        for (std::size_t j = 0; j < xi.size(); ++j) grad[j] += g * xi[j];
    }
    for (double& v : grad) v /= static_cast<double>(n);
    return grad;
}

void refit_squared(Vector& w, const std::vector<std::size_t>& support, const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows();
    const auto s = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd xs(static_cast<Eigen::Index>(n), s);
    for (std::size_t i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) xs(static_cast<Eigen::Index>(i), j) = x(i, support[j]);
    }
    Eigen::VectorXd ys = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd gram = xs.transpose() * xs;
    Eigen::VectorXd rhs = xs.transpose() * ys;
    // min-norm solution when the support columns are collinear
    Eigen::VectorXd sol = gram.completeOrthogonalDecomposition().solve(rhs);
    for (Eigen::Index j = 0; j < s; ++j) w[support[j]] = sol(j);
}

void refit_smoothed(Vector& w, const std::vector<std::size_t>& support, const Matrix& x, std::span<const double> y,
                    const FgsConfig& cfg) {
    const std::size_t n = x.rows();
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j : support) trace += x(i, j) * x(i, j);
    }
    trace /= static_cast<double>(n);
    if (trace <= 0.0) return;
    const double step = 1.0 / (cfg.beta * trace);
    Vector ws(support.size());
    for (std::size_t k = 0; k < support.size(); ++k) ws[k] = w[support[k]];
    Vector grad(support.size());
    for (std::size_t it = 0; it < cfg.corrective_steps; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double f = 0.0;
            for (std::size_t k = 0; k < support.size(); ++k) f += ws[k] * x(i, support[k]);
            double g = smoothed_eps_grad(f, y[i], cfg.tube, cfg.beta);
            if (g == 0.0) continue;
            for (std::size_t k = 0; k < support.size(); ++k) grad[k] += g * x(i, support[k]);
        }
        for (std::size_t k = 0; k < support.size(); ++k) ws[k] -= step * grad[k] / static_cast<double>(n);
        ws = project_l1_ball(ws, cfg.c_w);
    }
    for (std::size_t k = 0; k < support.size(); ++k) w[support[k]] = ws[k];
}

} // namespace

double surrogate_risk(std::span<const double> w, const Matrix& x, std::span<const double> y, const FgsConfig& cfg) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) total += loss_value(dot(w, x.row(i)), y[i], cfg);
    return total / static_cast<double>(x.rows());
}

Vector surrogate_gradient(std::span<const double> w, const Matrix& x, std::span<const double> y,
                          const FgsConfig& cfg) {
    return gradient_on(w, x, y, cfg);
}

Vector project_l1_ball(std::span<const double> v, double radius) {
    Vector out(v.begin(), v.end());
    if (norm1(v) <= radius) return out;
    Vector mags(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        cumsum += mags[i];
        double t = (cumsum - radius) / static_cast<double>(i + 1);
        if (mags[i] > t) theta = t;
    }
    for (double& x : out) {
        double m = std::max(std::abs(x) - theta, 0.0);
        x = x < 0.0 ? -m : m;
    }
    return out;
}

FgsResult fit_fgs(const Matrix& x_embedded, std::span<const double> y, const FgsConfig& cfg) {
    cfg.validate();
    if (x_embedded.rows() == 0) throw DataError("empty training set");
    if (y.size() != x_embedded.rows()) throw DataError("feature and target counts differ");
    const std::size_t d = x_embedded.cols();
    const std::size_t k = cfg.steps();

    FgsResult result;
    LinearModel& model = result.model;
    model.norm_bound = cfg.c_w;
    model.epsilon = cfg.tube;
    Vector w(d, 0.0);
    std::vector<std::size_t> support;
    std::vector<bool> in_support(d, false);
    FgsTrace& trace = result.trace;

    auto gap = [&](const Vector& theta, std::size_t& r) {
        r = 0;
        double best = -1.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (!std::isfinite(theta[j])) throw NumericError("risk gradient is not finite");
            if (std::abs(theta[j]) > best) {
                best = std::abs(theta[j]);
                r = j;
            }
        }
        return dot(theta, w) + cfg.c_w * std::max(best, 0.0);
    };

    std::size_t updates = 0;
    bool done = false;
    for (std::size_t t = 1; t <= k; ++t) {
        Vector theta = gradient_on(w, x_embedded, y, cfg);
        std::size_t r = 0;
        double delta = d == 0 ? 0.0 : gap(theta, r);
        trace.final_delta = delta;
        if (delta <= cfg.tolerance) {
            trace.converged = true;
            done = true;
            break;
        }
        double eta = std::min(1.0, delta / (4.0 * cfg.c_w * cfg.c_w * cfg.beta));
        if (cfg.variant == FgsVariant::plain) {
            for (double& v : w) v *= (1.0 - eta);
            w[r] += eta * (theta[r] < 0.0 ? 1.0 : -1.0) * cfg.c_w;
        } else {
            if (!in_support[r]) {
                in_support[r] = true;
                support.push_back(r);
            }
            if (cfg.surrogate == FgsSurrogate::squared) {
                refit_squared(w, support, x_embedded, y);
            } else {
                refit_smoothed(w, support, x_embedded, y, cfg);
            }
            double l1 = norm1(w);
            if (l1 > cfg.c_w) {
                for (double& v : w) v *= cfg.c_w / l1;
            }
        }
        ++updates;
        FgsStep step;
        step.t = t;
        step.coordinate = r;
        step.delta = delta;
        step.eta = eta;
        step.objective = surrogate_risk(w, x_embedded, y, cfg);
        step.l1_norm = norm1(w);
        step.nonzeros = static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double v) { return std::abs(v) > 1e-12; }));
        if (!std::isfinite(step.objective)) throw NumericError("surrogate risk is not finite");
        trace.steps.push_back(step);
    }
    if (!done && d > 0) {
        std::size_t r = 0;
        trace.final_delta = gap(gradient_on(w, x_embedded, y, cfg), r);
        trace.converged = trace.final_delta <= cfg.tolerance;
    }

    model.w = std::move(w);
    model.diagnostics.iterations = updates;
    model.diagnostics.objective = surrogate_risk(model.w, x_embedded, y, cfg);
    return result;
}

void write_trace_csv(std::ostream& out, const FgsTrace& trace) {
    out << "t,r_t,delta_t,eta_t,objective\n";
    for (const auto& s : trace.steps) {
        out << s.t << ',' << s.coordinate << ',' << detail::format_double(s.delta) << ','
            << detail::format_double(s.eta) << ',' << detail::format_double(s.objective) << '\n';
    }
}

} // namespace simland
