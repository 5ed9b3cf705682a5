#include "simland/similarity.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "csv_util.hpp"
#include "simland/embedding.hpp"
#include "simland/errors.hpp"

namespace simland {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw ConfigError(std::string("similarity parameter ") + what + " must be finite");
    }
}

std::size_t gram_index(double v, std::size_t n) {
    if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(n)) {
        throw DataError("precomputed similarity: point index out of range");
    }
    return static_cast<std::size_t>(v);
}

} // namespace

std::string_view to_string(SimilarityKind kind) {
    switch (kind) {
    case SimilarityKind::sigmoid: return "sigmoid";
    case SimilarityKind::manhattan: return "manhattan";
    case SimilarityKind::gaussian: return "gaussian";
    case SimilarityKind::euclidean: return "euclidean";
    case SimilarityKind::linear: return "linear";
    case SimilarityKind::precomputed: return "precomputed";
    }
    return "unknown";
}

SimilarityKind parse_similarity_kind(std::string_view name) {
    for (auto k : {SimilarityKind::sigmoid, SimilarityKind::manhattan, SimilarityKind::gaussian,
                   SimilarityKind::euclidean, SimilarityKind::linear, SimilarityKind::precomputed}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown similarity kind: " + std::string(name));
}

SimilaritySpec::SimilaritySpec(SimilarityKind kind, std::map<std::string, double> params,
                               std::shared_ptr<const Matrix> gram)
    : kind_(kind), params_(std::move(params)), gram_(std::move(gram)) {
    if (auto it = params_.find("a"); it != params_.end()) a_ = it->second;
    if (auto it = params_.find("r"); it != params_.end()) r_ = it->second;
    if (auto it = params_.find("sigma"); it != params_.end()) sigma_ = it->second;
}

SimilaritySpec SimilaritySpec::sigmoid(double a, double r) {
    require_finite(a, "a");
    require_finite(r, "r");
    return SimilaritySpec(SimilarityKind::sigmoid, {{"a", a}, {"r", r}}, nullptr);
}

SimilaritySpec SimilaritySpec::gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("gaussian sigma must be positive and finite");
    }
    return SimilaritySpec(SimilarityKind::gaussian, {{"sigma", sigma}}, nullptr);
}

SimilaritySpec SimilaritySpec::manhattan() { return SimilaritySpec(SimilarityKind::manhattan, {}, nullptr); }
SimilaritySpec SimilaritySpec::euclidean() { return SimilaritySpec(SimilarityKind::euclidean, {}, nullptr); }
SimilaritySpec SimilaritySpec::linear() { return SimilaritySpec(SimilarityKind::linear, {}, nullptr); }

SimilaritySpec SimilaritySpec::precomputed(std::shared_ptr<const Matrix> gram) {
    if (!gram || gram->rows() == 0 || gram->rows() != gram->cols()) {
        throw DataError("precomputed similarity matrix must be square and non-empty");
    }
    for (double v : gram->data()) {
        if (!std::isfinite(v)) throw DataError("precomputed similarity matrix has non-finite entries");
    }
    return SimilaritySpec(SimilarityKind::precomputed, {}, std::move(gram));
}

SimilaritySpec SimilaritySpec::make(SimilarityKind kind, const std::map<std::string, double>& params,
                                    std::shared_ptr<const Matrix> gram) {
    auto get = [&](const char* name) {
        auto it = params.find(name);
        if (it == params.end()) {
            throw ConfigError(std::string(to_string(kind)) + " similarity needs parameter '" + name + "'");
        }
        return it->second;
    };
    for (const auto& [name, value] : params) {
        bool known = (kind == SimilarityKind::sigmoid && (name == "a" || name == "r")) ||
                     (kind == SimilarityKind::gaussian && name == "sigma");
        if (!known) {
            throw ConfigError(std::string(to_string(kind)) + " similarity has no parameter '" + name + "'");
        }
    }
    switch (kind) {
    case SimilarityKind::sigmoid: return sigmoid(get("a"), get("r"));
    case SimilarityKind::gaussian: return gaussian(get("sigma"));
    case SimilarityKind::manhattan: return manhattan();
    case SimilarityKind::euclidean: return euclidean();
    case SimilarityKind::linear: return linear();
    case SimilarityKind::precomputed: return precomputed(std::move(gram));
    }
    throw ConfigError("unknown similarity kind");
}

double SimilaritySpec::param(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("similarity has no parameter '" + name + "'");
    return it->second;
}

std::string SimilaritySpec::describe() const {
    std::string out(to_string(kind_));
    if (!params_.empty()) {
        out += '(';
        bool first = true;
        for (const auto& [k, v] : params_) {
            if (!first) out += ',';
            first = false;
            std::ostringstream s;
            s << k << '=' << v;
            out += s.str();
        }
        out += ')';
    }
    return out;
}

double evaluate(const SimilaritySpec& spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DataError("similarity: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()) + ")");
    }
    double value = 0.0;
    switch (spec.kind()) {
    case SimilarityKind::sigmoid: {
        double ip = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) ip += x[i] * y[i];
        value = std::tanh(spec.a() * ip + spec.r());
        break;
    }
    case SimilarityKind::manhattan: {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
        value = -s;
        break;
    }
    case SimilarityKind::gaussian: {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = x[i] - y[i];
            s += d * d;
        }
        double sigma = spec.sigma();
        value = std::exp(-s / (2.0 * sigma * sigma));
        break;
    }
    case SimilarityKind::euclidean: {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = x[i] - y[i];
            s += d * d;
        }
        value = -s;
        break;
    }
    case SimilarityKind::linear: {
        for (std::size_t i = 0; i < x.size(); ++i) value += x[i] * y[i];
        break;
    }
    case SimilarityKind::precomputed: {
        const Matrix* g = spec.gram();
        if (x.size() != 1) throw DataError("precomputed similarity: points must be a single index");
        value = (*g)(gram_index(x[0], g->rows()), gram_index(y[0], g->rows()));
        break;
    }
    }
    if (!std::isfinite(value)) {
        throw NumericError("similarity evaluated to a non-finite value");
    }
    return value;
}

Vector similarity_row(const SimilaritySpec& spec, std::span<const double> x, const Matrix& landmarks) {
    Vector out(landmarks.rows());
    for (std::size_t i = 0; i < landmarks.rows(); ++i) {
        out[i] = evaluate(spec, x, landmarks.row(i));
    }
    return out;
}

double mean_pairwise_distance(const Matrix& points) {
    const std::size_t n = points.rows();
    if (n < 2) throw DataError("pairwise distance needs at least two points");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto a = points.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            auto b = points.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                double d = a[k] - b[k];
                s += d * d;
            }
            total += std::sqrt(s);
        }
    }
    return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

SimilaritySpec default_params(SimilarityKind kind, const Matrix& dataset, std::uint64_t seed) {
    if (dataset.rows() == 0) throw DataError("default_params: empty dataset");
    switch (kind) {
    case SimilarityKind::sigmoid:
        if (dataset.cols() == 0) throw DataError("default_params: dataset has no features");
        return SimilaritySpec::sigmoid(1.0 / static_cast<double>(dataset.cols()), -1.0);
    case SimilarityKind::gaussian: {
        if (dataset.rows() < 2) throw DataError("gaussian bandwidth needs at least two points");
        double sigma = 0.0;
        if (dataset.rows() > kSigmaSampleCap) {
            auto idx = sample_without_replacement(dataset.rows(), kSigmaSampleCap, seed);
            sigma = mean_pairwise_distance(dataset.select_rows(idx));
        } else {
            sigma = mean_pairwise_distance(dataset);
        }
        if (!(sigma > 0.0)) throw DataError("gaussian bandwidth: all points coincide");
        return SimilaritySpec::gaussian(sigma);
    }
    case SimilarityKind::manhattan: return SimilaritySpec::manhattan();
    case SimilarityKind::euclidean: return SimilaritySpec::euclidean();
    case SimilarityKind::linear: return SimilaritySpec::linear();
    case SimilarityKind::precomputed:
        throw ConfigError("precomputed similarity has no data-driven defaults; load the matrix instead");
    }
    throw ConfigError("unknown similarity kind");
}

std::shared_ptr<const Matrix> load_precomputed_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open similarity matrix " + path);
    auto m = std::make_shared<Matrix>();
    std::string line;
    std::size_t lineno = 0;
    Vector row;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        row.clear();
        for (auto field : detail::split_fields(line)) {
            auto v = detail::parse_double(field);
            if (!v) throw DataError(path + ":" + std::to_string(lineno) + ": non-numeric entry");
            row.push_back(*v);
        }
        if (!m->empty() && row.size() != m->cols()) {
            throw DataError(path + ":" + std::to_string(lineno) + ": ragged row");
        }
        m->push_row(row);
    }
    // precomputed() checks squareness and finiteness
    return SimilaritySpec::precomputed(m).gram_handle();
}

} // namespace simland
