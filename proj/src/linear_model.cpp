#include "simland/linear_model.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "csv_util.hpp"
#include "simland/errors.hpp"

namespace simland {

double predict(const LinearModel& m, std::span<const double> x_embedded) {
    if (x_embedded.size() != m.w.size()) {
        throw DataError("predict: model has dimension " + std::to_string(m.w.size()) + ", input has " +
                        std::to_string(x_embedded.size()));
    }
    return dot(m.w, x_embedded);
}

Vector predict_all(const LinearModel& m, const Matrix& x_embedded) {
    Vector out(x_embedded.rows());
    for (std::size_t i = 0; i < x_embedded.rows(); ++i) out[i] = predict(m, x_embedded.row(i));
    return out;
}

std::size_t sparsity(const LinearModel& m) {
    std::size_t n = 0;
    for (double v : m.w) {
        if (std::abs(v) > 1e-12) ++n;
    }
    return n;
}

void write_linear(std::ostream& out, const LinearModel& m) {
    out << "simland-linear v1 d=" << m.w.size() << " B=" << detail::format_double(m.norm_bound)
        << " eps=" << detail::format_double(m.epsilon) << '\n';
    for (double v : m.w) out << detail::format_double(v) << '\n';
}

namespace {

double header_value(const std::string& token, const std::string& key) {
    if (token.rfind(key + "=", 0) != 0) throw DataError("model header: expected '" + key + "=', got '" + token + "'");
    auto v = detail::parse_double(std::string_view(token).substr(key.size() + 1));
    if (!v) throw DataError("model header: bad value for " + key);
    return *v;
}

} // namespace

LinearModel read_linear(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("model file is empty");
    std::istringstream hs(line);
    std::string magic, version, dtok, btok, etok;
    hs >> magic >> version >> dtok >> btok >> etok;
    if (magic != "simland-linear" || version != "v1") throw DataError("not a simland-linear v1 model");
    double d = header_value(dtok, "d");
    if (d < 0 || d != std::floor(d)) throw DataError("model header: bad dimension");
    LinearModel m;
    m.norm_bound = header_value(btok, "B");
    m.epsilon = header_value(etok, "eps");
    m.w.reserve(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
        if (!std::getline(in, line)) throw DataError("model file truncated");
        auto v = detail::parse_double(line);
        if (!v || !std::isfinite(*v)) throw DataError("model file: bad weight on line " + std::to_string(i + 2));
        m.w.push_back(*v);
    }
    return m;
}

} // namespace simland
