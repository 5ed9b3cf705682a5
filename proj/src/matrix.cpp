#include "simland/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "simland/errors.hpp"

namespace simland {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    for (const auto& r : rows) {
        push_row(std::span<const double>(r.begin(), r.size()));
    }
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    Matrix m;
    for (const auto& r : rows) {
        m.push_row(r);
    }
    return m;
}

void Matrix::push_row(std::span<const double> values) {
    if (rows_ == 0 && data_.empty()) {
        cols_ = values.size();
    } else if (values.size() != cols_) {
        throw DataError("row has " + std::to_string(values.size()) + " columns, expected " +
                        std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) {
            throw std::out_of_range("row index out of range");
        }
        auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DataError("dot: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double norm1(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double norm_inf(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

} // namespace simland
