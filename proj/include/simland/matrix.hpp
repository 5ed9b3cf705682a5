#ifndef SIMLAND_MATRIX_HPP
#define SIMLAND_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace simland {

using Vector = std::vector<double>;

/** Dense row-major matrix of doubles. Rows are feature vectors. */
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        return {data_.data() + i * cols_, cols_};
    }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    /** Appends a row; the first row fixes the column count. */
    void push_row(std::span<const double> values);

    /** Rows selected by index, in the given order. */
    Matrix select_rows(std::span<const std::size_t> indices) const;

    std::span<const double> data() const { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm1(std::span<const double> v);
double norm_inf(std::span<const double> v);

} // namespace simland

#endif
