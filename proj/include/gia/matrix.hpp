#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "gia/alloc_stats.hpp"

namespace gia {

// Dense row-major matrix of 64-bit floats. Immutable by convention once an
// operation has produced it; ops below return fresh values.
class Matrix {
public:
    using Storage = std::vector<double, alloc::Counting<double>>;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> vals);

    static Matrix identity(std::size_t n);
    static Matrix full(std::size_t rows, std::size_t cols, double value);
    static Matrix row_vector(std::initializer_list<double> vals);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    bool same_shape(const Matrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const noexcept;
    double max_abs() const noexcept;

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Storage data_;
};

namespace ops {

// c = a · b
Matrix matmul(const Matrix& a, const Matrix& b);
// c = aᵀ · b without materializing aᵀ
Matrix matmul_at(const Matrix& a, const Matrix& b);
// c = a · bᵀ without materializing bᵀ
Matrix matmul_bt(const Matrix& a, const Matrix& b);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix mul(const Matrix& a, const Matrix& b);  // elementwise
Matrix scale(const Matrix& a, double s);
// adds a 1×cols row vector to every row
Matrix add_row_broadcast(const Matrix& a, const Matrix& row);
Matrix transpose(const Matrix& a);
Matrix relu(const Matrix& a);

// Row-wise softmax of a/divisor with row-max subtraction. divisor > 0.
Matrix softmax_rows(const Matrix& a, double divisor);

double sum_all(const Matrix& a);
Matrix column_sums(const Matrix& a);  // 1×cols

}  // namespace ops

}  // namespace gia
