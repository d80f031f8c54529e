#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace kslab {

/// Dense real matrix with row-major storage. Everything in this library is
/// desk scale (a few thousand entries per matrix at most), so there is no
/// sparse path and no view machinery; matrices are plain values.
class Matrix {
public:
    Matrix() = default;

    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(check_shape(rows, cols), fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(int rows, int cols) { return Matrix(rows, cols, 0.0); }
    static Matrix ones(int rows, int cols) { return Matrix(rows, cols, 1.0); }
    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    std::vector<double> col(int j) const;
    void set_col(int j, const std::vector<double>& v);

    Matrix transpose() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double scalar);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    /// Max absolute entrywise difference; throws on shape mismatch.
    double max_abs_diff(const Matrix& other) const;

private:
    static std::size_t check_shape(int rows, int cols);

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

}  // namespace kslab
