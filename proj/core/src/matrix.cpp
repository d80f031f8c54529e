#include "kslab/matrix.hpp"

#include <cmath>

namespace kslab {

std::size_t Matrix::check_shape(int rows, int cols) {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("Matrix: rows and cols must be positive, got " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    }
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    data_.reserve(check_shape(rows_, cols_));
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != cols_) {
            throw std::invalid_argument("Matrix: ragged initializer list");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n, 0.0);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::col(int j) const {
    if (j < 0 || j >= cols_) throw std::out_of_range("Matrix::col: column index out of range");
    std::vector<double> v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void Matrix::set_col(int j, const std::vector<double>& v) {
    if (j < 0 || j >= cols_) throw std::out_of_range("Matrix::set_col: column index out of range");
    if (static_cast<int>(v.size()) != rows_) {
        throw std::invalid_argument("Matrix::set_col: length mismatch");
    }
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (!same_shape(other)) throw std::invalid_argument("Matrix::operator+=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (!same_shape(other)) throw std::invalid_argument("Matrix::operator-=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double scalar) {
    for (double& x : data_) x *= scalar;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("Matrix::operator*: inner dimension mismatch (" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
    }
    Matrix c(a.rows(), b.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::fabs(x));
    return m;
}

bool Matrix::all_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

double Matrix::max_abs_diff(const Matrix& other) const {
    if (!same_shape(other)) throw std::invalid_argument("Matrix::max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) {
        m = std::max(m, std::fabs(data_[k] - other.data_[k]));
    }
    return m;
}

}  // namespace kslab
