#include "kslab/kron.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kslab {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int ia = 0; ia < a.rows(); ++ia) {
        for (int ja = 0; ja < a.cols(); ++ja) {
            const double aij = a(ia, ja);
            for (int ib = 0; ib < b.rows(); ++ib) {
                for (int jb = 0; jb < b.cols(); ++jb) {
                    out(ia * b.rows() + ib, ja * b.cols() + jb) = aij * b(ib, jb);
                }
            }
        }
    }
    return out;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("khatri_rao: column counts differ (" +
                                    std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.cols()) + ")");
    }
    Matrix out(a.rows() * b.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j) {
        for (int ia = 0; ia < a.rows(); ++ia) {
            for (int ib = 0; ib < b.rows(); ++ib) {
                out(ia * b.rows() + ib, j) = a(ia, j) * b(ib, j);
            }
        }
    }
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("hadamard: dimension mismatch");
    Matrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * b(i, j);
    }
    return out;
}

double sum_entries(const Matrix& a) {
    double s = 0.0;
    for (double x : a.data()) s += x;
    return s;
}

Matrix vec(const Matrix& x) {
    Matrix out(x.rows() * x.cols(), 1);
    int k = 0;
    for (int j = 0; j < x.cols(); ++j) {
        for (int i = 0; i < x.rows(); ++i) out(k++, 0) = x(i, j);
    }
    return out;
}

Matrix unvec(const Matrix& v, int rows, int cols) {
    if (v.cols() != 1 || v.rows() != rows * cols) {
        throw std::invalid_argument("unvec: length " + std::to_string(v.rows() * v.cols()) +
                                    " does not match " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    }
    Matrix out(rows, cols);
    int k = 0;
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) out(i, j) = v(k++, 0);
    }
    return out;
}

IndexMultiset merge_indices(const IndexMultiset& ia, const IndexMultiset& ib, int p2) {
    if (ia.size() != ib.size()) {
        throw std::invalid_argument("merge_indices: index lists have different lengths");
    }
    if (p2 <= 0) throw std::invalid_argument("merge_indices: p2 must be positive");
    IndexMultiset merged(ia.size());
    for (std::size_t k = 0; k < ia.size(); ++k) {
        if (ia[k] < 1) throw std::out_of_range("merge_indices: ia entry below 1");
        if (ib[k] < 1 || ib[k] > p2) throw std::out_of_range("merge_indices: ib entry outside [1, p2]");
        merged[k] = (ia[k] - 1) * p2 + ib[k];
    }
    return merged;
}

std::pair<IndexMultiset, IndexMultiset> split_indices(const IndexMultiset& merged, int p2) {
    if (p2 <= 0) throw std::invalid_argument("split_indices: p2 must be positive");
    IndexMultiset ia(merged.size()), ib(merged.size());
    for (std::size_t k = 0; k < merged.size(); ++k) {
        if (merged[k] < 1) throw std::out_of_range("split_indices: entry below 1");
        ia[k] = (merged[k] - 1) / p2 + 1;
        ib[k] = (merged[k] - 1) % p2 + 1;
    }
    return {ia, ib};
}

Matrix select_columns(const Matrix& a, const IndexMultiset& indices) {
    if (indices.empty()) throw std::invalid_argument("select_columns: empty index list");
    Matrix out(a.rows(), static_cast<int>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const int j = indices[k];
        if (j < 1 || j > a.cols()) {
            throw std::out_of_range("select_columns: index " + std::to_string(j) +
                                    " outside [1, " + std::to_string(a.cols()) + "]");
        }
        for (int i = 0; i < a.rows(); ++i) out(i, static_cast<int>(k)) = a(i, j - 1);
    }
    return out;
}

double fro_distance(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("fro_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) {
        const double d = a.data()[k] - b.data()[k];
        s += d * d;
    }
    return std::sqrt(s);
}

Matrix normalize_columns(const Matrix& a) {
    Matrix out = a;
    for (int j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, j);
        s = std::sqrt(s);
        if (s == 0.0) {
            throw std::invalid_argument("normalize_columns: column " + std::to_string(j + 1) +
                                        " is zero");
        }
        for (int i = 0; i < a.rows(); ++i) out(i, j) = a(i, j) / s;
    }
    return out;
}

}  // namespace kslab
