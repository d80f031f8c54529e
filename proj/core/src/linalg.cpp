#include "kslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kslab {

namespace {

void require_square(const Matrix& a, const char* who) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
    }
}

bool is_diagonal(const Matrix& a) {
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            if (i != j && a(i, j) != 0.0) return false;
        }
    }
    return a.rows() == a.cols();
}

// Eigenvalues of a symmetric 2x2 [[a,b],[b,c]], ascending.
std::pair<double, double> sym2x2_eigenvalues(double a, double b, double c) {
    const double mean = 0.5 * (a + c);
    const double dev = std::hypot(0.5 * (a - c), b);
    return {mean - dev, mean + dev};
}

}  // namespace

std::optional<Matrix> cholesky(const Matrix& a) {
    require_square(a, "cholesky");
    const int n = a.rows();
    Matrix l(n, n, 0.0);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

std::vector<double> forward_substitute(const Matrix& l, const std::vector<double>& b) {
    const int n = l.rows();
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    return y;
}

std::vector<double> backward_substitute(const Matrix& l, const std::vector<double>& y) {
    const int n = l.rows();
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

std::vector<double> cholesky_solve(const Matrix& l, const std::vector<double>& b) {
    return backward_substitute(l, forward_substitute(l, b));
}

double cholesky_log_det(const Matrix& l) {
    double s = 0.0;
    for (int i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

SymmetricEigen jacobi_eigen(const Matrix& a, double tol, int max_sweeps) {
    require_square(a, "jacobi_eigen");
    const int n = a.rows();
    Matrix w = a;
    // Symmetrize defensively against roundoff in the caller's product.
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double m = 0.5 * (w(i, j) + w(j, i));
            w(i, j) = m;
            w(j, i) = m;
        }
    }
    Matrix v = Matrix::identity(n);
    const double scale = std::max(w.frobenius_norm(), 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) off += w(i, j) * w(i, j);
        }
        if (std::sqrt(2.0 * off) <= tol * scale) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = w(p, q);
                if (apq == 0.0) continue;
                const double app = w(p, p);
                const double aqq = w(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double wkp = w(k, p);
                    const double wkq = w(k, q);
                    w(k, p) = c * wkp - s * wkq;
                    w(k, q) = s * wkp + c * wkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double wpk = w(p, k);
                    const double wqk = w(q, k);
                    w(p, k) = c * wpk - s * wqk;
                    w(q, k) = s * wpk + c * wqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return w(i, i) < w(j, j); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = w(order[k], order[k]);
        for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

Matrix psd_sqrt(const Matrix& a, double tol) {
    require_square(a, "psd_sqrt");
    const SymmetricEigen eig = jacobi_eigen(a);
    const double scale = std::max(std::fabs(eig.values.back()), 1.0);
    const int n = a.rows();
    Matrix root(n, n, 0.0);
    for (int k = 0; k < n; ++k) {
        double lambda = eig.values[k];
        if (lambda < -tol * scale) {
            throw std::invalid_argument("psd_sqrt: matrix is not positive semidefinite");
        }
        lambda = std::max(lambda, 0.0);
        const double sq = std::sqrt(lambda);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                root(i, j) += sq * eig.vectors(i, k) * eig.vectors(j, k);
            }
        }
    }
    return root;
}

double spectral_norm(const Matrix& a) {
    // Work with the smaller Gram operator.
    const bool wide = a.cols() > a.rows();
    const Matrix b = wide ? a.transpose() : a;  // rows >= cols
    const int n = b.cols();

    if (is_diagonal(a)) {
        double m = 0.0;
        for (int i = 0; i < std::min(a.rows(), a.cols()); ++i) m = std::max(m, std::fabs(a(i, i)));
        return m;
    }

    // Gram matrix G = B^T B (n x n with n = min dimension).
    Matrix g(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < b.rows(); ++k) s += b(k, i) * b(k, j);
            g(i, j) = s;
            g(j, i) = s;
        }
    }

    if (n == 1) return std::sqrt(g(0, 0));
    if (n == 2) {
        const auto [lo, hi] = sym2x2_eigenvalues(g(0, 0), g(0, 1), g(1, 1));
        (void)lo;
        return std::sqrt(std::max(hi, 0.0));
    }

    // Power iteration with a deterministic, non-degenerate start vector.
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * (i + 1);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;

    double lambda = 0.0;
    const int max_iters = 100000;
    for (int it = 0; it < max_iters; ++it) {
        std::vector<double> gv(n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) gv[i] += g(i, j) * v[j];
        }
        double next = 0.0;
        for (int i = 0; i < n; ++i) next += v[i] * gv[i];
        double gv_norm = 0.0;
        for (double x : gv) gv_norm += x * x;
        gv_norm = std::sqrt(gv_norm);
        if (gv_norm == 0.0) return 0.0;
        for (int i = 0; i < n; ++i) v[i] = gv[i] / gv_norm;
        if (it > 0 && std::fabs(next - lambda) <= 1e-10 * std::max(std::fabs(next), 1e-300)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace kslab
