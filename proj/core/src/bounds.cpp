#include "kslab/bounds.hpp"

#include "kslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kslab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Binomial coefficient with saturation, for the enumeration budget check.
long long binomial_saturating(int n, int k, long long cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long result = 1;
    for (int i = 1; i <= k; ++i) {
        const double next = static_cast<double>(result) * (n - k + i) / i;
        if (next > static_cast<double>(cap) * 2.0) return cap * 2;
        result = result * (n - k + i) / i;
    }
    return result;
}

}  // namespace

void BoundInputs::validate() const {
    if (n_samples <= 0) throw std::invalid_argument("BoundInputs: N must be positive");
    if (m1 <= 0 || m2 <= 0 || p1 <= 0 || p2 <= 0) {
        throw std::invalid_argument("BoundInputs: dimensions must be positive");
    }
    if (!(r > 0.0)) throw std::invalid_argument("BoundInputs: r must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("BoundInputs: sigma must be positive");
    if (!(sigma_a > 0.0)) throw std::invalid_argument("BoundInputs: sigma_a must be positive");
    if (s < 1 || s > p()) throw std::invalid_argument("BoundInputs: need 1 <= s <= p");
    if (!(sigma_x_spectral > 0.0)) {
        throw std::invalid_argument("BoundInputs: sigma_x_spectral must be positive");
    }
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("BoundInputs: t must lie in (0,1)");
    // Evaluators accept the looser range 0 < c1 < t / (8 ln 2); the packing
    // constructions enforce the stricter t^2 form.
    if (!(c1 > 0.0 && c1 < t / (8.0 * kLn2))) {
        throw std::invalid_argument("BoundInputs: c1 must lie in (0, t/(8 ln 2))");
    }
}

double kl_gaussian(const Matrix& sigma1, const Matrix& sigma2) {
    if (!sigma1.same_shape(sigma2) || sigma1.rows() != sigma1.cols()) {
        throw std::invalid_argument("kl_gaussian: inputs must be square and of equal dimension");
    }
    const int d = sigma1.rows();
    const auto l1 = cholesky(sigma1);
    const auto l2 = cholesky(sigma2);
    if (!l1 || !l2) throw std::invalid_argument("kl_gaussian: inputs must be positive definite");

    // tr(S2^-1 S1) via column solves against the Cholesky factor of S2.
    double trace = 0.0;
    for (int j = 0; j < d; ++j) {
        const std::vector<double> x = cholesky_solve(*l2, sigma1.col(j));
        trace += x[j];
    }
    const double log_det1 = cholesky_log_det(*l1);
    const double log_det2 = cholesky_log_det(*l2);
    return 0.5 * (trace - d + log_det2 - log_det1);
}

Matrix conditional_covariance(const KSDictionary& dict, const IndexMultiset& support,
                              double sigma_a, double sigma) {
    if (support.empty()) throw std::invalid_argument("conditional_covariance: empty support");
    const auto [ia, ib] = split_indices(support, dict.p2());
    const Matrix d_s = khatri_rao(select_columns(dict.a, ia), select_columns(dict.b, ib));
    const int m = dict.m();
    Matrix cov(m, m, 0.0);
    const double va = sigma_a * sigma_a;
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            double acc = 0.0;
            for (int k = 0; k < d_s.cols(); ++k) acc += d_s(i, k) * d_s(j, k);
            const double value = va * acc;
            cov(i, j) = value;
            cov(j, i) = value;
        }
    }
    const double vn = sigma * sigma;
    for (int i = 0; i < m; ++i) cov(i, i) += vn;
    return cov;
}

double mi_upper_general(const BoundInputs& in, double eps_prime) {
    if (eps_prime < 0.0) throw std::invalid_argument("mi_upper_general: eps_prime must be >= 0");
    if (in.sigma == 0.0) return std::numeric_limits<double>::infinity();
    return 4.0 * in.n_samples * in.p() * in.sigma_x_spectral * eps_prime /
           (in.r * in.r * in.sigma * in.sigma);
}

double mi_upper_sparse_gaussian(const BoundInputs& in, double eps_prime) {
    if (eps_prime < 0.0) {
        throw std::invalid_argument("mi_upper_sparse_gaussian: eps_prime must be >= 0");
    }
    if (in.sigma == 0.0) return std::numeric_limits<double>::infinity();
    const double ratio = in.sigma_a / in.sigma;
    return 7921.0 * ratio * ratio * ratio * ratio * in.n_samples *
           static_cast<double>(in.s) * static_cast<double>(in.s) * eps_prime / (in.r * in.r);
}

double fano_lower(long long ensemble_size) {
    if (ensemble_size < 2) throw std::invalid_argument("fano_lower: need L >= 2");
    return 0.5 * std::log2(static_cast<double>(ensemble_size)) - 1.0;
}

long long implied_ensemble_size(const BoundInputs& in) {
    const double exponent = in.c1 * in.degrees() - 1.0;
    if (exponent >= 62.0) return 1LL << 62;
    return static_cast<long long>(std::floor(std::exp2(exponent)));
}

namespace {

BoundResult assemble_result(const BoundInputs& in, double scale, double cap) {
    BoundResult res;
    res.degrees_term = in.c1 * in.degrees() - 3.0;
    res.ensemble_size = implied_ensemble_size(in);
    res.precondition_cap = cap;
    const double raw = scale * res.degrees_term;
    if (raw <= 0.0) {
        res.value = 0.0;
        res.vacuous = true;
    } else {
        res.value = raw;
        res.vacuous = false;
    }
    return res;
}

}  // namespace

BoundResult thm1_bound(const BoundInputs& in) {
    in.validate();
    const double p = in.p();
    const double c_1 = (1.0 - in.t) * p / (32.0 * in.r * in.r);
    const double scale = c_1 * in.r * in.r * in.sigma * in.sigma /
                         (in.n_samples * p * in.sigma_x_spectral);
    const double cap = (2.0 * p * (1.0 - in.t) / 8.0) *
                       std::min(1.0, in.r * in.r / (4.0 * p));
    return assemble_result(in, scale, cap);
}

BoundResult cor1_bound(const BoundInputs& in) {
    in.validate();
    const double p = in.p();
    const double c_1 = (1.0 - in.t) * p / (32.0 * in.r * in.r);
    // Sigma_x = (s/p) sigma_a^2 I substituted into the general-coefficient value.
    const double scale = c_1 * in.r * in.r * in.sigma * in.sigma /
                         (in.n_samples * in.s * in.sigma_a * in.sigma_a);
    const double cap = (2.0 * p * (1.0 - in.t) / 8.0) *
                       std::min(1.0, in.r * in.r / (4.0 * p));
    return assemble_result(in, scale, cap);
}

BoundResult thm2_bound(const BoundInputs& in) {
    in.validate();
    const double p = in.p();
    const double c_2 = 1.58e-5 * p * (1.0 - in.t) / (in.r * in.r);
    const double sigma_sq = in.sigma * in.sigma;
    const double sigma_a_sq = in.sigma_a * in.sigma_a;
    const double scale = c_2 * in.r * in.r * sigma_sq * sigma_sq /
                         (in.n_samples * static_cast<double>(in.s) * in.s * sigma_a_sq * sigma_a_sq);
    const double cap = (2.0 * p * (1.0 - in.t) / 8.0) *
                       std::min(1.0 / in.s, in.r * in.r / (4.0 * p));
    return assemble_result(in, scale, cap);
}

std::string to_string(CoeffClass c) {
    return c == CoeffClass::Sparse ? "sparse" : "gaussian_sparse";
}

std::string to_string(DictStructure s) {
    return s == DictStructure::Unstructured ? "unstructured" : "kronecker";
}

double table1_scaling(CoeffClass dist, DictStructure structure, int m1, int m2, int p1, int p2,
                      double n_samples, double r, double snr_value) {
    if (m1 <= 0 || m2 <= 0 || p1 <= 0 || p2 <= 0 || !(n_samples > 0.0) || !(r > 0.0) ||
        !(snr_value > 0.0)) {
        throw std::invalid_argument("table1_scaling: arguments must be positive");
    }
    const double m = static_cast<double>(m1) * m2;
    const double p = static_cast<double>(p1) * p2;
    const double degrees = static_cast<double>(m1) * p1 + static_cast<double>(m2) * p2;
    const double r_sq = r * r;
    if (dist == CoeffClass::Sparse) {
        if (structure == DictStructure::Unstructured) return r_sq * p / (n_samples * snr_value);
        return r_sq * degrees / (n_samples * m * snr_value);
    }
    if (structure == DictStructure::Unstructured) {
        return r_sq * p / (n_samples * m * snr_value * snr_value);
    }
    return r_sq * degrees / (n_samples * m * m * snr_value * snr_value);
}

RipReport rip_constant(const Matrix& d, int s, long long enumeration_budget) {
    const int p = d.cols();
    if (s < 1 || s > p) throw std::invalid_argument("rip_constant: need 1 <= s <= p");
    const long long count = binomial_saturating(p, s, enumeration_budget);
    if (count > enumeration_budget) {
        throw std::invalid_argument("rip_constant: C(p, s) exceeds the enumeration budget; "
                                    "reduce s or p");
    }

    RipReport report;
    report.s = s;
    report.delta = -1.0;

    // Lexicographic enumeration of all s-subsets of [p].
    IndexMultiset support(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) support[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        // Gram matrix of the selected columns.
        Matrix gram(s, s);
        for (int a = 0; a < s; ++a) {
            for (int b = a; b < s; ++b) {
                double acc = 0.0;
                const int ca = support[static_cast<std::size_t>(a)] - 1;
                const int cb = support[static_cast<std::size_t>(b)] - 1;
                for (int i = 0; i < d.rows(); ++i) acc += d(i, ca) * d(i, cb);
                gram(a, b) = acc;
                gram(b, a) = acc;
            }
        }
        const SymmetricEigen eig = jacobi_eigen(gram);
        const double deviation = std::max(1.0 - eig.values.front(), eig.values.back() - 1.0);
        if (deviation > report.delta) {
            report.delta = deviation;
            report.witness = support;
        }

        // Next subset.
        int i = s - 1;
        while (i >= 0 && support[static_cast<std::size_t>(i)] == p - s + i + 1) --i;
        if (i < 0) break;
        ++support[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < s; ++j) {
            support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    report.delta = std::max(report.delta, 0.0);
    return report;
}

double crossover_snr(const BoundInputs& in) {
    in.validate();
    BoundInputs probe = in;

    const auto gap = [&probe](double sigma_a) {
        probe.sigma_a = sigma_a;
        const BoundResult cor1 = cor1_bound(probe);
        const BoundResult thm2 = thm2_bound(probe);
        if (cor1.vacuous || thm2.vacuous) {
            throw std::invalid_argument("crossover_snr: bounds are vacuous at these inputs");
        }
        return thm2.value - cor1.value;  // positive where the quartic bound dominates
    };

    // thm2/cor1 falls like (sigma/sigma_a)^2, so exactly one crossing exists.
    double lo = in.sigma * 1e-9;
    double hi = in.sigma * 1e+9;
    if (gap(lo) <= 0.0 || gap(hi) >= 0.0) {
        throw std::runtime_error("crossover_snr: no sign change in the searched sigma_a range");
    }
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if ((hi - lo) <= 1e-15 * hi) break;
    }
    const double sigma_a_star = 0.5 * (lo + hi);
    return static_cast<double>(in.s) * sigma_a_star * sigma_a_star /
           (static_cast<double>(in.m()) * in.sigma * in.sigma);
}

}  // namespace kslab
