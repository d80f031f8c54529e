#pragma once

#include "kslab/kron.hpp"
#include "kslab/matrix.hpp"
#include "kslab/model.hpp"

#include <string>
#include <vector>

namespace kslab {

/// Parameter bundle for the minimax lower-bound evaluators.
struct BoundInputs {
    int n_samples = 0;  // observation count N
    int m1 = 0, m2 = 0, p1 = 0, p2 = 0;
    double r = 1.0;                // neighborhood radius (Frobenius units)
    double sigma = 1.0;            // noise std
    double sigma_a = 1.0;          // sparse nonzero std
    int s = 1;                     // sparsity
    double sigma_x_spectral = 1.0; // ||Sigma_x||_2, general model
    double t = 0.5;                // separation parameter in (0,1)
    double c1 = 0.044;             // packing exponent coefficient

    int m() const { return m1 * m2; }
    int p() const { return p1 * p2; }
    /// p1(m1-1) + p2(m2-1), the perturbation degrees of freedom.
    int degrees() const { return p1 * (m1 - 1) + p2 * (m2 - 1); }

    void validate() const;
};

/// Evaluated lower bound. `value` is clamped at zero; a clamp is reported
/// through `vacuous` instead of a negative (information-free) number.
struct BoundResult {
    double value = 0.0;
    bool vacuous = false;
    double degrees_term = 0.0;     // c1 * degrees - 3
    long long ensemble_size = 0;   // L = floor(2^{c1 * degrees - 1})
    double precondition_cap = 0.0; // the bound's worst-case-MSE admissibility cap
};

/// Restricted isometry constant of order s with the extremal support.
struct RipReport {
    int s = 0;
    double delta = 0.0;
    IndexMultiset witness;
};

/// KL divergence between zero-mean Gaussians N(0, sigma1) and N(0, sigma2),
/// natural-log units: 0.5 * (tr(S2^-1 S1) - d + ln det S2 / det S1).
double kl_gaussian(const Matrix& sigma1, const Matrix& sigma2);

/// Observation covariance sigma_a^2 * D_S D_S^T + sigma^2 * I_m for a sparse
/// Gaussian coefficient with the given merged support. D_S is assembled from
/// the factor columns via split_indices + khatri_rao.
Matrix conditional_covariance(const KSDictionary& dict, const IndexMultiset& support,
                              double sigma_a, double sigma);

/// Conditional mutual-information budget for the general coefficient model
/// with full-coefficient side information: 4 N p ||Sigma_x||_2 eps' / (r^2 sigma^2).
/// Returns +inf at sigma = 0 (a noiseless channel has unbounded budget).
double mi_upper_general(const BoundInputs& in, double eps_prime);

/// Budget for the sparse Gaussian model with support side information:
/// 7921 (sigma_a/sigma)^4 N s^2 eps' / r^2. Assumes the coordinate
/// dictionaries satisfy RIP(s, 1/2); callers can audit via rip_constant.
double mi_upper_sparse_gaussian(const BoundInputs& in, double eps_prime);

/// Fano threshold 0.5 * log2(L) - 1; may be negative and is reported as-is.
double fano_lower(long long ensemble_size);

/// Ensemble cardinality floor(2^{c1 * degrees - 1}); capped at 2^62.
long long implied_ensemble_size(const BoundInputs& in);

/// General-coefficient minimax lower bound with C1 = (1-t) p / (32 r^2).
BoundResult thm1_bound(const BoundInputs& in);

/// Sparse-coefficient specialization: ||Sigma_x||_2 = (s/p) sigma_a^2.
BoundResult cor1_bound(const BoundInputs& in);

/// Sparse Gaussian bound with C2 = 1.58e-5 * p (1-t) / r^2.
BoundResult thm2_bound(const BoundInputs& in);

enum class CoeffClass { Sparse, GaussianSparse };
enum class DictStructure { Unstructured, Kronecker };

std::string to_string(CoeffClass c);
std::string to_string(DictStructure s);

/// Order-wise minimax scalings for the four (distribution, structure) cells.
double table1_scaling(CoeffClass dist, DictStructure structure, int m1, int m2, int p1, int p2,
                      double n_samples, double r, double snr_value);

/// Exhaustive RIP constant: max over all s-column supports of the Gram
/// eigenvalue deviation from 1. Witness ties break lexicographically.
/// Throws when C(p, s) exceeds `enumeration_budget`.
RipReport rip_constant(const Matrix& d, int s, long long enumeration_budget = 2'000'000);

/// The SNR at which cor1_bound and thm2_bound cross, found by bisection on
/// sigma_a at fixed (s, m, sigma). thm2_bound dominates below the returned
/// value, cor1_bound above it. Both bounds must be non-vacuous.
double crossover_snr(const BoundInputs& in);

}  // namespace kslab
