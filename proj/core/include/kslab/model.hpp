#pragma once

#include "kslab/kron.hpp"
#include "kslab/matrix.hpp"
#include "kslab/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kslab {

/// Kronecker-structured dictionary D = A (x) B with unit-norm columns.
/// The full product is cached; an overcomplete D (m < p) is the intended
/// use, but coordinate factors may individually be square or tall.
struct KSDictionary {
    Matrix a;  // m1 x p1
    Matrix b;  // m2 x p2
    Matrix d;  // (m1*m2) x (p1*p2), cached kron(a, b)

    int m1() const { return a.rows(); }
    int p1() const { return a.cols(); }
    int m2() const { return b.rows(); }
    int p2() const { return b.cols(); }
    int m() const { return d.rows(); }
    int p() const { return d.cols(); }
};

/// Builds the cached dictionary; every column of a and b must already be
/// unit norm (within norm_tol on |  ||col||^2 - 1 |).
KSDictionary build_ks_dictionary(const Matrix& a, const Matrix& b, double norm_tol = 1e-10);

/// Gaussian matrix with columns normalized to unit norm.
Matrix random_unit_norm_matrix(int rows, int cols, Rng& rng);

/// Reference dictionary with random unit-norm coordinate factors.
KSDictionary random_dictionary(int m1, int p1, int m2, int p2, std::uint64_t seed);

enum class CoeffVariant { General, SparseUniform, SparseGaussian };

/// Coefficient-vector law. General carries an explicit covariance; the
/// sparse variants draw a uniformly random s-subset support with i.i.d.
/// nonzeros of variance sigma_a^2 (Rademacher * sigma_a for SparseUniform,
/// Gaussian for SparseGaussian).
struct CoefficientModel {
    CoeffVariant variant = CoeffVariant::SparseGaussian;
    Matrix sigma_x;        // p x p covariance, General only
    int s = 0;             // sparsity, sparse variants only
    double sigma_a = 1.0;  // nonzero std, sparse variants only

    static CoefficientModel general(Matrix covariance);
    static CoefficientModel sparse_uniform(int s, double sigma_a);
    static CoefficientModel sparse_gaussian(int s, double sigma_a);

    bool sparse() const { return variant != CoeffVariant::General; }

    /// Throws when the model is inconsistent with coefficient dimension p.
    void validate(int p) const;
};

std::string to_string(CoeffVariant v);
CoeffVariant coeff_variant_from_string(const std::string& name);

/// Synthetic observations Y = D X + N with the coefficient draw metadata
/// needed to reproduce or audit the dataset.
struct Dataset {
    Matrix y;                             // m x N
    Matrix x;                             // p x N
    std::vector<IndexMultiset> supports;  // empty for General
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Uniformly random s-subset of [p], sorted.
IndexMultiset sample_support(int p, int s, Rng& rng);

struct CoefficientSample {
    Matrix x;  // p x n
    std::vector<IndexMultiset> supports;
};

/// N i.i.d. coefficient vectors. General colors i.i.d. standard normals by
/// the symmetric PSD square root of sigma_x.
CoefficientSample sample_coefficients(const CoefficientModel& model, int p, int n, Rng& rng);

/// Draws X per the model, adds i.i.d. Gaussian(0, sigma^2) noise.
Dataset synthesize(const KSDictionary& dict, const CoefficientModel& model, int n, double sigma,
                   std::uint64_t seed);

/// SNR = s*sigma_a^2 / (m*sigma^2) for the sparse variants;
/// tr(D Sigma_x D^T) / (m*sigma^2) for General (dictionary required).
double snr(const CoefficientModel& model, int m, double sigma,
           const KSDictionary* dict = nullptr);

/// Dataset persistence: CSV matrices plus a JSON manifest in `dir`.
void save_dataset(const Dataset& ds, const CoefficientModel& model, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace kslab
