#pragma once

#include "kslab/matrix.hpp"
#include "kslab/model.hpp"
#include "kslab/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kslab {

enum class EnsembleMode { General, Sparse };

std::string to_string(EnsembleMode mode);
EnsembleMode ensemble_mode_from_string(const std::string& name);

/// Packing-construction parameters. `alpha = 0` means "unit Frobenius norm
/// codewords", i.e. alpha = 1/sqrt(rows*cols) at the point of use.
struct PackingParams {
    double t = 0.5;
    double c1 = 0.044;
    double alpha = 0.0;
    double eps_prime = 0.0;
    double r = 1.0;

    /// Admissible eps' ceiling: min{r^2, r^4/4p} for the general-coefficient
    /// ensemble, min{r^2/s, r^4/4p} for the sparse one.
    double eps_cap(EnsembleMode mode, int p, int s) const;

    /// Validates t, c1 (strict range c1 < t^2 / (8 ln 2)) and the eps' cap.
    void validate(EnsembleMode mode, int p, int s) const;
};

/// Codebook of sign matrices (entries +-alpha) with pairwise Hadamard-sum
/// correlation at most t in absolute value.
struct SignCodebook {
    int rows = 0;
    int cols = 0;
    double alpha = 0.0;
    double t = 0.0;
    std::vector<Matrix> members;

    int size() const { return static_cast<int>(members.size()); }
};

struct CodebookReport {
    double threshold = 0.0;
    double max_abs_correlation = 0.0;
    int pairs_checked = 0;
    std::vector<std::pair<int, int>> violations;  // 0-based member pairs

    bool pass() const { return violations.empty(); }
};

/// floor(2^{c1 * m * p - 1/2}), saturated at 2^62.
long long max_codebook_size(int m, int p, double c1);

/// Greedy rejection sampling of sign matrices under the pairwise correlation
/// constraint; the raw engine shared by the codebook and ensemble builders.
/// Draws candidates until `l_target` are accepted or `max_draws` candidates
/// have been consumed; returns however many were accepted.
std::vector<Matrix> draw_sign_codewords(int rows, int cols, double alpha, double t, int l_target,
                                        int max_draws, Rng& rng);

/// Builds an l_target-member codebook. Errors: l_target < 2 ("degenerate"),
/// l_target above max_codebook_size, alpha inadmissible for (t, c1), or the
/// draw budget exhausting `max_attempts` restarts.
SignCodebook build_sign_codebook(int m, int p, const PackingParams& params, int l_target, Rng& rng,
                                 int max_attempts = 64);

/// Exhaustive pairwise recheck of the codebook constraint.
CodebookReport verify_sign_codebook(const SignCodebook& cb);

/// Verification summary for a dictionary ensemble. `worst_pair_kl` is the
/// measured worst-case per-pair per-sample KL (the alpha_L estimate), in the
/// natural-log units the budget formulas are derived in.
struct EnsembleReport {
    long long l = 0;
    double radius = 0.0;
    double max_dist_to_ref = 0.0;
    double sandwich_lower = 0.0;  // (2p/r^2)(1-t) eps'
    double sandwich_upper = 0.0;  // (8p/r^2) eps'
    double min_pair_dist_sq = 0.0;
    double max_pair_dist_sq = 0.0;
    double max_unit_norm_dev = 0.0;
    double worst_pair_kl = 0.0;
    double kl_budget = 0.0;
    bool membership_ok = false;
    bool sandwich_ok = false;
    bool unit_norm_ok = false;
    bool kl_ok = false;

    bool pass() const { return membership_ok && sandwich_ok && unit_norm_ok && kl_ok; }
};

/// L dictionaries inside the neighborhood of a reference, pairwise separated
/// per the sandwich bounds, plus the verification report they were accepted
/// under.
struct DictionaryEnsemble {
    KSDictionary reference;
    std::vector<KSDictionary> members;
    PackingParams params;
    EnsembleMode mode = EnsembleMode::Sparse;
    int sparsity = 1;
    std::uint64_t seed = 0;
    EnsembleReport report;

    long long size() const { return static_cast<long long>(members.size()); }
};

/// floor(2^{c1 ((m1-1) p1 + (m2-1) p2) - 1}), saturated at 2^62.
long long ensemble_cardinality(int m1, int m2, int p1, int p2, double c1);

/// Constructs the ensemble: per-column perturbations of the reference factor
/// columns, lifted from sign codewords into each column's orthogonal
/// complement with squared norm eps'/r^2, then paired diagonally across the
/// two factors. The construction is re-verified before returning and retried
/// with fresh codebooks on failure. `l_cap > 0` keeps only the first l_cap
/// members of the implied cardinality (capping lower is always admissible).
DictionaryEnsemble build_ensemble(const KSDictionary& d0, const PackingParams& params,
                                  EnsembleMode mode, int sparsity, std::uint64_t seed,
                                  int max_attempts = 16, int l_cap = 0);

/// Independent recheck of membership, sandwich separation, unit norms, and
/// the per-sample KL budget (sparse-Gaussian observation laws on sampled
/// supports against the mode-appropriate mutual-information budget).
EnsembleReport verify_ensemble(const DictionaryEnsemble& ensemble, const CoefficientModel& model,
                               double sigma);

void save_ensemble(const DictionaryEnsemble& ensemble, const std::string& dir);
DictionaryEnsemble load_ensemble(const std::string& dir);

}  // namespace kslab
