#pragma once

#include "kslab/bounds.hpp"
#include "kslab/model.hpp"
#include "kslab/packing.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kslab {

enum class SideInfo { FullX, SupportOnly };

std::string to_string(SideInfo side);
SideInfo side_info_from_string(const std::string& name);

/// Monte Carlo detection/MSE experiment over a verified ensemble.
struct ExperimentSpec {
    const DictionaryEnsemble* ensemble = nullptr;
    CoefficientModel model;
    double sigma = 0.1;
    std::vector<int> n_grid;  // strictly increasing sample counts
    int trials = 200;
    SideInfo side_info = SideInfo::FullX;
    std::uint64_t master_seed = 1;
    bool record_trials = false;

    void validate() const;
};

struct TrialRecord {
    int grid_index = 0;
    int trial = 0;
    int true_index = 0;     // 0-based member index
    int decoded_index = 0;  // 0-based member index
    double squared_error = 0.0;
    std::uint64_t seed = 0;
};

struct ErrorCurvePoint {
    int n = 0;
    int trials = 0;
    int errors = 0;
    double error_rate = 0.0;
    double ci_low = 0.0;   // Wilson 95%
    double ci_high = 0.0;  // Wilson 95%
    double mean_mse = 0.0;
    double worst_mse = 0.0;
    std::uint64_t seed = 0;  // per-grid-point stream label
};

struct ErrorCurve {
    std::vector<ErrorCurvePoint> points;
    long long ensemble_size = 0;
    std::vector<TrialRecord> trial_log;  // populated when record_trials is set
};

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval for a binomial proportion (z defaults to 95%).
WilsonInterval wilson_interval(int successes, int n, double z = 1.959963984540054);

/// Minimum-distance detector with full-coefficient side information:
/// argmin over members of ||Y - D_l X||_F, ties to the lowest index.
/// Returns a 0-based member index.
int min_distance_detect(const Matrix& y, const Matrix& x, const DictionaryEnsemble& ensemble);

/// Gaussian likelihood detector with support-only side information:
/// argmax over members of the sum of zero-mean Gaussian log-densities with
/// the conditional covariances on each sample's support. 0-based index.
int gaussian_ml_detect(const Matrix& y, const std::vector<IndexMultiset>& supports,
                       const DictionaryEnsemble& ensemble, double sigma_a, double sigma);

/// Hypothesis-testing experiment: per grid point, `trials` repetitions of
/// {draw member uniformly, synthesize, decode}; Wilson 95% intervals on the
/// error rate and decode-then-output MSE statistics.
ErrorCurve run_error_experiment(const ExperimentSpec& spec);

/// Same engine with emphasis on the MSE fields; the estimator is D_lhat.
ErrorCurve run_mse_experiment(const ExperimentSpec& spec);

struct FanoCheckPoint {
    int n = 0;
    double fano_lhs = 0.0;   // (1 - error ci_high) * log2 L - 1, bits
    double mi_budget = 0.0;  // analytic budget at this N
    bool violated = false;
};

struct FanoReport {
    std::vector<FanoCheckPoint> points;
    int violations = 0;

    bool pass() const { return violations == 0; }
};

/// Checks the Fano chain (1 - error_ci_high) log2 L - 1 <= MI budget at every
/// grid point; a violation indicates an implementation bug, since the
/// inequality is a theorem. `budget_scale` exists for fault-injection tests.
FanoReport fano_consistency_check(const ErrorCurve& curve, const DictionaryEnsemble& ensemble,
                                  const BoundInputs& inputs, double budget_scale = 1.0);

}  // namespace kslab
