#include "kslab/simulate.hpp"

#include "kslab/kron.hpp"
#include "kslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kslab {

namespace {

constexpr double kTwoPi = 6.283185307179586;

double residual_sq(const Matrix& y, const Matrix& d, const Matrix& x) {
    // ||Y - D X||_F^2 accumulated without forming the product matrix.
    double acc = 0.0;
    for (int k = 0; k < y.cols(); ++k) {
        for (int i = 0; i < y.rows(); ++i) {
            double pred = 0.0;
            for (int j = 0; j < d.cols(); ++j) pred += d(i, j) * x(j, k);
            const double diff = y(i, k) - pred;
            acc += diff * diff;
        }
    }
    return acc;
}

}  // namespace

std::string to_string(SideInfo side) {
    return side == SideInfo::FullX ? "full_x" : "support_only";
}

SideInfo side_info_from_string(const std::string& name) {
    if (name == "full_x") return SideInfo::FullX;
    if (name == "support_only") return SideInfo::SupportOnly;
    throw std::invalid_argument("unknown side_info: " + name);
}

void ExperimentSpec::validate() const {
    if (ensemble == nullptr) throw std::invalid_argument("ExperimentSpec: ensemble is required");
    if (ensemble->size() < 1) throw std::invalid_argument("ExperimentSpec: empty ensemble");
    if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
    if (n_grid.empty()) throw std::invalid_argument("ExperimentSpec: n_grid must be nonempty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw std::invalid_argument("ExperimentSpec: sample counts must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
            throw std::invalid_argument("ExperimentSpec: n_grid must be strictly increasing");
        }
    }
    if (sigma < 0.0) throw std::invalid_argument("ExperimentSpec: sigma must be nonnegative");
    if (side_info == SideInfo::SupportOnly && !model.sparse()) {
        throw std::invalid_argument("ExperimentSpec: support_only side info needs a sparse model");
    }
}

WilsonInterval wilson_interval(int successes, int n, double z) {
    if (n <= 0) throw std::invalid_argument("wilson_interval: n must be positive");
    if (successes < 0 || successes > n) {
        throw std::invalid_argument("wilson_interval: successes out of range");
    }
    const double p_hat = static_cast<double>(successes) / n;
    const double z_sq = z * z;
    const double denom = 1.0 + z_sq / n;
    const double center = (p_hat + z_sq / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p_hat * (1.0 - p_hat) / n + z_sq / (4.0 * n * n)) / denom;
    WilsonInterval ci;
    ci.low = std::max(0.0, center - half);
    ci.high = std::min(1.0, center + half);
    // The analytic endpoints at the boundary are exact; keep roundoff from
    // pushing the interval off the observed rate.
    if (successes == 0) ci.low = 0.0;
    if (successes == n) ci.high = 1.0;
    return ci;
}

int min_distance_detect(const Matrix& y, const Matrix& x, const DictionaryEnsemble& ensemble) {
    if (ensemble.size() < 1) throw std::invalid_argument("min_distance_detect: empty ensemble");
    int best = 0;
    double best_residual = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < ensemble.members.size(); ++l) {
        const double res = residual_sq(y, ensemble.members[l].d, x);
        if (res < best_residual) {
            best_residual = res;
            best = static_cast<int>(l);
        }
    }
    return best;
}

int gaussian_ml_detect(const Matrix& y, const std::vector<IndexMultiset>& supports,
                       const DictionaryEnsemble& ensemble, double sigma_a, double sigma) {
    if (ensemble.size() < 1) throw std::invalid_argument("gaussian_ml_detect: empty ensemble");
    if (static_cast<int>(supports.size()) != y.cols()) {
        throw std::invalid_argument("gaussian_ml_detect: one support per observation required");
    }
    const int m = y.rows();
    int best = 0;
    double best_loglik = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < ensemble.members.size(); ++l) {
        double loglik = 0.0;
        for (int k = 0; k < y.cols(); ++k) {
            const Matrix cov =
                conditional_covariance(ensemble.members[l], supports[static_cast<std::size_t>(k)],
                                       sigma_a, sigma);
            const auto chol = cholesky(cov);
            if (!chol) {
                throw std::invalid_argument(
                    "gaussian_ml_detect: singular conditional covariance (sigma = 0 with a "
                    "rank-deficient subdictionary?)");
            }
            const std::vector<double> yk = y.col(k);
            const std::vector<double> solved = cholesky_solve(*chol, yk);
            double quad = 0.0;
            for (int i = 0; i < m; ++i) quad += yk[static_cast<std::size_t>(i)] * solved[static_cast<std::size_t>(i)];
            loglik += -0.5 * (quad + cholesky_log_det(*chol) + m * std::log(kTwoPi));
        }
        if (loglik > best_loglik) {
            best_loglik = loglik;
            best = static_cast<int>(l);
        }
    }
    return best;
}

namespace {

ErrorCurve run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const DictionaryEnsemble& ensemble = *spec.ensemble;
    const long long l_count = ensemble.size();

    ErrorCurve curve;
    curve.ensemble_size = l_count;
    curve.points.reserve(spec.n_grid.size());

    for (std::size_t gi = 0; gi < spec.n_grid.size(); ++gi) {
        const int n = spec.n_grid[gi];
        ErrorCurvePoint point;
        point.n = n;
        point.trials = spec.trials;
        point.seed = Rng::derive(spec.master_seed, {gi});

        double mse_acc = 0.0;
        std::vector<double> mse_by_true(static_cast<std::size_t>(l_count), 0.0);
        std::vector<int> count_by_true(static_cast<std::size_t>(l_count), 0);

        for (int trial = 0; trial < spec.trials; ++trial) {
            // Stable per-trial hash: parallel and serial schedules agree.
            const std::uint64_t trial_seed = Rng::derive(spec.master_seed, {gi, static_cast<std::uint64_t>(trial)});
            Rng rng(trial_seed);
            const int true_index = rng.uniform_int(0, static_cast<int>(l_count) - 1);
            const std::uint64_t data_seed = Rng::derive(trial_seed, {0xDA7A});
            const Dataset ds = synthesize(ensemble.members[static_cast<std::size_t>(true_index)],
                                          spec.model, n, spec.sigma, data_seed);
            const int decoded =
                spec.side_info == SideInfo::FullX
                    ? min_distance_detect(ds.y, ds.x, ensemble)
                    : gaussian_ml_detect(ds.y, ds.supports, ensemble, spec.model.sigma_a,
                                         spec.sigma);
            if (decoded != true_index) ++point.errors;
            const double err = fro_distance(ensemble.members[static_cast<std::size_t>(decoded)].d,
                                            ensemble.members[static_cast<std::size_t>(true_index)].d);
            const double sq_err = err * err;
            mse_acc += sq_err;
            mse_by_true[static_cast<std::size_t>(true_index)] += sq_err;
            ++count_by_true[static_cast<std::size_t>(true_index)];

            if (spec.record_trials) {
                curve.trial_log.push_back(TrialRecord{static_cast<int>(gi), trial, true_index,
                                                      decoded, sq_err, trial_seed});
            }
        }

        point.error_rate = static_cast<double>(point.errors) / spec.trials;
        const WilsonInterval ci = wilson_interval(point.errors, spec.trials);
        point.ci_low = ci.low;
        point.ci_high = ci.high;
        point.mean_mse = mse_acc / spec.trials;
        point.worst_mse = 0.0;
        for (std::size_t l = 0; l < static_cast<std::size_t>(l_count); ++l) {
            if (count_by_true[l] > 0) {
                point.worst_mse = std::max(point.worst_mse, mse_by_true[l] / count_by_true[l]);
            }
        }
        curve.points.push_back(point);
    }
    return curve;
}

}  // namespace

ErrorCurve run_error_experiment(const ExperimentSpec& spec) { return run_experiment(spec); }

ErrorCurve run_mse_experiment(const ExperimentSpec& spec) { return run_experiment(spec); }

FanoReport fano_consistency_check(const ErrorCurve& curve, const DictionaryEnsemble& ensemble,
                                  const BoundInputs& inputs, double budget_scale) {
    if (curve.ensemble_size < 2) {
        throw std::invalid_argument("fano_consistency_check: need an ensemble with L >= 2");
    }
    const double log2_l = std::log2(static_cast<double>(curve.ensemble_size));
    FanoReport report;
    report.points.reserve(curve.points.size());
    for (const ErrorCurvePoint& point : curve.points) {
        BoundInputs at_n = inputs;
        at_n.n_samples = point.n;
        FanoCheckPoint check;
        check.n = point.n;
        check.fano_lhs = (1.0 - point.ci_high) * log2_l - 1.0;
        const double budget = (ensemble.mode == EnsembleMode::Sparse)
                                  ? mi_upper_sparse_gaussian(at_n, ensemble.params.eps_prime)
                                  : mi_upper_general(at_n, ensemble.params.eps_prime);
        check.mi_budget = budget * budget_scale;
        check.violated = check.fano_lhs > check.mi_budget;
        if (check.violated) ++report.violations;
        report.points.push_back(check);
    }
    return report;
}

}  // namespace kslab
