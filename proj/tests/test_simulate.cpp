#include "kslab/simulate.hpp"

#include "kslab/kron.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace kslab;

namespace {

DictionaryEnsemble desk_ensemble(std::uint64_t seed, int p1 = 8, int p2 = 8) {
    const KSDictionary d0 = random_dictionary(4, p1, 4, p2, seed);
    PackingParams params;
    params.t = 0.5;
    params.c1 = 0.044;
    params.r = 1.0;
    params.eps_prime = 0.5 * params.eps_cap(EnsembleMode::Sparse, p1 * p2, 4);
    return build_ensemble(d0, params, EnsembleMode::Sparse, 4, seed + 1);
}

ExperimentSpec base_spec(const DictionaryEnsemble& ensemble) {
    ExperimentSpec spec;
    spec.ensemble = &ensemble;
    spec.model = CoefficientModel::sparse_gaussian(4, 1.0);
    spec.sigma = 0.1;
    spec.n_grid = {1, 5, 25};
    spec.trials = 100;
    spec.side_info = SideInfo::FullX;
    spec.master_seed = 71;
    return spec;
}

}  // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("wilson interval contains the point estimate and covers") {
    // Coverage on synthetic Bernoulli(0.3): at least 93% of 1000 replications.
    Rng rng(61);
    const double rate = 0.3;
    const int n = 50;
    int covered = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        int successes = 0;
        for (int i = 0; i < n; ++i) {
            if (rng.uniform01() < rate) ++successes;
        }
        const WilsonInterval ci = wilson_interval(successes, n);
        const double p_hat = static_cast<double>(successes) / n;
        CHECK(ci.low <= p_hat + 1e-15);
        CHECK(ci.high >= p_hat - 1e-15);
        if (ci.low <= rate && rate <= ci.high) ++covered;
    }
    CHECK(covered >= 930);
    // Boundary cases stay clamped.
    CHECK(wilson_interval(0, 10).low == 0.0);
    CHECK(wilson_interval(10, 10).high == 1.0);
}

TEST_CASE("noiseless minimum-distance decoding is exact") {
    const DictionaryEnsemble ensemble = desk_ensemble(301);
    Rng rng(62);
    for (int trial = 0; trial < 500; ++trial) {
        const int true_index = rng.uniform_int(0, static_cast<int>(ensemble.size()) - 1);
        const Dataset ds = synthesize(ensemble.members[static_cast<std::size_t>(true_index)],
                                      CoefficientModel::sparse_gaussian(4, 1.0), 1, 0.0,
                                      Rng::derive(99, {static_cast<std::uint64_t>(trial)}));
        CHECK(min_distance_detect(ds.y, ds.x, ensemble) == true_index);
    }
}

TEST_CASE("all-zero coefficients tie-break to the first member") {
    const DictionaryEnsemble ensemble = desk_ensemble(302);
    const Matrix x = Matrix::zeros(64, 3);
    Matrix y(16, 3);
    Rng rng(63);
    for (double& v : y.data()) v = rng.normal();
    CHECK(min_distance_detect(y, x, ensemble) == 0);
}

TEST_CASE("detection at vanishing SNR is chance level") {
    const DictionaryEnsemble ensemble = desk_ensemble(303);
    // SNR = s sigma_a^2 / (m sigma^2) = 4 / (16 * 2500) = 1e-4.
    ExperimentSpec spec = base_spec(ensemble);
    spec.sigma = 50.0;
    spec.n_grid = {1};
    spec.trials = 2000;
    spec.master_seed = 640;
    const ErrorCurve curve = run_error_experiment(spec);
    const int successes = spec.trials - curve.points[0].errors;
    const WilsonInterval ci = wilson_interval(successes, spec.trials);
    const double chance = 1.0 / static_cast<double>(ensemble.size());
    CHECK(ci.low <= chance);
    CHECK(chance <= ci.high);
}

TEST_CASE("gaussian detector ties and trivial cases") {
    const DictionaryEnsemble ensemble = desk_ensemble(304);
    const Dataset ds = synthesize(ensemble.members[1], CoefficientModel::sparse_gaussian(4, 1.0),
                                  4, 0.2, 4242);
    // sigma_a = 0 makes every member's law identical: tie-break to index 0.
    CHECK(gaussian_ml_detect(ds.y, ds.supports, ensemble, 0.0, 0.2) == 0);

    DictionaryEnsemble single = ensemble;
    single.members.resize(1);
    CHECK(gaussian_ml_detect(ds.y, ds.supports, single, 1.0, 0.2) == 0);

    CHECK_THROWS_AS(gaussian_ml_detect(ds.y, {}, ensemble, 1.0, 0.2), std::invalid_argument);
}

TEST_CASE("support side information beats the coefficient-free baseline") {
    const DictionaryEnsemble ensemble = desk_ensemble(305);
    const int trials = 2000;
    const int n = 8;
    const double sigma = 0.02, sigma_a = 1.0;
    int gaussian_hits = 0, baseline_hits = 0;
    const Matrix zero_x = Matrix::zeros(64, n);
    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t seed = Rng::derive(88, {static_cast<std::uint64_t>(trial)});
        Rng rng(seed);
        const int true_index = rng.uniform_int(0, static_cast<int>(ensemble.size()) - 1);
        const Dataset ds = synthesize(ensemble.members[static_cast<std::size_t>(true_index)],
                                      CoefficientModel::sparse_gaussian(4, sigma_a), n, sigma,
                                      Rng::derive(seed, {1}));
        if (gaussian_ml_detect(ds.y, ds.supports, ensemble, sigma_a, sigma) == true_index) {
            ++gaussian_hits;
        }
        // Baseline gets no coefficient information at all.
        if (min_distance_detect(ds.y, zero_x, ensemble) == true_index) ++baseline_hits;
    }
    const double p1 = static_cast<double>(gaussian_hits) / trials;
    const double p0 = static_cast<double>(baseline_hits) / trials;
    // One-sided two-proportion comparison at the 5% level.
    const double pooled = 0.5 * (p1 + p0);
    const double se = std::sqrt(std::max(pooled * (1.0 - pooled) * 2.0 / trials, 1e-12));
    CHECK((p1 - p0) / se > 1.6449);
}

TEST_CASE("noiseless experiment has zero error everywhere") {
    const DictionaryEnsemble ensemble = desk_ensemble(306);
    ExperimentSpec spec = base_spec(ensemble);
    spec.sigma = 0.0;
    spec.trials = 60;
    const ErrorCurve curve = run_error_experiment(spec);
    for (const ErrorCurvePoint& pt : curve.points) {
        CHECK(pt.errors == 0);
        CHECK(pt.error_rate == 0.0);
        CHECK(pt.worst_mse == 0.0);
    }
}

TEST_CASE("error rate is nonincreasing in N up to CI overlap") {
    const DictionaryEnsemble ensemble = desk_ensemble(307);
    ExperimentSpec spec = base_spec(ensemble);
    spec.sigma = 1.0;
    spec.n_grid = {1, 5, 25, 125};
    spec.trials = 200;
    const ErrorCurve curve = run_error_experiment(spec);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        for (std::size_t j = i + 1; j < curve.points.size(); ++j) {
            // A later point significantly above an earlier one is a failure.
            CHECK(curve.points[j].ci_low <= curve.points[i].ci_high + 1e-12);
        }
    }
}

TEST_CASE("experiments reproduce bit-identically from the master seed") {
    const DictionaryEnsemble ensemble = desk_ensemble(308);
    ExperimentSpec spec = base_spec(ensemble);
    spec.record_trials = true;
    const ErrorCurve a = run_error_experiment(spec);
    const ErrorCurve b = run_error_experiment(spec);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].errors == b.points[i].errors);
        CHECK(a.points[i].error_rate == b.points[i].error_rate);
        CHECK(a.points[i].mean_mse == b.points[i].mean_mse);
        CHECK(a.points[i].worst_mse == b.points[i].worst_mse);
        CHECK(a.points[i].seed == b.points[i].seed);
    }
    REQUIRE(a.trial_log.size() == b.trial_log.size());
    for (std::size_t k = 0; k < a.trial_log.size(); ++k) {
        CHECK(a.trial_log[k].decoded_index == b.trial_log[k].decoded_index);
        CHECK(a.trial_log[k].squared_error == b.trial_log[k].squared_error);
    }
}

TEST_CASE("mse statistics recompute exactly from the trial log") {
    const DictionaryEnsemble ensemble = desk_ensemble(309);
    ExperimentSpec spec = base_spec(ensemble);
    spec.sigma = 0.35;
    spec.n_grid = {1, 5};
    spec.trials = 150;
    spec.record_trials = true;
    const ErrorCurve curve = run_mse_experiment(spec);
    for (std::size_t gi = 0; gi < curve.points.size(); ++gi) {
        double acc = 0.0;
        int count = 0;
        for (const TrialRecord& tr : curve.trial_log) {
            if (tr.grid_index != static_cast<int>(gi)) continue;
            acc += tr.squared_error;
            ++count;
            // Discrete estimator support: each trial error is zero or at
            // least the verified minimum pairwise squared distance.
            if (tr.squared_error != 0.0) {
                CHECK(tr.squared_error >=
                      ensemble.report.min_pair_dist_sq * (1.0 - 1e-12));
            }
            CHECK((tr.squared_error == 0.0) == (tr.decoded_index == tr.true_index));
        }
        CHECK(count == spec.trials);
        CHECK(curve.points[gi].mean_mse == doctest::Approx(acc / count).epsilon(1e-15));
        CHECK(curve.points[gi].worst_mse >= curve.points[gi].mean_mse - 1e-15);
    }
}

TEST_CASE("worst-case MSE dominates a non-vacuous lower bound") {
    // Ensemble with degrees = 96 so that c1 * degrees - 3 = 1.224 > 0.
    const DictionaryEnsemble ensemble = desk_ensemble(310, 16, 16);
    REQUIRE(ensemble.size() == 9);
    ExperimentSpec spec = base_spec(ensemble);
    spec.model = CoefficientModel::sparse_gaussian(4, 1.0);
    spec.sigma = 0.5;
    spec.n_grid = {2};
    spec.trials = 300;
    spec.master_seed = 99;
    const ErrorCurve curve = run_mse_experiment(spec);

    BoundInputs in;
    in.n_samples = 2;
    in.m1 = in.m2 = 4;
    in.p1 = in.p2 = 16;
    in.r = 1.0;
    in.sigma = 0.5;
    in.sigma_a = 1.0;
    in.s = 4;
    in.t = 0.5;
    in.c1 = 0.044;
    in.sigma_x_spectral = 4.0 / 256.0;
    const BoundResult bound = cor1_bound(in);
    REQUIRE(!bound.vacuous);
    CHECK(curve.points[0].worst_mse >= bound.value);
}

TEST_CASE("fano chain holds on simulated curves and flags injected faults") {
    const DictionaryEnsemble big = desk_ensemble(311, 16, 16);
    REQUIRE(big.size() == 9);

    // High-accuracy run: tiny noise, full-coefficient side information.
    ExperimentSpec spec = base_spec(big);
    spec.sigma = 1e-3;
    spec.n_grid = {1};
    spec.trials = 300;
    spec.master_seed = 400;
    const ErrorCurve curve = run_error_experiment(spec);
    REQUIRE(curve.points[0].errors == 0);

    BoundInputs in;
    in.n_samples = 1;
    in.m1 = in.m2 = 4;
    in.p1 = in.p2 = 16;
    in.r = 1.0;
    in.sigma = spec.sigma;
    in.sigma_a = 1.0;
    in.s = 4;
    in.t = 0.5;
    in.c1 = 0.044;
    in.sigma_x_spectral = 4.0 / 256.0;

    // Honest budget at the run's parameters: no violations.
    const FanoReport honest = fano_consistency_check(curve, big, in);
    CHECK(honest.pass());
    // The Fano left side is (1 - ci_high) log2(9) - 1 at zero observed errors.
    CHECK(honest.points[0].fano_lhs ==
          doctest::Approx((1.0 - curve.points[0].ci_high) * std::log2(9.0) - 1.0).epsilon(1e-12));
    CHECK(honest.points[0].fano_lhs > 2.0);

    // Fault injection: place the budget inside the checker's sensitivity
    // window (just above the left side), then halve it. The halved bound
    // must be flagged; the unhalved one must not.
    BoundInputs window = in;
    window.sigma = 2.12;  // sparse budget 7921 (sigma_a/sigma)^4 s^2 eps' / r^2 ~ 3.07
    const FanoReport unhalved = fano_consistency_check(curve, big, window, 1.0);
    CHECK(unhalved.pass());
    CHECK(unhalved.points[0].mi_budget > unhalved.points[0].fano_lhs);
    const FanoReport halved = fano_consistency_check(curve, big, window, 0.5);
    CHECK(halved.violations == 1);
    CHECK(halved.points[0].violated);
}

TEST_CASE("spec validation rejects malformed grids") {
    const DictionaryEnsemble ensemble = desk_ensemble(312);
    ExperimentSpec spec = base_spec(ensemble);
    spec.n_grid = {5, 5};
    CHECK_THROWS_AS(run_error_experiment(spec), std::invalid_argument);
    spec = base_spec(ensemble);
    spec.trials = 0;
    CHECK_THROWS_AS(run_error_experiment(spec), std::invalid_argument);
    spec = base_spec(ensemble);
    spec.side_info = SideInfo::SupportOnly;
    spec.model = CoefficientModel::general(Matrix::identity(64));
    CHECK_THROWS_AS(run_error_experiment(spec), std::invalid_argument);
}

TEST_SUITE_END();
