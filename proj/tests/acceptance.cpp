// Acceptance suite: every verifiable contract of the library, one line per
// criterion. Each check is self-contained and uses independent re-derivation
// wherever a second route exists (hand formulas, singular-value oracles,
// byte comparisons). Exits nonzero if any criterion fails.

#include "kslab/bounds.hpp"
#include "kslab/config.hpp"
#include "kslab/csv.hpp"
#include "kslab/kron.hpp"
#include "kslab/linalg.hpp"
#include "kslab/model.hpp"
#include "kslab/packing.hpp"
#include "kslab/simulate.hpp"

#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

using namespace kslab;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
    if (!pass) ++g_failures;
}

double elapsed_ms(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

// ---------------------------------------------------------------------------
// 1. Index-merge mapping, exact, under 1 ms.
// ---------------------------------------------------------------------------
void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    const IndexMultiset merged = merge_indices({1, 2, 2, 3}, {3, 1, 4, 5}, 6);
    const double ms = elapsed_ms(start);
    const bool exact = merged == IndexMultiset{3, 7, 10, 17};
    report(1, exact && ms < 1.0,
           "multiset index merge {1,2,2,3}x{3,1,4,5} -> {3,7,10,17} exact in " +
               format_double(ms) + " ms");
}

// ---------------------------------------------------------------------------
// 2. vec(B X A^T) = (A (x) B) vec(X) on 100 random instances to 1e-12.
// ---------------------------------------------------------------------------
void criterion_2() {
    Rng rng(20260201);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int m1 = rng.uniform_int(1, 8), p1 = rng.uniform_int(1, 8);
        const int m2 = rng.uniform_int(1, 8), p2 = rng.uniform_int(1, 8);
        const Matrix a = test::random_matrix(m1, p1, rng);
        const Matrix b = test::random_matrix(m2, p2, rng);
        const Matrix x = test::random_matrix(p2, p1, rng);
        worst = std::max(worst, vec(b * x * a.transpose()).max_abs_diff(kron(a, b) * vec(x)));
    }
    report(2, worst <= 1e-12,
           "vectorization identity on 100 random instances, max deviation " +
               format_double(worst));
}

// ---------------------------------------------------------------------------
// 3. Ensemble construction + verification at the desk-scale configuration.
// ---------------------------------------------------------------------------
void criterion_3() {
    const auto start = std::chrono::steady_clock::now();
    const KSDictionary d0 = random_dictionary(4, 8, 4, 8, 314159);
    PackingParams params;
    params.t = 0.5;
    params.c1 = 0.044;  // L = floor(2^{0.044*48-1}) = 2 >= 2
    params.r = 1.0;
    params.eps_prime = 0.5 * params.eps_cap(EnsembleMode::Sparse, 64, 4);
    const DictionaryEnsemble ensemble =
        build_ensemble(d0, params, EnsembleMode::Sparse, 4, 2718);
    EnsembleReport rep = verify_ensemble(ensemble, CoefficientModel::sparse_gaussian(4, 1.0), 0.5);
    const double sec = elapsed_ms(start) / 1000.0;
    const bool sandwich =
        rep.min_pair_dist_sq >= rep.sandwich_lower * (1.0 - 1e-9) &&
        rep.max_pair_dist_sq <= rep.sandwich_upper * (1.0 + 1e-9);
    const bool ok = ensemble.size() >= 2 && rep.pass() && sandwich &&
                    rep.max_dist_to_ref < params.r && rep.max_unit_norm_dev <= 1e-9 &&
                    sec < 60.0;
    report(3, ok,
           "ensemble (4,4,8,8) L=" + std::to_string(ensemble.size()) + ", pair dist^2 in [" +
               format_double(rep.min_pair_dist_sq) + ", " + format_double(rep.max_pair_dist_sq) +
               "] inside [" + format_double(rep.sandwich_lower) + ", " +
               format_double(rep.sandwich_upper) + "], built+verified in " + format_double(sec) +
               " s");
}

// ---------------------------------------------------------------------------
// 4. Sign codebook: exhaustive pairwise recheck; duplicates rejected.
// ---------------------------------------------------------------------------
void criterion_4() {
    PackingParams params;
    params.t = 0.6;
    params.c1 = 0.05;
    Rng rng(5150);
    SignCodebook cb = build_sign_codebook(8, 8, params, 6, rng);
    const CodebookReport clean = verify_sign_codebook(cb);
    cb.members.push_back(cb.members.front());
    const CodebookReport dup = verify_sign_codebook(cb);
    const bool ok = clean.pass() && clean.max_abs_correlation <= params.t && !dup.pass();
    report(4, ok,
           "codebook of 6: max |sum(A_l o A_l')| = " + format_double(clean.max_abs_correlation) +
               " <= " + format_double(params.t) + "; injected duplicate rejected");
}

// ---------------------------------------------------------------------------
// 5. Bound constants and scalings against independent re-evaluation.
// ---------------------------------------------------------------------------
struct HandPoint {
    int n, m1, m2, p1, p2, s;
    double r, sigma, sigma_a, t, c1, sigma_x;
};

// Literal re-evaluation in long double, written out independently of the
// library implementation.
long double hand_thm1(const HandPoint& q) {
    const long double p = static_cast<long double>(q.p1) * q.p2;
    const long double c_1 = (1.0L - q.t) * p / (32.0L * q.r * q.r);
    const long double degrees_term =
        q.c1 * (q.p1 * (q.m1 - 1.0L) + q.p2 * (q.m2 - 1.0L)) - 3.0L;
    const long double v = c_1 * q.r * q.r * q.sigma * q.sigma /
                          (q.n * p * q.sigma_x) * degrees_term;
    return v > 0.0L ? v : 0.0L;
}

long double hand_cor1(const HandPoint& q) {
    HandPoint sub = q;
    sub.sigma_x = static_cast<double>(q.s) / (static_cast<double>(q.p1) * q.p2) * q.sigma_a *
                  q.sigma_a;
    return hand_thm1(sub);
}

long double hand_thm2(const HandPoint& q) {
    const long double p = static_cast<long double>(q.p1) * q.p2;
    const long double c_2 = 1.58e-5L * p * (1.0L - q.t) / (q.r * q.r);
    const long double degrees_term =
        q.c1 * (q.p1 * (q.m1 - 1.0L) + q.p2 * (q.m2 - 1.0L)) - 3.0L;
    const long double v = c_2 * q.r * q.r * std::pow((long double)q.sigma, 4.0L) * degrees_term /
                          (q.n * (long double)q.s * q.s * std::pow((long double)q.sigma_a, 4.0L));
    return v > 0.0L ? v : 0.0L;
}

void criterion_5() {
    const std::vector<HandPoint> grid = {
        {1000, 16, 16, 32, 32, 4, 1.0, 1.0, 1.0, 0.5, 0.05, 1.0},
        {100, 8, 8, 16, 16, 3, 0.7, 0.4, 1.3, 0.3, 0.02, 0.6},
        {10, 16, 8, 32, 16, 6, 2.0, 2.0, 0.8, 0.8, 0.1, 2.5},
        {100000, 32, 16, 64, 32, 8, 1.5, 0.05, 2.0, 0.6, 0.08, 0.01},
        {7, 8, 16, 16, 32, 2, 0.2, 3.0, 0.25, 0.9, 0.15, 4.0},
    };
    double worst_rel = 0.0;
    for (const HandPoint& q : grid) {
        BoundInputs in;
        in.n_samples = q.n;
        in.m1 = q.m1;
        in.m2 = q.m2;
        in.p1 = q.p1;
        in.p2 = q.p2;
        in.s = q.s;
        in.r = q.r;
        in.sigma = q.sigma;
        in.sigma_a = q.sigma_a;
        in.t = q.t;
        in.c1 = q.c1;
        in.sigma_x_spectral = q.sigma_x;
        const double pairs[3][2] = {
            {thm1_bound(in).value, static_cast<double>(hand_thm1(q))},
            {cor1_bound(in).value, static_cast<double>(hand_cor1(q))},
            {thm2_bound(in).value, static_cast<double>(hand_thm2(q))},
        };
        for (const auto& pair : pairs) {
            const double scale = std::max(std::fabs(pair[1]), 1e-300);
            worst_rel = std::max(worst_rel, std::fabs(pair[0] - pair[1]) / scale);
        }
    }
    bool ok = worst_rel <= 1e-12;

    // C2 = 1.58e-5 * p (1-t) / r^2, verbatim, across several parameter sets.
    for (const HandPoint& q : grid) {
        BoundInputs in;
        in.n_samples = q.n;
        in.m1 = q.m1;
        in.m2 = q.m2;
        in.p1 = q.p1;
        in.p2 = q.p2;
        in.s = q.s;
        in.r = q.r;
        in.sigma = q.sigma;
        in.sigma_a = q.sigma_a;
        in.t = q.t;
        in.c1 = q.c1;
        const BoundResult res = thm2_bound(in);
        if (res.vacuous) continue;
        const double p = static_cast<double>(q.p1) * q.p2;
        const double c2 = 1.58e-5 * p * (1.0 - q.t) / (q.r * q.r);
        const double reconstructed =
            res.value * q.n * q.s * q.s * std::pow(q.sigma_a, 4) /
            (q.r * q.r * std::pow(q.sigma, 4) * res.degrees_term);
        if (std::fabs(reconstructed - c2) > 1e-12 * c2) ok = false;
    }

    // Exact 1/N scaling.
    BoundInputs in;
    in.n_samples = 100;
    in.m1 = in.m2 = 16;
    in.p1 = in.p2 = 32;
    in.s = 4;
    in.t = 0.5;
    in.c1 = 0.05;
    const double v100 = thm1_bound(in).value;
    in.n_samples = 1000;
    if (std::fabs(thm1_bound(in).value * 10.0 - v100) > 1e-12 * v100) ok = false;

    // Table-1 comparison over a 100-point grid.
    Rng rng(86);
    for (int rep = 0; rep < 100; ++rep) {
        const int m1 = rng.uniform_int(2, 8), m2 = rng.uniform_int(2, 8);
        const int p1 = rng.uniform_int(2, 12), p2 = rng.uniform_int(2, 12);
        if (m1 * p1 + m2 * p2 > m1 * m2 * p1 * p2) continue;
        const double n = 1.0 + rng.uniform_int(1, 10000);
        const double r = 0.1 + 3.0 * rng.uniform01();
        const double snr = 0.01 + 10.0 * rng.uniform01();
        const double ks_s = table1_scaling(CoeffClass::Sparse, DictStructure::Kronecker, m1, m2,
                                           p1, p2, n, r, snr);
        const double un_s = table1_scaling(CoeffClass::Sparse, DictStructure::Unstructured, m1,
                                           m2, p1, p2, n, r, snr);
        const double ks_g = table1_scaling(CoeffClass::GaussianSparse, DictStructure::Kronecker,
                                           m1, m2, p1, p2, n, r, snr);
        const double un_g = table1_scaling(CoeffClass::GaussianSparse,
                                           DictStructure::Unstructured, m1, m2, p1, p2, n, r, snr);
        if (ks_s > un_s * (1.0 + 1e-15) || ks_g > un_g * (1.0 + 1e-15)) ok = false;
    }

    report(5, ok,
           "thm1/cor1/thm2 match hand re-evaluation at 5 points (worst rel " +
               format_double(worst_rel) + "), C2 verbatim, exact 1/N, table-1 dominance on grid");
}

// ---------------------------------------------------------------------------
// 6. Vacuity handling: clamped to zero with the flag set.
// ---------------------------------------------------------------------------
void criterion_6() {
    BoundInputs in;
    in.n_samples = 1000;
    in.m1 = in.m2 = 4;
    in.p1 = in.p2 = 8;
    in.s = 4;
    in.t = 0.5;
    in.c1 = 0.044;  // c1 * 48 = 2.112 <= 3
    const BoundResult r1 = thm1_bound(in);
    const BoundResult rc = cor1_bound(in);
    const BoundResult r2 = thm2_bound(in);
    const bool ok = r1.vacuous && rc.vacuous && r2.vacuous && r1.value == 0.0 &&
                    rc.value == 0.0 && r2.value == 0.0 && r1.degrees_term < 0.0;
    report(6, ok, "degrees term " + format_double(r1.degrees_term) +
                      " <= 0 yields value 0 with the vacuous flag, never a negative bound");
}

// ---------------------------------------------------------------------------
// 7. Exhaustive RIP equals the independent singular-value oracle.
// ---------------------------------------------------------------------------
void criterion_7() {
    bool ok = true;
    double worst = 0.0;
    Rng rng(1234);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix d = random_unit_norm_matrix(6, 8, rng);
        const RipReport lib = rip_constant(d, 2);
        double oracle = -1.0;
        IndexMultiset witness;
        for (int a = 1; a <= 8; ++a) {
            for (int b = a + 1; b <= 8; ++b) {
                const std::vector<double> sv =
                    test::singular_values_onesided_jacobi(select_columns(d, {a, b}));
                const double dev =
                    std::max(1.0 - sv.front() * sv.front(), sv.back() * sv.back() - 1.0);
                if (dev > oracle) {
                    oracle = dev;
                    witness = {a, b};
                }
            }
        }
        worst = std::max(worst, std::fabs(lib.delta - oracle));
        if (std::fabs(lib.delta - oracle) > 1e-12 || lib.witness != witness) ok = false;
    }
    const RipReport eye = rip_constant(Matrix::identity(8), 3);
    if (eye.delta > 1e-12) ok = false;
    report(7, ok,
           "exhaustive RIP on 20 random 6x8 matrices equals the singular-value oracle (worst gap " +
               format_double(worst) + "); identity gives delta = " + format_double(eye.delta));
}

// ---------------------------------------------------------------------------
// 8. KL divergence closed form.
// ---------------------------------------------------------------------------
void criterion_8() {
    const Matrix i2 = Matrix::identity(2);
    Matrix two_i2 = i2;
    two_i2 *= 2.0;
    bool ok = std::fabs(kl_gaussian(two_i2, i2) - (1.0 - std::log(2.0))) <= 1e-12;
    Rng rng(888);
    double min_kl = 1e300;
    for (int rep = 0; rep < 1000; ++rep) {
        const Matrix s1 = test::random_spd(3, rng);
        const Matrix s2 = test::random_spd(3, rng);
        min_kl = std::min(min_kl, kl_gaussian(s1, s2));
        if (std::fabs(kl_gaussian(s1, s1)) > 1e-12) ok = false;
    }
    if (min_kl < -1e-12) ok = false;
    report(8, ok,
           "kl(2I,I) = 1 - ln 2 to 1e-12; zero on equal inputs; min over 1000 random PD pairs " +
               format_double(min_kl));
}

// ---------------------------------------------------------------------------
// 9. Detector behavior: exact noiseless decoding, chance at vanishing SNR,
//    monotone error in N. Under 5 minutes.
// ---------------------------------------------------------------------------
const DictionaryEnsemble& shared_desk_ensemble() {
    static const DictionaryEnsemble ensemble = [] {
        const KSDictionary d0 = random_dictionary(4, 8, 4, 8, 424242);
        PackingParams params;
        params.t = 0.5;
        params.c1 = 0.044;
        params.r = 1.0;
        params.eps_prime = 0.5 * params.eps_cap(EnsembleMode::Sparse, 64, 4);
        return build_ensemble(d0, params, EnsembleMode::Sparse, 4, 171717);
    }();
    return ensemble;
}

struct Criterion9Out {
    ErrorCurve monotone_curve;
    ErrorCurve chance_curve;
};

Criterion9Out criterion_9() {
    const auto start = std::chrono::steady_clock::now();
    const DictionaryEnsemble& ensemble = shared_desk_ensemble();

    // (a) noiseless decoding is exact over 500 trials.
    ExperimentSpec spec;
    spec.ensemble = &ensemble;
    spec.model = CoefficientModel::sparse_gaussian(4, 1.0);
    spec.sigma = 0.0;
    spec.n_grid = {1};
    spec.trials = 500;
    spec.side_info = SideInfo::FullX;
    spec.master_seed = 31337;
    const ErrorCurve noiseless = run_error_experiment(spec);
    const bool exact = noiseless.points[0].errors == 0;

    // (b) chance-level accuracy at SNR = 1e-4 over 2000 trials.
    spec.sigma = 50.0;  // s sigma_a^2/(m sigma^2) = 4/(16*2500) = 1e-4
    spec.trials = 2000;
    spec.master_seed = 31338;
    const ErrorCurve chance = run_error_experiment(spec);
    const WilsonInterval accuracy_ci =
        wilson_interval(spec.trials - chance.points[0].errors, spec.trials);
    const double chance_rate = 1.0 / static_cast<double>(ensemble.size());
    const bool chancy = accuracy_ci.low <= chance_rate && chance_rate <= accuracy_ci.high;

    // (c) error rate nonincreasing in N up to CI overlap.
    spec.sigma = 1.0;
    spec.n_grid = {1, 5, 25, 125};
    spec.trials = 400;
    spec.master_seed = 31339;
    const ErrorCurve curve = run_error_experiment(spec);
    bool monotone = true;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        for (std::size_t j = i + 1; j < curve.points.size(); ++j) {
            if (curve.points[j].ci_low > curve.points[i].ci_high) monotone = false;
        }
    }
    const double sec = elapsed_ms(start) / 1000.0;
    report(9, exact && chancy && monotone && sec < 300.0,
           "noiseless errors 0/500; accuracy CI [" + format_double(accuracy_ci.low) + ", " +
               format_double(accuracy_ci.high) + "] covers 1/L = " + format_double(chance_rate) +
               " at SNR 1e-4; error nonincreasing over N grid; " + format_double(sec) + " s");
    return {curve, chance};
}

// ---------------------------------------------------------------------------
// 10. Fano chain as a test, plus checker fault injection.
// ---------------------------------------------------------------------------
void criterion_10(const Criterion9Out& runs) {
    const DictionaryEnsemble& desk = shared_desk_ensemble();
    BoundInputs in;
    in.n_samples = 1;
    in.m1 = in.m2 = 4;
    in.p1 = in.p2 = 8;
    in.r = 1.0;
    in.sigma_a = 1.0;
    in.s = 4;
    in.t = 0.5;
    in.c1 = 0.044;
    in.sigma_x_spectral = 4.0 / 64.0;

    // Every simulated configuration from criterion 9 passes at honest budgets.
    in.sigma = 1.0;
    const FanoReport mono = fano_consistency_check(runs.monotone_curve, desk, in);
    in.sigma = 50.0;
    const FanoReport chance = fano_consistency_check(runs.chance_curve, desk, in);
    bool ok = mono.pass() && chance.pass();

    // High-accuracy run on a 9-member ensemble for the fault injection.
    const KSDictionary d0 = random_dictionary(4, 16, 4, 16, 515151);
    PackingParams params;
    params.t = 0.5;
    params.c1 = 0.044;
    params.r = 1.0;
    params.eps_prime = 0.5 * params.eps_cap(EnsembleMode::Sparse, 256, 4);
    const DictionaryEnsemble big = build_ensemble(d0, params, EnsembleMode::Sparse, 4, 616161);
    ExperimentSpec spec;
    spec.ensemble = &big;
    spec.model = CoefficientModel::sparse_gaussian(4, 1.0);
    spec.sigma = 1e-3;
    spec.n_grid = {1};
    spec.trials = 300;
    spec.side_info = SideInfo::FullX;
    spec.master_seed = 717171;
    const ErrorCurve accurate = run_error_experiment(spec);
    if (accurate.points[0].errors != 0) ok = false;

    BoundInputs big_in = in;
    big_in.p1 = big_in.p2 = 16;
    big_in.sigma_x_spectral = 4.0 / 256.0;
    big_in.sigma = spec.sigma;
    const FanoReport honest = fano_consistency_check(accurate, big, big_in);
    if (!honest.pass()) ok = false;

    // Budget placed inside the checker's sensitivity window, then halved:
    // the honest value must pass and the halved one must be flagged.
    big_in.sigma = 2.12;  // Eq-26 budget ~3.07 bits vs Fano LHS log2(9)-1 = 2.17
    const FanoReport window = fano_consistency_check(accurate, big, big_in, 1.0);
    const FanoReport halved = fano_consistency_check(accurate, big, big_in, 0.5);
    if (!window.pass()) ok = false;
    if (halved.violations != 1) ok = false;

    report(10, ok,
           "no Fano violations on any simulated configuration; halved MI budget flagged (" +
               format_double(halved.points[0].mi_budget) + " < LHS " +
               format_double(halved.points[0].fano_lhs) + ")");
}

// ---------------------------------------------------------------------------
// 11. CLI determinism: byte-identical pack and simulate reruns.
// ---------------------------------------------------------------------------
void criterion_11() {
    const std::string dir = test::scratch_dir("acceptance_cli");
    test::write_text(dir + "/run.cfg",
                     "model.m1 = 4\nmodel.m2 = 4\nmodel.p1 = 8\nmodel.p2 = 8\n"
                     "coeff.type = sparse_gaussian\ncoeff.s = 4\nnoise.sigma = 0.1\n"
                     "packing.t = 0.5\npacking.c1 = 0.044\npacking.seed = 404\n"
                     "experiment.n_grid = 1,5\nexperiment.trials = 30\n"
                     "experiment.master_seed = 505\n");
    bool ok = true;
    for (const std::string& cmd : {std::string("pack"), std::string("simulate")}) {
        const auto a = test::run_cli(cmd + " --config " + dir + "/run.cfg --out " + dir + "/" +
                                     cmd + "_a");
        const auto b = test::run_cli(cmd + " --config " + dir + "/run.cfg --out " + dir + "/" +
                                     cmd + "_b");
        if (a.exit_code != 0 || b.exit_code != 0) ok = false;
        if (!test::dirs_identical(dir + "/" + cmd + "_a", dir + "/" + cmd + "_b")) ok = false;
    }
    report(11, ok, "pack and simulate reruns with identical configs are byte-identical");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    const Criterion9Out runs = criterion_9();
    criterion_10(runs);
    criterion_11();

    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 11 criteria passed\n");
    return 0;
}
