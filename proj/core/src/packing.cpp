#include "kslab/packing.hpp"

#include "kslab/bounds.hpp"
#include "kslab/csv.hpp"
#include "kslab/kron.hpp"
#include "kslab/linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace kslab {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kRelSlack = 1e-9;  // distance-check tolerance

double default_alpha(double alpha, int rows, int cols) {
    if (alpha > 0.0) return alpha;
    return 1.0 / std::sqrt(static_cast<double>(rows) * cols);
}

long long floor_pow2_exponent(double exponent) {
    if (exponent >= 62.0) return 1LL << 62;
    if (exponent < 0.0) return 0;
    return static_cast<long long>(std::floor(std::exp2(exponent)));
}

Matrix random_sign_matrix(int rows, int cols, double alpha, Rng& rng) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = alpha * rng.rademacher();
    }
    return m;
}

// Orthonormal basis of the complement of a unit vector, via the Householder
// reflector that maps the vector onto +-e1. Columns 2..n of the reflector.
Matrix orthogonal_complement(const std::vector<double>& unit)
{
    const int n = static_cast<int>(unit.size());
    const double sign = unit[0] >= 0.0 ? 1.0 : -1.0;
    std::vector<double> v = unit;
    v[0] += sign;
    double vsq = 0.0;
    for (double x : v) vsq += x * x;

    Matrix q(n, n - 1);
    for (int col = 1; col < n; ++col) {
        for (int i = 0; i < n; ++i) {
            const double h = (i == col ? 1.0 : 0.0) - 2.0 * v[i] * v[col] / vsq;
            q(i, col - 1) = h;
        }
    }
    return q;
}

// Perturbed factor: column j becomes sqrt(1 - eps) * ref_j + lifted codeword
// column with squared norm eps, keeping every column exactly unit norm.
Matrix perturb_factor(const Matrix& ref, const std::vector<Matrix>& complements,
                      const Matrix& codeword, double eps) {
    const int rows = ref.rows();
    const int cols = ref.cols();
    const double keep = std::sqrt(1.0 - eps);
    // Codeword columns all carry squared norm (rows-1) * alpha^2 = 1/cols;
    // rescale them to squared norm eps.
    const double lift = std::sqrt(eps * static_cast<double>(cols));
    Matrix out(rows, cols);
    for (int j = 0; j < cols; ++j) {
        const Matrix& q = complements[static_cast<std::size_t>(j)];
        for (int i = 0; i < rows; ++i) {
            double w = 0.0;
            for (int k = 0; k + 1 < rows; ++k) w += q(i, k) * codeword(k, j);
            out(i, j) = keep * ref(i, j) + lift * w;
        }
    }
    return normalize_columns(out);
}

double max_unit_norm_deviation(const Matrix& m) {
    double worst = 0.0;
    for (int j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
        worst = std::max(worst, std::fabs(std::sqrt(s) - 1.0));
    }
    return worst;
}

}  // namespace

std::string to_string(EnsembleMode mode) {
    return mode == EnsembleMode::General ? "general" : "sparse";
}

EnsembleMode ensemble_mode_from_string(const std::string& name) {
    if (name == "general") return EnsembleMode::General;
    if (name == "sparse") return EnsembleMode::Sparse;
    throw std::invalid_argument("unknown ensemble mode: " + name);
}

double PackingParams::eps_cap(EnsembleMode mode, int p, int s) const {
    const double r_sq = r * r;
    const double common = r_sq * r_sq / (4.0 * p);
    if (mode == EnsembleMode::General) return std::min(r_sq, common);
    return std::min(r_sq / s, common);
}

void PackingParams::validate(EnsembleMode mode, int p, int s) const {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("PackingParams: t must lie in (0,1)");
    // Construction-side admissibility is the stricter t^2 range.
    const double c1_cap = t * t / (8.0 * kLn2);
    if (!(c1 > 0.0 && c1 < c1_cap)) {
        throw std::invalid_argument("PackingParams: c1 must lie in (0, t^2/(8 ln 2)) = (0, " +
                                    format_double(c1_cap) + ")");
    }
    if (!(r > 0.0)) throw std::invalid_argument("PackingParams: r must be positive");
    if (mode == EnsembleMode::Sparse && s < 1) {
        throw std::invalid_argument("PackingParams: sparse mode needs s >= 1");
    }
    // The general-mode cap is strict; the sparse one admits equality.
    const double cap = eps_cap(mode, p, s);
    const bool inside = eps_prime > 0.0 &&
                        (mode == EnsembleMode::General ? eps_prime < cap : eps_prime <= cap);
    if (!inside) {
        throw std::invalid_argument(
            "PackingParams: eps_prime must satisfy 0 < eps_prime " +
            std::string(mode == EnsembleMode::General ? "< " : "<= ") + format_double(cap) +
            " (mode " + to_string(mode) + "), got " + format_double(eps_prime));
    }
}

long long max_codebook_size(int m, int p, double c1) {
    if (!(c1 > 0.0)) throw std::invalid_argument("max_codebook_size: c1 must be positive");
    if (m <= 0 || p <= 0) throw std::invalid_argument("max_codebook_size: dimensions must be positive");
    const long long size = floor_pow2_exponent(c1 * m * p - 0.5);
    if (size < 2) {
        throw std::invalid_argument("max_codebook_size: codebook degenerate (floor(2^{c1*m*p - 1/2}) = " +
                                    std::to_string(size) + " < 2)");
    }
    return size;
}

std::vector<Matrix> draw_sign_codewords(int rows, int cols, double alpha, double t, int l_target,
                                        int max_draws, Rng& rng) {
    std::vector<Matrix> accepted;
    accepted.reserve(static_cast<std::size_t>(l_target));
    for (int draw = 0; draw < max_draws && static_cast<int>(accepted.size()) < l_target; ++draw) {
        Matrix candidate = random_sign_matrix(rows, cols, alpha, rng);
        bool ok = true;
        for (const Matrix& member : accepted) {
            if (std::fabs(sum_entries(hadamard(candidate, member))) > t) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back(std::move(candidate));
    }
    return accepted;
}

SignCodebook build_sign_codebook(int m, int p, const PackingParams& params, int l_target, Rng& rng,
                                 int max_attempts) {
    if (l_target < 2) throw std::invalid_argument("build_sign_codebook: codebook degenerate (L < 2)");
    const long long cap = max_codebook_size(m, p, params.c1);
    if (l_target > cap) {
        throw std::invalid_argument("build_sign_codebook: L_target " + std::to_string(l_target) +
                                    " exceeds max codebook size " + std::to_string(cap));
    }
    const double alpha = default_alpha(params.alpha, m, p);
    // Codeword-existence admissibility: c1 < (1/(2 ln 2)) (t / (2 alpha^2 m p))^2.
    const double ratio = params.t / (2.0 * alpha * alpha * m * p);
    const double admissible_c1 = ratio * ratio / (2.0 * kLn2);
    if (!(params.c1 < admissible_c1)) {
        throw std::invalid_argument("build_sign_codebook: alpha inadmissible; need c1 < " +
                                    format_double(admissible_c1) + " for alpha = " +
                                    format_double(alpha));
    }

    const int max_draws = std::max(1000, l_target * 400);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<Matrix> members =
            draw_sign_codewords(m, p, alpha, params.t, l_target, max_draws, rng);
        if (static_cast<int>(members.size()) == l_target) {
            SignCodebook cb;
            cb.rows = m;
            cb.cols = p;
            cb.alpha = alpha;
            cb.t = params.t;
            cb.members = std::move(members);
            return cb;
        }
    }
    throw std::runtime_error("build_sign_codebook: draw budget exhausted after " +
                             std::to_string(max_attempts) + " attempts; parameters too aggressive");
}

CodebookReport verify_sign_codebook(const SignCodebook& cb) {
    CodebookReport report;
    report.threshold = cb.t;
    for (std::size_t i = 0; i < cb.members.size(); ++i) {
        for (std::size_t j = i + 1; j < cb.members.size(); ++j) {
            const double corr = std::fabs(sum_entries(hadamard(cb.members[i], cb.members[j])));
            report.max_abs_correlation = std::max(report.max_abs_correlation, corr);
            ++report.pairs_checked;
            if (corr > cb.t) {
                report.violations.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    return report;
}

long long ensemble_cardinality(int m1, int m2, int p1, int p2, double c1) {
    if (m1 < 2 || m2 < 2 || p1 < 1 || p2 < 1) {
        throw std::invalid_argument("ensemble_cardinality: need m1, m2 >= 2 and p1, p2 >= 1");
    }
    const double degrees = static_cast<double>(m1 - 1) * p1 + static_cast<double>(m2 - 1) * p2;
    return floor_pow2_exponent(c1 * degrees - 1.0);
}

DictionaryEnsemble build_ensemble(const KSDictionary& d0, const PackingParams& params,
                                  EnsembleMode mode, int sparsity, std::uint64_t seed,
                                  int max_attempts, int l_cap) {
    params.validate(mode, d0.p(), sparsity);
    long long l = ensemble_cardinality(d0.m1(), d0.m2(), d0.p1(), d0.p2(), params.c1);
    if (l < 2) {
        throw std::invalid_argument("build_ensemble: ensemble degenerate (L = " +
                                    std::to_string(l) + " < 2)");
    }
    if (l_cap > 0) l = std::min<long long>(l, l_cap);
    if (l < 2) throw std::invalid_argument("build_ensemble: l_cap must be >= 2");
    if (l > 4096) {
        throw std::invalid_argument("build_ensemble: L = " + std::to_string(l) +
                                    " exceeds the desk-scale limit of 4096 members");
    }
    const int l_int = static_cast<int>(l);
    const double eps = params.eps_prime / (params.r * params.r);

    // Fixed orthonormal completions, one per reference column.
    std::vector<Matrix> comp_a, comp_b;
    for (int j = 0; j < d0.p1(); ++j) comp_a.push_back(orthogonal_complement(d0.a.col(j)));
    for (int j = 0; j < d0.p2(); ++j) comp_b.push_back(orthogonal_complement(d0.b.col(j)));

    const double alpha_a = default_alpha(0.0, d0.m1() - 1, d0.p1());
    const double alpha_b = default_alpha(0.0, d0.m2() - 1, d0.p2());
    const int max_draws = std::max(2000, l_int * 400);

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Rng rng_a(Rng::derive(seed, {1, static_cast<std::uint64_t>(attempt)}));
        Rng rng_b(Rng::derive(seed, {2, static_cast<std::uint64_t>(attempt)}));
        const std::vector<Matrix> codes_a =
            draw_sign_codewords(d0.m1() - 1, d0.p1(), alpha_a, params.t, l_int, max_draws, rng_a);
        const std::vector<Matrix> codes_b =
            draw_sign_codewords(d0.m2() - 1, d0.p2(), alpha_b, params.t, l_int, max_draws, rng_b);
        if (static_cast<int>(codes_a.size()) < l_int || static_cast<int>(codes_b.size()) < l_int) {
            continue;
        }

        DictionaryEnsemble ensemble;
        ensemble.reference = d0;
        ensemble.params = params;
        ensemble.mode = mode;
        ensemble.sparsity = sparsity;
        ensemble.seed = seed;
        ensemble.members.reserve(static_cast<std::size_t>(l_int));
        // Diagonal pairing: member l perturbs both factors with codeword l.
        for (int idx = 0; idx < l_int; ++idx) {
            const Matrix a = perturb_factor(d0.a, comp_a, codes_a[static_cast<std::size_t>(idx)], eps);
            const Matrix b = perturb_factor(d0.b, comp_b, codes_b[static_cast<std::size_t>(idx)], eps);
            ensemble.members.push_back(build_ks_dictionary(a, b));
        }

        const CoefficientModel check_model = CoefficientModel::sparse_gaussian(sparsity, 1.0);
        ensemble.report = verify_ensemble(ensemble, check_model, 1.0);
        if (ensemble.report.pass()) return ensemble;
    }
    throw std::runtime_error("build_ensemble: no verified ensemble after " +
                             std::to_string(max_attempts) + " attempts");
}

EnsembleReport verify_ensemble(const DictionaryEnsemble& ensemble, const CoefficientModel& model,
                               double sigma) {
    const KSDictionary& d0 = ensemble.reference;
    const double p = d0.p();
    const double r = ensemble.params.r;
    const double r_sq = r * r;
    const double eps_prime = ensemble.params.eps_prime;
    const double t = ensemble.params.t;

    EnsembleReport report;
    report.l = ensemble.size();
    report.radius = r;
    report.sandwich_lower = (2.0 * p / r_sq) * (1.0 - t) * eps_prime;
    report.sandwich_upper = (8.0 * p / r_sq) * eps_prime;

    // (a) membership, (c) unit norms.
    report.max_dist_to_ref = 0.0;
    report.max_unit_norm_dev = 0.0;
    for (const KSDictionary& member : ensemble.members) {
        report.max_dist_to_ref = std::max(report.max_dist_to_ref, fro_distance(member.d, d0.d));
        report.max_unit_norm_dev = std::max(report.max_unit_norm_dev,
                                            max_unit_norm_deviation(member.d));
    }
    report.membership_ok = report.max_dist_to_ref < r * (1.0 + kRelSlack);
    report.unit_norm_ok = report.max_unit_norm_dev <= 1e-9;

    // (b) pairwise sandwich.
    report.min_pair_dist_sq = std::numeric_limits<double>::infinity();
    report.max_pair_dist_sq = 0.0;
    for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
        for (std::size_t j = i + 1; j < ensemble.members.size(); ++j) {
            const double dist = fro_distance(ensemble.members[i].d, ensemble.members[j].d);
            const double dist_sq = dist * dist;
            report.min_pair_dist_sq = std::min(report.min_pair_dist_sq, dist_sq);
            report.max_pair_dist_sq = std::max(report.max_pair_dist_sq, dist_sq);
        }
    }
    if (ensemble.members.size() < 2) {
        report.min_pair_dist_sq = 0.0;
        report.sandwich_ok = false;
    } else {
        report.sandwich_ok =
            report.min_pair_dist_sq >= report.sandwich_lower * (1.0 - kRelSlack) &&
            report.max_pair_dist_sq <= report.sandwich_upper * (1.0 + kRelSlack);
    }

    // (d) per-sample per-pair KL of the member-induced observation laws
    // against the per-sample budget (N = 1). Values are in the budget formulas'
    // native natural-log units. Sparse mode: zero-mean Gaussian laws with
    // the conditional covariances on sampled supports. General mode: the
    // coefficient-averaged mean-shift KL tr(Delta^T Delta Sigma_x)/(2 sigma^2).
    const int s = model.sparse() ? model.s : ensemble.sparsity;
    const double sigma_a = model.sparse() ? model.sigma_a : 1.0;
    BoundInputs inputs;
    inputs.n_samples = 1;
    inputs.m1 = d0.m1();
    inputs.m2 = d0.m2();
    inputs.p1 = d0.p1();
    inputs.p2 = d0.p2();
    inputs.r = r;
    inputs.sigma = sigma;
    inputs.sigma_a = sigma_a;
    inputs.s = s;
    inputs.t = t;
    inputs.c1 = ensemble.params.c1;
    if (model.variant == CoeffVariant::General) {
        inputs.sigma_x_spectral = spectral_norm(model.sigma_x);
    } else {
        inputs.sigma_x_spectral = static_cast<double>(s) / p * sigma_a * sigma_a;
    }

    report.worst_pair_kl = 0.0;
    if (!(sigma > 0.0)) {
        report.kl_budget = std::numeric_limits<double>::infinity();
        report.kl_ok = true;  // noiseless: unbounded budget
        return report;
    }

    if (ensemble.mode == EnsembleMode::Sparse) {
        report.kl_budget = mi_upper_sparse_gaussian(inputs, eps_prime);
        Rng support_rng(Rng::derive(ensemble.seed, {0xC0FFEE}));
        const int n_supports = 5;
        for (int k = 0; k < n_supports; ++k) {
            const IndexMultiset support = support_rng.sample_subset(d0.p(), s);
            std::vector<Matrix> covs;
            covs.reserve(ensemble.members.size());
            for (const KSDictionary& member : ensemble.members) {
                covs.push_back(conditional_covariance(member, support, sigma_a, sigma));
            }
            for (std::size_t i = 0; i < covs.size(); ++i) {
                for (std::size_t j = 0; j < covs.size(); ++j) {
                    if (i == j) continue;
                    report.worst_pair_kl =
                        std::max(report.worst_pair_kl, kl_gaussian(covs[i], covs[j]));
                }
            }
        }
    } else {
        report.kl_budget = mi_upper_general(inputs, eps_prime);
        const double var_noise = sigma * sigma;
        for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
            for (std::size_t j = i + 1; j < ensemble.members.size(); ++j) {
                const Matrix delta = ensemble.members[i].d - ensemble.members[j].d;
                double kl;
                if (model.variant == CoeffVariant::General) {
                    // tr(Delta^T Delta Sigma_x) / (2 sigma^2)
                    const Matrix g = delta.transpose() * delta;
                    const Matrix gs = g * model.sigma_x;
                    double trace = 0.0;
                    for (int k = 0; k < gs.rows(); ++k) trace += gs(k, k);
                    kl = trace / (2.0 * var_noise);
                } else {
                    // Isotropic Sigma_x = (s/p) sigma_a^2 I.
                    const double f = delta.frobenius_norm();
                    kl = inputs.sigma_x_spectral * f * f / (2.0 * var_noise);
                }
                report.worst_pair_kl = std::max(report.worst_pair_kl, kl);
            }
        }
    }
    report.kl_ok = report.worst_pair_kl <= report.kl_budget * (1.0 + kRelSlack);
    return report;
}

void save_ensemble(const DictionaryEnsemble& ensemble, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_matrix_csv(dir + "/ref_A.csv", ensemble.reference.a);
    write_matrix_csv(dir + "/ref_B.csv", ensemble.reference.b);
    char name[64];
    for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
        std::snprintf(name, sizeof(name), "/member_%04zu_A.csv", i);
        write_matrix_csv(dir + name, ensemble.members[i].a);
        std::snprintf(name, sizeof(name), "/member_%04zu_B.csv", i);
        write_matrix_csv(dir + name, ensemble.members[i].b);
    }

    const EnsembleReport& rep = ensemble.report;
    nlohmann::ordered_json manifest;
    manifest["format"] = "ensemble-v1";
    manifest["mode"] = to_string(ensemble.mode);
    manifest["sparsity"] = ensemble.sparsity;
    manifest["seed"] = ensemble.seed;
    manifest["l"] = ensemble.size();
    manifest["dims"] = {{"m1", ensemble.reference.m1()},
                        {"m2", ensemble.reference.m2()},
                        {"p1", ensemble.reference.p1()},
                        {"p2", ensemble.reference.p2()}};
    manifest["params"] = {{"t", ensemble.params.t},
                          {"c1", ensemble.params.c1},
                          {"alpha", ensemble.params.alpha},
                          {"eps_prime", ensemble.params.eps_prime},
                          {"r", ensemble.params.r}};
    manifest["report"] = {{"l", rep.l},
                          {"radius", rep.radius},
                          {"max_dist_to_ref", rep.max_dist_to_ref},
                          {"sandwich_lower", rep.sandwich_lower},
                          {"sandwich_upper", rep.sandwich_upper},
                          {"min_pair_dist_sq", rep.min_pair_dist_sq},
                          {"max_pair_dist_sq", rep.max_pair_dist_sq},
                          {"max_unit_norm_dev", rep.max_unit_norm_dev},
                          {"worst_pair_kl", rep.worst_pair_kl},
                          // JSON has no infinity; the noiseless budget is stored as DBL_MAX.
                          {"kl_budget", std::isfinite(rep.kl_budget)
                                            ? rep.kl_budget
                                            : std::numeric_limits<double>::max()},
                          {"membership_ok", rep.membership_ok},
                          {"sandwich_ok", rep.sandwich_ok},
                          {"unit_norm_ok", rep.unit_norm_ok},
                          {"kl_ok", rep.kl_ok},
                          {"pass", rep.pass()}};

    std::ofstream out(dir + "/manifest.json");
    if (!out) throw std::runtime_error("save_ensemble: cannot open manifest in " + dir);
    out << manifest.dump(2) << "\n";
}

DictionaryEnsemble load_ensemble(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw std::runtime_error("load_ensemble: cannot open manifest in " + dir);
    nlohmann::json manifest;
    in >> manifest;

    DictionaryEnsemble ensemble;
    ensemble.mode = ensemble_mode_from_string(manifest.at("mode").get<std::string>());
    ensemble.sparsity = manifest.at("sparsity").get<int>();
    ensemble.seed = manifest.at("seed").get<std::uint64_t>();
    const auto& params = manifest.at("params");
    ensemble.params.t = params.at("t").get<double>();
    ensemble.params.c1 = params.at("c1").get<double>();
    ensemble.params.alpha = params.at("alpha").get<double>();
    ensemble.params.eps_prime = params.at("eps_prime").get<double>();
    ensemble.params.r = params.at("r").get<double>();

    ensemble.reference = build_ks_dictionary(read_matrix_csv(dir + "/ref_A.csv"),
                                             read_matrix_csv(dir + "/ref_B.csv"));
    const long long l = manifest.at("l").get<long long>();
    char name[64];
    for (long long i = 0; i < l; ++i) {
        std::snprintf(name, sizeof(name), "/member_%04lld_A.csv", i);
        const Matrix a = read_matrix_csv(dir + name);
        std::snprintf(name, sizeof(name), "/member_%04lld_B.csv", i);
        const Matrix b = read_matrix_csv(dir + name);
        ensemble.members.push_back(build_ks_dictionary(a, b));
    }

    const auto& rep = manifest.at("report");
    ensemble.report.l = rep.at("l").get<long long>();
    ensemble.report.radius = rep.at("radius").get<double>();
    ensemble.report.max_dist_to_ref = rep.at("max_dist_to_ref").get<double>();
    ensemble.report.sandwich_lower = rep.at("sandwich_lower").get<double>();
    ensemble.report.sandwich_upper = rep.at("sandwich_upper").get<double>();
    ensemble.report.min_pair_dist_sq = rep.at("min_pair_dist_sq").get<double>();
    ensemble.report.max_pair_dist_sq = rep.at("max_pair_dist_sq").get<double>();
    ensemble.report.max_unit_norm_dev = rep.at("max_unit_norm_dev").get<double>();
    ensemble.report.worst_pair_kl = rep.at("worst_pair_kl").get<double>();
    ensemble.report.kl_budget = rep.at("kl_budget").get<double>();
    ensemble.report.membership_ok = rep.at("membership_ok").get<bool>();
    ensemble.report.sandwich_ok = rep.at("sandwich_ok").get<bool>();
    ensemble.report.unit_norm_ok = rep.at("unit_norm_ok").get<bool>();
    ensemble.report.kl_ok = rep.at("kl_ok").get<bool>();
    return ensemble;
}

}  // namespace kslab
