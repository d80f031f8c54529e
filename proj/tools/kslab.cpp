// kslab: construct and verify dictionary packings, evaluate minimax bound
// formulas, run detection/MSE experiments, and compute RIP constants.

#include "kslab/bounds.hpp"
#include "kslab/config.hpp"
#include "kslab/csv.hpp"
#include "kslab/model.hpp"
#include "kslab/packing.hpp"
#include "kslab/simulate.hpp"
#include "kslab/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace kslab;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
};

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg = parse_run_config(args.config_path);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed_override) {
        cfg.pack_seed = *args.seed_override;
        cfg.master_seed = *args.seed_override;
    }
    return cfg;
}

CoefficientModel model_from_config(const RunConfig& cfg) {
    if (cfg.coeff_type == "general") {
        // The flat config carries only the spectral norm; the general-model
        // covariance defaults to the isotropic sigma_x_spectral * I.
        Matrix sigma_x = Matrix::identity(cfg.p());
        sigma_x *= cfg.sigma_x_spectral;
        return CoefficientModel::general(std::move(sigma_x));
    }
    if (cfg.coeff_type == "sparse_uniform") {
        return CoefficientModel::sparse_uniform(cfg.s, cfg.sigma_a);
    }
    return CoefficientModel::sparse_gaussian(cfg.s, cfg.sigma_a);
}

EnsembleMode mode_from_config(const RunConfig& cfg) {
    return cfg.coeff_type == "general" ? EnsembleMode::General : EnsembleMode::Sparse;
}

PackingParams packing_from_config(const RunConfig& cfg) {
    PackingParams params;
    params.t = cfg.t;
    params.c1 = cfg.c1;
    params.alpha = cfg.alpha;
    params.eps_prime = cfg.resolved_eps_prime();
    params.r = cfg.r;
    return params;
}

BoundInputs bound_inputs_from_config(const RunConfig& cfg, int n_samples) {
    BoundInputs in;
    in.n_samples = n_samples;
    in.m1 = cfg.m1;
    in.m2 = cfg.m2;
    in.p1 = cfg.p1;
    in.p2 = cfg.p2;
    in.r = cfg.r;
    in.sigma = cfg.sigma;
    in.sigma_a = cfg.sigma_a;
    in.s = cfg.s;
    in.t = cfg.t;
    in.c1 = cfg.c1;
    in.sigma_x_spectral = cfg.coeff_type == "general"
                              ? cfg.sigma_x_spectral
                              : static_cast<double>(cfg.s) / cfg.p() * cfg.sigma_a * cfg.sigma_a;
    return in;
}

DictionaryEnsemble build_ensemble_from_config(const RunConfig& cfg) {
    const KSDictionary d0 =
        random_dictionary(cfg.m1, cfg.p1, cfg.m2, cfg.p2, Rng::derive(cfg.pack_seed, {0xD0}));
    return build_ensemble(d0, packing_from_config(cfg), mode_from_config(cfg), cfg.s,
                          cfg.pack_seed, 16, cfg.l_target);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

int cmd_bound(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    if (!(cfg.sigma > 0.0)) {
        throw ConfigError("noise.sigma", "bound evaluation needs sigma > 0");
    }
    std::filesystem::create_directories(cfg.out_dir);
    const double eps_prime = cfg.resolved_eps_prime();

    const std::vector<std::string> columns = {
        "N", "m1", "m2", "p1", "p2", "s", "sigma", "sigma_a", "r", "t", "c1",
        "eps_prime", "bound_name", "value", "vacuous", "L", "mi_upper", "fano_threshold"};
    CsvWriter csv(cfg.out_dir + "/bounds.csv", "bounds-v1", columns);

    struct Row {
        std::string name;
        double value;
        bool vacuous;
        double mi_upper;
    };

    std::vector<SvgSeries> series;
    std::vector<SvgSeries> pinned;
    bool any_nonvacuous = false;

    std::vector<std::string> bound_names = {"thm1", "cor1", "thm2",
                                            "table1_sparse_unstructured",
                                            "table1_sparse_kronecker",
                                            "table1_gaussian_sparse_unstructured",
                                            "table1_gaussian_sparse_kronecker"};
    for (const std::string& name : bound_names) {
        SvgSeries s;
        s.label = name;
        series.push_back(s);
        SvgSeries v;
        v.label = name + " (vacuous)";
        v.pinned = true;
        pinned.push_back(v);
    }

    for (int n : cfg.n_grid) {
        const BoundInputs in = bound_inputs_from_config(cfg, n);
        const double snr_value = static_cast<double>(cfg.s) * cfg.sigma_a * cfg.sigma_a /
                                 (cfg.m() * cfg.sigma * cfg.sigma);
        const double mi_general = mi_upper_general(in, eps_prime);
        const double mi_sparse = mi_upper_sparse_gaussian(in, eps_prime);

        const BoundResult b1 = thm1_bound(in);
        const BoundResult bc = cor1_bound(in);
        const BoundResult b2 = thm2_bound(in);
        const long long l = b1.ensemble_size;
        const std::string fano_str = l >= 2 ? format_double(fano_lower(l)) : "";

        const std::vector<Row> rows = {
            {"thm1", b1.value, b1.vacuous, mi_general},
            {"cor1", bc.value, bc.vacuous, mi_general},
            {"thm2", b2.value, b2.vacuous, mi_sparse},
            {"table1_sparse_unstructured",
             table1_scaling(CoeffClass::Sparse, DictStructure::Unstructured, cfg.m1, cfg.m2,
                            cfg.p1, cfg.p2, n, cfg.r, snr_value),
             false, mi_general},
            {"table1_sparse_kronecker",
             table1_scaling(CoeffClass::Sparse, DictStructure::Kronecker, cfg.m1, cfg.m2, cfg.p1,
                            cfg.p2, n, cfg.r, snr_value),
             false, mi_general},
            {"table1_gaussian_sparse_unstructured",
             table1_scaling(CoeffClass::GaussianSparse, DictStructure::Unstructured, cfg.m1,
                            cfg.m2, cfg.p1, cfg.p2, n, cfg.r, snr_value),
             false, mi_sparse},
            {"table1_gaussian_sparse_kronecker",
             table1_scaling(CoeffClass::GaussianSparse, DictStructure::Kronecker, cfg.m1, cfg.m2,
                            cfg.p1, cfg.p2, n, cfg.r, snr_value),
             false, mi_sparse},
        };

        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& row = rows[i];
            csv.write_row({std::to_string(n), std::to_string(cfg.m1), std::to_string(cfg.m2),
                           std::to_string(cfg.p1), std::to_string(cfg.p2), std::to_string(cfg.s),
                           format_double(cfg.sigma), format_double(cfg.sigma_a),
                           format_double(cfg.r), format_double(cfg.t), format_double(cfg.c1),
                           format_double(eps_prime), row.name, format_double(row.value),
                           bool_str(row.vacuous), std::to_string(l), format_double(row.mi_upper),
                           fano_str});
            if (row.vacuous) {
                pinned[i].xs.push_back(n);
                pinned[i].ys.push_back(0.0);
            } else {
                series[i].xs.push_back(n);
                series[i].ys.push_back(row.value);
                if (i < 3) any_nonvacuous = true;  // thm1/cor1/thm2 rows
            }
        }
    }
    csv.close();

    std::vector<SvgSeries> all;
    for (const SvgSeries& s : series) {
        if (!s.xs.empty()) all.push_back(s);
    }
    for (const SvgSeries& s : pinned) {
        if (!s.xs.empty()) all.push_back(s);
    }
    if (std::find(cfg.formats.begin(), cfg.formats.end(), std::string("svg")) !=
        cfg.formats.end()) {
        write_loglog_svg(cfg.out_dir + "/bounds.svg", "Minimax lower bounds", "N",
                         "bound value", all);
    }

    if (!any_nonvacuous) {
        std::cout << "warning: every theorem bound is vacuous at these parameters "
                     "(c1 * degrees <= 3)\n";
    }
    std::cout << "bound: wrote " << cfg.out_dir << "/bounds.csv\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pack
// ---------------------------------------------------------------------------

int cmd_pack(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    std::filesystem::create_directories(cfg.out_dir);

    DictionaryEnsemble ensemble = build_ensemble_from_config(cfg);
    // Re-verify under the configured model and noise level, not just the
    // builder's internal self-check.
    const CoefficientModel model = model_from_config(cfg);
    ensemble.report = verify_ensemble(ensemble, model, cfg.sigma);
    save_ensemble(ensemble, cfg.out_dir + "/ensemble");

    const EnsembleReport& rep = ensemble.report;
    std::cout << "pack: L=" << rep.l << " min|max pair dist^2 = " << rep.min_pair_dist_sq << " | "
              << rep.max_pair_dist_sq << " within [" << rep.sandwich_lower << ", "
              << rep.sandwich_upper << "]\n"
              << "pack: max dist to reference " << rep.max_dist_to_ref << " (radius " << rep.radius
              << "), worst pair KL " << rep.worst_pair_kl << " <= budget " << rep.kl_budget << "\n";
    if (!rep.pass()) {
        std::cerr << "pack: verification FAILED (membership=" << bool_str(rep.membership_ok)
                  << " sandwich=" << bool_str(rep.sandwich_ok)
                  << " unit_norm=" << bool_str(rep.unit_norm_ok) << " kl=" << bool_str(rep.kl_ok)
                  << ")\n";
        return kExitRuntime;
    }
    std::cout << "pack: verification passed; ensemble saved to " << cfg.out_dir << "/ensemble\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const CommonArgs& args, const std::string& ensemble_dir) {
    const RunConfig cfg = load_config(args);
    std::filesystem::create_directories(cfg.out_dir);

    DictionaryEnsemble ensemble;
    if (!ensemble_dir.empty()) {
        if (!std::filesystem::exists(ensemble_dir + "/manifest.json")) {
            throw std::runtime_error("simulate: no ensemble manifest under " + ensemble_dir);
        }
        ensemble = load_ensemble(ensemble_dir);
        if (ensemble.reference.m1() != cfg.m1 || ensemble.reference.m2() != cfg.m2 ||
            ensemble.reference.p1() != cfg.p1 || ensemble.reference.p2() != cfg.p2) {
            throw std::runtime_error("simulate: ensemble dimensions disagree with the config");
        }
    } else {
        ensemble = build_ensemble_from_config(cfg);
    }

    ExperimentSpec spec;
    spec.ensemble = &ensemble;
    spec.model = model_from_config(cfg);
    spec.sigma = cfg.sigma;
    spec.n_grid = cfg.n_grid;
    spec.trials = cfg.trials;
    spec.side_info = side_info_from_string(cfg.side_info);
    spec.master_seed = cfg.master_seed;
    spec.record_trials = true;

    const ErrorCurve curve = run_mse_experiment(spec);

    CsvWriter csv(cfg.out_dir + "/curve.csv", "error-curve-v1",
                  {"N", "trials", "errors", "error_rate", "ci_low", "ci_high", "mean_mse",
                   "worst_mse", "seed"});
    for (const ErrorCurvePoint& pt : curve.points) {
        csv.write_row({std::to_string(pt.n), std::to_string(pt.trials), std::to_string(pt.errors),
                       format_double(pt.error_rate), format_double(pt.ci_low),
                       format_double(pt.ci_high), format_double(pt.mean_mse),
                       format_double(pt.worst_mse), std::to_string(pt.seed)});
    }
    csv.close();

    if (std::find(cfg.formats.begin(), cfg.formats.end(), std::string("csv")) !=
        cfg.formats.end()) {
        CsvWriter trials_csv(cfg.out_dir + "/trials.csv", "trials-v1",
                             {"grid_index", "trial", "true_index", "decoded_index",
                              "squared_error", "seed"});
        for (const TrialRecord& tr : curve.trial_log) {
            trials_csv.write_row({std::to_string(tr.grid_index), std::to_string(tr.trial),
                                  std::to_string(tr.true_index), std::to_string(tr.decoded_index),
                                  format_double(tr.squared_error), std::to_string(tr.seed)});
        }
        trials_csv.close();
    }

    // Fano consistency report appended after the curves.
    const BoundInputs inputs = bound_inputs_from_config(cfg, cfg.n_grid.front());
    const FanoReport fano = fano_consistency_check(curve, ensemble, inputs);
    nlohmann::ordered_json fano_json;
    fano_json["format"] = "fano-report-v1";
    fano_json["ensemble_size"] = curve.ensemble_size;
    fano_json["violations"] = fano.violations;
    fano_json["points"] = nlohmann::ordered_json::array();
    for (const FanoCheckPoint& pt : fano.points) {
        fano_json["points"].push_back({{"N", pt.n},
                                       {"fano_lhs", pt.fano_lhs},
                                       {"mi_budget", std::isfinite(pt.mi_budget)
                                                         ? pt.mi_budget
                                                         : std::numeric_limits<double>::max()},
                                       {"violated", pt.violated}});
    }
    {
        std::ofstream out(cfg.out_dir + "/fano.json");
        out << fano_json.dump(2) << "\n";
    }

    if (std::find(cfg.formats.begin(), cfg.formats.end(), std::string("svg")) !=
        cfg.formats.end()) {
        SvgSeries err_series;
        err_series.label = "error rate";
        SvgSeries err_zero;
        err_zero.label = "error rate (zero)";
        err_zero.pinned = true;
        SvgSeries mse_series;
        mse_series.label = "worst-case MSE";
        SvgSeries mse_zero;
        mse_zero.label = "worst-case MSE (zero)";
        mse_zero.pinned = true;
        for (const ErrorCurvePoint& pt : curve.points) {
            (pt.error_rate > 0.0 ? err_series : err_zero).xs.push_back(pt.n);
            (pt.error_rate > 0.0 ? err_series : err_zero).ys.push_back(pt.error_rate);
            (pt.worst_mse > 0.0 ? mse_series : mse_zero).xs.push_back(pt.n);
            (pt.worst_mse > 0.0 ? mse_series : mse_zero).ys.push_back(pt.worst_mse);
        }
        std::vector<SvgSeries> all;
        for (const SvgSeries& s : {err_series, mse_series, err_zero, mse_zero}) {
            if (!s.xs.empty()) all.push_back(s);
        }
        write_loglog_svg(cfg.out_dir + "/curve.svg", "Detection error and MSE", "N", "value", all);
    }

    std::cout << "simulate: L=" << curve.ensemble_size << ", " << curve.points.size()
              << " grid points, fano violations: " << fano.violations << "\n";
    std::cout << "simulate: wrote " << cfg.out_dir << "/curve.csv\n";
    if (!fano.pass()) {
        std::cerr << "simulate: Fano consistency violated; this indicates an implementation bug\n";
        return kExitRuntime;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// rip
// ---------------------------------------------------------------------------

int cmd_rip(const CommonArgs& args, const std::string& matrix_path, int s_order, double threshold) {
    Matrix d;
    int s = s_order;
    std::string out_dir = args.out_dir.empty() ? "out" : args.out_dir;
    if (!matrix_path.empty()) {
        d = read_matrix_csv(matrix_path);
        if (s <= 0) throw ConfigError("--s", "required with --matrix");
    } else if (!args.config_path.empty()) {
        const RunConfig cfg = load_config(args);
        out_dir = cfg.out_dir;
        d = random_dictionary(cfg.m1, cfg.p1, cfg.m2, cfg.p2, Rng::derive(cfg.pack_seed, {0xD0})).d;
        if (s <= 0) s = cfg.s;
    } else {
        throw ConfigError("--config", "rip needs --config or --matrix");
    }

    const RipReport report = rip_constant(d, s);
    const bool pass = report.delta <= threshold;
    std::filesystem::create_directories(out_dir);

    nlohmann::ordered_json out_json;
    out_json["format"] = "rip-report-v1";
    out_json["s"] = report.s;
    out_json["delta"] = report.delta;
    out_json["witness"] = report.witness;
    out_json["threshold"] = threshold;
    out_json["pass"] = pass;
    {
        std::ofstream out(out_dir + "/rip.json");
        out << out_json.dump(2) << "\n";
    }

    std::cout << "rip: delta_" << report.s << " = " << report.delta << " (threshold " << threshold
              << ", " << (pass ? "pass" : "fail") << "), witness {";
    for (std::size_t i = 0; i < report.witness.size(); ++i) {
        std::cout << (i ? "," : "") << report.witness[i];
    }
    std::cout << "}\n";
    return pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kronecker-structured dictionary packing, bound, and detection lab"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string ensemble_dir;
    std::string matrix_path;
    int rip_s = 0;
    double rip_threshold = 0.5;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", args.config_path, "run configuration file");
        if (config_required) opt->required();
        sub->add_option("--out", args.out_dir, "output directory (overrides output.directory)");
        sub->add_option("--seed", args.seed_override,
                        "seed override (replaces packing.seed and experiment.master_seed)");
    };

    CLI::App* bound = app.add_subcommand("bound", "evaluate the lower-bound formulas over N");
    add_common(bound, true);
    CLI::App* pack = app.add_subcommand("pack", "construct and verify a dictionary ensemble");
    add_common(pack, true);
    CLI::App* simulate = app.add_subcommand("simulate", "run the detection/MSE experiment");
    add_common(simulate, true);
    simulate->add_option("--ensemble", ensemble_dir, "load a saved ensemble instead of building");
    CLI::App* rip = app.add_subcommand("rip", "exhaustive restricted isometry constant");
    add_common(rip, false);
    rip->add_option("--matrix", matrix_path, "matrix CSV to analyze (instead of --config)");
    rip->add_option("--s", rip_s, "RIP order (defaults to coeff.s with --config)");
    rip->add_option("--threshold", rip_threshold, "pass/fail threshold (default 0.5)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bound->parsed()) return cmd_bound(args);
        if (pack->parsed()) return cmd_pack(args);
        if (simulate->parsed()) return cmd_simulate(args, ensemble_dir);
        if (rip->parsed()) return cmd_rip(args, matrix_path, rip_s, rip_threshold);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
