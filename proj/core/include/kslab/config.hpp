#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kslab {

/// Configuration problem that should surface as CLI exit code 2. `field`
/// names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error("config field '" + field + "': " + message),
          field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Flat, typed key-value run configuration. Every field has a documented
/// default except the model dimensions, which are required.
///
/// File format: one `key = value` per line, `#` comments, keys carry their
/// block prefix. Keys and defaults:
///
///   model.m1 / model.m2 / model.p1 / model.p2   (required)
///   coeff.type        = sparse_gaussian   {general|sparse_uniform|sparse_gaussian}
///   coeff.s           = 4
///   coeff.sigma_a     = 1.0
///   coeff.sigma_x_spectral = 1.0           (general-model ||Sigma_x||_2 for bounds)
///   noise.sigma       = 0.1
///   packing.t         = 0.5
///   packing.c1        = 0.044
///   packing.eps_prime = 0                  (0 means half the mode's cap)
///   packing.r         = 1.0
///   packing.alpha     = 0                  (0 means 1/sqrt(rows*cols))
///   packing.l_target  = 0                  (0 means the implied cardinality)
///   packing.seed      = 1
///   experiment.n_grid = 1,5,25,125
///   experiment.trials = 200
///   experiment.side_info = full_x          {full_x|support_only}
///   experiment.master_seed = 1
///   output.directory  = out
///   output.formats    = csv,svg,json
struct RunConfig {
    int m1 = 0, m2 = 0, p1 = 0, p2 = 0;

    std::string coeff_type = "sparse_gaussian";
    int s = 4;
    double sigma_a = 1.0;
    double sigma_x_spectral = 1.0;

    double sigma = 0.1;

    double t = 0.5;
    double c1 = 0.044;
    double eps_prime = 0.0;
    double r = 1.0;
    double alpha = 0.0;
    int l_target = 0;
    std::uint64_t pack_seed = 1;

    std::vector<int> n_grid = {1, 5, 25, 125};
    int trials = 200;
    std::string side_info = "full_x";
    std::uint64_t master_seed = 1;

    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "svg", "json"};

    int m() const { return m1 * m2; }
    int p() const { return p1 * p2; }

    /// Resolves eps_prime = 0 to half the mode-appropriate cap.
    double resolved_eps_prime() const;

    /// Full schema validation; throws ConfigError naming the first bad field.
    void validate() const;
};

RunConfig parse_run_config(const std::string& path);

}  // namespace kslab
