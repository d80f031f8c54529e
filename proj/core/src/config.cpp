#include "kslab/config.hpp"

#include "kslab/packing.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace kslab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

class KeyValues {
public:
    explicit KeyValues(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("<file>", "cannot open " + path);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("<line " + std::to_string(line_no) + ">",
                                  "expected 'key = value', got '" + line + "'");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError("<line " + std::to_string(line_no) + ">", "empty key");
            }
            values_[key] = value;
        }
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.push_back(key);
        return it->second;
    }

    int integer(const std::string& key, int fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.push_back(key);
        try {
            std::size_t pos = 0;
            const int v = std::stoi(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(key, "expected an integer, got '" + it->second + "'");
        }
    }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.push_back(key);
        try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(key, "expected a nonnegative integer, got '" + it->second + "'");
        }
    }

    double real(const std::string& key, double fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.push_back(key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(key, "expected a number, got '" + it->second + "'");
        }
    }

    std::vector<int> int_list(const std::string& key, std::vector<int> fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.push_back(key);
        std::vector<int> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stoi(item));
            } catch (const std::exception&) {
                throw ConfigError(key, "expected a comma-separated integer list");
            }
        }
        if (out.empty()) throw ConfigError(key, "empty list");
        return out;
    }

    std::vector<std::string> str_list(const std::string& key, std::vector<std::string> fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.push_back(key);
        std::vector<std::string> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : values_) {
            if (std::find(consumed_.begin(), consumed_.end(), key) == consumed_.end()) {
                throw ConfigError(key, "unknown key");
            }
        }
    }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> consumed_;
};

}  // namespace

double RunConfig::resolved_eps_prime() const {
    if (eps_prime > 0.0) return eps_prime;
    PackingParams params;
    params.r = r;
    const EnsembleMode mode =
        coeff_type == "general" ? EnsembleMode::General : EnsembleMode::Sparse;
    return 0.5 * params.eps_cap(mode, p(), s);
}

void RunConfig::validate() const {
    if (m1 < 2) throw ConfigError("model.m1", "required, must be >= 2");
    if (m2 < 2) throw ConfigError("model.m2", "required, must be >= 2");
    if (p1 < 1) throw ConfigError("model.p1", "required, must be >= 1");
    if (p2 < 1) throw ConfigError("model.p2", "required, must be >= 1");
    if (coeff_type != "general" && coeff_type != "sparse_uniform" &&
        coeff_type != "sparse_gaussian") {
        throw ConfigError("coeff.type",
                          "must be one of general|sparse_uniform|sparse_gaussian");
    }
    if (s < 1 || s > p()) throw ConfigError("coeff.s", "need 1 <= s <= p1*p2");
    if (!(sigma_a > 0.0)) throw ConfigError("coeff.sigma_a", "must be positive");
    if (!(sigma_x_spectral > 0.0)) throw ConfigError("coeff.sigma_x_spectral", "must be positive");
    if (sigma < 0.0) throw ConfigError("noise.sigma", "must be nonnegative");
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("packing.t", "must lie in (0,1)");
    const double c1_cap = t * t / (8.0 * kLn2);
    if (!(c1 > 0.0 && c1 < c1_cap)) {
        throw ConfigError("packing.c1", "must lie in (0, t^2/(8 ln 2)); the cap at t=" +
                                            std::to_string(t) + " is " + std::to_string(c1_cap));
    }
    if (!(r > 0.0)) throw ConfigError("packing.r", "must be positive");
    if (eps_prime < 0.0) throw ConfigError("packing.eps_prime", "must be nonnegative");
    if (eps_prime > 0.0) {
        PackingParams params;
        params.r = r;
        const EnsembleMode mode =
            coeff_type == "general" ? EnsembleMode::General : EnsembleMode::Sparse;
        const double cap = params.eps_cap(mode, p(), s);
        if (eps_prime > cap) {
            throw ConfigError("packing.eps_prime",
                              "violates eps_prime <= min{" +
                                  std::string(mode == EnsembleMode::General ? "r^2" : "r^2/s") +
                                  ", r^4/4p} = " + std::to_string(cap));
        }
    }
    if (alpha < 0.0) throw ConfigError("packing.alpha", "must be nonnegative");
    if (l_target < 0) throw ConfigError("packing.l_target", "must be nonnegative");
    if (n_grid.empty()) throw ConfigError("experiment.n_grid", "must be nonempty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw ConfigError("experiment.n_grid", "entries must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
            throw ConfigError("experiment.n_grid", "must be strictly increasing");
        }
    }
    if (trials < 1) throw ConfigError("experiment.trials", "must be >= 1");
    if (side_info != "full_x" && side_info != "support_only") {
        throw ConfigError("experiment.side_info", "must be full_x or support_only");
    }
    if (side_info == "support_only" && coeff_type != "sparse_gaussian") {
        throw ConfigError("experiment.side_info",
                          "support_only requires coeff.type = sparse_gaussian");
    }
    if (out_dir.empty()) throw ConfigError("output.directory", "must be nonempty");
    for (const std::string& f : formats) {
        if (f != "csv" && f != "svg" && f != "json") {
            throw ConfigError("output.formats", "unknown format '" + f + "'");
        }
    }
}

RunConfig parse_run_config(const std::string& path) {
    KeyValues kv(path);
    RunConfig cfg;
    cfg.m1 = kv.integer("model.m1", 0);
    cfg.m2 = kv.integer("model.m2", 0);
    cfg.p1 = kv.integer("model.p1", 0);
    cfg.p2 = kv.integer("model.p2", 0);
    cfg.coeff_type = kv.str("coeff.type", cfg.coeff_type);
    cfg.s = kv.integer("coeff.s", cfg.s);
    cfg.sigma_a = kv.real("coeff.sigma_a", cfg.sigma_a);
    cfg.sigma_x_spectral = kv.real("coeff.sigma_x_spectral", cfg.sigma_x_spectral);
    cfg.sigma = kv.real("noise.sigma", cfg.sigma);
    cfg.t = kv.real("packing.t", cfg.t);
    cfg.c1 = kv.real("packing.c1", cfg.c1);
    cfg.eps_prime = kv.real("packing.eps_prime", cfg.eps_prime);
    cfg.r = kv.real("packing.r", cfg.r);
    cfg.alpha = kv.real("packing.alpha", cfg.alpha);
    cfg.l_target = kv.integer("packing.l_target", cfg.l_target);
    cfg.pack_seed = kv.u64("packing.seed", cfg.pack_seed);
    cfg.n_grid = kv.int_list("experiment.n_grid", cfg.n_grid);
    cfg.trials = kv.integer("experiment.trials", cfg.trials);
    cfg.side_info = kv.str("experiment.side_info", cfg.side_info);
    cfg.master_seed = kv.u64("experiment.master_seed", cfg.master_seed);
    cfg.out_dir = kv.str("output.directory", cfg.out_dir);
    cfg.formats = kv.str_list("output.formats", cfg.formats);
    kv.reject_unknown();
    cfg.validate();
    return cfg;
}

}  // namespace kslab
