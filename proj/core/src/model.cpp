#include "kslab/model.hpp"

#include "kslab/csv.hpp"
#include "kslab/linalg.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace kslab {

namespace {

void require_unit_columns(const Matrix& m, double tol, const char* name) {
    for (int j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
        if (std::fabs(s - 1.0) > tol) {
            throw std::invalid_argument(std::string("build_ks_dictionary: column ") +
                                        std::to_string(j + 1) + " of " + name +
                                        " is not unit norm (||col||^2 = " + std::to_string(s) + ")");
        }
    }
}

}  // namespace

KSDictionary build_ks_dictionary(const Matrix& a, const Matrix& b, double norm_tol) {
    require_unit_columns(a, norm_tol, "A");
    require_unit_columns(b, norm_tol, "B");
    KSDictionary dict;
    dict.a = a;
    dict.b = b;
    dict.d = kron(a, b);
    return dict;
}

Matrix random_unit_norm_matrix(int rows, int cols, Rng& rng) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return normalize_columns(m);
}

KSDictionary random_dictionary(int m1, int p1, int m2, int p2, std::uint64_t seed) {
    Rng rng_a(Rng::derive(seed, {0xA}));
    Rng rng_b(Rng::derive(seed, {0xB}));
    return build_ks_dictionary(random_unit_norm_matrix(m1, p1, rng_a),
                               random_unit_norm_matrix(m2, p2, rng_b));
}

CoefficientModel CoefficientModel::general(Matrix covariance) {
    CoefficientModel m;
    m.variant = CoeffVariant::General;
    m.sigma_x = std::move(covariance);
    return m;
}

CoefficientModel CoefficientModel::sparse_uniform(int s, double sigma_a) {
    CoefficientModel m;
    m.variant = CoeffVariant::SparseUniform;
    m.s = s;
    m.sigma_a = sigma_a;
    return m;
}

CoefficientModel CoefficientModel::sparse_gaussian(int s, double sigma_a) {
    CoefficientModel m;
    m.variant = CoeffVariant::SparseGaussian;
    m.s = s;
    m.sigma_a = sigma_a;
    return m;
}

void CoefficientModel::validate(int p) const {
    if (variant == CoeffVariant::General) {
        if (sigma_x.rows() != p || sigma_x.cols() != p) {
            throw std::invalid_argument("CoefficientModel: sigma_x must be p x p");
        }
        if (sigma_x.max_abs_diff(sigma_x.transpose()) > 1e-12 * std::max(1.0, sigma_x.max_abs())) {
            throw std::invalid_argument("CoefficientModel: sigma_x must be symmetric");
        }
    } else {
        if (s < 1 || s > p) {
            throw std::invalid_argument("CoefficientModel: need 1 <= s <= p, got s=" +
                                        std::to_string(s) + ", p=" + std::to_string(p));
        }
        if (!(sigma_a >= 0.0)) {
            throw std::invalid_argument("CoefficientModel: sigma_a must be nonnegative");
        }
    }
}

std::string to_string(CoeffVariant v) {
    switch (v) {
        case CoeffVariant::General: return "general";
        case CoeffVariant::SparseUniform: return "sparse_uniform";
        case CoeffVariant::SparseGaussian: return "sparse_gaussian";
    }
    return "unknown";
}

CoeffVariant coeff_variant_from_string(const std::string& name) {
    if (name == "general") return CoeffVariant::General;
    if (name == "sparse_uniform") return CoeffVariant::SparseUniform;
    if (name == "sparse_gaussian") return CoeffVariant::SparseGaussian;
    throw std::invalid_argument("unknown coefficient variant: " + name);
}

IndexMultiset sample_support(int p, int s, Rng& rng) {
    return rng.sample_subset(p, s);
}

CoefficientSample sample_coefficients(const CoefficientModel& model, int p, int n, Rng& rng) {
    model.validate(p);
    CoefficientSample out;
    out.x = Matrix(p, n, 0.0);

    if (model.variant == CoeffVariant::General) {
        // Color i.i.d. standard normals with the symmetric PSD square root;
        // unique factor, so no ordering ambiguity in the coloring.
        const Matrix root = psd_sqrt(model.sigma_x);
        for (int k = 0; k < n; ++k) {
            std::vector<double> z(p);
            for (int i = 0; i < p; ++i) z[i] = rng.normal();
            for (int i = 0; i < p; ++i) {
                double s = 0.0;
                for (int j = 0; j < p; ++j) s += root(i, j) * z[j];
                out.x(i, k) = s;
            }
        }
        return out;
    }

    out.supports.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        IndexMultiset support = sample_support(p, model.s, rng);
        for (int idx : support) {
            const double value = (model.variant == CoeffVariant::SparseGaussian)
                                     ? model.sigma_a * rng.normal()
                                     : model.sigma_a * rng.rademacher();
            out.x(idx - 1, k) = value;
        }
        out.supports.push_back(std::move(support));
    }
    return out;
}

Dataset synthesize(const KSDictionary& dict, const CoefficientModel& model, int n, double sigma,
                   std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("synthesize: sigma must be nonnegative");
    Rng rng(seed);
    Dataset ds;
    ds.sigma = sigma;
    ds.seed = seed;

    CoefficientSample coeffs = sample_coefficients(model, dict.p(), n, rng);
    ds.x = std::move(coeffs.x);
    ds.supports = std::move(coeffs.supports);

    ds.y = dict.d * ds.x;
    if (sigma > 0.0) {
        for (int i = 0; i < ds.y.rows(); ++i) {
            for (int k = 0; k < ds.y.cols(); ++k) ds.y(i, k) += sigma * rng.normal();
        }
    }
    return ds;
}

double snr(const CoefficientModel& model, int m, double sigma, const KSDictionary* dict) {
    if (!(sigma > 0.0)) throw std::invalid_argument("snr: sigma must be positive");
    if (m <= 0) throw std::invalid_argument("snr: m must be positive");
    if (model.sparse()) {
        return static_cast<double>(model.s) * model.sigma_a * model.sigma_a /
               (static_cast<double>(m) * sigma * sigma);
    }
    if (dict == nullptr) {
        throw std::invalid_argument("snr: General model needs a dictionary for tr(D Sigma_x D^T)");
    }
    // E||Dx||^2 = tr(D Sigma_x D^T).
    const Matrix ds = dict->d * model.sigma_x;
    double trace = 0.0;
    for (int i = 0; i < dict->m(); ++i) {
        for (int j = 0; j < dict->p(); ++j) trace += ds(i, j) * dict->d(i, j);
    }
    return trace / (static_cast<double>(m) * sigma * sigma);
}

void save_dataset(const Dataset& ds, const CoefficientModel& model, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_matrix_csv(dir + "/Y.csv", ds.y);
    write_matrix_csv(dir + "/X.csv", ds.x);

    nlohmann::ordered_json manifest;
    manifest["format"] = "dataset-v1";
    manifest["m"] = ds.y.rows();
    manifest["p"] = ds.x.rows();
    manifest["n"] = ds.y.cols();
    manifest["sigma"] = ds.sigma;
    manifest["seed"] = ds.seed;
    manifest["coeff"] = {{"variant", to_string(model.variant)},
                         {"s", model.s},
                         {"sigma_a", model.sigma_a}};
    manifest["supports"] = ds.supports;

    std::ofstream out(dir + "/manifest.json");
    if (!out) throw std::runtime_error("save_dataset: cannot open manifest in " + dir);
    out << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw std::runtime_error("load_dataset: cannot open manifest in " + dir);
    nlohmann::json manifest;
    in >> manifest;

    Dataset ds;
    ds.y = read_matrix_csv(dir + "/Y.csv");
    ds.x = read_matrix_csv(dir + "/X.csv");
    ds.sigma = manifest.at("sigma").get<double>();
    ds.seed = manifest.at("seed").get<std::uint64_t>();
    for (const auto& support : manifest.at("supports")) {
        ds.supports.push_back(support.get<IndexMultiset>());
    }
    return ds;
}

}  // namespace kslab
