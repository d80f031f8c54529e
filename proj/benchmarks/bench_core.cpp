#include "kslab/bounds.hpp"
#include "kslab/kron.hpp"
#include "kslab/linalg.hpp"
#include "kslab/model.hpp"
#include "kslab/packing.hpp"
#include "kslab/simulate.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace kslab;

const KSDictionary& desk_dictionary() {
    static const KSDictionary dict = random_dictionary(4, 8, 4, 8, 1);
    return dict;
}

const DictionaryEnsemble& desk_ensemble() {
    static const DictionaryEnsemble ensemble = [] {
        PackingParams params;
        params.t = 0.5;
        params.c1 = 0.044;
        params.r = 1.0;
        params.eps_prime = 0.5 * params.eps_cap(EnsembleMode::Sparse, 64, 4);
        return build_ensemble(desk_dictionary(), params, EnsembleMode::Sparse, 4, 2);
    }();
    return ensemble;
}

void BM_Kron(benchmark::State& state) {
    const Matrix& a = desk_dictionary().a;
    const Matrix& b = desk_dictionary().b;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kron(a, b));
    }
}
BENCHMARK(BM_Kron);

void BM_KhatriRao(benchmark::State& state) {
    const Matrix& a = desk_dictionary().a;
    const Matrix& b = desk_dictionary().b;
    for (auto _ : state) {
        benchmark::DoNotOptimize(khatri_rao(a, b));
    }
}
BENCHMARK(BM_KhatriRao);

void BM_SpectralNorm(benchmark::State& state) {
    const Matrix& d = desk_dictionary().d;
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_norm(d));
    }
}
BENCHMARK(BM_SpectralNorm);

void BM_ConditionalCovariance(benchmark::State& state) {
    const KSDictionary& dict = desk_dictionary();
    const IndexMultiset support = {3, 17, 40, 61};
    for (auto _ : state) {
        benchmark::DoNotOptimize(conditional_covariance(dict, support, 1.0, 0.1));
    }
}
BENCHMARK(BM_ConditionalCovariance);

void BM_KlGaussian(benchmark::State& state) {
    const KSDictionary& dict = desk_dictionary();
    const Matrix s1 = conditional_covariance(dict, {3, 17, 40, 61}, 1.0, 0.1);
    const Matrix s2 = conditional_covariance(dict, {4, 18, 41, 62}, 1.0, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kl_gaussian(s1, s2));
    }
}
BENCHMARK(BM_KlGaussian);

void BM_BuildEnsemble(benchmark::State& state) {
    PackingParams params;
    params.t = 0.5;
    params.c1 = 0.044;
    params.r = 1.0;
    params.eps_prime = 0.5 * params.eps_cap(EnsembleMode::Sparse, 64, 4);
    std::uint64_t seed = 100;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            build_ensemble(desk_dictionary(), params, EnsembleMode::Sparse, 4, seed++));
    }
}
BENCHMARK(BM_BuildEnsemble);

void BM_MinDistanceDetect(benchmark::State& state) {
    const DictionaryEnsemble& ensemble = desk_ensemble();
    const Dataset ds = synthesize(ensemble.members[0], CoefficientModel::sparse_gaussian(4, 1.0),
                                  static_cast<int>(state.range(0)), 0.1, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(min_distance_detect(ds.y, ds.x, ensemble));
    }
}
BENCHMARK(BM_MinDistanceDetect)->Arg(1)->Arg(25)->Arg(125);

void BM_GaussianMlDetect(benchmark::State& state) {
    const DictionaryEnsemble& ensemble = desk_ensemble();
    const Dataset ds = synthesize(ensemble.members[0], CoefficientModel::sparse_gaussian(4, 1.0),
                                  static_cast<int>(state.range(0)), 0.1, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_ml_detect(ds.y, ds.supports, ensemble, 1.0, 0.1));
    }
}
BENCHMARK(BM_GaussianMlDetect)->Arg(1)->Arg(25);

void BM_RipConstant(benchmark::State& state) {
    Rng rng(9);
    const Matrix d = random_unit_norm_matrix(6, 8, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rip_constant(d, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_RipConstant)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
