#include <benchmark/benchmark.h>

#include "qedcut/config.hpp"
#include "qedcut/spectral.hpp"

using namespace qedcut;

namespace {

SparseOperator study_hamiltonian() {
    RunConfig cfg = default_config();
    cfg.physical.g1 = 0.12;
    cfg.physical.g2 = 0.03;
    cfg.grid.photon_spacing = 0.6;
    cfg.grid.photon_lambda = 1.5;
    ModeTable modes = cfg.make_mode_table();
    static ModeTable keep = modes;
    static FockBasis basis = FockBasis::enumerate(keep, cfg.caps);
    KernelSet ks = cfg.make_kernels(keep);
    return build_total(basis, ks, cfg.physical, {});
}

} // namespace

static void BM_GroundStateLanczos(benchmark::State& state) {
    SparseOperator h = study_hamiltonian();
    SolverOptions opts;
    opts.dense_threshold = 16; // force the Krylov path
    for (auto _ : state) {
        GroundStateResult r = ground_state(h, opts);
        benchmark::DoNotOptimize(r.energy);
    }
}
BENCHMARK(BM_GroundStateLanczos);

static void BM_GroundStateDense(benchmark::State& state) {
    SparseOperator h = study_hamiltonian();
    SolverOptions opts;
    opts.dense_threshold = 4000;
    for (auto _ : state) {
        GroundStateResult r = ground_state(h, opts);
        benchmark::DoNotOptimize(r.energy);
    }
}
BENCHMARK(BM_GroundStateDense);

static void BM_OperatorNormPower(benchmark::State& state) {
    SparseOperator h = study_hamiltonian();
    SolverOptions opts;
    opts.dense_threshold = 16;
    for (auto _ : state) {
        benchmark::DoNotOptimize(operator_norm(h, 1e-8, opts));
    }
}
BENCHMARK(BM_OperatorNormPower);

static void BM_DenseSpectralNorm(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dense_spectral_norm(a));
    }
}
BENCHMARK(BM_DenseSpectralNorm)->Arg(64)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
