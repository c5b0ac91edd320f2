#include <benchmark/benchmark.h>

#include "qedcut/assembly.hpp"
#include "qedcut/config.hpp"

using namespace qedcut;

namespace {

struct Fixture {
    RunConfig cfg = default_config();
    ModeTable modes;
    KernelSet kernels;
    FockBasis basis;
    Fixture() {
        cfg.physical.g1 = 0.12;
        cfg.physical.g2 = 0.03;
        cfg.grid.photon_spacing = 0.6;
        cfg.grid.photon_lambda = 1.5;
        modes = cfg.make_mode_table();
        kernels = cfg.make_kernels(modes);
        basis = FockBasis::enumerate(modes, cfg.caps);
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

} // namespace

static void BM_BuildHI1(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        SparseOperator op = build_HI1(f.basis, f.kernels.vertex);
        benchmark::DoNotOptimize(op.nnz());
    }
}
BENCHMARK(BM_BuildHI1);

static void BM_BuildHI2(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        SparseOperator op = build_HI2(f.basis, f.kernels.coulomb);
        benchmark::DoNotOptimize(op.nnz());
    }
}
BENCHMARK(BM_BuildHI2);

static void BM_BuildTotal(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        SparseOperator op = build_total(f.basis, f.kernels, f.cfg.physical, {});
        benchmark::DoNotOptimize(op.nnz());
    }
}
BENCHMARK(BM_BuildTotal);

static void BM_SparseMatvec(benchmark::State& state) {
    auto& f = fixture();
    SparseOperator h = build_total(f.basis, f.kernels, f.cfg.physical, {});
    Vector x = Vector::Ones(static_cast<Eigen::Index>(h.dim())).normalized();
    for (auto _ : state) {
        Vector y = h.matrix * x;
        benchmark::DoNotOptimize(y.sum());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(h.nnz()));
}
BENCHMARK(BM_SparseMatvec);
