#include <benchmark/benchmark.h>

#include "qedcut/verifier.hpp"

using namespace qedcut;

static void BM_EnumerateBasis(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    ModeTable modes = make_test_modes(n, n, n, 1);
    TruncationCaps caps;
    caps.max_fermions = -1;
    caps.max_per_mode = 2;
    caps.max_photons_total = 2;
    for (auto _ : state) {
        FockBasis basis = FockBasis::enumerate(modes, caps);
        benchmark::DoNotOptimize(basis.size());
    }
    state.SetComplexityN(static_cast<int64_t>(1) << (3 * n));
}
BENCHMARK(BM_EnumerateBasis)->DenseRange(2, 5)->Complexity();

static void BM_ApplyMonomial(benchmark::State& state) {
    ModeTable modes = make_test_modes(4, 4, 4, 2);
    TruncationCaps caps;
    caps.max_fermions = -1;
    caps.max_per_mode = 1;
    caps.max_photons_total = 2;
    FockBasis basis = FockBasis::enumerate(modes, caps);
    const LadderOp ops[] = {fermion_op(LadderKind::Create, Block::Plus, 1),
                            fermion_op(LadderKind::Annihilate, Block::Minus, 2),
                            boson_op(LadderKind::Create, 1)};
    std::size_t col = 0;
    for (auto _ : state) {
        auto r = basis.apply_monomial(ops, basis.state(col));
        benchmark::DoNotOptimize(r);
        col = (col + 1) % basis.size();
    }
}
BENCHMARK(BM_ApplyMonomial);

static void BM_IndexLookup(benchmark::State& state) {
    ModeTable modes = make_test_modes(5, 5, 5, 1);
    TruncationCaps caps;
    caps.max_fermions = -1;
    caps.max_per_mode = 1;
    caps.max_photons_total = 1;
    FockBasis basis = FockBasis::enumerate(modes, caps);
    std::size_t col = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(basis.index_of(basis.state(col)));
        col = (col + 7) % basis.size();
    }
}
BENCHMARK(BM_IndexLookup);
