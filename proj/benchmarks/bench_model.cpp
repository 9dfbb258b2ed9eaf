#include <benchmark/benchmark.h>

#include "mrr/explore.hpp"
#include "mrr/induction.hpp"
#include "mrr/invariants.hpp"

using namespace mrr;

namespace {

const ModelBounds kBounds = ModelBounds::make(3, 3, 2, 3);

std::vector<ReplicaSetState> sample_states(int count) {
    std::vector<ReplicaSetState> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(random_state(kBounds, i));
    return out;
}

void BM_EnumerateTransitions(benchmark::State& state) {
    const auto states = sample_states(64);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_transitions(states[i++ % states.size()], kBounds));
    }
}
BENCHMARK(BM_EnumerateTransitions);

void BM_EvalFullInvariant(benchmark::State& state) {
    const auto states = sample_states(64);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            eval_invariant(InvariantId::MRRInd, states[i++ % states.size()], kBounds));
    }
}
BENCHMARK(BM_EvalFullInvariant);

void BM_CanonicalKey(benchmark::State& state) {
    const auto states = sample_states(64);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(canonical_key(states[i++ % states.size()]));
    }
}
BENCHMARK(BM_CanonicalKey);

void BM_RandomState(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(random_state(kBounds, seed++));
    }
}
BENCHMARK(BM_RandomState);

void BM_BfsSmallScope(benchmark::State& state) {
    const auto bounds = ModelBounds::make(2, 2, 1, 2);
    const std::vector<InvariantId> invs(all_invariants().begin(), all_invariants().end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(bfs_check(bounds, invs, {}));
    }
}
BENCHMARK(BM_BfsSmallScope);

void BM_ExhaustiveConsecutionTiny(benchmark::State& state) {
    const auto bounds = ModelBounds::make(1, 2, 1, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_consecution_exhaustive(bounds, {}));
    }
}
BENCHMARK(BM_ExhaustiveConsecutionTiny);

}  // namespace

BENCHMARK_MAIN();
