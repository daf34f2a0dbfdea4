#include <benchmark/benchmark.h>

#include "qfa/equivalence.hpp"
#include "qfa/generate.hpp"

using namespace qfa;

namespace {

std::string word_of(const Alphabet& alphabet, int len, std::uint64_t seed) {
    GaussianRng rng(seed);
    std::string w;
    for (int i = 0; i < len; ++i)
        w += alphabet.symbols[static_cast<std::size_t>(rng.bits() % alphabet.size())];
    return w;
}

}  // namespace

static void BM_AcceptProbQfa(benchmark::State& state) {
    const KLetterQfa m = random_qfa(4, 2, 2, 1);
    const std::string w = word_of(m.alphabet, static_cast<int>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(accept_prob(m, w));
}
BENCHMARK(BM_AcceptProbQfa)->Arg(8)->Arg(64)->Arg(512);

static void BM_AcceptProbMmqfa(benchmark::State& state) {
    const KLetterMmqfa m = random_mmqfa(4, 2, 2, 3);
    const std::string w = word_of(m.alphabet, static_cast<int>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(accept_prob(m, w));
}
BENCHMARK(BM_AcceptProbMmqfa)->Arg(8)->Arg(64)->Arg(512);

static void BM_QfaBucketClosure(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const KLetterQfa a = random_qfa(n, 2, 2, 5);
    const KLetterQfa b = random_qfa(n, 2, 2, 6);
    const KLetterQfa sum = oplus(a, b, rho_vector(a.initial, b.n));
    for (auto _ : state) benchmark::DoNotOptimize(qfa_bucket_closure(sum));
}
BENCHMARK(BM_QfaBucketClosure)->Arg(2)->Arg(3)->Arg(4);

// Equivalent pairs are the worst case for both deciders: the span method
// closes the full family and the naive method enumerates every word up to
// the decision bound.
static void BM_SpanEquivalentQfa(benchmark::State& state) {
    const KLetterQfa m = random_qfa(2, 2, 2, 7);
    const KLetterQfa other = scale_global_phase(permute_states(m, {1, 0}), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(span_equivalent(m, other));
}
BENCHMARK(BM_SpanEquivalentQfa);

static void BM_NaiveEquivalentQfaAtBound(benchmark::State& state) {
    const KLetterQfa m = random_qfa(2, 2, 2, 7);
    const KLetterQfa other = scale_global_phase(permute_states(m, {1, 0}), 0.5);
    const std::uint64_t t = equivalence_bound(m.n, other.n, 2, m.k, other.k);
    for (auto _ : state) benchmark::DoNotOptimize(naive_equivalent(m, other, t));
}
BENCHMARK(BM_NaiveEquivalentQfaAtBound);

static void BM_SpanEquivalentMmqfa(benchmark::State& state) {
    const KLetterMmqfa m = random_mmqfa(2, 2, 2, 9);
    const KLetterMmqfa other = permute_states(m, {1, 0});
    for (auto _ : state) benchmark::DoNotOptimize(span_equivalent(m, other));
}
BENCHMARK(BM_SpanEquivalentMmqfa);

BENCHMARK_MAIN();
