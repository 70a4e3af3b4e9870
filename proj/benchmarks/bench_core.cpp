#include <benchmark/benchmark.h>

#include "ontoscope/feasibility.hpp"
#include "ontoscope/verifier.hpp"
#include "ontoscope/zoo.hpp"

using namespace ontoscope;

namespace {

Ket uniform_ket(int dim) {
    return Ket(CVector::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0)));
}

void BM_BornProbability(benchmark::State& state) {
    Rng rng(1);
    auto psi = random_ket(4, rng);
    auto effect = Effect::rank1(random_ket(4, rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(born_probability(psi, effect));
    }
}
BENCHMARK(BM_BornProbability);

void BM_BellResponseTable(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto canonical = complete_basis({}, 3, "canonical");
    auto model = zoo::build_bell_model(3, n, {canonical});
    auto psi = uniform_ket(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.response_table(canonical.effect(0), canonical, &psi));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_BellResponseTable)->Range(1000, 100000)->Complexity();

void BM_KsPrediction(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto model = zoo::build_ks_qubit_model(n, 1);
    Rng rng(2);
    auto psi = random_ket(2, rng);
    auto ctx = complete_basis({random_ket(2, rng)}, 2, "probe");
    for (auto _ : state) {
        benchmark::DoNotOptimize(predicted_probability(model, psi, "P0", ctx.effect(0), ctx));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_KsPrediction)->Range(1000, 100000)->Complexity();

void BM_Coloring18(benchmark::State& state) {
    auto rayset = feasibility::bks18_rayset();
    for (auto _ : state) {
        benchmark::DoNotOptimize(feasibility::ks_colorable(rayset));
    }
}
BENCHMARK(BM_Coloring18);

void BM_CrossContextCheck(benchmark::State& state) {
    const int n = 2000;
    auto canonical = complete_basis({}, 3, "canonical");
    auto model = zoo::build_bell_model(3, n, {canonical});
    Rng rng(3);
    auto family = verifier::make_family(canonical, 0, 6, rng, 1);
    std::vector<Ket> states;
    for (int i = 0; i < 4; ++i) states.push_back(random_ket(3, rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(verifier::check_cross_context(model, family, states, {}));
    }
}
BENCHMARK(BM_CrossContextCheck);

}  // namespace

BENCHMARK_MAIN();
