#include <benchmark/benchmark.h>

#include "polysz/counting.hpp"
#include "polysz/fourier.hpp"
#include "polysz/pet.hpp"
#include "polysz/sweep.hpp"
#include "polysz/symbolic.hpp"

using namespace polysz;

static void BM_RingMul(benchmark::State& state) {
    auto R = make_ring(RingSpec::parse(state.range(0) ? "gf:27" : "zmod:97"));
    Elem acc = R->one();
    for (auto _ : state) {
        for (Elem x = 0; x < R->size(); ++x) acc = R->add(R->mul(acc, x), R->one());
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(R->size()));
}
BENCHMARK(BM_RingMul)->Arg(0)->Arg(1);

static void BM_Lambda(benchmark::State& state) {
    auto R = make_ring(RingSpec::modint(static_cast<std::uint64_t>(state.range(0))));
    auto P = IntPoly::parse_family("y, y^2");
    std::vector<FunctionOnRing> F;
    for (int i = 0; i < 3; ++i) F.push_back(FunctionOnRing::random_bounded(R, i));
    LambdaQuery q{R, P, F, {}, {}};
    for (auto _ : state) benchmark::DoNotOptimize(lambda(q));
}
BENCHMARK(BM_Lambda)->Arg(61)->Arg(251)->Arg(1009);

static void BM_Gowers(benchmark::State& state) {
    auto R = make_ring(RingSpec::modint(61));
    auto f = FunctionOnRing::random_bounded(R, 1);
    auto s = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gowers_power(f, s));
}
BENCHMARK(BM_Gowers)->Arg(2)->Arg(3);

static void BM_HadamardDesk(benchmark::State& state) {
    auto R = make_ring(RingSpec::parse("prod:(zmod:3,zmod:9)"));
    for (auto _ : state)
        for (std::uint64_t chi = 1; chi < R->num_characters(); ++chi)
            benchmark::DoNotOptimize(hadamard_char_sum(*R, chi, 2));
}
BENCHMARK(BM_HadamardDesk);

static void BM_CountRoots(benchmark::State& state) {
    auto R = make_ring(RingSpec::parse("nilp:5:2"));
    auto P = IntPoly::parse("y^3-y");
    for (auto _ : state) benchmark::DoNotOptimize(count_roots(*R, P));
}
BENCHMARK(BM_CountRoots);

static void BM_PetStep(benchmark::State& state) {
    auto R = make_ring(RingSpec::modint(23));
    auto P = IntPoly::parse_family("y, y^2, y^3");
    std::vector<FunctionOnRing> F;
    for (int i = 0; i < 4; ++i) F.push_back(FunctionOnRing::random_bounded(R, 10 + i));
    for (auto _ : state) benchmark::DoNotOptimize(pet_step(R, P, F, 9));
}
BENCHMARK(BM_PetStep);

static void BM_SymbolicDiagram(benchmark::State& state) {
    auto P = IntPoly::parse_family("y^3, y^3+y^2");
    for (auto _ : state) benchmark::DoNotOptimize(symbolic_diagram(P));
}
BENCHMARK(BM_SymbolicDiagram)->Unit(benchmark::kMillisecond);

static void BM_DecaySweep(benchmark::State& state) {
    SweepConfig cfg;
    cfg.rings = {"primes-after:3:12"};
    cfg.family = IntPoly::parse_family("y, y^2");
    cfg.trials = 50;
    cfg.functions = SweepConfig::Functions::Indicator;
    for (auto _ : state) benchmark::DoNotOptimize(sweep(cfg));
}
BENCHMARK(BM_DecaySweep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
