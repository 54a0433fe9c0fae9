#include <benchmark/benchmark.h>

#include "succession/montecarlo.hpp"
#include "succession/prior.hpp"
#include "succession/rng.hpp"

using namespace succession;

namespace {

void bm_philox_u64(benchmark::State& state) {
    PhiloxRng rng(42, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rng.next_u64());
    }
}
BENCHMARK(bm_philox_u64);

void bm_philox_double(benchmark::State& state) {
    PhiloxRng rng(42, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rng.next_double());
    }
}
BENCHMARK(bm_philox_double);

void bm_rejection_two_coin(benchmark::State& state) {
    const SimulationConfig config{parse_prior("discrete:9/10@1/2,1/10@1/2"), 5,
                                  static_cast<std::uint64_t>(state.range(0)), 7, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_conditional(config).p_hat);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_rejection_two_coin)->Arg(100000)->Arg(1000000);

void bm_weighted_long_run(benchmark::State& state) {
    const SimulationConfig config{Prior::uniform(), 1826213,
                                  static_cast<std::uint64_t>(state.range(0)), 7, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_weighted(config).p_hat);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_weighted_long_run)->Arg(100000)->Arg(1000000);

void bm_bruteforce(benchmark::State& state) {
    const Prior coins = parse_prior("discrete:9/10@1/2,1/10@1/2");
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bruteforce_conditional(coins, n));
    }
}
BENCHMARK(bm_bruteforce)->Arg(8)->Arg(12)->Arg(16);

void bm_beta_sampling(benchmark::State& state) {
    const SimulationConfig config{parse_prior("beta:2.5,1.5"), 0, 100000, 7, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_conditional(config).p_hat);
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(bm_beta_sampling);

}  // namespace
