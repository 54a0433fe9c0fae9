#include <benchmark/benchmark.h>

#include "succession/moments.hpp"
#include "succession/predictive.hpp"
#include "succession/prior.hpp"

using namespace succession;

namespace {

Prior flat_table() {
    return Prior::tabulated({{Scalar::of(0.0), Scalar::of(1.0)},
                             {Scalar::of(1.0), Scalar::of(1.0)}});
}

Prior bumpy_table() {
    return Prior::tabulated({{Scalar::of(0.0), Scalar::of(0.2)},
                             {Scalar::of(0.3), Scalar::of(1.7)},
                             {Scalar::of(0.6), Scalar::of(0.4)},
                             {Scalar::of(1.0), Scalar::of(1.3)}});
}

void bm_moment_beta_closed_form(benchmark::State& state) {
    const Prior prior = Prior::beta(Scalar::of(2.5), Scalar::of(3.5));
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(moment(prior, n).value);
    }
}
BENCHMARK(bm_moment_beta_closed_form)->Arg(8)->Arg(1000)->Arg(1000000);

void bm_quadrature_direct(benchmark::State& state) {
    const Prior prior = bumpy_table();
    const Tabulated& tab = *prior.get_if<Tabulated>();
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(quadrature_moment(tab, n, 1e-10).value);
    }
}
// Up to the substitution threshold the integrand concentrates at x = 1.
BENCHMARK(bm_quadrature_direct)->Arg(4)->Arg(16)->Arg(64);

void bm_quadrature_substituted(benchmark::State& state) {
    const Prior prior = bumpy_table();
    const Tabulated& tab = *prior.get_if<Tabulated>();
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(quadrature_moment(tab, n, 1e-10).value);
    }
}
// Past the threshold the u = x^{n+1} substitution keeps the integrand flat,
// so cost stays level as n grows by orders of magnitude.
BENCHMARK(bm_quadrature_substituted)->Arg(65)->Arg(10000)->Arg(1000000);

void bm_moment_exact_uniform(benchmark::State& state) {
    const Prior prior = Prior::uniform();
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(moment_exact(prior, n));
    }
}
BENCHMARK(bm_moment_exact_uniform)->Arg(1000)->Arg(1826213);

void bm_predictive_table_incremental(benchmark::State& state) {
    const Prior prior = parse_prior("discrete:0.91@0.25,0.5@0.5,0.1@0.25");
    const auto n_max = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(predictive_table(prior, n_max).rows.size());
    }
}
BENCHMARK(bm_predictive_table_incremental)->Arg(100)->Arg(1000);

void bm_flat_table_predictive(benchmark::State& state) {
    const Prior prior = flat_table();
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(predictive_after_run(prior, n).value);
    }
}
BENCHMARK(bm_flat_table_predictive)->Arg(10)->Arg(1000000);

}  // namespace
