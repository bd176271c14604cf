#include <polytrap/analytic_density.hpp>
#include <polytrap/energy.hpp>
#include <polytrap/model.hpp>
#include <polytrap/orthopoly.hpp>
#include <polytrap/sampler.hpp>

#include <benchmark/benchmark.h>

using namespace polytrap;

namespace {

System quartic_system(int n) {
    return {n, Confinement::quartic(1.0, 12.0), Coupling::from_lambda(1.0)};
}

void bm_recurrence_build(benchmark::State& state) {
    const Weight w{Confinement::quartic(1.0, 12.0)};
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto table = build_recurrence(w, order);
        benchmark::DoNotOptimize(table.beta.data());
    }
}
BENCHMARK(bm_recurrence_build)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void bm_kernel_density_grid(benchmark::State& state) {
    const auto table = build_recurrence(Weight{Confinement::quartic(1.0, 12.0)}, 50);
    const int points = static_cast<int>(state.range(0));
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = -table.halfwidth + 2.0 * table.halfwidth * i / (points - 1);
    for (auto _ : state) {
        double acc = 0.0;
        for (double y : grid) acc += kernel_density(table, y);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * points);
}
BENCHMARK(bm_kernel_density_grid)->Arg(801)->Unit(benchmark::kMillisecond);

void bm_local_energy(benchmark::State& state) {
    const auto s = quartic_system(50);
    const auto x = random_configuration(s, 7);
    const auto form =
        state.range(0) == 0 ? EnergyForm::canonical : EnergyForm::expanded;
    for (auto _ : state) {
        benchmark::DoNotOptimize(local_energy(s, x, form));
    }
}
BENCHMARK(bm_local_energy)->Arg(0)->Arg(1);

void bm_mc_sweeps(benchmark::State& state) {
    const auto s = quartic_system(50);
    struct NullSink : SampleSink {
        void sample(const Configuration&) override {}
    } sink;
    ChainConfig cfg;
    cfg.chains = 1;
    cfg.burn_in = 0;
    cfg.steps = 2000;
    cfg.seed = 3;
    cfg.proposal_sigma = 0.4;
    for (auto _ : state) {
        auto stats = sample_stream(s, cfg, sink);
        benchmark::DoNotOptimize(stats.kept);
    }
    state.SetItemsProcessed(state.iterations() * cfg.steps);
}
BENCHMARK(bm_mc_sweeps)->Unit(benchmark::kMillisecond);

void bm_sextic_solve(benchmark::State& state) {
    const SexticParams p{1.0, -4.0, 3.0, 50};
    for (auto _ : state) {
        auto res = sextic_density_solve(p);
        benchmark::DoNotOptimize(res.state.residual);
    }
}
BENCHMARK(bm_sextic_solve)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
