#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <anj/energy_chain.hpp>
#include <anj/mc_sim.hpp>
#include <anj/secrecy.hpp>
#include <anj/specfun.hpp>

namespace {

void BM_MarcumQ(benchmark::State& state) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> a(256), b(256);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = 5 * u(gen);
        b[i] = 10 * u(gen);
    }
    const int m = static_cast<int>(state.range(0));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(anj::specfun::marcum_q(m, a[i], b[i]));
        i = (i + 1) & 255;
    }
}
BENCHMARK(BM_MarcumQ)->Arg(1)->Arg(4)->Arg(8);

void BM_ExpIntegralEi(benchmark::State& state) {
    double x = -1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(anj::specfun::exp_integral_ei(x));
        x = x < -30 ? -1e-3 : x * 1.07;
    }
}
BENCHMARK(BM_ExpIntegralEi);

// Chain construction plus stationary solve, by number of levels.
void BM_FdChain(benchmark::State& state) {
    const anj::SystemParams p = anj::default_params();
    const anj::EnergyStorageSpec s = anj::make_storage({0.02, 0.01, static_cast<int>(state.range(0))}, p);
    for (auto _ : state) {
        const auto m = anj::fd_transition_matrix(p, s);
        benchmark::DoNotOptimize(anj::stationary_distribution(m, s.tau).ready_prob);
    }
}
BENCHMARK(BM_FdChain)->Arg(50)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_JammingSearch(benchmark::State& state) {
    const anj::SystemParams p = anj::default_params();
    std::vector<double> grid;
    for (int i = 0; i < 60; ++i) grid.push_back(anj::dbm_to_watts(-10 + 30.0 * i / 59));
    for (auto _ : state) {
        benchmark::DoNotOptimize(anj::optimal_jamming_power(p, {}, grid).p_j_star);
    }
}
BENCHMARK(BM_JammingSearch)->Unit(benchmark::kMillisecond);

void BM_SimulateFd(benchmark::State& state) {
    const anj::SystemParams p = anj::default_params();
    const anj::EnergyStorageSpec s = anj::make_storage(anj::StorageSizing{}, p);
    const auto blocks = static_cast<std::uint64_t>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        anj::RngStream rng(7, stream++);
        benchmark::DoNotOptimize(anj::simulate_fd(p, s, blocks, rng).outage_count);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(blocks));
}
BENCHMARK(BM_SimulateFd)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
