// Serial reference vs OpenMP kernels on one synthetic dataset.
//
//   ./bench_kernels --benchmark_filter=metrics
//
// The dataset size is fixed so runs are comparable across machines.

#include <benchmark/benchmark.h>

#include <memory>

#include "echoscope/engine.hpp"
#include "echoscope/log.hpp"
#include "echoscope/synth.hpp"

using namespace echoscope;

namespace {

struct Fixture {
    SynthDataset data;
    FollowerGraph fg;
    RetweetGraph rg;
    std::unique_ptr<Engine> engine;
    std::vector<std::optional<double>> user_ms;
    std::vector<UserId> baseline_users;
};

const Fixture& fixture() {
    static const auto f = [] {
        spdlog::set_level(spdlog::level::err);
        auto out = std::make_unique<Fixture>();
        SynthConfig c;
        c.n_users = 3000;
        c.base_follow_prob = 0.05;
        c.seed = 7;
        out->data = generate(c);
        const auto& b = out->data.bundle;
        out->fg = FollowerGraph::build(b.edges, b.seeds, b.users.size());
        out->rg = RetweetGraph::build(b.log, b.seeds, b.users.size());
        out->engine = std::make_unique<Engine>(b, out->fg, out->rg);
        out->user_ms = out->engine->metrics(1).user_ms;
        for (std::size_t i = 0; i < 100; ++i) out->baseline_users.push_back(b.seeds[i * 29 % b.seeds.size()]);
        return out;
    }();
    return *f;
}

Execution exec_of(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_metrics(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(f.engine->metrics(2, exec_of(state)));
    label(state);
}

void BM_class_fractions(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(f.engine->class_fractions(GraphKind::Follower, 1, exec_of(state)));
    label(state);
}

void BM_random_baseline(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(f.engine->random_baseline(f.baseline_users, 1, 100, 1, exec_of(state)));
    label(state);
}

void BM_entropy(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(entropy_comparison(f.fg.seeds(), f.fg, f.rg, f.user_ms, 1, 5, exec_of(state)));
    label(state);
}

}  // namespace

BENCHMARK(BM_metrics)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_class_fractions)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_random_baseline)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_entropy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
