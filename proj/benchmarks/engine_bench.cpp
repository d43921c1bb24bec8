#include <benchmark/benchmark.h>

#include "vtl/engine.hpp"
#include "vtl/scenario.hpp"

namespace {

void run_fieldtest(benchmark::State& state, vtl::Controller controller) {
    auto scenario = vtl::load_scenario_file(VTL_SCENARIO_DIR "/fieldtest.scenario");
    scenario.controller = controller;
    for (auto _ : state) {
        benchmark::DoNotOptimize(vtl::run(scenario));
    }
}

void BM_FieldtestVtl(benchmark::State& state) { run_fieldtest(state, vtl::Controller::vtl); }
BENCHMARK(BM_FieldtestVtl)->Unit(benchmark::kMillisecond);

void BM_FieldtestStop4(benchmark::State& state) { run_fieldtest(state, vtl::Controller::stop4); }
BENCHMARK(BM_FieldtestStop4)->Unit(benchmark::kMillisecond);

}  // namespace
