#include <benchmark/benchmark.h>

#include <vector>

#include "vtl/channel.hpp"

namespace {

using namespace vtl::channel;

void BM_Transmit(benchmark::State& state) {
    ChannelModel channel(ChannelParams{}, 1);
    std::vector<Receiver> receivers;
    for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(state.range(0)); ++i) {
        receivers.push_back(Receiver{i + 1, 200.0, 50.0 * i});
    }
    const std::vector<std::uint8_t> frame(44, 0xAB);
    for (auto _ : state) {
        benchmark::DoNotOptimize(channel.transmit(frame, 0, receivers));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Transmit)->Arg(1)->Arg(8)->Arg(64);

void BM_MeanIpg(benchmark::State& state) {
    const double d = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mean_ipg(d, d, 2000, kBsmIntervalMs, 1));
    }
}
BENCHMARK(BM_MeanIpg)->Arg(100)->Arg(300);

}  // namespace
