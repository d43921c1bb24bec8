#include <benchmark/benchmark.h>

#include "vtl/codec.hpp"

namespace {

using namespace vtl::codec;

Message sample_bsm() {
    Bsm b;
    b.vehicle_id = 7;
    b.timestamp_ms = 123400;
    b.x = 152.25;
    b.y = -40.5;
    b.speed = 14.667;
    b.heading = 90.0;
    return b;
}

Message sample_spat() {
    Spat s;
    s.leader_id = 3;
    s.intersection_id = 2;
    s.timestamp_ms = 123400;
    s.green_mask = 0b0101;
    s.time_remaining_ms = 2500;
    return s;
}

void BM_EncodeBsm(benchmark::State& state) {
    const Message m = sample_bsm();
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode(m));
    }
}
BENCHMARK(BM_EncodeBsm);

void BM_DecodeBsm(benchmark::State& state) {
    const auto frame = encode(sample_bsm());
    for (auto _ : state) {
        benchmark::DoNotOptimize(decode(frame));
    }
}
BENCHMARK(BM_DecodeBsm);

void BM_RoundTripSpat(benchmark::State& state) {
    const Message m = sample_spat();
    for (auto _ : state) {
        const auto frame = encode(m);
        benchmark::DoNotOptimize(decode(frame));
    }
}
BENCHMARK(BM_RoundTripSpat);

}  // namespace
