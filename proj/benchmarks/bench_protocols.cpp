#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "qchain/analysis.hpp"
#include "qchain/protocols.hpp"
#include "qchain/qutrit.hpp"
#include "qchain/rng.hpp"

namespace {

const qchain::ChannelCoeffs& channel() {
    static const qchain::ChannelCoeffs ch = qchain::make_channel(0.5, 0.6, std::sqrt(0.39));
    return ch;
}

void BM_teleport_hop(benchmark::State& state) {
    const qchain::PureState psi = qchain::haar_random_state(1);
    qchain::Rng rng = qchain::make_rng(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qchain::teleport_hop(psi, channel(), rng, 0));
    }
}
BENCHMARK(BM_teleport_hop);

void BM_gctp4_trial(benchmark::State& state) {
    const qchain::PureState psi = qchain::haar_random_state(1);
    qchain::Rng rng = qchain::make_rng(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qchain::run_gctp4(psi, channel(), rng));
    }
}
BENCHMARK(BM_gctp4_trial);

void BM_pgctp_trial(benchmark::State& state) {
    const qchain::PureState psi = qchain::haar_random_state(1);
    qchain::Rng rng = qchain::make_rng(4);
    const int segments = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(qchain::run_pgctp(psi, channel(), segments, rng));
    }
}
BENCHMARK(BM_pgctp_trial)->Arg(1)->Arg(2)->Arg(5);

void BM_enumerate_sctp(benchmark::State& state) {
    const qchain::PureState psi = qchain::haar_random_state(5);
    const auto spec = qchain::ProtocolSpec::sctp(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(qchain::enumerate(spec, psi, channel()));
    }
}
BENCHMARK(BM_enumerate_sctp)->Arg(3)->Arg(6);

void BM_enumerate_gctp4(benchmark::State& state) {
    const qchain::PureState psi = qchain::haar_random_state(6);
    qchain::EnumerateOptions opts;
    opts.full_outcomes = state.range(0) != 0;
    const auto spec = qchain::ProtocolSpec::gctp4();
    for (auto _ : state) {
        benchmark::DoNotOptimize(qchain::enumerate(spec, psi, channel(), opts));
    }
}
BENCHMARK(BM_enumerate_gctp4)->Arg(0)->Arg(1);

void BM_closed_forms(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(qchain::p_gctp4(channel()));
        benchmark::DoNotOptimize(qchain::p_sctp(channel(), 15));
        benchmark::DoNotOptimize(qchain::p_gctp4_max(0.5));
    }
}
BENCHMARK(BM_closed_forms);

void BM_sweep_256(benchmark::State& state) {
    std::vector<double> grid;
    for (int k = 1; k <= 256; ++k) grid.push_back(0.57735026918962576 * k / 256);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qchain::sweep(2, grid));
    }
}
BENCHMARK(BM_sweep_256);

}  // namespace

BENCHMARK_MAIN();
