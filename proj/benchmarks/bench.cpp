#include <benchmark/benchmark.h>

#include "eiprec/channel.hpp"
#include "eiprec/eta_estimator.hpp"
#include "eiprec/link_sim.hpp"
#include "eiprec/precoder.hpp"
#include "eiprec/rie.hpp"

using namespace eiprec;

namespace {

ComplexMatrix observed(int users, int antennas, double eta) {
  RandomStream rng(7);
  const auto H = channel::gen_channel(SystemDims(users, antennas), rng);
  return channel::corrupt(H, {eta, channel::CorruptionMode::additive, 1.0}, rng);
}

void BM_EigBsca(benchmark::State& state) {
  const auto B = channel::build_bsca(observed(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.3));
  for (auto _ : state) benchmark::DoNotOptimize(rie::eig_bsca(B));
}
BENCHMARK(BM_EigBsca)->Args({20, 128})->Args({30, 256})->Args({128, 256})->Unit(benchmark::kMillisecond);

void BM_EstimateEta(benchmark::State& state) {
  const auto Ht = observed(30, 256, 0.5);
  eta::EstimatorConfig cfg;
  cfg.order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eta::estimate_eta(Ht, cfg));
}
BENCHMARK(BM_EstimateEta)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_CleanChannel(benchmark::State& state) {
  const auto Ht = observed(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(rie::clean_channel(Ht, 0.3));
}
BENCHMARK(BM_CleanChannel)->Args({20, 128})->Args({30, 256})->Unit(benchmark::kMillisecond);

void BM_WfqPrecode(benchmark::State& state) {
  const auto Ht = observed(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.3);
  const precode::DacConfig dac{4, false, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(precode::wfq_precode(Ht, 0.1, 1.0, dac));
}
BENCHMARK(BM_WfqPrecode)->Args({20, 128})->Args({30, 256})->Unit(benchmark::kMillisecond);

void BM_DownlinkTrial(benchmark::State& state) {
  link::SimConfig cfg;
  cfg.dims = SystemDims(30, 256);
  cfg.eta = 0.3;
  cfg.csi = state.range(0) ? link::CsiMode::ei_cleaned : link::CsiMode::noisy_raw;
  cfg.dac = {4, false, 0.0};
  cfg.symbols_per_trial = 200;
  std::uint64_t trial = 0;
  for (auto _ : state) benchmark::DoNotOptimize(link::downlink_trial(cfg, trial++));
}
BENCHMARK(BM_DownlinkTrial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
