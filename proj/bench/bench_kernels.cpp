// Serial reference vs OpenMP path for the three parallel kernels: per-column
// SESD solves, the calibration step-size scan, and trial-level sweeps.
// Arg 0 selects the serial path, arg 1 the parallel one.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "splitprec/aas.hpp"
#include "splitprec/bbu.hpp"
#include "splitprec/channel.hpp"
#include "splitprec/ils.hpp"
#include "splitprec/quantizer.hpp"
#include "splitprec/sweep.hpp"

using namespace splitprec;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_ColumnSolves(benchmark::State& state) {
  SystemConfig sys;
  sys.M = 32;
  sys.K = 8;
  sys.N = 8;
  const ChannelMatrix ch = gen_rayleigh(sys, derive_seed(7, 1, 0));
  const EffectiveChannel eff = effective_channel(ch, gs_mrt(ch, 8));
  const IlsProblem prob = build_ils(eff.matrix, 0.5);
  const QuantizerSpec spec = make_quantizer(0.09, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_columns(prob, spec, {}, exec_of(state)));
  }
}
BENCHMARK(BM_ColumnSolves)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DistortionScan(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  std::vector<double> samples(200000);
  for (auto& x : samples) x = n01(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_step_sizes(samples, 4, exec_of(state)));
  }
}
BENCHMARK(BM_DistortionScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const auto kv = KeyValueConfig::parse_string(
      "M = 16\nK = 4\nN = 4\nb_split = 3\nb_one_stage = 1\nsnr_db_list = 10\n"
      "trials = 16\ncalibration_draws = 50\nschemes = inf_rzf,gs_mrt,dft\n");
  const SweepConfig cfg = sweep_config_from(kv);
  const CalibrationTable cal = calibrate_schemes(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sweep(cfg, cal, exec_of(state)));
  }
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
