#include <benchmark/benchmark.h>

#include "udw/oracle.hpp"
#include "udw/response.hpp"

using namespace udw;

namespace {

CavityField field(FieldKind kind, int n, double m = 0.0) {
  CavityField f;
  f.kind = kind;
  f.n = n;
  f.m = m;
  return f;
}

DetectorSpec detector(int model, Switching sw) {
  DetectorSpec d;
  d.model = model;
  d.Omega = 1.0;
  d.lambda = 0.1;
  d.switching = sw;
  d.profile = SpatialProfile::point();
  return d;
}

void BM_vep_linear_1d(benchmark::State& state) {
  const CavityField f = field(FieldKind::RealScalar, 1);
  const DetectorSpec det = detector(1, Switching::sudden(1.0));
  const auto sched = cutoff_schedule(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(vep_linear(f, det, sched, 1e-4));
}
BENCHMARK(BM_vep_linear_1d)->Arg(1024)->Arg(4096);

void BM_vep_linear_3d(benchmark::State& state) {
  const CavityField f = field(FieldKind::RealScalar, 3);
  const DetectorSpec det = detector(1, Switching::sudden(1.0));
  const auto sched = cutoff_schedule(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(vep_linear(f, det, sched, 1e-4));
}
BENCHMARK(BM_vep_linear_3d)->Arg(16)->Arg(32);

void BM_vep_pair_spinor(benchmark::State& state) {
  const CavityField f = field(FieldKind::Spinor, 1);
  const DetectorSpec det = detector(4, Switching::sudden(0.5));
  const auto sched = cutoff_schedule(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(vep_pair(f, det, sched, 1e-4));
}
BENCHMARK(BM_vep_pair_spinor)->Arg(128)->Arg(512);

void BM_wick_enumeration(benchmark::State& state) {
  const CavityField f = field(FieldKind::RealScalar, 1);
  WickContext ctx;
  ctx.field = f;
  ctx.cutoff = 2;
  const OperatorWord w = parse_word(
      "a{1} a{-1} | T[ :phi@{0.4;0.25} phi@{0.4;0.25}: "
      ":phi@{-0.3;0.5} phi@{-0.3;0.5}: ] |");
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_vev(w, ctx));
}
BENCHMARK(BM_wick_enumeration);

void BM_oracle_word_vev(benchmark::State& state) {
  const CavityField f = field(FieldKind::RealScalar, 1);
  WickContext ctx;
  ctx.field = f;
  ctx.cutoff = 2;
  const OperatorWord w = parse_word(
      "a{1} a{-1} | T[ :phi@{0.4;0.25} phi@{0.4;0.25}: "
      ":phi@{-0.3;0.5} phi@{-0.3;0.5}: ] |");
  TruncatedSpace sp(f, mode_list(1, 2), required_cap(w, f), 1);
  for (auto _ : state) benchmark::DoNotOptimize(word_vev(sp, ctx, w));
}
BENCHMARK(BM_oracle_word_vev);

void BM_oracle_evolve(benchmark::State& state) {
  const CavityField f = field(FieldKind::RealScalar, 1);
  DetectorSpec det = detector(1, Switching::gaussian(0.5));
  det.lambda = 0.01;
  TruncatedSpace sp(f, mode_list(1, 1), 2, 1);
  WickContext ctx;
  ctx.field = f;
  ctx.cutoff = 1;
  ctx.profiles = {det.profile};
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle_evolve(sp, ctx, det, -3.0, 3.0,
                                           static_cast<int>(state.range(0))));
}
BENCHMARK(BM_oracle_evolve)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
