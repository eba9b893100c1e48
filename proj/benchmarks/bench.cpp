#include <benchmark/benchmark.h>

#include <vector>

#include "bzreg/checker.hpp"
#include "bzreg/crypto.hpp"
#include "bzreg/engine.hpp"
#include "bzreg/timestamp.hpp"

namespace {

using namespace bzreg;

RunSpec fault_free(int n, std::uint64_t seed) {
  RunSpec spec;
  spec.cfg = Config::make(n, (n - 1) / 3);
  for (const char* p : {"a", "b", "c"}) spec.workload.writes.push_back(WriteOp{p, 0});
  for (int i = 1; i <= n; ++i) spec.workload.reads[i] = std::vector<ReadOp>(2, ReadOp{1});
  spec.schedule.kind = ScheduleSpec::Kind::kSeededRandom;
  spec.schedule.seed = seed;
  spec.schedule.fairness = 4;
  return spec;
}

void BM_Run(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  KeyRing ring(n, SignatureKind::kKeyedDigest);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto h = run(fault_free(n, seed++), ring);
    benchmark::DoNotOptimize(h.scheduled_steps);
  }
}
BENCHMARK(BM_Run)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_RunEd25519(benchmark::State& state) {
  KeyRing ring(4, SignatureKind::kEd25519);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto h = run(fault_free(4, seed++), ring);
    benchmark::DoNotOptimize(h.scheduled_steps);
  }
}
BENCHMARK(BM_RunEd25519)->Unit(benchmark::kMillisecond);

void BM_CheckAll(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  KeyRing ring(n, SignatureKind::kKeyedDigest);
  const auto h = run(fault_free(n, 1), ring);
  for (auto _ : state) {
    auto rep = check_all(h, ring);
    benchmark::DoNotOptimize(rep.verdicts.data());
  }
}
BENCHMARK(BM_CheckAll)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_MapstoCompare(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto cfg = Config::make(n, (n - 1) / 3);
  std::vector<WitnessEntry> a, b;
  for (int w = 1; w <= n; ++w) {
    a.push_back({TaggedValue{1, "a"}, static_cast<Stamp>(w), w});
    b.push_back({TaggedValue{2, "b"}, static_cast<Stamp>(w + 1), w});
  }
  for (auto _ : state) benchmark::DoNotOptimize(mapsto_compare(a, b, cfg));
}
BENCHMARK(BM_MapstoCompare)->Arg(4)->Arg(16)->Arg(64);

void BM_EnumerateMicro(benchmark::State& state) {
  RunSpec spec;
  spec.cfg = Config::make(1, 0);
  spec.workload.writes.push_back(WriteOp{"a", 0});
  spec.workload.reads[1] = std::vector<ReadOp>(static_cast<std::size_t>(state.range(0)), ReadOp{0});
  KeyRing ring(1, SignatureKind::kKeyedDigest);
  for (auto _ : state) {
    auto stats = enumerate_schedules(spec, ring, {400, 1'000'000, true, true}, [](const ExecutionHistory&) {});
    benchmark::DoNotOptimize(stats.histories);
  }
}
BENCHMARK(BM_EnumerateMicro)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
