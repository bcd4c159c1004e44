#include <benchmark/benchmark.h>

#include "modestoa/correlation.hpp"
#include "modestoa/pipeline.hpp"
#include "modestoa/rng.hpp"
#include "modestoa/synth.hpp"

using namespace modestoa;

namespace {

// One decoded 112-bit packet from a noisy 8-bit trace.
const DecodedPacket& sample_packet() {
  static const DecodedPacket packet = [] {
    Scenario sc;
    sc.schedule.explicit_times_s = {200e-6};
    sc.duration_s = 1e-3;
    sc.amplitude_mix = {AmplitudeComponent{1.0, 0.5, 0.5}};
    for (auto& rx : sc.receivers) rx.frontend.noise_sigma = 0.01;
    const auto trace = generate_two_receiver_trace(sc, 1);
    return detect_and_decode(trace.streams[0]).at(0);
  }();
  return packet;
}

void BM_Upsample(benchmark::State& state) {
  const auto method = state.range(1) ? UpsampleMethod::Polyphase : UpsampleMethod::Spectral;
  const int N = static_cast<int>(state.range(0));
  upsample(sample_packet().window, N, method);  // FFT plans are created on first use
  for (auto _ : state) benchmark::DoNotOptimize(upsample(sample_packet().window, N, method));
}
BENCHMARK(BM_Upsample)->ArgsProduct({{25, 83}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Method(benchmark::State& state) {
  const auto m = all_methods()[static_cast<std::size_t>(state.range(0))];
  const int N = fixed_upsampling(m).value_or(static_cast<int>(state.range(1)));
  const auto up = upsample(sample_packet().window, N);
  const PacketEstimator est(up, sample_packet().payload);
  state.SetLabel(std::string(display_name(m)) + " N=" + std::to_string(N));
  est.run(m);
  for (auto _ : state) benchmark::DoNotOptimize(est.run(m));
}
BENCHMARK(BM_Method)->ArgsProduct({{0, 1, 2, 3, 4, 5, 6}, {25, 83}})->Unit(benchmark::kMicrosecond);

// Estimator set-up (magnitude + anchor) on top of the upsampling.
void BM_EstimatorSetup(benchmark::State& state) {
  const auto up = upsample(sample_packet().window, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(PacketEstimator(up, sample_packet().payload));
}
BENCHMARK(BM_EstimatorSetup)->Arg(25)->Arg(83)->Unit(benchmark::kMicrosecond);

void BM_CrossCorrelate(benchmark::State& state) {
  auto rng = make_rng(1, RngDomain::Test);
  std::uniform_real_distribution<double> u;
  std::vector<double> s(static_cast<std::size_t>(state.range(0))), t(static_cast<std::size_t>(state.range(0) / 3));
  for (auto& v : s) v = u(rng);
  for (auto& v : t) v = u(rng);
  const long hi = static_cast<long>(s.size() - t.size());
  for (auto _ : state) {
    if (state.range(1)) {
      benchmark::DoNotOptimize(cross_correlate_fft(s, t, 0, hi));
    } else {
      benchmark::DoNotOptimize(cross_correlate_direct(s, t, 0, hi));
    }
  }
}
BENCHMARK(BM_CrossCorrelate)->ArgsProduct({{1200, 7600}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_DetectAndDecode(benchmark::State& state) {
  Scenario sc;
  sc.duration_s = 0.1;
  sc.schedule.poisson_rate_hz = 500;
  for (auto& rx : sc.receivers) rx.frontend.noise_sigma = 0.01;
  const auto trace = generate_two_receiver_trace(sc, 2);
  for (auto _ : state) benchmark::DoNotOptimize(detect_and_decode(trace.streams[0]));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * trace.streams[0].samples.size()));
}
BENCHMARK(BM_DetectAndDecode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
