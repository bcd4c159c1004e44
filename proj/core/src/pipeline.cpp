#include "modestoa/pipeline.hpp"

#include <algorithm>
#include <map>

#include "modestoa/parallel.hpp"

namespace modestoa {

void EstimateConfig::validate() const {
  if (methods.empty()) throw InvalidInput("no estimation methods selected");
  if (factors.empty()) throw InvalidInput("no upsampling factor given");
  for (int n : factors) {
    if (n < 1 || n > kMaxUpsampling) throw InvalidInput("upsampling factor must be in [1, 128]");
  }
  if (metrics_factor < 1 || metrics_factor > kMaxUpsampling) throw InvalidInput("metrics factor out of range");
}

std::vector<ToaRecord> estimate_packets(const std::vector<DecodedPacket>& packets, const EstimateConfig& config) {
  config.validate();

  // (method, N) jobs in output order; fixed-factor methods run once.
  std::vector<std::pair<Method, int>> jobs;
  for (Method m : config.methods) {
    if (const auto fixed = fixed_upsampling(m)) {
      jobs.emplace_back(m, *fixed);
    } else {
      for (int n : config.factors) jobs.emplace_back(m, n);
    }
  }
  std::sort(jobs.begin(), jobs.end());
  jobs.erase(std::unique(jobs.begin(), jobs.end()), jobs.end());

  std::vector<std::vector<ToaRecord>> per_packet(packets.size());
  parallel_for(packets.size(), config.threads, [&](std::size_t i) {
    const auto& pkt = packets[i];
    const auto metrics_window = upsample(pkt.window, config.metrics_factor, config.upsample_method);
    const PacketEstimator metrics_est(metrics_window, pkt.payload, config.toa);
    const auto metrics = metrics_est.metrics();

    std::map<int, UpsampledWindow> windows;
    std::map<int, PacketEstimator> estimators;
    auto& out = per_packet[i];
    for (const auto& [method, n] : jobs) {
      ToaEstimate est;
      if (method == Method::Legacy) {
        est = metrics_est.legacy();
      } else {
        auto it = estimators.find(n);
        if (it == estimators.end()) {
          auto& w = windows.emplace(n, upsample(pkt.window, n, config.upsample_method)).first->second;
          it = estimators.emplace(n, PacketEstimator(w, pkt.payload, config.toa)).first;
        }
        est = it->second.run(method);
      }
      ToaRecord r;
      r.receiver_id = pkt.receiver_id;
      r.packet_index = i;
      r.method = est.method;
      r.N = est.N;
      r.toa_s = est.toa_seconds;
      r.gamma = metrics.gamma;
      r.beta = metrics.beta;
      r.pulses_used = est.pulses_used;
      r.unreliable = est.unreliable;
      r.boundary = est.boundary;
      r.payload_hex = pkt.payload.to_hex();
      out.push_back(std::move(r));
    }
  });

  std::vector<ToaRecord> records;
  for (auto& v : per_packet) {
    for (auto& r : v) records.push_back(std::move(r));
  }
  return records;
}

std::vector<ToaRecord> estimate_stream(const IqStream& stream, int receiver_id, const EstimateConfig& config,
                                       ReceiverStats* stats) {
  const auto packets = detect_and_decode(stream, receiver_id, config.receiver, stats);
  return estimate_packets(packets, config);
}

DecodeRecord to_record(const DecodedPacket& packet) {
  return {packet.receiver_id, packet.leading_sample_index, packet.payload.to_hex(), packet.coarse_timestamp};
}

}  // namespace modestoa
