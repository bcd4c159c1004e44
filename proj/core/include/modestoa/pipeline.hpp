#pragma once

// Stream -> decoded packets -> TOA records, the path shared by the CLI,
// the acceptance runs and the benchmarks.

#include <vector>

#include "modestoa/receiver.hpp"
#include "modestoa/records.hpp"
#include "modestoa/resample.hpp"
#include "modestoa/toa.hpp"

namespace modestoa {

struct EstimateConfig {
  std::vector<Method> methods{all_methods().begin(), all_methods().end()};
  /// Upsampling factors for methods without a fixed one.
  std::vector<int> factors{25};
  /// Factor at which gamma/beta are measured (one value per packet).
  int metrics_factor = 25;
  UpsampleMethod upsample_method = UpsampleMethod::Spectral;
  ToaOptions toa;
  ReceiverOptions receiver;
  unsigned threads = 1;

  void validate() const;
};

/// TOA records for already-decoded packets; packet_index is the position in
/// `packets`. Output order: packet, then method, then N.
std::vector<ToaRecord> estimate_packets(const std::vector<DecodedPacket>& packets, const EstimateConfig& config);

/// detect_and_decode + estimate_packets.
std::vector<ToaRecord> estimate_stream(const IqStream& stream, int receiver_id, const EstimateConfig& config,
                                       ReceiverStats* stats = nullptr);

DecodeRecord to_record(const DecodedPacket& packet);

}  // namespace modestoa
