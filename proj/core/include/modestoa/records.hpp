#pragma once

// JSON Lines records exchanged between the command-line stages.
//
//   truth:   {packet_index, t_m_seconds, payload_hex, true_arrival_rx1,
//             true_arrival_rx2, per_pulse_jitter_ns[], tx_amplitude}
//   decode:  {receiver_id, leading_sample_index, payload_hex, coarse_timestamp_s}
//   toa:     {receiver_id, packet_index, method, N, toa_s, gamma, beta,
//             pulses_used, flags[], payload_hex}
//
// Times are written in fixed point: toa_s with 0.01 ns resolution, truth
// times with 1 ps.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "modestoa/receiver.hpp"
#include "modestoa/synth.hpp"
#include "modestoa/toa.hpp"

namespace modestoa {

struct ToaRecord {
  int receiver_id = 1;
  std::size_t packet_index = 0;
  Method method = Method::Legacy;
  int N = 1;
  double toa_s = 0.0;
  double gamma = 0.0;
  int beta = 0;
  int pulses_used = 0;
  bool unreliable = false;
  bool boundary = false;
  std::string payload_hex;
};

struct DecodeRecord {
  int receiver_id = 1;
  std::int64_t leading_sample_index = 0;
  std::string payload_hex;
  double coarse_timestamp_s = 0.0;
};

std::string to_jsonl(const ToaRecord& r);
std::string to_jsonl(const DecodeRecord& r);
std::string to_jsonl(const TruthRecord& r);

ToaRecord parse_toa_record(const std::string& line);
DecodeRecord parse_decode_record(const std::string& line);
TruthRecord parse_truth_record(const std::string& line);

/// Reads one record per non-empty line; DataError names the offending line.
std::vector<ToaRecord> read_toa_records(const std::filesystem::path& path);
std::vector<DecodeRecord> read_decode_records(const std::filesystem::path& path);
std::vector<TruthRecord> read_truth_records(const std::filesystem::path& path);

/// Concatenates to_jsonl lines and writes them atomically.
template <typename Record>
void write_jsonl(const std::filesystem::path& path, const std::vector<Record>& records) {
  std::string text;
  for (const auto& r : records) {
    text += to_jsonl(r);
    text += '\n';
  }
  write_file_atomic(path, text.data(), text.size());
}

}  // namespace modestoa
