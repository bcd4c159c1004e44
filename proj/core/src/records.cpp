#include "modestoa/records.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

namespace modestoa {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Record, typename Parse>
std::vector<Record> read_lines(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Record> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

nlohmann::json parse_object(const std::string& line) {
  auto j = nlohmann::json::parse(line);
  if (!j.is_object()) throw DataError("record is not a JSON object");
  return j;
}

}  // namespace

std::string to_jsonl(const ToaRecord& r) {
  std::string flags;
  if (r.unreliable) flags += "\"unreliable\"";
  if (r.boundary) flags += std::string(flags.empty() ? "" : ",") + "\"boundary\"";
  return "{\"receiver_id\":" + std::to_string(r.receiver_id) + ",\"packet_index\":" + std::to_string(r.packet_index) +
         ",\"method\":\"" + display_name(r.method) + "\",\"N\":" + std::to_string(r.N) +
         ",\"toa_s\":" + fixed(r.toa_s, 11) + ",\"gamma\":" + general(r.gamma) + ",\"beta\":" + std::to_string(r.beta) +
         ",\"pulses_used\":" + std::to_string(r.pulses_used) + ",\"flags\":[" + flags + "],\"payload_hex\":\"" +
         r.payload_hex + "\"}";
}

std::string to_jsonl(const DecodeRecord& r) {
  return "{\"receiver_id\":" + std::to_string(r.receiver_id) +
         ",\"leading_sample_index\":" + std::to_string(r.leading_sample_index) + ",\"payload_hex\":\"" +
         r.payload_hex + "\",\"coarse_timestamp_s\":" + fixed(r.coarse_timestamp_s, 11) + "}";
}

std::string to_jsonl(const TruthRecord& r) {
  std::string jitter;
  for (std::size_t k = 0; k < r.jitter_s.size(); ++k) {
    if (k) jitter += ',';
    jitter += fixed(r.jitter_s[k] * 1e9, 4);
  }
  return "{\"packet_index\":" + std::to_string(r.packet_index) + ",\"t_m_seconds\":" + fixed(r.t_m, 12) +
         ",\"payload_hex\":\"" + r.payload.to_hex() + "\",\"true_arrival_rx1\":" + fixed(r.true_arrival[0], 12) +
         ",\"true_arrival_rx2\":" + fixed(r.true_arrival[1], 12) + ",\"per_pulse_jitter_ns\":[" + jitter +
         "],\"tx_amplitude\":" + general(r.tx_amplitude) + "}";
}

ToaRecord parse_toa_record(const std::string& line) {
  try {
    const auto j = parse_object(line);
    ToaRecord r;
    r.receiver_id = j.at("receiver_id").get<int>();
    r.packet_index = j.at("packet_index").get<std::size_t>();
    const auto name = j.at("method").get<std::string>();
    const auto m = parse_method(name);
    if (!m) throw DataError("unknown method '" + name + "'");
    r.method = *m;
    r.N = j.at("N").get<int>();
    r.toa_s = j.at("toa_s").get<double>();
    r.gamma = j.at("gamma").get<double>();
    r.beta = j.at("beta").get<int>();
    r.pulses_used = j.at("pulses_used").get<int>();
    for (const auto& f : j.value("flags", nlohmann::json::array())) {
      const auto s = f.get<std::string>();
      if (s == "unreliable") r.unreliable = true;
      if (s == "boundary") r.boundary = true;
    }
    r.payload_hex = j.value("payload_hex", std::string{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad record: ") + e.what());
  } catch (const InvalidInput& e) {
    throw DataError(std::string("bad record: ") + e.what());
  }
}

DecodeRecord parse_decode_record(const std::string& line) {
  try {
    const auto j = parse_object(line);
    DecodeRecord r;
    r.receiver_id = j.at("receiver_id").get<int>();
    r.leading_sample_index = j.at("leading_sample_index").get<std::int64_t>();
    r.payload_hex = j.at("payload_hex").get<std::string>();
    r.coarse_timestamp_s = j.at("coarse_timestamp_s").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad record: ") + e.what());
  } catch (const InvalidInput& e) {
    throw DataError(std::string("bad record: ") + e.what());
  }
}

TruthRecord parse_truth_record(const std::string& line) {
  try {
    const auto j = parse_object(line);
    TruthRecord r;
    r.packet_index = j.at("packet_index").get<std::size_t>();
    r.t_m = j.at("t_m_seconds").get<double>();
    r.payload = Payload::from_hex(j.at("payload_hex").get<std::string>());
    r.true_arrival = {j.at("true_arrival_rx1").get<double>(), j.at("true_arrival_rx2").get<double>()};
    for (const auto& v : j.at("per_pulse_jitter_ns")) r.jitter_s.push_back(v.get<double>() * 1e-9);
    r.tx_amplitude = j.at("tx_amplitude").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad record: ") + e.what());
  } catch (const InvalidInput& e) {
    throw DataError(std::string("bad record: ") + e.what());
  }
}

std::vector<ToaRecord> read_toa_records(const std::filesystem::path& path) {
  return read_lines<ToaRecord>(path, parse_toa_record);
}

std::vector<DecodeRecord> read_decode_records(const std::filesystem::path& path) {
  return read_lines<DecodeRecord>(path, parse_decode_record);
}

std::vector<TruthRecord> read_truth_records(const std::filesystem::path& path) {
  return read_lines<TruthRecord>(path, parse_truth_record);
}

}  // namespace modestoa
