#include "modestoa/iq_io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>

#include "modestoa/common.hpp"

namespace modestoa {

int AdcCodec::encode(double v) const {
  const double code = std::floor(half() + half() * v + 0.5);
  if (code <= 0.0) return 0;
  if (code >= max_code()) return max_code();
  return static_cast<int>(code);
}

std::filesystem::path default_metadata_path(const std::filesystem::path& iq_path) {
  auto p = iq_path;
  p += ".meta.json";
  return p;
}

void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t size) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_metadata(const std::filesystem::path& path, const IqMetadata& meta) {
  const nlohmann::json j = {
      {"sample_rate_hz", meta.sample_rate_hz}, {"adc_bits", meta.adc_bits}, {"start_time", meta.start_time}};
  const std::string text = j.dump(2) + "\n";
  write_file_atomic(path, text.data(), text.size());
}

IqMetadata read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open metadata " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    IqMetadata meta;
    meta.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    meta.adc_bits = j.at("adc_bits").get<int>();
    meta.start_time = j.value("start_time", 0.0);
    if (!(meta.sample_rate_hz > 0.0) || meta.adc_bits < 4 || meta.adc_bits > 16) {
      throw DataError("metadata out of range in " + path.string());
    }
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad metadata " + path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_raw_iq(const IqStream& stream) {
  if (!stream.quantized()) throw InvalidInput("only quantised streams have a raw IQ form");
  const AdcCodec codec{stream.adc_bits};
  const bool wide = stream.adc_bits > 8;
  std::vector<std::uint8_t> bytes;
  bytes.reserve(stream.samples.size() * (wide ? 4 : 2));
  const auto put = [&](float v) {
    const int c = codec.encode(v);
    bytes.push_back(static_cast<std::uint8_t>(c & 0xff));
    if (wide) bytes.push_back(static_cast<std::uint8_t>(c >> 8));
  };
  for (const auto& s : stream.samples) {
    put(s.real());
    put(s.imag());
  }
  return bytes;
}

IqStream decode_raw_iq(const std::vector<std::uint8_t>& bytes, const IqMetadata& meta) {
  const bool wide = meta.adc_bits > 8;
  const std::size_t per_sample = wide ? 4 : 2;
  if (bytes.size() % per_sample != 0) throw DataError("raw IQ size is not a whole number of samples");
  const AdcCodec codec{meta.adc_bits};
  IqStream s{meta.sample_rate_hz, meta.adc_bits, meta.start_time, {}};
  s.samples.resize(bytes.size() / per_sample);
  const auto get = [&](std::size_t off) {
    int c = bytes[off];
    if (wide) c |= bytes[off + 1] << 8;
    if (c > codec.max_code()) throw DataError("raw IQ code exceeds adc_bits range");
    return static_cast<float>(codec.decode(c));
  };
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const std::size_t off = i * per_sample;
    s.samples[i] = {get(off), get(off + per_sample / 2)};
  }
  return s;
}

void write_raw_iq(const std::filesystem::path& path, const IqStream& stream) {
  const auto bytes = encode_raw_iq(stream);
  write_file_atomic(path, bytes.data(), bytes.size());
}

IqStream read_raw_iq(const std::filesystem::path& path, const IqMetadata& meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_raw_iq(bytes, meta);
}

}  // namespace modestoa
