#include "modestoa_cli/scenario_config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "modestoa/common.hpp"

namespace modestoa::cli {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const auto mark = node.Mark();
    std::ostringstream os;
    os << source_ << ':' << (mark.line >= 0 ? mark.line + 1 : 0) << ": " << msg;
    throw ConfigError(os.str());
  }

  void expect_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void only_keys(const YAML::Node& node, std::initializer_list<const char*> allowed) const {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) {
        std::string list;
        for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
        fail(kv.first, "unknown key '" + key + "' (expected one of: " + list + ")");
      }
    }
  }

  template <typename T>
  T get(const YAML::Node& node, const std::string& key) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "bad value for '" + key + "'");
    }
  }

  template <typename T>
  void maybe(const YAML::Node& parent, const char* key, T& out, double scale = 1.0) const {
    const auto node = parent[key];
    if (!node) return;
    if constexpr (std::is_floating_point_v<T>) {
      out = get<double>(node, key) * scale;
    } else {
      out = get<T>(node, key);
    }
  }

 private:
  std::string source_;
};

void read_frontend(const Reader& rd, const YAML::Node& node, FrontEndParams& fe) {
  rd.expect_map(node, "frontend");
  rd.only_keys(node, {"sample_rate_hz", "adc_bits", "gain", "filter_passband_hz", "noise_sigma_fs"});
  rd.maybe(node, "sample_rate_hz", fe.sample_rate_hz);
  rd.maybe(node, "adc_bits", fe.adc_bits);
  rd.maybe(node, "gain", fe.gain);
  rd.maybe(node, "filter_passband_hz", fe.filter_passband_hz);
  rd.maybe(node, "noise_sigma_fs", fe.noise_sigma);
}

void read_receiver(const Reader& rd, const YAML::Node& node, ReceiverConfig& rx) {
  rd.expect_map(node, "receiver");
  rd.only_keys(node, {"frontend", "clock"});
  if (node["frontend"]) read_frontend(rd, node["frontend"], rx.frontend);
  if (const auto clock = node["clock"]) {
    rd.expect_map(clock, "clock");
    rd.only_keys(clock, {"coefficients_s", "random_walk_s_per_sqrt_s"});
    if (clock["coefficients_s"]) {
      rx.clock.coefficients = rd.get<std::vector<double>>(clock["coefficients_s"], "coefficients_s");
    }
    rd.maybe(clock, "random_walk_s_per_sqrt_s", rx.clock.random_walk_sigma);
  }
}

std::vector<Payload> read_payload_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open payloads file " + path.string());
  std::vector<Payload> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    try {
      out.push_back(Payload::from_hex(line.substr(b, e - b + 1)));
    } catch (const InvalidInput& ex) {
      throw ConfigError(path.string() + ":" + std::to_string(n) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source_name,
                        const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  const Reader rd(source_name);
  if (!root.IsMap()) throw ConfigError(source_name + ":1: scenario must be a mapping");
  rd.only_keys(root, {"duration_s", "payload_bits", "payloads_file", "schedule", "amplitude_mix", "tx", "frontend",
                      "rx1", "rx2"});

  Scenario sc;
  rd.maybe(root, "duration_s", sc.duration_s);
  rd.maybe(root, "payload_bits", sc.payload_bits);

  if (const auto s = root["schedule"]) {
    rd.expect_map(s, "schedule");
    rd.only_keys(s, {"poisson_rate_hz", "dead_time_us", "start_time_s", "explicit_times_s"});
    rd.maybe(s, "poisson_rate_hz", sc.schedule.poisson_rate_hz);
    rd.maybe(s, "dead_time_us", sc.schedule.dead_time_s, 1e-6);
    rd.maybe(s, "start_time_s", sc.schedule.start_time_s);
    if (s["explicit_times_s"]) {
      sc.schedule.explicit_times_s = rd.get<std::vector<double>>(s["explicit_times_s"], "explicit_times_s");
    }
  }

  if (const auto mix = root["amplitude_mix"]) {
    if (!mix.IsSequence()) rd.fail(mix, "amplitude_mix must be a list");
    sc.amplitude_mix.clear();
    for (const auto& c : mix) {
      rd.expect_map(c, "amplitude_mix entry");
      rd.only_keys(c, {"weight", "min_fs", "max_fs"});
      AmplitudeComponent comp;
      rd.maybe(c, "weight", comp.weight);
      rd.maybe(c, "min_fs", comp.min);
      comp.max = comp.min;
      rd.maybe(c, "max_fs", comp.max);
      if (!(comp.weight > 0.0) || !(comp.min > 0.0) || comp.max < comp.min) {
        rd.fail(c, "amplitude component needs weight > 0 and 0 < min_fs <= max_fs");
      }
      sc.amplitude_mix.push_back(comp);
    }
  }

  if (const auto tx = root["tx"]) {
    rd.expect_map(tx, "tx");
    rd.only_keys(tx, {"jitter_ns", "jitter_distribution", "rise_time_ns", "decay_time_ns", "amplitude_variation_db"});
    rd.maybe(tx, "jitter_ns", sc.tx.jitter_bound_s, 1e-9);
    rd.maybe(tx, "rise_time_ns", sc.tx.rise_time_s, 1e-9);
    rd.maybe(tx, "decay_time_ns", sc.tx.decay_time_s, 1e-9);
    rd.maybe(tx, "amplitude_variation_db", sc.tx.amplitude_variation_db);
    if (const auto d = tx["jitter_distribution"]) {
      const auto name = rd.get<std::string>(d, "jitter_distribution");
      if (name == "uniform") {
        sc.tx.jitter_distribution = JitterDistribution::Uniform;
      } else if (name == "gaussian_truncated") {
        sc.tx.jitter_distribution = JitterDistribution::GaussianTruncated;
      } else {
        rd.fail(d, "jitter_distribution must be 'uniform' or 'gaussian_truncated'");
      }
    }
  }

  if (const auto fe = root["frontend"]) {
    for (auto& rx : sc.receivers) read_frontend(rd, fe, rx.frontend);
  }
  if (root["rx1"]) read_receiver(rd, root["rx1"], sc.receivers[0]);
  if (root["rx2"]) read_receiver(rd, root["rx2"], sc.receivers[1]);

  if (const auto pf = root["payloads_file"]) {
    std::filesystem::path p = rd.get<std::string>(pf, "payloads_file");
    if (p.is_relative()) p = base_dir / p;
    sc.explicit_payloads = read_payload_file(p);
  }

  try {
    sc.validate();
  } catch (const InvalidInput& e) {
    rd.fail(root, e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string(), path.parent_path());
}

}  // namespace modestoa::cli
