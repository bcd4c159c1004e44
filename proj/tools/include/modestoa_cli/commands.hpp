#pragma once

// The batch commands behind the `modestoa` executable. Each returns an exit
// code (0 ok, 2 usage, 3 data) and reports problems on `err`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace modestoa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

struct GlobalOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool verbose = false;
};

struct SynthArgs {
  std::filesystem::path scenario;
  std::filesystem::path out_rx1;
  std::filesystem::path out_rx2;
  std::filesystem::path truth;
};

struct DecodeArgs {
  std::filesystem::path iq;
  std::filesystem::path meta;  // defaults to <iq>.meta.json
  int receiver_id = 1;
  std::filesystem::path out;
};

struct EstimateArgs {
  std::filesystem::path iq;
  std::filesystem::path meta;
  int receiver_id = 1;
  std::vector<std::string> methods{"all"};
  std::vector<int> factors{25};
  std::string upsampler = "spectral";
  std::filesystem::path out;
};

struct EvaluateArgs {
  std::filesystem::path toa_rx1;
  std::filesystem::path toa_rx2;
  std::string out_prefix;
  double pairing_window_ms = 1.0;
  int max_order = 5;
  double min_span_s = 10.0;
  std::size_t min_pairs = 50;
};

struct ReportArgs {
  std::filesystem::path table;
  std::filesystem::path out;  // empty: stdout
};

int cmd_synth(const GlobalOptions& g, const SynthArgs& a, std::ostream& err);
int cmd_decode(const GlobalOptions& g, const DecodeArgs& a, std::ostream& err);
int cmd_estimate(const GlobalOptions& g, const EstimateArgs& a, std::ostream& err);
int cmd_evaluate(const GlobalOptions& g, const EvaluateArgs& a, std::ostream& err);
int cmd_report(const GlobalOptions& g, const ReportArgs& a, std::ostream& out, std::ostream& err);

/// Parses CLI11 arguments and dispatches; what main() calls.
int run(int argc, const char* const* argv);

}  // namespace modestoa::cli
