#pragma once

// YAML scenario files for `modestoa synth`. Every physical quantity carries
// its unit in the key name. Unknown keys are errors, so a typo such as
// `jitter_us` cannot silently fall back to a default.
//
//   duration_s: 10
//   payload_bits: 112            # 56 or 112
//   payloads_file: ids.txt       # optional, one hex payload per line
//   schedule:
//     poisson_rate_hz: 88        # or explicit_times_s: [0.001, 0.002]
//     dead_time_us: 150
//     start_time_s: 0.001
//   amplitude_mix:               # log-uniform components, full scale = 1
//     - {weight: 0.6, min_fs: 0.3, max_fs: 0.7}
//   tx:
//     jitter_ns: 50
//     jitter_distribution: uniform   # or gaussian_truncated
//     rise_time_ns: 50
//     decay_time_ns: 150
//     amplitude_variation_db: 2
//   frontend:                    # shared by both receivers
//     sample_rate_hz: 2.4e6
//     adc_bits: 8
//     gain: 1.0
//     filter_passband_hz: 2.4e6
//     noise_sigma_fs: 0.01
//   rx1: {clock: {coefficients_s: [0, 0]}}
//   rx2:
//     frontend: {gain: 1.2}      # per-receiver overrides
//     clock: {coefficients_s: [2e-6, 1e-6], random_walk_s_per_sqrt_s: 0}

#include <filesystem>
#include <stdexcept>
#include <string>

#include "modestoa/synth.hpp"

namespace modestoa::cli {

/// Scenario file problem; what() carries "path:line: message".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Scenario parse_scenario(const std::string& text, const std::string& source_name = "<scenario>",
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace modestoa::cli
