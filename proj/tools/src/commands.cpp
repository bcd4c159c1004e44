#include "modestoa_cli/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "modestoa/common.hpp"
#include "modestoa/eval.hpp"
#include "modestoa/iq_io.hpp"
#include "modestoa/pipeline.hpp"
#include "modestoa/records.hpp"
#include "modestoa/synth.hpp"
#include "modestoa_cli/scenario_config.hpp"

namespace modestoa::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Library errors map onto the two failure exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

IqStream load_stream(const std::filesystem::path& iq, const std::filesystem::path& meta) {
  const auto meta_path = meta.empty() ? default_metadata_path(iq) : meta;
  return read_raw_iq(iq, read_metadata(meta_path));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, text.data(), text.size());
}

std::string valid_method_names() {
  std::string s;
  for (Method m : all_methods()) s += std::string(s.empty() ? "" : ", ") + cli_name(m);
  return s;
}

std::vector<Method> resolve_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) {
    if (n == "all") {
      out.assign(all_methods().begin(), all_methods().end());
      return out;
    }
    const auto m = parse_method(n);
    if (!m) throw UsageError("unknown method '" + n + "'; valid: all, " + valid_method_names());
    out.push_back(*m);
  }
  if (out.empty()) throw UsageError("no methods given");
  return out;
}

}  // namespace

int cmd_synth(const GlobalOptions& g, const SynthArgs& a, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_scenario(a.scenario);
    for (const auto& rx : sc.receivers) {
      if (rx.frontend.adc_bits == 0) throw ConfigError(a.scenario.string() + ": raw IQ output needs adc_bits >= 4");
    }
    const auto trace = generate_two_receiver_trace(sc, g.seed, g.threads);
    const std::filesystem::path outs[2] = {a.out_rx1, a.out_rx2};
    for (int i = 0; i < 2; ++i) {
      const auto& s = trace.streams[i];
      write_raw_iq(outs[i], s);
      write_metadata(default_metadata_path(outs[i]), IqMetadata{s.sample_rate_hz, s.adc_bits, s.start_time});
    }
    write_jsonl(a.truth, trace.truth);
    if (g.verbose) {
      err << "synth: " << trace.truth.size() << " packets, " << trace.streams[0].samples.size()
          << " samples per receiver\n";
    }
  });
}

int cmd_decode(const GlobalOptions& g, const DecodeArgs& a, std::ostream& err) {
  return guarded(err, [&] {
    const auto stream = load_stream(a.iq, a.meta);
    ReceiverStats st;
    const auto packets = detect_and_decode(stream, a.receiver_id, {}, &st);
    std::vector<DecodeRecord> recs;
    recs.reserve(packets.size());
    for (const auto& p : packets) recs.push_back(to_record(p));
    write_jsonl(a.out, recs);
    if (g.verbose) {
      err << "decode: " << st.candidates << " candidates, " << st.decoded << " decoded, " << st.ambiguous
          << " ambiguous, " << st.dropped_window << " too close to the stream edge\n";
    }
  });
}

int cmd_estimate(const GlobalOptions& g, const EstimateArgs& a, std::ostream& err) {
  return guarded(err, [&] {
    EstimateConfig cfg;
    cfg.methods = resolve_methods(a.methods);
    for (int n : a.factors) {
      if (n < 1 || n > kMaxUpsampling) {
        throw UsageError("--N must be in [1, " + std::to_string(kMaxUpsampling) + "], got " + std::to_string(n));
      }
    }
    if (a.factors.empty()) throw UsageError("--N needs at least one factor");
    cfg.factors = a.factors;
    if (a.upsampler == "spectral") {
      cfg.upsample_method = UpsampleMethod::Spectral;
    } else if (a.upsampler == "polyphase") {
      cfg.upsample_method = UpsampleMethod::Polyphase;
    } else {
      throw UsageError("--upsampler must be 'spectral' or 'polyphase'");
    }
    cfg.threads = g.threads;
    const auto stream = load_stream(a.iq, a.meta);
    ReceiverStats st;
    const auto recs = estimate_stream(stream, a.receiver_id, cfg, &st);
    write_jsonl(a.out, recs);
    if (g.verbose) err << "estimate: " << st.decoded << " packets, " << recs.size() << " records\n";
  });
}

int cmd_evaluate(const GlobalOptions& g, const EvaluateArgs& a, std::ostream& err) {
  return guarded(err, [&] {
    if (a.pairing_window_ms <= 0.0) throw UsageError("--pairing-window-ms must be positive");
    const auto rx1 = read_toa_records(a.toa_rx1);
    const auto rx2 = read_toa_records(a.toa_rx2);
    EvalOptions opt;
    opt.pairing_window_s = a.pairing_window_ms * 1e-3;
    opt.fit.max_order = a.max_order;
    opt.fit.min_span_s = a.min_span_s;
    opt.fit.min_pairs = a.min_pairs;
    opt.threads = g.threads;
    const auto report = evaluate(rx1, rx2, opt);
    for (const auto& d : report.diagnostics) err << "warning: " << d << '\n';
    write_text(a.out_prefix + "_table.csv", table_csv(report));
    write_text(a.out_prefix + "_ecdf.csv", ecdf_csv(report));
    write_text(a.out_prefix + "_qq.csv", qq_csv(report));
    if (g.verbose) {
      for (const auto& m : report.methods) {
        err << display_name(m.method) << " N=" << m.N << ": " << m.pairing.pairs << " pairs, clock order "
            << m.fit.order << '\n';
      }
    }
  });
}

int cmd_report(const GlobalOptions&, const ReportArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(a.table);
    if (!in) throw DataError("cannot open " + a.table.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const auto text = render_table(parse_table_csv(ss.str()));
    if (a.out.empty()) {
      out << text;
    } else {
      write_text(a.out, text);
    }
  });
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Mode S time-of-arrival estimation toolkit"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed, "64-bit seed for all randomness");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_flag("--verbose,-v", g.verbose, "progress and statistics on stderr");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "synthesize a two-receiver trace");
  synth->add_option("--scenario", sa.scenario, "scenario YAML")->required();
  synth->add_option("--out-rx1", sa.out_rx1, "raw IQ output, receiver 1")->required();
  synth->add_option("--out-rx2", sa.out_rx2, "raw IQ output, receiver 2")->required();
  synth->add_option("--truth", sa.truth, "truth JSONL output")->required();

  DecodeArgs da;
  auto* decode = app.add_subcommand("decode", "detect and decode packets in a raw IQ file");
  decode->add_option("--iq", da.iq, "raw IQ input")->required();
  decode->add_option("--meta", da.meta, "metadata sidecar (default <iq>.meta.json)");
  decode->add_option("--receiver-id", da.receiver_id, "receiver id written to records")->check(CLI::Range(1, 2));
  decode->add_option("--out", da.out, "decode JSONL output")->required();

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "estimate TOAs of every decoded packet");
  estimate->add_option("--iq", ea.iq, "raw IQ input")->required();
  estimate->add_option("--meta", ea.meta, "metadata sidecar (default <iq>.meta.json)");
  estimate->add_option("--receiver-id", ea.receiver_id, "receiver id written to records")->check(CLI::Range(1, 2));
  estimate->add_option("--methods", ea.methods, "methods, comma separated, or 'all'")->delimiter(',');
  estimate->add_option("--N", ea.factors, "upsampling factors, comma separated")->delimiter(',');
  estimate->add_option("--upsampler", ea.upsampler, "spectral or polyphase");
  estimate->add_option("--out", ea.out, "TOA JSONL output")->required();

  EvaluateArgs va;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "pair receivers, remove clock drift, write report CSVs");
  evaluate_cmd->add_option("--toa-rx1", va.toa_rx1, "TOA JSONL of receiver 1")->required();
  evaluate_cmd->add_option("--toa-rx2", va.toa_rx2, "TOA JSONL of receiver 2")->required();
  evaluate_cmd->add_option("--out-prefix", va.out_prefix, "writes <prefix>_{table,ecdf,qq}.csv")->required();
  evaluate_cmd->add_option("--pairing-window-ms", va.pairing_window_ms, "max |t1 - t2| for a pair");
  evaluate_cmd->add_option("--max-order", va.max_order, "highest clock polynomial order")->check(CLI::Range(0, 10));
  evaluate_cmd->add_option("--min-span-s", va.min_span_s, "shortest trace span the clock fit accepts");
  evaluate_cmd->add_option("--min-pairs", va.min_pairs, "fewest pairs the clock fit accepts");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "render a table CSV as text");
  report->add_option("--table", ra.table, "table CSV from evaluate")->required();
  report->add_option("--out", ra.out, "text output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (synth->parsed()) return cmd_synth(g, sa, std::cerr);
  if (decode->parsed()) return cmd_decode(g, da, std::cerr);
  if (estimate->parsed()) return cmd_estimate(g, ea, std::cerr);
  if (evaluate_cmd->parsed()) return cmd_evaluate(g, va, std::cerr);
  return cmd_report(g, ra, std::cout, std::cerr);
}

}  // namespace modestoa::cli
