#include <gtest/gtest.h>

#include <fstream>
#include <cmath>
#include <sstream>

#include "modestoa/eval.hpp"
#include "modestoa/records.hpp"
#include "modestoa_cli/commands.hpp"
#include "modestoa_cli/scenario_config.hpp"

using namespace modestoa;
using namespace modestoa::cli;

namespace {

const char* kScenario = R"(duration_s: 0.01
payload_bits: 112
schedule:
  explicit_times_s: [0.0005, 0.0008, 0.0011, 0.0014, 0.0017, 0.0020, 0.0023, 0.0026, 0.0029, 0.0032]
amplitude_mix:
  - {weight: 1, min_fs: 0.3, max_fs: 0.6}
tx:
  jitter_ns: 50
  amplitude_variation_db: 2
frontend:
  adc_bits: 8
  noise_sigma_fs: 0.01
rx2:
  clock: {coefficients_s: [1.0e-6, 2.0e-6]}
)";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("modestoa_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
    std::ofstream(dir_ / "s.yaml") << kScenario;
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int synth(std::uint64_t seed, const std::string& tag) {
    GlobalOptions g;
    g.seed = seed;
    return cmd_synth(g, {p("s.yaml"), p(tag + "1.iq"), p(tag + "2.iq"), p(tag + "truth.jsonl")}, err_);
  }

  std::filesystem::path dir_;
  std::ostringstream err_;
};

}  // namespace

TEST(ScenarioConfig, ParsesUnitsInKeys) {
  const auto sc = parse_scenario(kScenario);
  EXPECT_EQ(sc.schedule.explicit_times_s.size(), 10u);
  EXPECT_DOUBLE_EQ(sc.tx.jitter_bound_s, 50e-9);
  EXPECT_DOUBLE_EQ(sc.receivers[1].frontend.noise_sigma, 0.01);
  EXPECT_DOUBLE_EQ(sc.receivers[1].clock.coefficients[1], 2e-6);
  EXPECT_TRUE(sc.receivers[0].clock.coefficients.empty());
}

TEST(ScenarioConfig, ErrorsCarryLineNumbers) {
  const auto expect_line = [](const std::string& text, const std::string& where) {
    try {
      parse_scenario(text, "s.yaml");
      FAIL() << "accepted: " << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  };
  expect_line("duration_s: 1\ntx:\n  jitter_us: 5\n", "s.yaml:3:");
  expect_line("duration_s: 1\nschedule:\n  poisson_rate_hz: fast\n", "s.yaml:3:");
  expect_line("duration_s: 1\nschedule: {poisson_rate_hz: 10}\ntx:\n  jitter_ns: 80\n", "jitter");
  expect_line("duration_s: [1\n", "s.yaml:");
}

TEST_F(CliTest, SynthDecodeEstimateEvaluate) {
  ASSERT_EQ(synth(5, "a"), kExitOk) << err_.str();
  EXPECT_TRUE(std::filesystem::exists(p("a1.iq.meta.json")));
  EXPECT_EQ(read_truth_records(p("atruth.jsonl")).size(), 10u);

  GlobalOptions g;
  ASSERT_EQ(cmd_decode(g, {p("a1.iq"), {}, 1, p("dec.jsonl")}, err_), kExitOk) << err_.str();
  EXPECT_EQ(read_decode_records(p("dec.jsonl")).size(), 10u);

  EstimateArgs e1{p("a1.iq"), {}, 1, {"peak_pulse"}, {25}, "spectral", p("pp.jsonl")};
  ASSERT_EQ(cmd_estimate(g, e1, err_), kExitOk) << err_.str();
  const auto pp = read_toa_records(p("pp.jsonl"));
  ASSERT_EQ(pp.size(), 10u);
  for (const auto& r : pp) {
    EXPECT_EQ(r.method, Method::PeakPulse);
    EXPECT_EQ(r.N, 25);
  }

  EstimateArgs all1{p("a1.iq"), {}, 1, {"all"}, {25}, "spectral", p("t1.jsonl")};
  EstimateArgs all2{p("a2.iq"), {}, 2, {"all"}, {25}, "spectral", p("t2.jsonl")};
  ASSERT_EQ(cmd_estimate(g, all1, err_), kExitOk);
  ASSERT_EQ(cmd_estimate(g, all2, err_), kExitOk);
  EXPECT_EQ(read_toa_records(p("t1.jsonl")).size(), 70u);

  EvaluateArgs ev{p("t1.jsonl"), p("t2.jsonl"), p("rep"), 1.0, 2, 0.0, 5};
  ASSERT_EQ(cmd_evaluate(g, ev, err_), kExitOk) << err_.str();
  const auto rows = parse_table_csv(slurp(p("rep_table.csv")));
  EXPECT_EQ(rows.size(), 7u * 4u);
  for (const auto& r : rows) {
    if (r.count > 0) EXPECT_NEAR(r.sigma_ns * std::sqrt(2.0), r.rmse_ns, 0.011);
  }
  EXPECT_FALSE(slurp(p("rep_ecdf.csv")).empty());
  EXPECT_FALSE(slurp(p("rep_qq.csv")).empty());

  std::ostringstream out;
  ASSERT_EQ(cmd_report(g, {p("rep_table.csv"), {}}, out, err_), kExitOk);
  EXPECT_NE(out.str().find("CorrPulse/S"), std::string::npos);
}

TEST_F(CliTest, SameSeedSameBytes) {
  ASSERT_EQ(synth(9, "a"), kExitOk);
  ASSERT_EQ(synth(9, "b"), kExitOk);
  ASSERT_EQ(synth(10, "c"), kExitOk);
  EXPECT_EQ(slurp(p("a1.iq")), slurp(p("b1.iq")));
  EXPECT_EQ(slurp(p("a2.iq")), slurp(p("b2.iq")));
  EXPECT_EQ(slurp(p("atruth.jsonl")), slurp(p("btruth.jsonl")));
  EXPECT_NE(slurp(p("a1.iq")), slurp(p("c1.iq")));
}

TEST_F(CliTest, UsageAndDataErrors) {
  ASSERT_EQ(synth(1, "a"), kExitOk);
  GlobalOptions g;
  std::ostringstream err;
  EstimateArgs bad_method{p("a1.iq"), {}, 1, {"fastest"}, {25}, "spectral", p("x.jsonl")};
  EXPECT_EQ(cmd_estimate(g, bad_method, err), kExitUsage);
  EXPECT_NE(err.str().find("corr_pulse_s"), std::string::npos);
  EstimateArgs zero_n{p("a1.iq"), {}, 1, {"all"}, {0}, "spectral", p("x.jsonl")};
  EXPECT_EQ(cmd_estimate(g, zero_n, err), kExitUsage);
  EstimateArgs missing{p("nope.iq"), {}, 1, {"all"}, {25}, "spectral", p("x.jsonl")};
  EXPECT_EQ(cmd_estimate(g, missing, err), kExitData);

  std::ofstream(p("bad.yaml")) << "duration_s: 1\nrx3: {}\n";
  std::ostringstream err2;
  EXPECT_EQ(cmd_synth(g, {p("bad.yaml"), p("q1"), p("q2"), p("qt")}, err2), kExitData);
  EXPECT_NE(err2.str().find("bad.yaml:2:"), std::string::npos) << err2.str();
}

TEST_F(CliTest, EvaluateEmptyIntersection) {
  ASSERT_EQ(synth(2, "a"), kExitOk);
  GlobalOptions g;
  ASSERT_EQ(cmd_estimate(g, {p("a1.iq"), {}, 1, {"legacy"}, {25}, "spectral", p("l.jsonl")}, err_), kExitOk);
  ASSERT_EQ(cmd_estimate(g, {p("a2.iq"), {}, 2, {"peak_pulse"}, {25}, "spectral", p("k.jsonl")}, err_), kExitOk);
  std::ostringstream err;
  EXPECT_EQ(cmd_evaluate(g, {p("l.jsonl"), p("k.jsonl"), p("r"), 1.0, 2, 0.0, 5}, err), kExitData);
}

TEST(CliMain, ExitCodes) {
  const char* none[] = {"modestoa"};
  EXPECT_EQ(run(1, none), kExitUsage);
  const char* unknown[] = {"modestoa", "--bogus", "report", "--table", "x"};
  EXPECT_EQ(run(5, unknown), kExitUsage);
  const char* missing[] = {"modestoa", "report", "--table", "/nonexistent/table.csv"};
  EXPECT_EQ(run(4, missing), kExitData);
}
