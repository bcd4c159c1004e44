#include <gtest/gtest.h>

#include <fstream>

#include "modestoa/common.hpp"
#include "modestoa/records.hpp"

using namespace modestoa;

TEST(Records, ToaRoundTrip) {
  ToaRecord r;
  r.receiver_id = 2;
  r.packet_index = 41;
  r.method = Method::CorrPulseS;
  r.N = 83;
  r.toa_s = 12.345678901234;
  r.gamma = 0.25;
  r.beta = 3;
  r.pulses_used = 60;
  r.boundary = true;
  r.payload_hex = "8d4840d6202cc371c32ce0576098";
  const auto line = to_jsonl(r);
  EXPECT_NE(line.find("\"method\":\"CorrPulse/S\""), std::string::npos);
  const auto back = parse_toa_record(line);
  EXPECT_EQ(back.receiver_id, 2);
  EXPECT_EQ(back.packet_index, 41u);
  EXPECT_EQ(back.method, Method::CorrPulseS);
  EXPECT_EQ(back.N, 83);
  EXPECT_NEAR(back.toa_s, r.toa_s, 0.5e-11);
  EXPECT_EQ(back.beta, 3);
  EXPECT_TRUE(back.boundary);
  EXPECT_FALSE(back.unreliable);
  EXPECT_EQ(back.payload_hex, r.payload_hex);
  EXPECT_EQ(to_jsonl(back), line);
}

TEST(Records, TruthRoundTrip) {
  TruthRecord t;
  t.packet_index = 7;
  t.t_m = 1.25;
  t.payload = Payload::from_hex("5d4840d6202cc3");
  t.true_arrival = {1.25, 1.250002};
  t.jitter_s = {1e-9, -2.5e-9};
  t.tx_amplitude = 0.5;
  const auto back = parse_truth_record(to_jsonl(t));
  EXPECT_EQ(back.payload, t.payload);
  EXPECT_NEAR(back.true_arrival[1], 1.250002, 1e-12);
  ASSERT_EQ(back.jitter_s.size(), 2u);
  EXPECT_NEAR(back.jitter_s[1], -2.5e-9, 1e-13);
}

TEST(Records, DecodeRoundTrip) {
  DecodeRecord d{1, 12345, "5d4840d6202cc3", 0.005};
  const auto back = parse_decode_record(to_jsonl(d));
  EXPECT_EQ(back.leading_sample_index, 12345);
  EXPECT_EQ(back.payload_hex, d.payload_hex);
}

TEST(Records, ErrorsNameTheLine) {
  const auto path = std::filesystem::temp_directory_path() / "modestoa_bad.jsonl";
  ToaRecord r;
  r.payload_hex = "5d4840d6202cc3";
  {
    std::ofstream out(path);
    out << to_jsonl(r) << "\n\n" << "{\"receiver_id\": 1}\n";
  }
  try {
    read_toa_records(path);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_toa_record("{\"method\":\"Nope\"}"), DataError);
  std::filesystem::remove(path);
}

TEST(Records, WriteJsonlIsAtomicAndComplete) {
  const auto path = std::filesystem::temp_directory_path() / "modestoa_ok.jsonl";
  std::vector<ToaRecord> recs(5);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].packet_index = i;
    recs[i].payload_hex = "5d4840d6202cc3";
  }
  write_jsonl(path, recs);
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  EXPECT_EQ(read_toa_records(path).size(), 5u);
  std::filesystem::remove(path);
}
