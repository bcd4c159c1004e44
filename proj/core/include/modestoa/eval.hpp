#pragma once

// Two-receiver precision evaluation.
//
// Both receivers see the same packets, so the TOA difference
//   dt_m = t2_m - t1_m = dxi(t_m) + deps_m
// contains only the compound clock error dxi (slowly varying) and the
// compound measurement noise deps (variance 2 sigma_TOA^2). A low-order
// polynomial fit removes dxi; sigma_TOA = RMSE(residuals) / sqrt(2).

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modestoa/records.hpp"

namespace modestoa {

enum class PacketClass : std::uint8_t { L, M, H };
const char* to_string(PacketClass c);

inline constexpr double kLowGammaThreshold = 0.04;
inline constexpr int kHighBetaThreshold = 10;

/// L if gamma <= 0.04 (takes precedence), H if beta_min >= 10, else M.
PacketClass classify(double gamma_mean, int beta_min);

struct PairedMeasurement {
  std::size_t packet_index = 0;  // rx1's packet index
  double t1 = 0.0;
  double t2 = 0.0;
  double gamma = 0.0;  // mean over receivers
  int beta_min = 0;
  PacketClass cls = PacketClass::M;
  std::string payload_hex;

  double delta() const { return t2 - t1; }
};

struct PairingStats {
  std::size_t pairs = 0;
  std::size_t unmatched_rx1 = 0;
  std::size_t unmatched_rx2 = 0;
  std::size_t ambiguous = 0;
  std::size_t unreliable = 0;  // records dropped for carrying the unreliable flag
};

/// Matches records of one (method, N) by payload and |t1 - t2| <= window.
/// A record with two or more candidates is dropped along with them.
std::vector<PairedMeasurement> pair_packets(std::span<const ToaRecord> rx1, std::span<const ToaRecord> rx2,
                                            double window_s = 1e-3, PairingStats* stats = nullptr);

struct ClockFitOptions {
  int max_order = 5;
  double min_improvement = 0.01;  // relative residual-variance drop needed to add a term
  std::size_t min_pairs = 50;
  double min_span_s = 10.0;
};

/// Polynomial in x = (t - t_mid) / t_half, fitted by order-recursive least
/// squares (modified Gram-Schmidt on 1, x, x^2, ...).
struct ClockFit {
  std::vector<double> coefficients;  // in x, lowest order first
  int order = 0;
  double t_mid = 0.0;
  double t_half = 1.0;
  std::vector<double> rss;  // residual sum of squares for orders 0..max_order

  double operator()(double t) const;
  /// Coefficients of the same polynomial in raw t.
  std::vector<double> raw_coefficients() const;
};

/// Throws InvalidInput for fewer than min_pairs points, a time span below
/// min_span_s, or a degenerate (zero) span.
ClockFit fit_clock(std::span<const double> t, std::span<const double> y, const ClockFitOptions& options = {});

struct ReportRow {
  Method method = Method::Legacy;
  int N = 1;
  std::string cls;  // "all", "L", "M", "H"
  std::size_t count = 0;
  double rmse_ns = 0.0;
  double sigma_ns = 0.0;
  double ks = 0.0;  // NaN below 30 residuals
  bool low_count = false;
};

double sigma_from_rmse(double rmse);

/// RMSE and sigma for a residual set (seconds in, nanoseconds out).
ReportRow summarize(std::span<const double> residuals_s);

struct DistributionStats {
  std::vector<std::pair<double, double>> ecdf;  // (value, rank / n)
  std::vector<std::pair<double, double>> qq;    // (normal quantile, empirical quantile)
  double ks = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Requires at least 30 values. Normal fitted by sample mean and standard deviation.
DistributionStats distribution_stats(std::span<const double> values);

/// Fraction of paired bootstrap resamples in which RMS(a) < RMS(b).
/// a and b hold residuals of two methods on the same packets.
double paired_bootstrap_confidence(std::span<const double> a, std::span<const double> b, int resamples,
                                   std::uint64_t seed);

struct MethodEvaluation {
  Method method = Method::Legacy;
  int N = 1;
  std::vector<PairedMeasurement> pairs;
  PairingStats pairing;
  ClockFit fit;
  std::vector<double> residuals_s;  // aligned with pairs
  std::array<ReportRow, 4> rows;    // all, L, M, H
};

struct EvalOptions {
  double pairing_window_s = 1e-3;
  ClockFitOptions fit;
  unsigned threads = 1;
};

struct EvalReport {
  std::vector<MethodEvaluation> methods;  // sorted by (method, N)
  std::vector<std::string> diagnostics;   // method-set mismatches etc.
};

/// Evaluates every (method, N) present in both record sets. Throws DataError
/// when the sets share nothing.
EvalReport evaluate(std::span<const ToaRecord> rx1, std::span<const ToaRecord> rx2, const EvalOptions& options = {});

const MethodEvaluation* find_method(const EvalReport& report, Method method, int N);
/// Residuals of two evaluations restricted to the packets both kept
/// (matched on rx1's packet index), in a common order.
std::pair<std::vector<double>, std::vector<double>> aligned_residuals(const MethodEvaluation& a,
                                                                      const MethodEvaluation& b);

/// Residuals of one class, or all when cls is empty.
std::vector<double> class_residuals(const MethodEvaluation& m, const std::string& cls = {});

// CSV renderings. Values in nanoseconds with 0.01 ns resolution.
std::string table_csv(const EvalReport& report);
std::string ecdf_csv(const EvalReport& report);
std::string qq_csv(const EvalReport& report);
/// Fixed-width text table in the layout of the usual method x class summary.
std::string render_table(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_table_csv(const std::string& text);

}  // namespace modestoa
