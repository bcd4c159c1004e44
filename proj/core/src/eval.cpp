#include "modestoa/eval.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "modestoa/parallel.hpp"
#include "modestoa/rng.hpp"

namespace modestoa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kLowCount = 10;
constexpr std::size_t kMinDistribution = 30;

const char* const kClassNames[4] = {"all", "L", "M", "H"};

std::string num(double v, int decimals = 2) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

const char* to_string(PacketClass c) {
  switch (c) {
    case PacketClass::L:
      return "L";
    case PacketClass::M:
      return "M";
    case PacketClass::H:
      return "H";
  }
  return "?";
}

PacketClass classify(double gamma_mean, int beta_min) {
  if (gamma_mean <= kLowGammaThreshold) return PacketClass::L;
  if (beta_min >= kHighBetaThreshold) return PacketClass::H;
  return PacketClass::M;
}

std::vector<PairedMeasurement> pair_packets(std::span<const ToaRecord> rx1, std::span<const ToaRecord> rx2,
                                            double window_s, PairingStats* stats) {
  PairingStats local;
  auto& st = stats ? *stats : local;
  st = {};

  std::vector<const ToaRecord*> a, b;
  const auto keep = [&](std::span<const ToaRecord> in, std::vector<const ToaRecord*>& out) {
    for (const auto& r : in) {
      if (r.unreliable) {
        ++st.unreliable;
      } else {
        out.push_back(&r);
      }
    }
  };
  keep(rx1, a);
  keep(rx2, b);

  // rx2 records grouped by payload, sorted by time.
  std::map<std::string, std::vector<std::size_t>> by_payload;
  for (std::size_t j = 0; j < b.size(); ++j) by_payload[b[j]->payload_hex].push_back(j);
  for (auto& [key, list] : by_payload) {
    std::sort(list.begin(), list.end(), [&](std::size_t x, std::size_t y) { return b[x]->toa_s < b[y]->toa_s; });
  }

  std::vector<std::vector<std::size_t>> candidates(a.size());
  std::vector<std::size_t> reverse_count(b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto it = by_payload.find(a[i]->payload_hex);
    if (it == by_payload.end()) continue;
    for (std::size_t j : it->second) {
      if (std::abs(b[j]->toa_s - a[i]->toa_s) <= window_s) {
        candidates[i].push_back(j);
        ++reverse_count[j];
      }
    }
  }

  std::vector<PairedMeasurement> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (candidates[i].empty()) {
      ++st.unmatched_rx1;
      continue;
    }
    if (candidates[i].size() > 1 || reverse_count[candidates[i][0]] > 1) {
      ++st.ambiguous;
      continue;
    }
    const auto& r1 = *a[i];
    const auto& r2 = *b[candidates[i][0]];
    PairedMeasurement p;
    p.packet_index = r1.packet_index;
    p.t1 = r1.toa_s;
    p.t2 = r2.toa_s;
    p.gamma = 0.5 * (r1.gamma + r2.gamma);
    p.beta_min = std::min(r1.beta, r2.beta);
    p.cls = classify(p.gamma, p.beta_min);
    p.payload_hex = r1.payload_hex;
    pairs.push_back(std::move(p));
  }
  for (std::size_t j = 0; j < b.size(); ++j) st.unmatched_rx2 += reverse_count[j] == 0 ? 1 : 0;
  std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.t1 < y.t1; });
  st.pairs = pairs.size();
  return pairs;
}

double ClockFit::operator()(double t) const {
  const double x = (t - t_mid) / t_half;
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> ClockFit::raw_coefficients() const {
  // sum_k c_k ((t - m) / h)^k expanded with the binomial theorem.
  std::vector<double> raw(coefficients.size(), 0.0);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const double ck = coefficients[k] / std::pow(t_half, static_cast<double>(k));
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      raw[j] += ck * binom * std::pow(-t_mid, static_cast<double>(k - j));
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }
  return raw;
}

ClockFit fit_clock(std::span<const double> t, std::span<const double> y, const ClockFitOptions& options) {
  if (t.size() != y.size()) throw InvalidInput("time and value counts differ");
  if (options.max_order < 0) throw InvalidInput("max_order must be >= 0");
  if (t.size() < std::max<std::size_t>(options.min_pairs, 2)) {
    throw InvalidInput("clock fit needs at least " + std::to_string(options.min_pairs) + " pairs, got " +
                       std::to_string(t.size()));
  }
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) throw InvalidInput("degenerate time span for clock fit");
  if (span < options.min_span_s) {
    throw InvalidInput("clock fit needs a time span of at least " + num(options.min_span_s, 1) + " s");
  }

  ClockFit fit;
  fit.t_mid = 0.5 * (*hi + *lo);
  fit.t_half = 0.5 * span;
  const std::size_t n = t.size();
  const auto K = static_cast<std::size_t>(std::min<long>(options.max_order + 1, static_cast<long>(n) - 1));

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (t[i] - fit.t_mid) / fit.t_half;

  // Modified Gram-Schmidt with one re-orthogonalisation pass: x^k = sum_j R[j][k] q_j.
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> R(K, std::vector<double>(K, 0.0));
  std::vector<double> a;  // projections of y on q_k
  std::vector<double> res(y.begin(), y.end());
  std::vector<double> power(n, 1.0);
  for (std::size_t k = 0; k < K; ++k) {
    if (k > 0) {
      for (std::size_t i = 0; i < n; ++i) power[i] *= x[i];
    }
    std::vector<double> v = power;
    const double norm0 = std::sqrt(dot(v, v));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < q.size(); ++j) {
        const double r = dot(q[j], v);
        R[j][k] += r;
        for (std::size_t i = 0; i < n; ++i) v[i] -= r * q[j][i];
      }
    }
    const double nv = std::sqrt(dot(v, v));
    if (!(nv > 1e-10 * norm0)) break;  // numerically dependent column
    R[k][k] = nv;
    for (auto& vi : v) vi /= nv;
    const double ak = dot(v, res);
    for (std::size_t i = 0; i < n; ++i) res[i] -= ak * v[i];
    a.push_back(ak);
    q.push_back(std::move(v));
    fit.rss.push_back(dot(res, res));
  }

  // Smallest order that no higher order improves on by min_improvement.
  const auto variance = [&](std::size_t k) { return fit.rss[k] / static_cast<double>(n - k - 1); };
  std::size_t order = 0;
  for (; order + 1 < fit.rss.size(); ++order) {
    bool better = false;
    for (std::size_t k = order + 1; k < fit.rss.size(); ++k) {
      if (variance(k) < (1.0 - options.min_improvement) * variance(order)) better = true;
    }
    if (!better) break;
  }
  fit.order = static_cast<int>(order);

  // Back-substitution R c = a on the selected block.
  fit.coefficients.assign(order + 1, 0.0);
  for (std::size_t k = order + 1; k-- > 0;) {
    double s = a[k];
    for (std::size_t j = k + 1; j <= order; ++j) s -= R[k][j] * fit.coefficients[j];
    fit.coefficients[k] = s / R[k][k];
  }
  return fit;
}

double sigma_from_rmse(double rmse) { return rmse / std::sqrt(2.0); }

ReportRow summarize(std::span<const double> residuals_s) {
  ReportRow row;
  row.count = residuals_s.size();
  row.low_count = row.count < kLowCount;
  if (residuals_s.empty()) {
    row.rmse_ns = row.sigma_ns = row.ks = kNaN;
    return row;
  }
  double ss = 0.0;
  for (double r : residuals_s) ss += r * r;
  row.rmse_ns = std::sqrt(ss / static_cast<double>(residuals_s.size())) * 1e9;
  row.sigma_ns = sigma_from_rmse(row.rmse_ns);
  row.ks = residuals_s.size() >= kMinDistribution ? distribution_stats(residuals_s).ks : kNaN;
  return row;
}

DistributionStats distribution_stats(std::span<const double> values) {
  if (values.size() < kMinDistribution) throw InvalidInput("distribution statistics need at least 30 values");
  DistributionStats d;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  d.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - d.mean) * (x - d.mean);
  d.stddev = std::sqrt(ss / (n - 1.0));

  d.ecdf.reserve(v.size());
  d.qq.reserve(v.size());
  const bool degenerate = !(d.stddev > 0.0);
  const boost::math::normal_distribution<double> normal(d.mean, degenerate ? 1.0 : d.stddev);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double rank = static_cast<double>(i + 1);
    d.ecdf.emplace_back(v[i], rank / n);
    const double p = (rank - 0.5) / n;
    d.qq.emplace_back(degenerate ? d.mean : boost::math::quantile(normal, p), v[i]);
    if (!degenerate) {
      const double F = boost::math::cdf(normal, v[i]);
      d.ks = std::max({d.ks, rank / n - F, F - (rank - 1.0) / n});
    }
  }
  return d;
}

double paired_bootstrap_confidence(std::span<const double> a, std::span<const double> b, int resamples,
                                   std::uint64_t seed) {
  if (a.size() != b.size() || a.empty()) throw InvalidInput("bootstrap needs equal, non-empty residual sets");
  if (resamples < 1) throw InvalidInput("bootstrap needs at least one resample");
  auto rng = make_rng(seed, RngDomain::Bootstrap);
  std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
  int wins = 0;
  for (int r = 0; r < resamples; ++r) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto k = pick(rng);
      sa += a[k] * a[k];
      sb += b[k] * b[k];
    }
    wins += sa < sb ? 1 : 0;
  }
  return static_cast<double>(wins) / resamples;
}

std::pair<std::vector<double>, std::vector<double>> aligned_residuals(const MethodEvaluation& a,
                                                                      const MethodEvaluation& b) {
  std::map<std::size_t, double> rb;
  for (std::size_t i = 0; i < b.pairs.size(); ++i) rb.emplace(b.pairs[i].packet_index, b.residuals_s[i]);
  std::vector<std::pair<std::size_t, double>> ra;
  for (std::size_t i = 0; i < a.pairs.size(); ++i) ra.emplace_back(a.pairs[i].packet_index, a.residuals_s[i]);
  std::sort(ra.begin(), ra.end());
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto& [idx, r] : ra) {
    const auto it = rb.find(idx);
    if (it == rb.end()) continue;
    out.first.push_back(r);
    out.second.push_back(it->second);
  }
  return out;
}

std::vector<double> class_residuals(const MethodEvaluation& m, const std::string& cls) {
  std::vector<double> out;
  for (std::size_t i = 0; i < m.pairs.size(); ++i) {
    if (cls.empty() || cls == "all" || cls == to_string(m.pairs[i].cls)) out.push_back(m.residuals_s[i]);
  }
  return out;
}

EvalReport evaluate(std::span<const ToaRecord> rx1, std::span<const ToaRecord> rx2, const EvalOptions& options) {
  using Key = std::pair<Method, int>;
  std::map<Key, std::vector<ToaRecord>> g1, g2;
  for (const auto& r : rx1) g1[{r.method, r.N}].push_back(r);
  for (const auto& r : rx2) g2[{r.method, r.N}].push_back(r);

  EvalReport report;
  std::vector<Key> keys;
  const auto label = [](const Key& k) { return std::string(display_name(k.first)) + " N=" + std::to_string(k.second); };
  for (const auto& [k, v] : g1) {
    if (g2.count(k)) {
      keys.push_back(k);
    } else {
      report.diagnostics.push_back(label(k) + " present only in receiver 1 records");
    }
  }
  for (const auto& [k, v] : g2) {
    if (!g1.count(k)) report.diagnostics.push_back(label(k) + " present only in receiver 2 records");
  }
  if (keys.empty()) throw DataError("the two TOA record sets have no method in common");

  report.methods.resize(keys.size());
  parallel_for(keys.size(), options.threads, [&](std::size_t idx) {
    const auto& key = keys[idx];
    auto& m = report.methods[idx];
    m.method = key.first;
    m.N = key.second;
    m.pairs = pair_packets(g1[key], g2[key], options.pairing_window_s, &m.pairing);
    std::vector<double> t, y;
    for (const auto& p : m.pairs) {
      t.push_back(p.t1);
      y.push_back(p.delta());
    }
    try {
      m.fit = fit_clock(t, y, options.fit);
    } catch (const InvalidInput& e) {
      throw DataError(label(key) + ": " + e.what());
    }
    m.residuals_s.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) m.residuals_s[i] = y[i] - m.fit(t[i]);
    for (std::size_t c = 0; c < 4; ++c) {
      const auto r = class_residuals(m, kClassNames[c]);
      auto row = summarize(r);
      row.method = m.method;
      row.N = m.N;
      row.cls = kClassNames[c];
      m.rows[c] = row;
    }
  });
  return report;
}

const MethodEvaluation* find_method(const EvalReport& report, Method method, int N) {
  for (const auto& m : report.methods) {
    if (m.method == method && m.N == N) return &m;
  }
  return nullptr;
}

std::string table_csv(const EvalReport& report) {
  std::string out = "method,N,class,count,rmse_ns,sigma_ns,ks,low_count\n";
  for (const auto& m : report.methods) {
    for (const auto& r : m.rows) {
      out += std::string(display_name(r.method)) + "," + std::to_string(r.N) + "," + r.cls + "," +
             std::to_string(r.count) + "," + num(r.rmse_ns) + "," + num(r.sigma_ns) + "," + num(r.ks, 4) + "," +
             (r.low_count ? "1" : "0") + "\n";
    }
  }
  return out;
}

namespace {

template <typename Field>
std::string distribution_csv(const EvalReport& report, const char* header, Field field) {
  std::string out = header;
  for (const auto& m : report.methods) {
    for (const char* cls : kClassNames) {
      const auto r = class_residuals(m, cls);
      if (r.size() < kMinDistribution) continue;
      const auto d = distribution_stats(r);
      const std::string prefix = std::string(display_name(m.method)) + "," + std::to_string(m.N) + "," + cls + ",";
      for (const auto& pt : field(d)) out += prefix + num(pt.first * 1e9) + "," + num(pt.second * 1e9) + "\n";
    }
  }
  return out;
}

}  // namespace

std::string ecdf_csv(const EvalReport& report) {
  std::string out = "method,N,class,value_ns,p\n";
  for (const auto& m : report.methods) {
    for (const char* cls : kClassNames) {
      const auto r = class_residuals(m, cls);
      if (r.size() < kMinDistribution) continue;
      const auto d = distribution_stats(r);
      const std::string prefix = std::string(display_name(m.method)) + "," + std::to_string(m.N) + "," + cls + ",";
      for (const auto& [v, p] : d.ecdf) out += prefix + num(v * 1e9) + "," + num(p, 6) + "\n";
    }
  }
  return out;
}

std::string qq_csv(const EvalReport& report) {
  return distribution_csv(report, "method,N,class,normal_quantile_ns,empirical_ns\n",
                          [](const DistributionStats& d) { return d.qq; });
}

std::vector<ReportRow> parse_table_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ReportRow> rows;
  if (!std::getline(in, line) || line.rfind("method,N,class", 0) != 0) throw DataError("not a report table CSV");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() < 6) throw DataError("report table line " + std::to_string(lineno) + ": too few fields");
    ReportRow r;
    const auto m = parse_method(f[0]);
    if (!m) throw DataError("report table line " + std::to_string(lineno) + ": unknown method " + f[0]);
    try {
      r.method = *m;
      r.N = std::stoi(f[1]);
      r.cls = f[2];
      r.count = std::stoul(f[3]);
      r.rmse_ns = f[4] == "nan" ? kNaN : std::stod(f[4]);
      r.sigma_ns = f[5] == "nan" ? kNaN : std::stod(f[5]);
      r.ks = f.size() > 6 && f[6] != "nan" ? std::stod(f[6]) : kNaN;
      r.low_count = f.size() > 7 && f[7] == "1";
    } catch (const std::logic_error&) {
      throw DataError("report table line " + std::to_string(lineno) + ": malformed number");
    }
    rows.push_back(r);
  }
  return rows;
}

std::string render_table(const std::vector<ReportRow>& rows) {
  // One line per (method, N); sigma_TOA in ns for all / L / M / H.
  std::vector<std::pair<Method, int>> order;
  std::map<std::pair<Method, int>, std::map<std::string, ReportRow>> cells;
  for (const auto& r : rows) {
    const auto key = std::pair{r.method, r.N};
    if (!cells.count(key)) order.push_back(key);
    cells[key][r.cls] = r;
  }
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-14s %4s | %9s %9s %9s %9s | %7s\n", "Method", "N", "all", "L", "M", "H",
                "count");
  out += buf;
  out += std::string(72, '-') + "\n";
  const auto cell = [](const std::map<std::string, ReportRow>& c, const char* cls) -> std::string {
    const auto it = c.find(cls);
    if (it == c.end() || std::isnan(it->second.sigma_ns)) return "-";
    return num(it->second.sigma_ns) + (it->second.low_count ? "*" : "");
  };
  for (const auto& key : order) {
    const auto& c = cells[key];
    const auto all = c.find("all");
    std::snprintf(buf, sizeof buf, "%-14s %4d | %9s %9s %9s %9s | %7zu\n", display_name(key.first), key.second,
                  cell(c, "all").c_str(), cell(c, "L").c_str(), cell(c, "M").c_str(), cell(c, "H").c_str(),
                  all == c.end() ? std::size_t{0} : all->second.count);
    out += buf;
  }
  out += "sigma_TOA in ns; * marks classes with fewer than 10 packets\n";
  return out;
}

}  // namespace modestoa
