#pragma once

// Experiment drivers behind the CLI: draws, cross-algorithm comparisons,
// timings and grid summaries. CSV output uses shortest round-trip decimal
// formatting and LF line endings.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fpss/chi_logdelta.hpp"
#include "fpss/first_passage.hpp"
#include "fpss/ks.hpp"
#include "fpss/monitor.hpp"

namespace fpss {

inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string fmt(std::uint64_t x) { return std::to_string(x); }
inline std::string fmt(int x) { return std::to_string(x); }
inline std::string fmt(const std::string& s) { return s; }
inline std::string fmt(const char* s) { return s; }
inline std::string fmt(bool b) { return b ? "1" : "0"; }

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), cols_(header.size()) {
    row_strings(header);
  }

  template <class... T>
  void row(const T&... v) {
    static_assert(sizeof...(T) > 0);
    if (sizeof...(T) != cols_) throw DomainError("csv: column count mismatch");
    std::vector<std::string> cells{fmt(v)...};
    row_strings(cells);
  }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

  std::ostream& os_;
  std::size_t cols_;
};

/// Algorithm choice for the chi samplers; nullopt means the selector.
using AlgChoice = std::optional<ChiAlgorithm>;

inline AlgChoice parse_alg_choice(const std::string& s) {
  if (s == "auto") return std::nullopt;
  return parse_algorithm(s);
}

struct SampleChiSpec {
  double alpha;
  double ln_z;
  std::size_t n;
  AlgChoice alg;
  std::uint64_t seed;
};

/// Columns: i, alg, ln_y, theta, outer, inner.
inline void run_sample_chi(const SampleChiSpec& s, std::ostream& os) {
  const ChiParams p(s.alpha, s.ln_z);
  const ChiAlgorithm alg = s.alg ? *s.alg : select_algorithm(p.ctx, p.ln_z);
  RngStream rng(s.seed);
  std::optional<ChiLogDeltaSampler> P;
  if (alg == ChiAlgorithm::P) P.emplace(p);
  CsvWriter w(os, {"i", "alg", "ln_y", "theta", "outer", "inner"});
  for (std::size_t i = 0; i < s.n; ++i) {
    const ChiSample c = P ? P->sample(rng) : sample_chi(rng, p, alg);
    w.row(std::uint64_t(i), to_string(alg), c.ln_y, c.theta, c.outer, c.inner);
  }
}

struct SampleFpSpec {
  double alpha;
  std::string family;
  double param;
  std::size_t n;
  AlgChoice alg;
  std::uint64_t seed;
};

inline Barrier make_barrier(double alpha, const std::string& family, double param) {
  if (family == "constant") return barrier_constant(alpha, param);
  if (family == "powcap") return barrier_powcap(alpha, param);
  throw DomainError("unknown barrier family '" + family + "'");
}

/// Columns: i, ln_z, tau, creep, ln_x, ln_1m_x, ln_jump, theta, alg.
inline void run_sample_fp(const SampleFpSpec& s, std::ostream& os) {
  const AlphaContext ctx(s.alpha);
  const Barrier bar = make_barrier(s.alpha, s.family, s.param);
  RngStream rng(s.seed);
  CsvWriter w(os, {"i", "ln_z", "tau", "creep", "ln_x", "ln_1m_x", "ln_jump", "theta", "alg"});
  for (std::size_t i = 0; i < s.n; ++i) {
    const FirstPassage f = sample_first_passage(rng, ctx, bar, s.alg);
    w.row(std::uint64_t(i), f.ln_z, f.tau_time, f.creep, f.ln_x, f.ln_1m_x, f.ln_jump, f.theta,
          f.creep ? "-" : to_string(f.alg));
  }
}

struct TimedDraws {
  std::vector<double> ln_y;
  std::vector<double> theta;
  double seconds = 0.0;
  std::uint64_t outer = 0;
  std::uint64_t inner = 0;
  bool censored = false;  // stopped at the deadline
};

/// n draws from one algorithm; stops early once `deadline_sec` elapses.
inline TimedDraws timed_draws(const ChiParams& p, ChiAlgorithm alg, std::size_t n, RngStream& rng,
                              double deadline_sec = kInf) {
  TimedDraws out;
  out.ln_y.reserve(n);
  out.theta.reserve(n);
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  std::optional<ChiLogDeltaSampler> P;
  if (alg == ChiAlgorithm::P) P.emplace(p);
  for (std::size_t i = 0; i < n; ++i) {
    const ChiSample c = P ? P->sample(rng) : sample_chi(rng, p, alg);
    out.ln_y.push_back(c.ln_y);
    out.theta.push_back(c.theta);
    out.outer += c.outer;
    out.inner += c.inner;
    if ((i & 63) == 63 && std::chrono::duration<double>(clock::now() - t0).count() > deadline_sec) {
      out.censored = true;
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return out;
}

struct CompareSpec {
  std::vector<double> alphas;
  std::vector<double> ln_zs;
  std::size_t n;
  ChiAlgorithm alg1, alg2;
  int reps;
  std::uint64_t seed;
};

struct CompareRow {
  double alpha, z;
  int rep;
  double t1, t2;
  KSResult ks_ln_y, ks_theta;
};

/// Each repetition takes two fresh jumps of the base stream, one per algorithm.
inline std::vector<CompareRow> run_compare(const CompareSpec& s) {
  if (s.alphas.empty() || s.ln_zs.empty()) throw DomainError("compare: empty grid");
  if (s.n < 2 || s.reps < 1) throw DomainError("compare: need n >= 2 and reps >= 1");
  std::vector<CompareRow> rows;
  RngStream base(s.seed);
  for (double a : s.alphas) {
    for (double lz : s.ln_zs) {
      const ChiParams p(a, lz);
      for (int r = 0; r < s.reps; ++r) {
        base.jump();
        RngStream r1 = base;
        base.jump();
        RngStream r2 = base;
        const TimedDraws d1 = timed_draws(p, s.alg1, s.n, r1);
        const TimedDraws d2 = timed_draws(p, s.alg2, s.n, r2);
        rows.push_back({a, std::exp(lz), r, d1.seconds, d2.seconds, ks_two_sample(d1.ln_y, d2.ln_y),
                        ks_two_sample(d1.theta, d2.theta)});
      }
    }
  }
  return rows;
}

inline void write_compare(const CompareSpec& s, const std::vector<CompareRow>& rows, std::ostream& os) {
  CsvWriter w(os, {"alpha", "z", "rep", "alg1", "alg2", "t1_sec", "t2_sec", "ks_D", "ks_p",
                   "ks_D_theta", "ks_p_theta"});
  for (const auto& r : rows) {
    w.row(r.alpha, r.z, r.rep, to_string(s.alg1), to_string(s.alg2), r.t1, r.t2, r.ks_ln_y.statistic,
          r.ks_ln_y.p_value, r.ks_theta.statistic, r.ks_theta.p_value);
  }
}

struct BenchSpec {
  std::vector<double> alphas;
  std::vector<double> ln_zs;
  std::vector<ChiAlgorithm> algs;
  std::size_t n;
  std::uint64_t seed;
  double deadline_sec = kInf;
};

/// Columns: alpha, z, alg, n_done, sec, mean_outer, mean_inner, censored.
inline void run_bench(const BenchSpec& s, std::ostream& os) {
  CsvWriter w(os, {"alpha", "z", "alg", "n_done", "sec", "mean_outer", "mean_inner", "censored"});
  RngStream base(s.seed);
  for (double a : s.alphas) {
    for (double lz : s.ln_zs) {
      const ChiParams p(a, lz);
      for (ChiAlgorithm alg : s.algs) {
        base.jump();
        RngStream rng = base;
        const TimedDraws d = timed_draws(p, alg, s.n, rng, s.deadline_sec);
        const double k = double(d.ln_y.size());
        w.row(a, std::exp(lz), to_string(alg), std::uint64_t(d.ln_y.size()), d.seconds, d.outer / k,
              d.inner / k, d.censored);
      }
    }
  }
}

struct GridInfo {
  double alpha, ln_z;
  int m, N;
  std::size_t n_intervals;
  double vartheta, ln_tau_z, rho_z, omega_z, s_z;
  double total_weight;
};

inline GridInfo grid_info(double alpha, double ln_z, const QGridConfig& cfg = {}) {
  cfg.validate();
  const AlphaContext ctx(alpha);
  const QGrid g(q_nodes(cfg, ctx), ln_z);
  double tw = 0.0;
  for (const auto& iv : g.intervals()) tw += iv.weight;
  return {alpha, ln_z, g.nodes().m(), g.nodes().N(), g.intervals().size(), g.vartheta(),
          g.ln_tau_z(), g.rho_z(), g.omega_z(), g.s_z(), tw};
}

}  // namespace fpss
