#pragma once

// First passage of an alpha-stable subordinator across a non-increasing
// barrier b(t). Returns the passage time, the undershoot ratio
// x = S_{tau-}/b(tau) and the jump, the latter two in log form.

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "fpss/chi_logdelta.hpp"
#include "fpss/chi_simple.hpp"
#include "fpss/elementary.hpp"
#include "fpss/special_functions.hpp"

namespace fpss {

/// A barrier as the triple (b, b', B^{-1}) with B(t) = t^{-1/alpha} b(t).
/// ln_B_inv maps ln s to ln t; it is what the sampler calls.
struct Barrier {
  std::string family;
  std::function<double(double)> b;
  std::function<double(double)> b_prime;
  std::function<double(double)> ln_B_inv;

  double B_inv(double s) const { return std::exp(ln_B_inv(std::log(s))); }
};

/// Spot checks on a barrier: b non-increasing and b' <= 0 at the probe
/// times, and B(B^{-1}(s)) = s to `tol` relative. Throws on failure.
inline void check_barrier(const Barrier& bar, double alpha, RngStream& rng, int probes = 64,
                          double tol = 1e-9) {
  double prev_t = 0.0, prev_b = kInf;
  for (int i = 1; i <= probes; ++i) {
    const double t = std::exp(-8.0 + 12.0 * i / probes);
    const double bt = bar.b(t);
    if (t > prev_t && bt > prev_b * (1.0 + 1e-15)) throw DomainError("barrier: b is increasing");
    if (bar.b_prime(t) > 0.0) throw DomainError("barrier: b' is positive");
    prev_t = t;
    prev_b = bt;
  }
  for (int i = 0; i < probes; ++i) {
    const double ln_s = -3.0 + 6.0 * rng.unif();
    const double t = std::exp(bar.ln_B_inv(ln_s));
    const double ln_B = std::log(bar.b(t)) - std::log(t) / alpha;
    if (!(std::fabs(std::expm1(ln_B - ln_s)) <= tol)) {
      throw DomainError("barrier: B(B^{-1}(s)) != s");
    }
  }
}

/// b(t) = b0.
inline Barrier barrier_constant(double alpha, double b0) {
  if (!(b0 > 0.0) || std::isinf(b0)) throw DomainError("constant barrier: b0 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("barrier: alpha must lie in (0, 1)");
  const double ln_b0 = std::log(b0);
  return {"constant",
          [b0](double) { return b0; },
          [](double) { return 0.0; },
          [alpha, ln_b0](double ln_s) { return alpha * (ln_b0 - ln_s); }};
}

/// b(t) = (c - t^{1/alpha})_+.
inline Barrier barrier_powcap(double alpha, double c) {
  if (!(c > 0.0) || std::isinf(c)) throw DomainError("powcap barrier: c must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("barrier: alpha must lie in (0, 1)");
  const double ln_c = std::log(c);
  const double tmax = std::exp(alpha * ln_c);
  return {"powcap",
          [alpha, c](double t) { return std::max(0.0, c - std::pow(t, 1.0 / alpha)); },
          [alpha, tmax](double t) {
            if (t >= tmax) return 0.0;
            return -std::pow(t, (1.0 - alpha) / alpha) / alpha;
          },
          [alpha, ln_c](double ln_s) { return alpha * (ln_c - softplus(ln_s)); }};
}

struct ZDraw {
  double ln_z;
  double theta;
};

/// z = xi / H_alpha(Theta), Theta ~ Unif(0, pi), xi ~ Exp(1), in logs.
inline ZDraw draw_z(RngStream& rng, const AlphaContext& c) {
  const double theta = kPi * rng.unif();
  const double ln_xi = std::log(exp1(rng));
  return {ln_xi - ln_H(c, theta), theta};
}

enum class ChiAlgorithm { A, B, P };

inline const char* to_string(ChiAlgorithm a) {
  switch (a) {
    case ChiAlgorithm::A: return "A";
    case ChiAlgorithm::B: return "B";
    case ChiAlgorithm::P: return "P";
  }
  return "?";
}

inline ChiAlgorithm parse_algorithm(const std::string& s) {
  if (s == "A") return ChiAlgorithm::A;
  if (s == "B") return ChiAlgorithm::B;
  if (s == "P") return ChiAlgorithm::P;
  throw DomainError("unknown algorithm '" + s + "'");
}

/// z >= 1 gives A; alpha <= 0.9 or z >= delta 1e-30 gives B; otherwise P.
inline ChiAlgorithm select_algorithm(const AlphaContext& c, double ln_z) {
  static const double kLnTiny = -30.0 * std::log(10.0);
  if (ln_z >= 0.0) return ChiAlgorithm::A;
  if (c.alpha <= 0.9 || ln_z >= std::log(c.delta) + kLnTiny) return ChiAlgorithm::B;
  return ChiAlgorithm::P;
}

inline ChiSample sample_chi(RngStream& rng, const ChiParams& p, ChiAlgorithm alg,
                            const QGridConfig& cfg = {}) {
  switch (alg) {
    case ChiAlgorithm::A: return sample_chi_A(rng, p);
    case ChiAlgorithm::B: return sample_chi_B(rng, p);
    case ChiAlgorithm::P: return sample_chi_P(rng, p, cfg);
  }
  throw DomainError("bad algorithm");
}

inline ChiSample sample_chi_auto(RngStream& rng, const ChiParams& p) {
  return sample_chi(rng, p, select_algorithm(p.ctx, p.ln_z));
}

struct FirstPassage {
  double ln_z = 0.0;
  double tau_time = 0.0;
  bool creep = false;
  double ln_x = 0.0;
  double ln_1m_x = kNegInf;
  double ln_jump = kNegInf;
  double theta = 0.0;
  double ln_y = kNegInf;
  ChiAlgorithm alg = ChiAlgorithm::A;
};

/// Creep probability -b'/(-b' + b/(alpha t)) at time t.
inline double creep_probability(const Barrier& bar, double alpha, double t) {
  const double mb = -bar.b_prime(t);
  if (!(mb > 0.0)) return 0.0;
  return mb / (mb + bar.b(t) / (alpha * t));
}

/// ln s for s = alpha (delta/z)^{delta/alpha}, the argument of B^{-1}.
inline double ln_s_of_z(const AlphaContext& c, double ln_z) {
  return std::log(c.alpha) + (c.delta / c.alpha) * (std::log(c.delta) - ln_z);
}

/// `force` overrides the selector when set.
inline FirstPassage sample_first_passage(RngStream& rng, const AlphaContext& c, const Barrier& bar,
                                         const std::optional<ChiAlgorithm>& force = std::nullopt) {
  const double a = c.alpha, d = c.delta;
  FirstPassage out;
  const ZDraw zd = draw_z(rng, c);
  out.ln_z = zd.ln_z;
  const double u = rng.unif();
  const double ln_s = ln_s_of_z(c, zd.ln_z);
  const double ln_t = bar.ln_B_inv(ln_s);
  if (std::isnan(ln_t)) throw DomainError("barrier inverse returned NaN");
  out.tau_time = std::exp(ln_t);
  if (u < creep_probability(bar, a, out.tau_time)) {
    out.creep = true;
    return out;
  }
  const ChiParams p(c, zd.ln_z);
  out.alg = force ? *force : select_algorithm(c, zd.ln_z);
  const ChiSample s = sample_chi(rng, p, out.alg);
  out.ln_y = s.ln_y;
  out.theta = s.theta;
  // x = (1 + y)^{-delta/alpha}
  out.ln_x = -(d / a) * softplus(s.ln_y);
  out.ln_1m_x = ln_one_minus_pow(s.ln_y, d / a);
  const double ln_v = std::log(rng.unif());
  out.ln_jump = std::log(bar.b(out.tau_time)) + out.ln_1m_x - ln_v / a;
  return out;
}

}  // namespace fpss
