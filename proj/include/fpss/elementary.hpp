#pragma once

// Elementary samplers. Gamma variates are returned as logarithms because
// shapes near zero and extreme rates routinely leave the double range.

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include "fpss/monitor.hpp"
#include "fpss/rng.hpp"
#include "fpss/special_functions.hpp"

namespace fpss {

inline double exp1(RngStream& rng) { return -std::log(rng.unif()); }

inline double std_normal(RngStream& rng) {
  std::normal_distribution<double> n;
  return n(rng);
}

/// ln X for X ~ Gamma(a, 1), by rejection from a flat-top two-sided
/// exponential envelope on the log-concave density of ln X. Any a > 0.
inline double log_gamma_small_shape(RngStream& rng, double a) {
  if (!(a > 0.0)) throw DomainError("log_gamma_small_shape: shape must be positive");
  // w = ln X - ln a has density proportional to exp(-a phi(w)),
  // phi(w) = e^w - 1 - w. Tangents at the points where a phi = 1.
  auto phi = [](double w) { return std::expm1(w) - w; };
  double xr = std::log1p(1.0 / a);
  for (int i = 0; i < 4; ++i) xr = std::log(1.0 + 1.0 / a + xr);
  double xl = -(1.0 + 1.0 / a);
  for (int i = 0; i < 4; ++i) xl = -(1.0 + 1.0 / a) + std::exp(xl);
  const double sr = a * std::expm1(xr);    // decay rate right of xr
  const double sl = -a * std::expm1(xl);   // decay rate left of xl
  const double hr = -a * phi(xr), hl = -a * phi(xl);
  const double w0 = xr - xl;
  const double wr = std::exp(hr) / sr;
  const double wl = std::exp(hl) / sl;
  const double total = w0 + wr + wl;
  for (;;) {
    const double pick = rng.unif() * total;
    double w, ln_env;
    if (pick < w0) {
      w = xl + w0 * rng.unif();
      ln_env = 0.0;
    } else if (pick < w0 + wr) {
      const double e = exp1(rng);
      w = xr + e / sr;
      ln_env = hr - e;
    } else {
      const double e = exp1(rng);
      w = xl - e / sl;
      ln_env = hl - e;
    }
    const double ratio = std::exp(-a * phi(w) - ln_env);
    ar_monitor().record(ratio, "log_gamma_small_shape");
    if (rng.unif() <= ratio) return std::log(a) + w;
  }
}

/// ln X for X ~ Gamma(shape, rate) with rate = exp(ln_rate).
inline double gamma_log(RngStream& rng, double shape, double ln_rate) {
  if (!(shape > 0.0)) throw DomainError("gamma_log: shape must be positive");
  if (shape < 0.02) return log_gamma_small_shape(rng, shape) - ln_rate;
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    return gamma_log(rng, shape + 1.0, ln_rate) + std::log(rng.unif()) / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = std_normal(rng);
    const double v1 = 1.0 + c * x;
    if (v1 <= 0.0) continue;
    const double v = v1 * v1 * v1;
    const double lu = std::log(rng.unif());
    const double ln_ratio = 0.5 * x * x + d - d * v + d * std::log(v);
    ar_monitor().record(std::exp(ln_ratio), "gamma");
    if (lu < ln_ratio) return std::log(d * v) - ln_rate;
  }
}

/// Density proportional to exp(-s theta^2 / 2) on (0, pi), s >= 0.
inline double sample_m(RngStream& rng, double s, std::uint64_t* iters = nullptr) {
  if (!(s >= 0.0) || std::isinf(s)) throw DomainError("sample_m: s must be finite and >= 0");
  if (s <= 1.0) {
    for (;;) {
      if (iters) ++*iters;
      const double th = kPi * rng.unif();
      const double ratio = std::exp(-0.5 * s * th * th);
      ar_monitor().record(ratio, "sample_m");
      if (rng.unif() <= ratio) return th;
    }
  }
  const double rs = std::sqrt(s);
  for (;;) {
    if (iters) ++*iters;
    const double z = std::fabs(std_normal(rng));
    if (z < rs * kPi && z > 0.0) return z / rs;
  }
}

/// Density E_t(x) = (t/2) min(1, e^{1 - t x}) on x >= 0, by inversion.
inline double sample_E(RngStream& rng, double t) {
  if (!(t > 0.0)) throw DomainError("sample_E: t must be positive");
  const double u = 2.0 * rng.unif();
  if (u <= 1.0) return u / t;
  return (1.0 - std::log(2.0 - u)) / t;
}

/// ln E_t(x); -inf for x < 0.
inline double ln_E_density(double ln_t, double x) {
  if (x < 0.0) return kNegInf;
  const double t = std::exp(ln_t);
  return ln_t - kLn2 + std::min(0.0, 1.0 - t * x);
}

/// Index drawn with probability proportional to w[i]; linear scan.
inline std::size_t discrete_weighted(RngStream& rng, std::span<const double> w) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || std::isinf(x)) {
      throw DomainError("discrete_weighted: bad weight " + std::to_string(x));
    }
    total += x;
  }
  if (!(total > 0.0)) throw DomainError("discrete_weighted: all weights are zero");
  double u = rng.unif() * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last = i;
    if (u < w[i]) return i;
    u -= w[i];
  }
  return last;
}

}  // namespace fpss
