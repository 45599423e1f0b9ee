#pragma once

// Two direct rejection samplers for the normalized bivariate density
//   chi(y, theta) = [1 - (1 + y)^{-delta/alpha}]^{-alpha} H(theta) e^{-z H(theta)(1 + y)}
// on y > 0, theta in (0, pi). Sampler A suits moderate to large z,
// sampler B suits alpha away from 1.

#include <cmath>
#include <cstdint>
#include <string>

#include "fpss/elementary.hpp"
#include "fpss/monitor.hpp"
#include "fpss/special_functions.hpp"

namespace fpss {

struct ChiParams {
  AlphaContext ctx;
  double ln_z;

  ChiParams(double alpha, double ln_z_) : ctx(alpha), ln_z(ln_z_) {
    if (std::isnan(ln_z) || std::isinf(ln_z)) throw DomainError("ln z must be finite");
  }
  ChiParams(const AlphaContext& c, double ln_z_) : ctx(c), ln_z(ln_z_) {
    if (std::isnan(ln_z) || std::isinf(ln_z)) throw DomainError("ln z must be finite");
  }
  double z() const { return std::exp(ln_z); }
};

struct ChiSample {
  double ln_y;
  double theta;
  std::uint64_t outer = 0;
  std::uint64_t inner = 0;
};

inline constexpr std::uint64_t kMaxOuterIterations = 1000000;

namespace detail {

// ln of R(y) = (delta/alpha) y / (1 - (1 + y)^{-delta/alpha})
inline double ln_R(const AlphaContext& c, double ln_y) {
  const double e = c.delta / c.alpha;
  return std::log(e) + ln_y - ln_one_minus_pow(ln_y, e);
}

[[noreturn]] inline void iteration_cap(const char* who) {
  throw SamplerError(std::string(who) + ": iteration cap exceeded");
}

}  // namespace detail

inline ChiSample sample_chi_A(RngStream& rng, const ChiParams& p) {
  const AlphaContext& c = p.ctx;
  const double a = c.alpha, d = c.delta;
  const double z = p.z();
  const double ln_z = p.ln_z;
  const double ln_d = std::log(d);
  // ln r, r = (1 + delta/z) z^alpha max(1 + alpha pi^2/2, 1/z)
  const double ln_r = softplus(ln_d - ln_z) + a * ln_z + std::max(std::log1p(a * kPi * kPi / 2), -ln_z);
  ChiSample out{};
  for (out.outer = 1; out.outer <= kMaxOuterIterations; ++out.outer) {
    double theta, ln_tau, tau;
    for (;;) {
      ++out.inner;
      theta = sample_m(rng, a * z);
      ln_tau = ln_z + ln_H(c, theta);
      tau = std::exp(ln_tau);
      const double ln_target = a * ln_tau - tau + softplus(ln_d - ln_tau);
      const double ln_env = ln_r - z * (1.0 + 0.5 * a * theta * theta);
      const double ratio = std::exp(ln_target - ln_env);
      ar_monitor().record(ratio, "chi_A.inner");
      if (rng.unif() <= ratio) break;
    }
    const double w = d / (tau + d);
    const double shape = rng.unif() < w ? 1.0 + d : d;
    const double ln_y = gamma_log(rng, shape, ln_tau);
    const double ratio = std::exp(a * detail::ln_R(c, ln_y) - softplus(ln_y));
    ar_monitor().record(ratio, "chi_A.outer");
    if (rng.unif() <= ratio) {
      out.ln_y = ln_y;
      out.theta = theta;
      return out;
    }
  }
  detail::iteration_cap("sample_chi_A");
}

inline ChiSample sample_chi_B(RngStream& rng, const ChiParams& p) {
  const AlphaContext& c = p.ctx;
  const double a = c.alpha, d = c.delta;
  const double lg = c.lgamma_delta;
  const double ln_norm = softplus(lg);  // ln(Gamma(delta) + 1)
  const double ln_c2 = std::max(0.0, std::log(a / d));
  ChiSample out{};
  for (out.outer = 1; out.outer <= kMaxOuterIterations; ++out.outer) {
    double theta, ln_tau, mix;
    for (;;) {
      ++out.inner;
      theta = kPi * rng.unif();
      ln_tau = p.ln_z + ln_H(c, theta);
      mix = softplus(lg + a * ln_tau);  // ln(Gamma(delta) tau^alpha + 1)
      const double ratio = std::exp(mix - std::exp(ln_tau) - ln_norm);
      ar_monitor().record(ratio, "chi_B.inner");
      if (rng.unif() <= ratio) break;
    }
    const double w = std::exp(-mix);
    const double shape = rng.unif() < w ? 1.0 : d;
    const double ln_y = gamma_log(rng, shape, ln_tau);
    const double ratio = std::exp(a * ln_y - a * ln_one_minus_pow(ln_y, d / a) - ln_c2 -
                                  softplus(a * ln_y));
    ar_monitor().record(ratio, "chi_B.outer");
    if (rng.unif() <= ratio) {
      out.ln_y = ln_y;
      out.theta = theta;
      return out;
    }
  }
  detail::iteration_cap("sample_chi_B");
}

}  // namespace fpss
