#pragma once

// Special functions of the stable first-passage problem.
//
// Every function that can under- or overflow in double precision has a
// log-domain form. Angles live in [0, pi); the distance pi - theta is
// recomputed with a two-term representation of pi so that values close to
// pi keep their relative accuracy.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fpss {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kPiLo = 1.2246467991473532e-16;  // pi - kPi
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = std::numbers::ln2;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Accurate pi - theta for theta in [0, pi].
inline double pi_minus(double theta) { return (kPi - theta) + kPiLo; }

namespace detail {

inline constexpr int kZetaTerms = 64;

// zeta(2n) for n = 1..64, index n-1.
inline const std::array<double, kZetaTerms>& zeta_even_table() {
  static const std::array<double, kZetaTerms> table = [] {
    std::array<double, kZetaTerms> z{};
    const double p2 = kPi * kPi;
    z[0] = p2 / 6.0;
    z[1] = p2 * p2 / 90.0;
    z[2] = p2 * p2 * p2 / 945.0;
    z[3] = p2 * p2 * p2 * p2 / 9450.0;
    z[4] = p2 * p2 * p2 * p2 * p2 / 93555.0;
    for (int n = 6; n <= kZetaTerms; ++n) {
      double s = 0.0;
      for (int k = 40; k >= 2; --k) s += std::pow(double(k), -2.0 * n);
      z[n - 1] = 1.0 + s;
    }
    return z;
  }();
  return table;
}

}  // namespace detail

/// zeta(2n), n >= 1.
inline double zeta_even(int n) {
  if (n < 1) throw DomainError("zeta_even: n must be >= 1");
  if (n > detail::kZetaTerms) return 1.0 + std::pow(2.0, -2.0 * n);
  return detail::zeta_even_table()[n - 1];
}

/// ln(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// ln(ln(1 + e^w)), accurate when ln(1 + e^w) underflows.
inline double ln_log1p_exp(double w) {
  if (w < -30.0) return w + std::log1p(-0.5 * std::exp(w));
  return std::log(softplus(w));
}

/// ln(e^a + e^b).
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// sin(x)/x with sinc(0) = 1.
inline double sinc(double x) {
  const double ax = std::fabs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  if (ax > 0.5 * kPi && ax <= kPi) return std::sin(pi_minus(ax)) / ax;
  return std::sin(x) / x;
}

/// ln sinc(x) for |x| < pi; -inf at |x| = pi.
inline double ln_sinc(double x) {
  const double ax = std::fabs(x);
  if (ax >= kPi) {
    if (ax == kPi) return kNegInf;
    throw DomainError("ln_sinc: |x| must be <= pi");
  }
  if (ax <= 1.0) {
    const double q = (ax / kPi) * (ax / kPi);
    double p = q, s = 0.0;
    for (int n = 1; n <= detail::kZetaTerms; ++n) {
      const double term = zeta_even(n) * p / n;
      s += term;
      if (term < 1e-18 * s) break;
      p *= q;
    }
    return -s;
  }
  if (ax > 0.5 * kPi) return std::log(std::sin(pi_minus(ax)) / ax);
  return std::log(std::sin(ax) / ax);
}

/// d/dx ln sinc(x) = cot x - 1/x, for x in [0, pi). `pim` is pi - x
/// when the caller knows it more accurately than pi_minus(x).
inline double dln_sinc(double x, double pim = std::numeric_limits<double>::quiet_NaN()) {
  if (x <= 1.0) {
    const double q = (x / kPi) * (x / kPi);
    double p = x / (kPi * kPi), s = 0.0;
    for (int n = 1; n <= detail::kZetaTerms; ++n) {
      const double term = 2.0 * zeta_even(n) * p;
      s += term;
      if (term < 1e-18 * s) break;
      p *= q;
    }
    return -s;
  }
  if (x > 0.5 * kPi) {
    if (std::isnan(pim)) pim = pi_minus(x);
    return -1.0 / std::tan(pim) - 1.0 / x;
  }
  return 1.0 / std::tan(x) - 1.0 / x;
}

/// t / (e^t - 1), equal to 1 at t = 0.
inline double expm1_ratio(double t) {
  if (t == 0.0) return 1.0;
  const double d = std::expm1(t);
  if (std::isinf(d)) return 0.0;
  return t / d;
}

/// ln(e^v - 1) for v > 0.
inline double ln_expm1(double v) {
  if (v <= 0.0) throw DomainError("ln_expm1: v must be positive");
  if (v > 40.0) return v + std::log1p(-std::exp(-v));
  return std::log(std::expm1(v));
}

/// ln(e^v - 1) given ln v; accurate for v far below the double range.
inline double ln_expm1_from_log(double ln_v) {
  if (ln_v < -40.0) return ln_v + 0.5 * std::exp(ln_v);
  return ln_expm1(std::exp(ln_v));
}

/// 1 - (1 + y)^(-e) for y >= 0, e > 0.
inline double one_minus_pow(double y, double e) {
  return -std::expm1(-e * std::log1p(y));
}

/// ln(1 - (1 + y)^(-e)) given ln y.
inline double ln_one_minus_pow(double ln_y, double e) {
  if (ln_y == kNegInf) return kNegInf;
  if (ln_y < -40.0) {
    const double y = std::exp(ln_y);
    return std::log(e) + ln_y + std::log1p(-0.5 * (1.0 + e) * y);
  }
  return std::log(-std::expm1(-e * softplus(ln_y)));
}

/// Constants derived from the stability index alpha.
struct AlphaContext {
  double alpha;
  double delta;
  double c_alpha;      // (alpha/delta)^alpha
  double ln_c_alpha;
  double kappa1;       // 2 c_alpha (1/delta - 2)
  double kappa2;       // c_alpha (4 + 1/e)
  double kappa3;       // kappa1 + (ln 2)^(-alpha) kappa2 + 1
  double kappa4;       // kappa1 (ln 2)^delta + kappa2
  double lgamma_delta;  // ln Gamma(delta)

  explicit AlphaContext(double a) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    alpha = a;
    delta = 1.0 - a;
    ln_c_alpha = alpha * (std::log(alpha) - std::log(delta));
    c_alpha = std::exp(ln_c_alpha);
    kappa1 = 2.0 * c_alpha * (1.0 / delta - 2.0);
    kappa2 = c_alpha * (4.0 + std::exp(-1.0));
    kappa3 = kappa1 + std::pow(kLn2, -alpha) * kappa2 + 1.0;
    kappa4 = kappa1 * std::pow(kLn2, delta) + kappa2;
    lgamma_delta = std::lgamma(delta);
  }
};

namespace detail {

// ln(sin(alpha theta) / sin(theta)) for theta in (0, pi), written so that the
// result keeps absolute accuracy O(delta * eps) as delta -> 0.
inline double ln_sin_ratio(const AlphaContext& c, double theta) {
  const double dt = c.delta * theta;
  double cot;
  if (theta > 0.5 * kPi) {
    cot = -1.0 / std::tan(pi_minus(theta));
  } else {
    cot = 1.0 / std::tan(theta);
  }
  const double h = std::sin(0.5 * dt);
  return std::log1p(-2.0 * h * h - cot * std::sin(dt));
}

// alpha^{-1} ln H_alpha(theta) by its power series; valid for theta <= 1.
inline double ln_H_series_over_alpha(const AlphaContext& c, double theta) {
  const double q = (theta / kPi) * (theta / kPi);
  double p = q, s = 0.0;
  double ak = 1.0, dk = 1.0;  // alpha^k, delta^k
  double S = 0.0;
  for (int n = 1; n <= kZetaTerms; ++n) {
    S += ak + dk;
    ak *= c.alpha;
    dk *= c.delta;
    S += ak + dk;
    ak *= c.alpha;
    dk *= c.delta;
    const double term = zeta_even(n) * S * p / n;
    s += term;
    if (term < 1e-18 * s) break;
    p *= q;
  }
  return s;
}

inline double dln_H_series(const AlphaContext& c, double theta) {
  const double q = (theta / kPi) * (theta / kPi);
  double p = theta / (kPi * kPi), s = 0.0;
  double ak = 1.0, dk = 1.0, S = 0.0;
  for (int n = 1; n <= kZetaTerms; ++n) {
    S += ak + dk;
    ak *= c.alpha;
    dk *= c.delta;
    S += ak + dk;
    ak *= c.alpha;
    dk *= c.delta;
    const double term = 2.0 * zeta_even(n) * S * p;
    s += term;
    if (term < 1e-18 * s) break;
    p *= q;
  }
  return c.alpha * s;
}

inline void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("theta must lie in [0, pi]");
}

}  // namespace detail

/// ln H_alpha(theta), theta in [0, pi]; +inf at pi.
inline double ln_H(const AlphaContext& c, double theta) {
  detail::check_theta(theta);
  if (theta == 0.0) return 0.0;
  if (theta == kPi) return kInf;
  if (theta <= 1.0) return c.alpha * detail::ln_H_series_over_alpha(c, theta);
  const double lr = detail::ln_sin_ratio(c, theta) - std::log1p(-c.delta);
  return ln_sinc(c.delta * theta) - ln_sinc(theta) + (c.alpha / c.delta) * lr;
}

inline double H_alpha(const AlphaContext& c, double theta) { return std::exp(ln_H(c, theta)); }

/// ln Xi_alpha(theta) for theta in (0, pi).
inline double ln_Xi(const AlphaContext& c, double theta) {
  detail::check_theta(theta);
  if (theta == 0.0) return kInf;
  if (theta == kPi) throw DomainError("ln_Xi: theta must be < pi");
  const double u = pi_minus(theta);
  const double lr = detail::ln_sin_ratio(c, theta) - std::log1p(c.delta * theta / u);
  return ln_sinc(c.delta * theta) - ln_sinc(u) + (c.alpha / c.delta) * lr;
}

/// ln of Xi_alpha(theta) theta / (pi/alpha - theta).
inline double ln_XI(const AlphaContext& c, double theta) {
  detail::check_theta(theta);
  if (theta == kPi) throw DomainError("ln_XI: theta must be < pi");
  const double u = pi_minus(theta);
  const double v = u + c.delta * kPi / c.alpha;  // pi/alpha - theta
  if (theta <= 1.0) {
    return ln_H(c, theta) - std::log1p(c.delta * kPi / (c.alpha * u)) / c.delta;
  }
  return ln_Xi(c, theta) + std::log(theta) - std::log(v);
}

/// d/dtheta ln H_alpha(theta) on [0, pi).
inline double dln_H(const AlphaContext& c, double theta) {
  detail::check_theta(theta);
  if (theta == kPi) return kInf;
  if (theta <= 1.0) return detail::dln_H_series(c, theta);
  const double a = c.alpha, d = c.delta;
  const double u = pi_minus(theta);
  const double at = a * theta;
  const double w = u + d * theta;  // pi - alpha theta
  const double dt = d * theta;
  const double E = std::expm1(ln_sinc(dt) - ln_sinc(u) - ln_sinc(w));
  return d * dln_sinc(dt) + theta / (u * w) * E + (1.0 + a) * dln_sinc(w, at) +
         kPi * kPi / (theta * u * w);
}

/// ln H_1(theta) = 1 - theta cot(theta) - ln sinc(theta).
inline double ln_H1(double theta) {
  detail::check_theta(theta);
  if (theta == kPi) return kInf;
  if (theta <= 1.0) {
    const double q = (theta / kPi) * (theta / kPi);
    double p = q, s = 0.0;
    for (int n = 1; n <= detail::kZetaTerms; ++n) {
      const double term = zeta_even(n) * (2.0 + 1.0 / n) * p;
      s += term;
      if (term < 1e-18 * s) break;
      p *= q;
    }
    return s;
  }
  double tc;
  if (theta > 0.5 * kPi) {
    tc = -theta / std::tan(pi_minus(theta));
  } else {
    tc = theta / std::tan(theta);
  }
  return 1.0 - tc - ln_sinc(theta);
}

/// V1(theta) = ln H_1(theta) - theta^2 / 2.
inline double V1(double theta) {
  detail::check_theta(theta);
  if (theta == kPi) throw DomainError("V1: theta must be < pi");
  if (theta <= 1.0) {
    const double q = (theta / kPi) * (theta / kPi);
    double p = q * q, s = 0.0;
    for (int n = 2; n <= detail::kZetaTerms; ++n) {
      const double term = zeta_even(n) * (2.0 + 1.0 / n) * p;
      s += term;
      if (term < 1e-18 * s) break;
      p *= q;
    }
    return s;
  }
  return ln_H1(theta) - 0.5 * theta * theta;
}

/// ln psi_alpha(t) given ln t; finite wherever ln t is.
inline double ln_psi_from_log(const AlphaContext& c, double ln_t) {
  const double ln_l = ln_log1p_exp(-ln_t);  // ln ln(1 + 1/t)
  double r = log_add_exp(0.0, std::log(c.kappa2) - c.alpha * ln_l);
  if (c.kappa1 > 0.0) r = log_add_exp(r, std::log(c.kappa1) + ln_t + c.delta * ln_l);
  return r;
}

/// psi_alpha(t) given ln t.
inline double psi_from_log(const AlphaContext& c, double ln_t) { return std::exp(ln_psi_from_log(c, ln_t)); }

/// psi_alpha(t) = kappa1 t l^delta + kappa2 l^(-alpha) + 1, l = ln(1 + 1/t).
inline double psi_alpha(const AlphaContext& c, double t) {
  if (!(t > 0.0)) throw DomainError("psi_alpha: t must be positive");
  return psi_from_log(c, std::log(t));
}

}  // namespace fpss
