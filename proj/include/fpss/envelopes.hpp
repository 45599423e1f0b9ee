#pragma once

// Envelopes for truncated x^{c-1} e^{x} and x^{c-1} e^{-x}.
//
// PhiStar dominates phi(x) = x^{c-1} e^x on (a, b], c in (0, 1).
// GStar dominates g(x) = x^{c-1} e^{-x} on (a, b], c in (0, 2).
// Both expose a sampler, the log of the envelope density and its total mass.
// Masses are kept as logarithms; the right end of PhiStar can sit at b in
// the hundreds of thousands, where e^b is far outside double range.

#include <algorithm>
#include <array>
#include <cmath>

#include "fpss/elementary.hpp"
#include "fpss/special_functions.hpp"

namespace fpss {

/// A draw that may fall on the nonpositive half-line, where a caller's
/// target vanishes. ln_x is meaningful only when positive is true.
struct PosDraw {
  bool positive;
  double ln_x;
};

namespace detail {

// e^x - 1 - x
inline double exp_rem1(double x) {
  if (std::fabs(x) < 0.5) {
    double term = x * x / 2.0, s = 0.0;
    for (int k = 3; k < 30 && std::fabs(term) > 1e-18 * std::fabs(s); ++k) {
      s += term;
      term *= x / k;
    }
    return s;
  }
  return std::expm1(x) - x;
}

inline double ln_exp_rem1(double x) {
  if (x > 30.0) return x + std::log1p(-(1.0 + x) * std::exp(-x));
  return std::log(exp_rem1(x));
}

// x^e in log form with the convention 0^0 = 1.
inline double ln_pow(double x, double e) { return e == 0.0 ? 0.0 : e * std::log(x); }

// ln((b^c - a^c) / c), 0 <= a < b, c > 0.
inline double ln_pow_diff(double a, double b, double c) {
  if (a == 0.0) return c * std::log(b) - std::log(c);
  return c * std::log(a) + std::log(std::expm1(c * std::log(b / a))) - std::log(c);
}

inline double pow_diff(double a, double b, double c) { return std::exp(ln_pow_diff(a, b, c)); }

// e^a G(a, b, c)
inline double G_scaled(double a, double b, double c) {
  if (a >= b) return 0.0;
  if (b <= a + 1.0) return pow_diff(a, b, c);
  if (b <= a + 2.0) return pow_diff(a, a + 1.0, c) + std::exp(-1.0) * pow_diff(a + 1.0, b, c);
  const double base = pow_diff(a, a + 1.0, c) + std::exp(-1.0) * pow_diff(a + 1.0, a + 2.0, c);
  const double a2 = std::pow(a + 2.0, c - 1.0);
  if (c >= 1.0) {
    return base + 2.0 * (a2 * std::exp(-2.0) - std::pow(b, c - 1.0) * std::exp(-(b - a)));
  }
  return base + a2 * (std::exp(-2.0) - std::exp(-(b - a)));
}

}  // namespace detail

/// r_n(x) = sum_k (n+1)! x^k / (n+1+k)!
inline double r_n(int n, double x) {
  double term = 1.0, s = 0.0;
  for (int k = 0; k < 400; ++k) {
    s += term;
    term *= x / (n + 2 + k);
    if (term < 1e-18 * s) break;
  }
  return s;
}

/// ln M(a, b, c); -inf when a >= b.
inline double ln_M(double a, double b, double c) {
  if (a >= b) return kNegInf;
  using detail::ln_exp_rem1;
  const double shift = b > 30.0 ? b : 0.0;
  double s = std::exp(detail::ln_pow_diff(a, b, c) - shift);
  double d = std::exp((c - 1.0) * std::log(b) + ln_exp_rem1(b) - shift);
  if (a > 0.0) d -= std::exp((c - 1.0) * std::log(a) + ln_exp_rem1(a) - shift);
  return shift + std::log(s + 2.0 * d);
}

inline double M_abc(double a, double b, double c) { return std::exp(ln_M(a, b, c)); }

/// ln G(a, b, c); -inf when a >= b.
inline double ln_G(double a, double b, double c) {
  if (a >= b) return kNegInf;
  return std::log(detail::G_scaled(a, b, c)) - a;
}

inline double G_abc(double a, double b, double c) { return std::exp(ln_G(a, b, c)); }

class PhiStar {
 public:
  PhiStar(double a, double b, double c) : a_(a), b_(b), c_(c) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("PhiStar: c must lie in (0, 1)");
    if (!(a >= 0.0 && b > a)) throw DomainError("PhiStar: need 0 <= a < b");
    const double sq = std::sqrt(1.0 - c);
    p_ = 1.0 / (1.0 + sq);
    xc_ = (1.0 + sq) * (1.0 + sq);
    A_ = std::min(b, xc_);
    B_ = std::max(a, xc_);
    static const double r7 = r_n(7, 4.0);
    if (!(r7 <= 16.0 / 9.0)) throw DomainError("PhiStar: r_7(4) exceeds 16/9");
    r7_ = r7;
    has_left_ = A_ > a_;
    has_right_ = b_ > B_;
    ln_ML_ = has_left_ ? ln_M(a_, A_, c_) : kNegInf;
    ln_MR_ = has_right_ ? ln_M(B_, b_, c_) : kNegInf;
    if (has_left_) {
      double fact = 1.0;
      sum_w_ = 0.0;
      for (int k = 0; k <= 8; ++k) {
        if (k > 0) fact *= k;
        const double kc = k + c_;
        double diff = std::pow(A_, kc);
        if (a_ > 0.0) diff *= -std::expm1(kc * std::log(a_ / A_));
        w_[k] = diff / (kc * fact);
        if (k == 8) w_[k] *= r7_;
        sum_w_ += w_[k];
      }
    }
    if (has_right_) {
      ln_s_ = std::log(p_) + (c_ - 1.0 / p_) * std::log(b_) + b_ - ln_MR_;
      bp_ = std::exp(std::log(b_) / p_);
    }
    p_left_ = has_right_ ? 1.0 / (1.0 + std::exp(ln_MR_ - ln_ML_)) : 1.0;
  }

  PosDraw sample(RngStream& rng) const {
    if (rng.unif() < p_left_) {
      const std::size_t k = discrete_weighted(rng, w_);
      const double kc = double(k) + c_;
      const double u = rng.unif();
      double ln_u;
      if (a_ == 0.0) {
        ln_u = std::log(u);
      } else {
        ln_u = std::log1p(std::expm1(kc * std::log(a_ / A_)) * u);
      }
      return {true, std::log(A_) + ln_u / kc};
    }
    const double y = sample_E(rng, std::exp(ln_s_));
    const double d = bp_ - y;
    if (d <= 0.0) return {false, 0.0};
    return {true, p_ * std::log(d)};
  }

  /// ln(x^{1-c} phi*(x)) for x = exp(ln_x) > 0.
  double ln_eval_R(double ln_x) const {
    const double x = std::exp(ln_x);
    double out = kNegInf;
    if (has_left_ && x >= a_ && x <= A_) {
      double poly = 0.0, term = 1.0;
      for (int k = 0; k <= 7; ++k) {
        poly += term;
        term *= x / (k + 1);
      }
      poly += r7_ * term;
      out = kLn2 + ln_ML_ - std::log(sum_w_) + std::log(poly);
    }
    if (has_right_ && x <= b_) {
      const double y = std::max(0.0, bp_ - std::exp(ln_x / p_));
      const double r = kLn2 + ln_MR_ - std::log(p_) + (1.0 / p_ - c_) * ln_x + ln_E_density(ln_s_, y);
      out = log_add_exp(out, r);
    }
    return out;
  }

  /// ln phi*(x).
  double ln_eval(double ln_x) const { return ln_eval_R(ln_x) - (1.0 - c_) * ln_x; }

  /// ln of the total mass 2 (M(a, A, c) + M(B, b, c)).
  double ln_mass() const { return kLn2 + log_add_exp(ln_ML_, ln_MR_); }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double x_c() const { return xc_; }
  double p_c() const { return p_; }
  bool has_right() const { return has_right_; }
  double prob_left() const { return p_left_; }

 private:
  double a_, b_, c_;
  double p_ = 0, xc_ = 0, A_ = 0, B_ = 0, r7_ = 0;
  bool has_left_ = false, has_right_ = false;
  double ln_ML_ = kNegInf, ln_MR_ = kNegInf;
  std::array<double, 9> w_{};
  double sum_w_ = 0.0;
  double ln_s_ = 0.0, bp_ = 0.0;
  double p_left_ = 1.0;
};

class GStar {
 public:
  GStar(double a, double b, double c) : a_(a), b_(b), c_(c) {
    if (!(c > 0.0 && c < 2.0)) throw DomainError("GStar: c must lie in (0, 2)");
    if (!(a >= 0.0 && b > a)) throw DomainError("GStar: need 0 <= a < b");
    if (c_ >= 1.0) {
      A_ = std::min(b_, c_ - 1.0);
      B_ = std::max(a_, c_ - 1.0);
      if (A_ > a_) {
        ln_GL_ = ln_G(a_, A_, c_);
        ln_s_ = detail::ln_pow(A_, c_ - 1.0) - A_ - ln_GL_;
      }
      if (b_ > B_) {
        ln_GR_ = ln_G(B_, b_, c_);
        ln_t_ = detail::ln_pow(B_, c_ - 1.0) - B_ - ln_GR_;
      }
      p_left_ = ln_GR_ == kNegInf ? 1.0 : 1.0 / (1.0 + std::exp(ln_GR_ - ln_GL_));
    } else {
      ln_GL_ = ln_G(a_, b_, c_);
      ln_s_ = -a_ - std::log(c_) - ln_GL_;
    }
  }

  PosDraw sample(RngStream& rng) const {
    if (c_ >= 1.0) {
      double x;
      if (rng.unif() < p_left_) {
        x = A_ - sample_E(rng, std::exp(ln_s_));
      } else {
        x = B_ + sample_E(rng, std::exp(ln_t_));
      }
      if (x <= 0.0) return {false, 0.0};
      return {true, std::log(x)};
    }
    const double z = sample_E(rng, std::exp(ln_s_));
    if (a_ > 0.0) {
      return {true, std::log(a_) + std::log1p(z * std::exp(-c_ * std::log(a_))) / c_};
    }
    return {true, std::log(z) / c_};
  }

  /// ln g*(x) for x = exp(ln_x) > 0.
  double ln_eval(double ln_x) const {
    const double x = std::exp(ln_x);
    if (c_ >= 1.0) {
      double out = kNegInf;
      if (ln_GL_ != kNegInf && x <= A_) out = kLn2 + ln_GL_ + ln_E_density(ln_s_, A_ - x);
      if (ln_GR_ != kNegInf && x > B_) {
        out = log_add_exp(out, kLn2 + ln_GR_ + ln_E_density(ln_t_, x - B_));
      }
      return out;
    }
    if (x < a_) return kNegInf;
    double arg;
    if (a_ > 0.0) {
      arg = std::exp(c_ * std::log(a_)) * std::expm1(c_ * (ln_x - std::log(a_)));
    } else {
      arg = std::exp(c_ * ln_x);
    }
    return kLn2 + std::log(c_) + ln_GL_ + (c_ - 1.0) * ln_x + ln_E_density(ln_s_, arg);
  }

  /// ln of the total mass.
  double ln_mass() const { return kLn2 + log_add_exp(ln_GL_, ln_GR_); }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double A() const { return A_; }
  double B() const { return B_; }

 private:
  double a_, b_, c_;
  double A_ = 0, B_ = 0;
  double ln_GL_ = kNegInf, ln_GR_ = kNegInf;
  double ln_s_ = 0, ln_t_ = 0;
  double p_left_ = 1.0;
};

}  // namespace fpss
