#pragma once

// Kolmogorov-Smirnov statistics. D is exact from sorted samples; the
// p-value is the asymptotic Kolmogorov tail at
// lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) D.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "fpss/special_functions.hpp"

namespace fpss {

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double s = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += sign * term;
    if (term < 1e-17 * std::fabs(s) || term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

inline double ks_p_value(double d, double ne) {
  const double r = std::sqrt(ne);
  return kolmogorov_q((r + 0.12 + 0.11 / r) * d);
}

inline KSResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) throw DomainError("ks_two_sample: need at least 2 points each");
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  KSResult r;
  r.statistic = d;
  r.n1 = a.size();
  r.n2 = b.size();
  r.p_value = ks_p_value(d, na * nb / (na + nb));
  return r;
}

inline KSResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf) {
  if (x.size() < 2) throw DomainError("ks_one_sample: need at least 2 points");
  std::vector<double> a(x.begin(), x.end());
  std::sort(a.begin(), a.end());
  const double n = double(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    if (!(f >= 0.0 && f <= 1.0)) throw DomainError("ks_one_sample: cdf outside [0, 1]");
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  KSResult r;
  r.statistic = d;
  r.n1 = a.size();
  r.p_value = ks_p_value(d, n);
  return r;
}

}  // namespace fpss
