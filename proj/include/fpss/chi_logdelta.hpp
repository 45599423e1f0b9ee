#pragma once

// Sampler for the normalized chi density whose cost does not grow as
// alpha -> 1 and z -> 0. It works on v = ln(1 + y), drawing theta from the
// marginal Q(theta) = psi(z H(theta)) e^{-z H(theta)} through a piecewise
// envelope built on a node grid, then v given theta from a three-part
// mixture. Requires alpha >= alpha0 and z <= 1.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "fpss/chi_simple.hpp"
#include "fpss/elementary.hpp"
#include "fpss/envelopes.hpp"
#include "fpss/monitor.hpp"
#include "fpss/special_functions.hpp"

namespace fpss {

struct QGridConfig {
  double Delta = 0.5;
  double alpha0 = 2.0 / 3.0;
  double theta0 = 6.0 * kPi / 7.0;

  void validate() const {
    if (!(Delta > 0.0 && Delta < 1.0)) throw DomainError("grid config: Delta must lie in (0, 1)");
    if (!(alpha0 > 0.5 && alpha0 < 1.0)) throw DomainError("grid config: alpha0 must lie in (1/2, 1)");
    const double lo = kPi / 3.0 + kPi / (3.0 * alpha0);
    if (!(theta0 > lo && theta0 < kPi)) throw DomainError("grid config: theta0 out of range");
  }
};

/// Nodes 0 = t_0 < ... < t_{m+1} = theta0 on which H_1 grows by at most 1 + Delta.
inline std::vector<double> build_t_nodes(const QGridConfig& cfg) {
  cfg.validate();
  auto f = [](double th) {
    const double s = sinc(th);
    return 1.0 + 1.0 / (s * s) - 2.0 * std::cos(th) / s;
  };
  std::vector<double> T{cfg.theta0};
  const double l = std::log1p(cfg.Delta);
  for (;;) {
    const double next = std::max(0.0, T.back() * (1.0 - l / f(T.back())));
    T.push_back(next);
    if (next == 0.0) break;
  }
  std::reverse(T.begin(), T.end());
  return T;
}

/// Nodes theta0 = theta_0 < ... < theta_N < pi.
inline std::vector<double> build_theta_nodes(const QGridConfig& cfg, const AlphaContext& c) {
  cfg.validate();
  const double x = kPi - cfg.alpha0 * cfg.theta0;
  const double sx = std::sin(x);
  const double C = kPi * (1.0 / (sx * sx) - 1.0 / (x * x));
  const double eps = std::log((1.0 + cfg.Delta) / (1.0 + 0.5 * cfg.Delta)) / C;
  const double h = 0.5 * cfg.Delta;
  std::vector<double> th{cfg.theta0};
  for (;;) {
    const double t = th.back();
    const double g = (1.0 + h) * t / (1.0 + c.alpha * h * t / kPi);
    const double next = std::min({kPi, g, t + eps});
    if (next >= kPi) break;
    th.push_back(next);
  }
  return th;
}

/// Grid nodes for one alpha, with H and XI evaluated at each node.
struct QNodes {
  QGridConfig cfg;
  AlphaContext ctx;
  std::vector<double> t, ln_H_t;
  std::vector<double> theta, ln_H_theta, ln_XI_theta, u_theta;

  QNodes(const QGridConfig& config, const AlphaContext& c) : cfg(config), ctx(c) {
    cfg.validate();
    if (c.alpha < cfg.alpha0) throw DomainError("log-delta sampler requires alpha >= alpha0");
    t = build_t_nodes(cfg);
    for (double x : t) ln_H_t.push_back(ln_H(ctx, x));
    theta = build_theta_nodes(cfg, ctx);
    for (double x : theta) {
      ln_H_theta.push_back(ln_H(ctx, x));
      ln_XI_theta.push_back(ln_XI(ctx, x));
      u_theta.push_back(pi_minus(x));
    }
  }
  int m() const { return int(t.size()) - 2; }
  int N() const { return int(theta.size()) - 1; }
};

/// Cached nodes per (config, alpha); one cache per thread.
inline std::shared_ptr<const QNodes> q_nodes(const QGridConfig& cfg, const AlphaContext& c) {
  using Key = std::tuple<double, double, double, double>;
  thread_local std::map<Key, std::shared_ptr<const QNodes>> cache;
  const Key k{cfg.Delta, cfg.alpha0, cfg.theta0, c.alpha};
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  if (cache.size() > 256) cache.clear();
  auto p = std::make_shared<const QNodes>(cfg, c);
  cache.emplace(k, p);
  return p;
}

/// Envelope of Q restricted to one I_n interval, in the t = lambda(theta) scale.
struct IBlock {
  int n;
  double lo, hi;   // theta range [theta_n, min(theta_{n+1}, vartheta))
  double c, d;     // lambda image (c, d]
  bool low;        // theta_n <= (1 - delta/alpha) pi
  double ln_pi;
  double ln_k1, ln_k2;
  double ln_m1, ln_m2, ln_m3;
  double ln_weight;  // ln of (1 + Delta) pi_n (m1 + m2 + m3)
  double ln_XI_n;
  std::optional<GStar> g1;
  std::optional<GStar> g2;
  std::optional<PhiStar> phi2;
};

struct QInterval {
  enum Kind { E, D, I } kind;
  int index;
  double lo, hi;
  double weight;
};

class QGrid {
 public:
  QGrid(std::shared_ptr<const QNodes> nodes, double ln_z) : nodes_(std::move(nodes)), ln_z_(ln_z) {
    if (!(ln_z <= 0.0)) throw DomainError("log-delta sampler requires z <= 1");
    build();
  }

  const QNodes& nodes() const { return *nodes_; }
  double ln_z() const { return ln_z_; }
  double vartheta() const { return vartheta_; }
  double ln_tau_z() const { return ln_tau_z_; }
  double rho_z() const { return rho_z_; }
  double omega_z() const { return std::exp(ln_omega_); }
  double s_z() const { return std::exp(ln_s_); }
  const std::vector<QInterval>& intervals() const { return intervals_; }
  const std::vector<IBlock>& blocks() const { return blocks_; }

  /// ln Q(theta).
  double ln_Q(double theta) const {
    const double ln_tau = ln_z_ + ln_H(nodes_->ctx, theta);
    if (ln_tau > 700.0) return kNegInf;
    return ln_psi_from_log(nodes_->ctx, ln_tau) - std::exp(ln_tau);
  }

  /// ln of the envelope at theta for interval k (id into intervals()).
  double ln_envelope(std::size_t k, double theta) const {
    const QInterval& iv = intervals_[k];
    if (iv.kind == QInterval::E) {
      const double zz = theta - vartheta_;
      return ln_omega_ + ln_E_density(ln_s_, zz);
    }
    if (iv.kind == QInterval::D) {
      return iv.lo <= theta && theta < iv.hi ? std::log(d_env_[iv.index]) : kNegInf;
    }
    const IBlock& b = blocks_[iv.index];
    if (!(theta >= b.lo && theta < b.hi)) return kNegInf;
    const double t = lambda(b, theta);
    return std::log1p(nodes_->cfg.Delta) + ln_Pn(b, t) + ln_abs_dlambda(b, theta, t);
  }

  /// theta drawn from the normalized Q.
  double sample(RngStream& rng, std::uint64_t* proposals = nullptr) const {
    for (std::uint64_t it = 0; it < kMaxOuterIterations; ++it) {
      if (proposals) ++*proposals;
      const std::size_t k = discrete_weighted(rng, weights_);
      const QInterval& iv = intervals_[k];
      double theta, ln_env;
      if (iv.kind == QInterval::E) {
        const double zz = sample_E(rng, std::exp(ln_s_));
        if (zz >= u_vartheta_) continue;
        theta = vartheta_ + zz;
        if (theta >= kPi) continue;
        ln_env = ln_omega_ + ln_E_density(ln_s_, zz);
      } else if (iv.kind == QInterval::D) {
        theta = iv.lo + (iv.hi - iv.lo) * rng.unif();
        ln_env = std::log(d_env_[iv.index]);
      } else {
        const IBlock& b = blocks_[iv.index];
        const double t = sample_Pn(rng, b);
        if (!(t > b.c && t <= b.d)) continue;
        theta = lambda_inv(b, t);
        if (!(theta >= b.lo && theta < b.hi)) continue;
        ln_env = std::log1p(nodes_->cfg.Delta) + ln_Pn(b, t) + ln_abs_dlambda(b, theta, t);
      }
      const double ratio = std::exp(ln_Q(theta) - ln_env);
      ar_monitor().record(ratio, "Q");
      if (rng.unif() <= ratio) return theta;
    }
    detail::iteration_cap("QGrid::sample");
  }

  /// Normalized P*_n draw in the t scale, for testing.
  double sample_Pn(RngStream& rng, const IBlock& b) const {
    const double dl = nodes_->ctx.delta, al = nodes_->ctx.alpha;
    const double mx = std::max({b.ln_m1, b.ln_m2, b.ln_m3});
    const double w[3] = {std::exp(b.ln_m1 - mx), std::exp(b.ln_m2 - mx), std::exp(b.ln_m3 - mx)};
    const std::size_t i = discrete_weighted(rng, w);
    if (i == 0) {
      const PosDraw x = b.g1->sample(rng);
      if (!x.positive) return kNegInf;
      return std::exp(x.ln_x) / (b.low ? 1.0 + dl : al);
    }
    if (i == 1) {
      const PosDraw x = b.low ? b.g2->sample(rng) : b.phi2->sample(rng);
      if (!x.positive) return kNegInf;
      return std::exp(x.ln_x) / dl;
    }
    const double u = rng.unif();
    if (b.low) return b.c - std::log1p(u * std::expm1(-dl * (b.d - b.c))) / dl;
    return b.c + std::log1p(u * std::expm1(dl * (b.d - b.c))) / dl;
  }

  /// ln P*_n(t).
  double ln_Pn(const IBlock& b, double t) const {
    const double dl = nodes_->ctx.delta, al = nodes_->ctx.alpha;
    const double lt = std::log(t);
    double s = kNegInf;
    if (b.ln_k1 != kNegInf) {
      s = b.ln_k1 + b.g1->ln_eval(lt + (b.low ? std::log1p(dl) : std::log(al)));
    }
    const double x2 = lt + std::log(dl);
    s = log_add_exp(s, b.ln_k2 + (b.low ? b.g2->ln_eval(x2) : b.phi2->ln_eval(x2)));
    if (t > b.c && t <= b.d) s = log_add_exp(s, b.low ? -dl * t : dl * t);
    return b.ln_pi + s;
  }

  /// theta with lambda(b, theta) = t, for t in (c, d].
  double lambda_inv(const IBlock& b, double t) const {
    const AlphaContext& c = nodes_->ctx;
    const double u = (c.delta * kPi / c.alpha) / std::expm1(-c.delta * (ln_z_ + b.ln_XI_n + ln_expm1(t)));
    return kPi - u;
  }

  /// ln(1/(z J(theta))) mapped through l; decreasing in theta on a block.
  double lambda(const IBlock& b, double theta) const {
    const AlphaContext& c = nodes_->ctx;
    const double u = pi_minus(theta);
    const double ln_zJ = ln_z_ + b.ln_XI_n + std::log1p(c.delta * kPi / (c.alpha * u)) / c.delta;
    return softplus(-ln_zJ);
  }

 private:
  double ln_abs_dlambda(const IBlock& b, double theta, double t) const {
    (void)b;
    const AlphaContext& c = nodes_->ctx;
    const double u = pi_minus(theta);
    return std::log(kPi) + std::log(-std::expm1(-t)) - std::log(u) - std::log(u + c.delta * theta);
  }

  void build() {
    const QNodes& nd = *nodes_;
    const AlphaContext& c = nd.ctx;
    const double a = c.alpha, d = c.delta;
    const double Delta = nd.cfg.Delta;
    const double minus_ln_z = -ln_z_;
    const int m = nd.m(), N = nd.N();

    // vartheta_z
    if (minus_ln_z <= nd.ln_H_theta[0]) {
      int i = 0;
      while (i <= m + 1 && nd.ln_H_t[i] < minus_ln_z) ++i;
      i = std::min(i, m + 1);
      vartheta_ = nd.t[i];
      u_vartheta_ = pi_minus(vartheta_);
    } else {
      int i = 0;
      while (i + 1 <= N && nd.ln_H_theta[i + 1] <= minus_ln_z) ++i;
      const double e = std::expm1(-d * (ln_z_ + nd.ln_XI_theta[i]));
      double u = (d * kPi / a) / e;
      if (i < N && kPi - u > nd.theta[i + 1]) {
        vartheta_ = nd.theta[i + 1];
        u_vartheta_ = nd.u_theta[i + 1];
      } else {
        vartheta_ = kPi - u;
        u_vartheta_ = u;
      }
    }

    // E = [vartheta, pi)
    ln_tau_z_ = ln_z_ + ln_H(c, vartheta_);
    rho_z_ = dln_H(c, vartheta_);
    const double tau_z = std::exp(ln_tau_z_);
    const double ln_k3 = std::log(c.kappa3);
    const double ln_D = ln_k3 + a * ln_tau_z_ - tau_z;
    double ln_A = std::log(u_vartheta_) + ln_D;
    if (rho_z_ > 0.0) ln_A = std::min(ln_A, ln_k3 - ln_tau_z_ - std::log(rho_z_));
    ln_omega_ = kLn2 + ln_A;
    ln_s_ = ln_D - ln_A;
    intervals_.push_back({QInterval::E, 0, vartheta_, kPi, std::exp(ln_omega_)});

    // D_i
    d_env_.assign(m + 1, 0.0);
    for (int i = 0; i <= m; ++i) {
      d_env_[i] = (1.0 + Delta) * psi_from_log(c, ln_z_ + nd.ln_H_t[i]);
      const double lo = std::min(nd.t[i], vartheta_), hi = std::min(nd.t[i + 1], vartheta_);
      if (hi > lo) intervals_.push_back({QInterval::D, i, lo, hi, d_env_[i] * (hi - lo)});
    }

    // I_n
    for (int n = 0; n <= N; ++n) {
      if (!(nd.theta[n] < vartheta_)) break;
      IBlock b = make_block(n);
      const int id = int(blocks_.size());
      blocks_.push_back(std::move(b));
      const IBlock& bb = blocks_.back();
      intervals_.push_back({QInterval::I, id, bb.lo, bb.hi, std::exp(bb.ln_weight)});
    }
    for (const auto& iv : intervals_) weights_.push_back(iv.weight);
  }

  IBlock make_block(int n) const {
    const QNodes& nd = *nodes_;
    const AlphaContext& c = nd.ctx;
    const double a = c.alpha, d = c.delta;
    IBlock b;
    b.n = n;
    b.lo = nd.theta[n];
    const bool upper_inside = n < nd.N() && nd.theta[n + 1] <= vartheta_;
    b.hi = upper_inside ? nd.theta[n + 1] : vartheta_;
    b.ln_XI_n = nd.ln_XI_theta[n];
    const double ln_zXI = ln_z_ + b.ln_XI_n;
    b.d = softplus(-(ln_z_ + nd.ln_H_theta[n]));
    if (upper_inside) {
      const double ln_zJ = ln_zXI + std::log1p(d * kPi / (a * nd.u_theta[n + 1])) / d;
      b.c = softplus(-ln_zJ);
    } else {
      b.c = kLn2;
    }
    const double an = 1.0 / std::expm1(b.c);
    const double bn = d * kPi / (kPi - a * b.lo);
    b.low = b.lo <= (1.0 - d / a) * kPi;
    const double ln_1pa = std::log1p(an);
    if (b.low) {
      b.ln_pi = 2.0 * ln_1pa + std::log(a) + 2.0 * std::log(nd.u_theta[n]) - std::log(kPi) - d * ln_zXI;
    } else {
      b.ln_pi = 2.0 * ln_1pa + 2.0 * std::log(d) + std::log(kPi) + d * ln_zXI - std::log(a) -
                2.0 * std::log(bn);
    }
    const double ln_k1_base = std::log(c.kappa1);
    b.ln_k2 = std::log(c.kappa2) + a * std::log(d);
    if (b.low) {
      b.g1.emplace((1.0 + d) * b.c, (1.0 + d) * b.d, 1.0 + d);
      b.g2.emplace(d * b.c, d * b.d, d);
      b.ln_k1 = -d * std::log1p(d) + ln_1pa + ln_k1_base;
      b.ln_m1 = b.ln_k1 + b.g1->ln_mass() - std::log1p(d);
      b.ln_m2 = b.ln_k2 + b.g2->ln_mass() - std::log(d);
      b.ln_m3 = -d * b.c + std::log(-std::expm1(-d * (b.d - b.c))) - std::log(d);
    } else {
      b.g1.emplace(a * b.c, a * b.d, 1.0 + d);
      b.phi2.emplace(d * b.c, d * b.d, d);
      b.ln_k1 = -d * std::log(a) + ln_k1_base;
      b.ln_m1 = b.ln_k1 + b.g1->ln_mass() - std::log(a);
      b.ln_m2 = b.ln_k2 + b.phi2->ln_mass() - std::log(d);
      b.ln_m3 = d * b.c + std::log(std::expm1(d * (b.d - b.c))) - std::log(d);
    }
    const double mx = std::max({b.ln_m1, b.ln_m2, b.ln_m3});
    const double sum = std::exp(b.ln_m1 - mx) + std::exp(b.ln_m2 - mx) + std::exp(b.ln_m3 - mx);
    b.ln_weight = std::log1p(nd.cfg.Delta) + b.ln_pi + mx + std::log(sum);
    return b;
  }

  std::shared_ptr<const QNodes> nodes_;
  double ln_z_;
  double vartheta_ = 0, u_vartheta_ = kPi;
  double ln_tau_z_ = 0, rho_z_ = 0;
  double ln_omega_ = 0, ln_s_ = 0;
  std::vector<double> d_env_;
  std::vector<IBlock> blocks_;
  std::vector<QInterval> intervals_;
  std::vector<double> weights_;
};

/// Sampler P: chi via v = ln(1 + y), theta from the normalized Q.
class ChiLogDeltaSampler {
 public:
  ChiLogDeltaSampler(const ChiParams& p, const QGridConfig& cfg = {})
      : ctx_(p.ctx), ln_z_(p.ln_z), grid_(q_nodes(cfg, p.ctx), p.ln_z) {}

  const QGrid& grid() const { return grid_; }

  ChiSample sample(RngStream& rng) const {
    const double a = ctx_.alpha, d = ctx_.delta;
    const double ln_ca = ctx_.ln_c_alpha;
    ChiSample out{};
    for (out.outer = 1; out.outer <= kMaxOuterIterations; ++out.outer) {
      const double theta = grid_.sample(rng, &out.inner);
      const double u = rng.unif();
      const double ln_tau = ln_z_ + ln_H(ctx_, theta);
      const double tau = std::exp(ln_tau);
      const double ln_b = ln_log1p_exp(-ln_tau);  // ln l(1/tau)
      const double b = std::exp(ln_b);
      // weights tau I_0, tau I_1, tau I_2, in logs and scaled by the largest
      const double lw0 = log_add_exp(std::log(4.0) - a * ln_b, std::log(2.0 / d - 4.0) + ln_tau + d * ln_b);
      const double lw1 = -1.0 - a * ln_b;
      const double lw2 = -ln_ca;
      const double mx = std::max({lw0, lw1, lw2});
      const double w[3] = {std::exp(lw0 - mx), std::exp(lw1 - mx), std::exp(lw2 - mx)};
      const std::size_t i = discrete_weighted(rng, w);
      std::optional<PhiStar> phi;
      double ln_v;
      if (i == 0) {
        phi.emplace(0.0, b, d);
        const PosDraw v = phi->sample(rng);
        if (!v.positive) continue;
        ln_v = v.ln_x;
      } else {
        const double xi = exp1(rng);
        ln_v = ln_log1p_exp(std::log(xi + 2.0 - double(i)) - ln_tau);
      }
      const double v = std::exp(ln_v);  // may underflow to 0; ln_v stays exact
      const double ln_y = ln_expm1_from_log(ln_v);
      // numerator and denominator of the acceptance ratio
      const double q = d * v / a;
      const double ln_num = -a + a * std::log(expm1_ratio(-q));
      if (!phi) phi.emplace(0.0, b, d);
      const double ln_r = phi->ln_eval_R(ln_v);
      double ln_den = ln_r == kNegInf ? kNegInf : std::exp(ln_tau + ln_y) - v + ln_r;
      const double ln_tail = v >= b ? log_add_exp(-a * ln_b, -ln_ca) : -ln_ca;
      ln_den = log_add_exp(ln_den, ln_tail + a * ln_v);
      const double ratio = std::exp(ln_num - ln_den);
      ar_monitor().record(ratio, "chi_P");
      if (u <= ratio) {
        out.ln_y = ln_y;
        out.theta = theta;
        return out;
      }
    }
    detail::iteration_cap("sample_chi_P");
  }

 private:
  AlphaContext ctx_;
  double ln_z_;
  QGrid grid_;
};

inline ChiSample sample_chi_P(RngStream& rng, const ChiParams& p, const QGridConfig& cfg = {}) {
  return ChiLogDeltaSampler(p, cfg).sample(rng);
}

}  // namespace fpss
