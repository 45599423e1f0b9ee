// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fpss/harness.hpp"
#include "oracle.hpp"

using namespace fpss;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double x, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

// Each sampler in its own regime; P needs alpha >= alpha0 and z <= 1.
bool p_applicable(double alpha, double ln_z) { return alpha >= QGridConfig{}.alpha0 && ln_z <= 0.0; }

TimedDraws draws(const ChiParams& p, ChiAlgorithm alg, std::size_t n, RngStream& base,
                 double deadline = kInf) {
  base.jump();
  RngStream r = base;
  return timed_draws(p, alg, n, r, deadline);
}

Outcome c1_cross_algorithm() {
  const CompareSpec s{{0.1, 0.3, 0.5, 0.7, 0.9},
                      {std::log(0.1), std::log(0.3), 0.0, std::log(2.0), std::log(4.0)},
                      500,
                      ChiAlgorithm::A,
                      ChiAlgorithm::B,
                      50,
                      1001};
  const auto rows = run_compare(s);
  int low_y = 0, low_t = 0;
  for (const auto& r : rows) {
    low_y += r.ks_ln_y.p_value < 0.05;
    low_t += r.ks_theta.p_value < 0.05;
  }
  const double n = double(rows.size());
  const double fy = low_y / n, ft = low_t / n;
  const bool ok = std::fabs(fy - 0.05) <= 0.03 && std::fabs(ft - 0.05) <= 0.03;
  return {ok, "A vs B, " + std::to_string(rows.size()) + " tests per marginal, fraction p<0.05: ln y " +
                  num(fy) + ", theta " + num(ft) + " (band 0.05 +- 0.03)"};
}

Outcome c2_extreme() {
  RngStream base(1002);
  bool ok = true;
  std::string d;
  for (double a : {0.995, 0.9995}) {
    for (double ln_z : {-25.0 * std::log(10.0), -50.0 * std::log(10.0)}) {
      const ChiParams p(a, ln_z);
      const TimedDraws b = draws(p, ChiAlgorithm::B, 10000, base);
      const TimedDraws q = draws(p, ChiAlgorithm::P, 10000, base);
      const double py = ks_two_sample(b.ln_y, q.ln_y).p_value;
      const double pt = ks_two_sample(b.theta, q.theta).p_value;
      ok = ok && py > 0.001 && pt > 0.001;
      d += " (" + num(a) + ",1e" + num(ln_z / std::log(10.0), 3) + "): p_lny " + num(py, 3) + " p_theta " +
           num(pt, 3) + ";";
    }
  }
  return {ok, "B vs P n=1e4," + d};
}

Outcome c3_oracle() {
  RngStream base(1003);
  bool ok = true;
  std::string d;
  struct Cell {
    double a, ln_z, lo, hi;
    int points;
  };
  for (const Cell c : {Cell{0.5, 0.0, -100.0, 6.0, 2000}, Cell{0.9, std::log(0.1), -400.0, 8.0, 4000}}) {
    const oracle::ChiMarginals m(c.a, c.ln_z, c.lo, c.hi, 2048, c.points);
    const ChiParams p(c.a, c.ln_z);
    for (ChiAlgorithm alg : {ChiAlgorithm::A, ChiAlgorithm::B, ChiAlgorithm::P}) {
      const std::string tag = " " + std::string(to_string(alg)) + "@(" + num(c.a) + "," + num(std::exp(c.ln_z)) + ")";
      if (alg == ChiAlgorithm::P && !p_applicable(c.a, c.ln_z)) {
        d += tag + ": n/a (alpha below alpha0);";
        continue;
      }
      const TimedDraws t = draws(p, alg, 10000, base);
      const double pt = ks_one_sample(t.theta, [&](double v) { return m.theta_cdf(v); }).p_value;
      // x = (1 + y)^{-delta/alpha} is monotone in ln y, so the KS statistic is the same
      const double px =
          ks_one_sample(t.ln_y, [&](double v) { return m.ln_y_cdf(std::clamp(v, c.lo, c.hi)); }).p_value;
      ok = ok && pt > 0.001 && px > 0.001;
      d += tag + ": p_theta " + num(pt, 3) + " p_x " + num(px, 3) + ";";
    }
  }
  return {ok, "n=1e4," + d};
}

Outcome c4_grid_scaling() {
  QGridConfig cfg;
  cfg.Delta = 0.5;
  cfg.alpha0 = 2.0 / 3.0;
  cfg.theta0 = 6.0 * kPi / 7.0;
  const double ln_z = -50.0 * std::log(10.0);
  std::vector<double> ks, counts, used, props;
  RngStream base(1004);
  for (int k = 2; k <= 12; ++k) {
    const AlphaContext ctx(1.0 - std::pow(10.0, -k));
    const ChiLogDeltaSampler P(ChiParams(ctx, ln_z), cfg);
    ks.push_back(k);
    // D_0..D_m, I_0..I_N and E; the list built at one z stops at vartheta
    counts.push_back(double(P.grid().nodes().m() + P.grid().nodes().N() + 3));
    used.push_back(double(P.grid().intervals().size()));
    base.jump();
    RngStream r = base;
    const int n = 2000;
    std::uint64_t outer = 0;
    for (int i = 0; i < n; ++i) outer += P.sample(r).outer;
    props.push_back(outer / double(n));
  }
  const double n = double(ks.size());
  const double mk = std::accumulate(ks.begin(), ks.end(), 0.0) / n;
  const double mc = std::accumulate(counts.begin(), counts.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    sxy += (ks[i] - mk) * (counts[i] - mc);
    sxx += (ks[i] - mk) * (ks[i] - mk);
    syy += (counts[i] - mc) * (counts[i] - mc);
  }
  const double b = sxy / sxx, a = mc - b * mk;
  const double r2 = sxy * sxy / (sxx * syy);
  const auto [pmin, pmax] = std::minmax_element(props.begin(), props.end());
  const double spread = *pmax / *pmin;
  std::string d = "intervals k=2..12:";
  for (double c : counts) d += " " + num(c);
  d += "; instantiated at z=1e-50:";
  for (double c : used) d += " " + num(c);
  d += "; fit " + num(a) + " + " + num(b) + " k, R^2 " + num(r2, 6) + "; mean proposals " + num(*pmin) + ".." +
       num(*pmax) + " (ratio " + num(spread) + ")";
  return {r2 > 0.99 && spread < 3.0, d};
}

Outcome c5_timing() {
  RngStream base(1005);
  const std::size_t n = 20000;
  const double deadline = 30.0;
  auto per_draw = [](const TimedDraws& t) { return t.seconds / double(t.ln_y.size()); };
  auto note = [](const TimedDraws& t) { return t.censored ? "*" : ""; };
  bool ok = true;
  std::string d = "z=4 A/B time:";
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const ChiParams p(a, std::log(4.0));
    const TimedDraws ta = draws(p, ChiAlgorithm::A, n, base, deadline);
    const TimedDraws tb = draws(p, ChiAlgorithm::B, n, base, deadline);
    const double r = per_draw(ta) / per_draw(tb);
    ok = ok && r < 1.0;
    d += " " + num(a) + ":" + num(r, 3) + note(ta) + note(tb);
  }
  {
    const ChiParams p(0.905, std::log(1e-4));
    const TimedDraws ta = draws(p, ChiAlgorithm::A, n, base, deadline);
    const TimedDraws tb = draws(p, ChiAlgorithm::B, n, base, deadline);
    const double r = per_draw(ta) / per_draw(tb);
    ok = ok && r >= 10.0;
    d += "; (0.905,1e-4) A/B " + num(r) + note(ta) + note(tb) + " (need >= 10)";
  }
  {
    const ChiParams p(0.9995, -50.0 * std::log(10.0));
    const TimedDraws tb = draws(p, ChiAlgorithm::B, n, base, deadline);
    const TimedDraws tp = draws(p, ChiAlgorithm::P, n, base, deadline);
    const double r = per_draw(tp) / per_draw(tb);
    ok = ok && r < 1.0;
    d += "; (0.9995,1e-50) P/B " + num(r) + note(tp) + note(tb) + " (need < 1)";
  }
  return {ok, d + "; * = censored at " + num(deadline) + " s, per-draw time from draws done"};
}

Outcome c6_z_tail() {
  const AlphaContext c(0.999);
  const double ln_z0 = -50.0 * std::log(10.0);
  RngStream r(1006);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += draw_z(r, c).ln_z <= ln_z0;
  const double p = hits / double(n);
  // P(xi <= z0 H(Theta)) = (1/pi) int (1 - exp(-z0 H)) dtheta
  const double exact = oracle::integrate(
                           [&](double t) { return -std::expm1(-std::exp(ln_z0 + oracle::ln_H_direct(0.999, t))); },
                           0.0, kPi, 15, 1e-12) /
                       kPi;
  const bool ok = std::fabs(p - 0.022) <= 0.003;
  return {ok, "empirical P(z <= 1e-50) " + num(p, 5) + " (se " + num(std::sqrt(p * (1 - p) / n), 2) +
                  "), quadrature " + num(exact, 5) + ", target 0.022 +- 0.003"};
}

Outcome c7_dominance() {
  ArMonitor& m = ar_monitor();
  m.reset();
  m.strict = false;
  RngStream base(1007);
  const std::vector<double> alphas{0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.995, 0.9995, 1.0 - 1e-6};
  const std::vector<double> zs_log10{-50, -25, -10, -4, -1, std::log10(0.3), 0, std::log10(2.0), std::log10(4.0)};
  int cells = 0;
  while (m.proposals < 1000000) {
    for (double a : alphas) {
      for (double lz10 : zs_log10) {
        const double ln_z = lz10 * std::log(10.0);
        const ChiParams p(a, ln_z);
        std::vector<ChiAlgorithm> algs;
        if (ln_z >= std::log(0.1)) algs.push_back(ChiAlgorithm::A);
        if (ln_z <= std::log(4.0)) algs.push_back(ChiAlgorithm::B);
        if (p_applicable(a, ln_z)) algs.push_back(ChiAlgorithm::P);
        for (ChiAlgorithm alg : algs) {
          try {
            draws(p, alg, 2000, base, 2.0);
          } catch (const std::exception& e) {
            throw SamplerError(std::string(to_string(alg)) + " at alpha " + num(a, 17) + ", ln z " + num(ln_z, 17) +
                               ": " + e.what());
          }
          ++cells;
        }
      }
      // first passage chains in the gamma and sample_m draws as well
      base.jump();
      RngStream r = base;
      const AlphaContext ctx(a);
      for (const Barrier& bar : {barrier_constant(a, 10.0), barrier_powcap(a, 3.0)}) {
        try {
          for (int i = 0; i < 500; ++i) sample_first_passage(r, ctx, bar);
        } catch (const std::exception& e) {
          throw SamplerError("first passage, " + bar.family + " at alpha " + num(a, 17) + ": " + e.what());
        }
      }
    }
  }
  const bool ok = m.violations == 0;
  return {ok, std::to_string(m.proposals) + " proposals over " + std::to_string(cells) + " sampler cells, " +
                  std::to_string(m.violations) + " ratios above 1+1e-10, max ratio " + num(m.max_ratio, 17) +
                  (m.worst_site.empty() ? "" : " at " + m.worst_site)};
}

Outcome c8_first_passage() {
  const double a = 0.5, b0 = 10.0;
  const AlphaContext c(a);
  const Barrier bar = barrier_constant(a, b0);
  RngStream r(1008);
  std::vector<double> ln_t, ln_w;
  for (int i = 0; i < 10000; ++i) {
    const FirstPassage f = sample_first_passage(r, c, bar);
    ln_t.push_back(std::log(f.tau_time));
    ln_w.push_back(f.ln_jump - std::log(b0) - f.ln_1m_x);
  }
  // P(tau <= t) = P(S_t >= b0)
  const double pt =
      ks_one_sample(ln_t, [&](double v) { return 1.0 - oracle::stable_cdf(a, b0 * std::exp(-v / a)); }).p_value;
  const double pw = ks_one_sample(ln_w, [&](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-a * v); }).p_value;
  return {pt > 0.001 && pw > 0.001, "n=1e4, tau vs stable oracle p " + num(pt, 3) + ", jump Pareto p " + num(pw, 3)};
}

Outcome c9_stability() {
  struct Ref {
    std::string name;
    double got;
    long double ref;
  };
  const AlphaContext c(1.0 - 1e-12);
  const std::vector<Ref> refs{
      {"one_minus_pow(1e-20,0.5)", one_minus_pow(1e-20, 0.5), 4.9999999999999997257288572710478582627613356548712e-21L},
      {"one_minus_pow(1e-8,1e-12)", one_minus_pow(1e-8, 1e-12), 9.9999999500000003413754143410857792887173356515096e-21L},
      {"one_minus_pow(3.5,2)", one_minus_pow(3.5, 2.0), 0.95061728395061728395061728395061728395061728395062L},
      {"one_minus_pow(1000,1e-4)", one_minus_pow(1000.0, 1e-4), 0.00069063687841919925249897097333771408590293903818706L},
      {"one_minus_pow(0.25,1e-9)", one_minus_pow(0.25, 1e-9), 2.2314355128931324741932373818488093402747142832718e-10L},
      {"expm1_ratio(1e-20)", expm1_ratio(1e-20), 0.99999999999999999999500000000000000027424197606229L},
      {"expm1_ratio(1e-8)", expm1_ratio(1e-8), 0.99999999500000000833333322872052951751142823661915L},
      {"expm1_ratio(-1e-5)", expm1_ratio(-1e-5), 1.0000050000083333333337284610773988659569340921365L},
      {"expm1_ratio(0.5)", expm1_ratio(0.5), 0.77074704126839914206555172223625731917022961842094L},
      {"expm1_ratio(-3)", expm1_ratio(-3.0), 3.1571870894737678559159981837992651656117074964145L},
      {"expm1_ratio(20)", expm1_ratio(20.0), 4.1223072533738241840280803124601800267562193084479e-8L},
      {"ln_expm1(1e-300)", ln_expm1(1e-300), -690.77552789821370518033834457010050290861334158364L},
      {"ln_expm1(1e-10)", ln_expm1(1e-10), -23.025850929890456803747300562857624628026054563036L},
      {"ln_expm1(0.5)", ln_expm1(0.5), -0.43275212956718857189464100014850045163257410136006L},
      {"ln_expm1(30)", ln_expm1(30.0), 29.999999999999906423770311593875695460329232909934L},
      {"ln_expm1(700)", ln_expm1(700.0), 700.0L},
      {"ln_expm1_from_log(-2000)", ln_expm1_from_log(-2000.0), -2000.0L},
      {"ln_expm1_from_log(-50)", ln_expm1_from_log(-50.0), -49.999999999999999999999903562507601804110849131309L},
      {"ln_expm1_from_log(-1e-3)", ln_expm1_from_log(-1e-3), 0.53974320842227517364003379827125113927969741529032L},
      {"ln_expm1_from_log(0)", ln_expm1_from_log(0.0), 0.54132485461291810897835635493267029812302209330781L},
      {"ln_expm1_from_log(5)", ln_expm1_from_log(5.0), 148.41315910257660342111558004055227962348766759388L},
      {"H_alpha(0.1)", H_alpha(c, 0.1), 1.005015315048634784431032758590297738471652801266L},
      {"H_alpha(1)", H_alpha(c, 1.0), 1.6998009064216651225962998769745856923532091583448L},
      {"H_alpha(2)", H_alpha(c, 2.0), 14.932578840037960132299405084261417366606822106061L},
      {"H_alpha(2.5)", H_alpha(c, 2.5), 322.55909202610385034152822495576609532953807392279L},
      {"H_alpha(3)", H_alpha(c, 3.0), 79778076440.479079126707101941610315607537113931797L},
  };
  double worst = 0.0;
  std::string worst_name, bad;
  for (const auto& r : refs) {
    const double e = double(std::fabs((r.got - r.ref) / r.ref));
    if (!(e <= 1e-12)) bad += " " + r.name;
    if (!(e <= worst)) {
      worst = e;
      worst_name = r.name;
    }
  }
  return {bad.empty(), std::to_string(refs.size()) + " references, alpha = 1 - 1e-12 for H_alpha, worst rel err " +
                           num(worst, 3) + " at " + worst_name + (bad.empty() ? "" : ", failing:" + bad)};
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {"cross-algorithm equivalence", c1_cross_algorithm},
      {"extreme-regime equivalence", c2_extreme},
      {"quadrature-oracle agreement", c3_oracle},
      {"grid scaling", c4_grid_scaling},
      {"timing direction", c5_timing},
      {"z-tail probability", c6_z_tail},
      {"envelope dominance", c7_dominance},
      {"first-passage law", c8_first_passage},
      {"numerical-stability references", c9_stability},
  };
  int failed = 0;
  std::vector<bool> selected(all.size(), argc < 2);
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k >= 1 && k <= int(all.size())) selected[k - 1] = true;
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!selected[i]) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, o.detail.c_str(), sec);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
