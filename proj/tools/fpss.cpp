// fpss: command-line front end for the first-passage samplers.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpss/harness.hpp"

namespace {

using json = nlohmann::json;

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file) throw std::runtime_error("cannot open " + path);
    os = file.get();
  }
};

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t seed) {
  if (opt->count() > 0) return seed;
  if (const char* env = std::getenv("FPSS_SEED")) return std::stoull(env);
  return seed;
}

// z given directly or as ln z; ln z wins when both are present.
double resolve_ln_z(const CLI::Option* ln_opt, double ln_z, double z) {
  if (ln_opt->count() > 0) return ln_z;
  if (!(z > 0.0)) throw fpss::DomainError("z must be positive");
  return std::log(z);
}

std::vector<double> to_ln(const std::vector<double>& zs) {
  std::vector<double> out;
  for (double z : zs) {
    if (!(z > 0.0)) throw fpss::DomainError("z must be positive");
    out.push_back(std::log(z));
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact first-passage sampling for stable subordinators"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;

  // sample-chi
  auto* sc = app.add_subcommand("sample-chi", "draws (ln y, theta) from the normalized chi density");
  double sc_alpha = 0.5, sc_z = 1.0, sc_ln_z = 0.0;
  std::size_t sc_n = 1000;
  std::string sc_alg = "auto", sc_out;
  sc->add_option("--alpha", sc_alpha, "stability index in (0, 1)")->required();
  sc->add_option("--z", sc_z, "z > 0");
  auto* sc_lz = sc->add_option("--ln-z", sc_ln_z, "ln z, for z below the double range");
  sc->add_option("--n", sc_n, "number of draws");
  sc->add_option("--alg", sc_alg, "auto, A, B or P");
  auto* sc_seed = sc->add_option("--seed", seed, "seed; FPSS_SEED is the fallback");
  sc->add_option("--out", sc_out, "output CSV, stdout if omitted");

  // sample-fp
  auto* sf = app.add_subcommand("sample-fp", "draws first-passage triples");
  double sf_alpha = 0.5;
  std::size_t sf_n = 1000;
  std::string sf_barrier = R"({"family":"constant","b0":10})", sf_alg = "auto", sf_out;
  sf->add_option("--alpha", sf_alpha, "stability index in (0, 1)")->required();
  sf->add_option("--barrier", sf_barrier, "JSON barrier spec");
  sf->add_option("--n", sf_n, "number of draws");
  sf->add_option("--alg", sf_alg, "auto, A, B or P");
  auto* sf_seed = sf->add_option("--seed", seed, "seed; FPSS_SEED is the fallback");
  sf->add_option("--out", sf_out, "output CSV, stdout if omitted");

  // compare
  auto* cp = app.add_subcommand("compare", "two-sample KS between two chi samplers");
  std::vector<double> cp_alpha, cp_z, cp_ln_z;
  std::size_t cp_n = 1000;
  std::string cp_algs = "A,B", cp_out;
  int cp_reps = 1;
  cp->add_option("--alpha", cp_alpha, "one or more alpha values")->required();
  cp->add_option("--z", cp_z, "one or more z values");
  auto* cp_lz = cp->add_option("--ln-z", cp_ln_z, "one or more ln z values");
  cp->add_option("--n", cp_n, "draws per sampler per repetition");
  cp->add_option("--algs", cp_algs, "two algorithms, e.g. A,B");
  cp->add_option("--reps", cp_reps, "repetitions per cell");
  auto* cp_seed = cp->add_option("--seed", seed, "seed; FPSS_SEED is the fallback");
  cp->add_option("--out", cp_out, "output CSV, stdout if omitted");

  // bench
  auto* bn = app.add_subcommand("bench", "timings over a grid given by a JSON spec");
  std::string bn_spec, bn_out;
  bn->add_option("--spec", bn_spec, "JSON file with alpha, z (or ln_z), algs, n, seed")->required();
  bn->add_option("--out", bn_out, "output CSV, stdout if omitted");

  // grid-info
  auto* gi = app.add_subcommand("grid-info", "summary of the theta grid as JSON");
  double gi_alpha = 0.999, gi_z = 1e-10, gi_ln_z = 0.0;
  fpss::QGridConfig gi_cfg;
  gi->add_option("--alpha", gi_alpha, "stability index")->required();
  gi->add_option("--z", gi_z, "z in (0, 1]");
  auto* gi_lz = gi->add_option("--ln-z", gi_ln_z, "ln z");
  gi->add_option("--Delta", gi_cfg.Delta, "grid ratio parameter");
  gi->add_option("--alpha0", gi_cfg.alpha0, "lower bound on alpha");
  gi->add_option("--theta0", gi_cfg.theta0, "split angle");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc->parsed()) {
      Output out(sc_out);
      fpss::run_sample_chi({sc_alpha, resolve_ln_z(sc_lz, sc_ln_z, sc_z), sc_n,
                            fpss::parse_alg_choice(sc_alg), resolve_seed(sc_seed, seed)},
                           *out.os);
    } else if (sf->parsed()) {
      const json b = json::parse(sf_barrier);
      const std::string family = b.at("family").get<std::string>();
      const double param = family == "constant" ? b.at("b0").get<double>() : b.at("c").get<double>();
      Output out(sf_out);
      fpss::run_sample_fp({sf_alpha, family, param, sf_n, fpss::parse_alg_choice(sf_alg),
                           resolve_seed(sf_seed, seed)},
                          *out.os);
    } else if (cp->parsed()) {
      const auto algs = split(cp_algs, ',');
      if (algs.size() != 2) throw fpss::DomainError("--algs needs exactly two entries");
      std::vector<double> lzs = cp_lz->count() > 0 ? cp_ln_z : to_ln(cp_z);
      if (lzs.empty()) throw fpss::DomainError("compare needs --z or --ln-z");
      const fpss::CompareSpec spec{cp_alpha, lzs, cp_n, fpss::parse_algorithm(algs[0]),
                                   fpss::parse_algorithm(algs[1]), cp_reps, resolve_seed(cp_seed, seed)};
      const auto rows = fpss::run_compare(spec);
      Output out(cp_out);
      fpss::write_compare(spec, rows, *out.os);
    } else if (bn->parsed()) {
      std::ifstream in(bn_spec);
      if (!in) throw std::runtime_error("cannot open " + bn_spec);
      const json j = json::parse(in);
      fpss::BenchSpec spec;
      spec.alphas = j.at("alpha").get<std::vector<double>>();
      spec.ln_zs = j.contains("ln_z") ? j.at("ln_z").get<std::vector<double>>()
                                      : to_ln(j.at("z").get<std::vector<double>>());
      for (const auto& a : j.at("algs")) spec.algs.push_back(fpss::parse_algorithm(a.get<std::string>()));
      spec.n = j.value("n", std::size_t{1000});
      spec.seed = j.value("seed", std::uint64_t{1});
      if (j.contains("deadline_sec")) spec.deadline_sec = j.at("deadline_sec").get<double>();
      Output out(bn_out);
      fpss::run_bench(spec, *out.os);
    } else if (gi->parsed()) {
      const fpss::GridInfo g = fpss::grid_info(gi_alpha, resolve_ln_z(gi_lz, gi_ln_z, gi_z), gi_cfg);
      const json j = {{"alpha", g.alpha},       {"ln_z", g.ln_z},         {"m", g.m},
                      {"N", g.N},               {"intervals", g.n_intervals},
                      {"vartheta", g.vartheta}, {"ln_tau_z", g.ln_tau_z}, {"rho_z", g.rho_z},
                      {"omega_z", g.omega_z},   {"s_z", g.s_z},           {"total_weight", g.total_weight}};
      std::cout << j.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "fpss: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
