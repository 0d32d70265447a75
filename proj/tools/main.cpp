#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "divmin/channel.hpp"
#include "divmin/fdiv_dual.hpp"
#include "divmin/general.hpp"
#include "divmin/io.hpp"
#include "divmin/klinf.hpp"
#include "divmin/primal.hpp"
#include "divmin/seqinf.hpp"

namespace {

using nlohmann::json;
using namespace divmin;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNoConverge = 4;

struct SummaryStats {
  double mean = 0.0;
  double se = 0.0;  // Monte Carlo standard error of the mean
  double q10 = 0.0, q50 = 0.0, q90 = 0.0;
};

SummaryStats summarize(std::vector<double> xs) {
  SummaryStats s;
  const std::size_t n = xs.size();
  if (n == 0) return s;
  for (double v : xs) s.mean += v;
  s.mean /= double(n);
  double var = 0.0;
  for (double v : xs) var += (v - s.mean) * (v - s.mean);
  if (n > 1) s.se = std::sqrt(var / double(n - 1) / double(n));
  std::sort(xs.begin(), xs.end());
  auto quant = [&](double q) {
    return xs[std::min(n - 1, std::size_t(q * double(n)))];
  };
  s.q10 = quant(0.10);
  s.q50 = quant(0.50);
  s.q90 = quant(0.90);
  return s;
}

json summary_json(const SummaryStats& s) {
  return {{"mean", s.mean}, {"se", s.se},
          {"q10", s.q10},   {"q50", s.q50},
          {"q90", s.q90}};
}

int cmd_klinf(const std::string& dist_file, const std::string& mu_csv,
              double tol) {
  FiniteDistribution p = load_distribution(dist_file);
  Vector mu = parse_csv_vector(mu_csv);
  KlinfResult r = klinf(p, mu, tol);
  json out{{"value", r.value},
           {"lambda", r.argmax.lambda},
           {"iterations", r.iterations},
           {"converged", r.converged}};
  std::cout << out.dump(2) << "\n";
  return r.converged ? kExitOk : kExitNoConverge;
}

int cmd_fdiv(const std::string& dist_file, const std::string& mu_csv,
             const std::string& spec_name, double tol) {
  FiniteDistribution p = load_distribution(dist_file);
  Vector mu = parse_csv_vector(mu_csv);
  FDivergenceSpec spec = FDivergenceSpec::from_name(spec_name);
  FDualResult r = dinf(p, mu, spec, tol);
  json out{{"value", r.value},
           {"lambda", r.argmax.lambda},
           {"gamma", r.argmax.gamma},
           {"iterations", r.iterations},
           {"converged", r.converged}};
  std::cout << out.dump(2) << "\n";
  return r.converged ? kExitOk : kExitNoConverge;
}

ConstraintSet parse_constraint(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad constraint JSON: ") + e.what());
  }
  try {
    if (j.contains("singleton"))
      return ConstraintSet(SingletonSet{j["singleton"].get<Vector>()});
    if (j.contains("box"))
      return ConstraintSet(BoxSet{j["box"].at("lo").get<Vector>(),
                                  j["box"].at("hi").get<Vector>()});
    if (j.contains("polytope"))
      return ConstraintSet(
          PolytopeSet{j["polytope"].get<std::vector<Vector>>()});
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad constraint JSON: ") + e.what());
  }
  throw DomainError(
      "constraint must be {\"singleton\": [...]}, {\"box\": {...}} or "
      "{\"polytope\": [[...]]}");
}

int cmd_general(const std::string& dist_file, const std::string& g_name,
                const std::string& c_spec, double tol) {
  FiniteDistribution p = load_distribution(dist_file);
  ConstraintFunction g = ConstraintFunction::builtin(g_name, p.dim());
  ConstraintSet c = parse_constraint(c_spec);
  GeneralOptions opts;
  opts.tol = tol;
  GeneralDualResult r = klinf_general(p, g, c, opts);
  json out{{"value", r.value},
           {"lambda", r.argmax.lambda},
           {"gamma", r.argmax.gamma},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"unbounded_suspected", r.unbounded_suspected},
           {"truncation_radius", r.truncation_radius}};
  std::cout << out.dump(2) << "\n";
  return r.converged && !r.unbounded_suspected ? kExitOk : kExitNoConverge;
}

int cmd_channel(const std::string& dist_file, int level) {
  FiniteDistribution p = load_distribution(dist_file);
  DyadicGrid grid(level, p.dim());
  std::cout << distribution_to_json(pushforward(p, grid)) << "\n";
  return kExitOk;
}

Vector draw(const Scenario& sc, int n, std::mt19937_64& rng) {
  // Observation index n (1-based) comes from alt once the change is in
  // effect, or always when alt is set without a changepoint.
  const bool use_alt =
      sc.alt_dist && (!sc.change_at || n >= *sc.change_at);
  return sample_atom(use_alt ? *sc.alt_dist : sc.null_dist, rng);
}

int cmd_simulate(const std::string& scenario_file, const std::string& mode,
                 const std::string& out_file, int window) {
  Scenario sc = load_scenario(scenario_file);
  const Vector mu0 = sc.null_dist.mean();
  check_interior(mu0);

  std::ofstream csv(out_file);
  if (!csv) throw DomainError("cannot open '" + out_file + "' for writing");

  std::vector<double> stops;
  std::vector<double> extras;  // delays (cd) or violations (cs)
  int censored_count = 0;
  int fired_count = 0;

  if (mode == "test") {
    csv << "replicate,seed,stop_time,censored\n";
    for (int rep = 0; rep < sc.replicates; ++rep) {
      std::mt19937_64 rng = replicate_rng(sc.seed, std::uint64_t(rep));
      SequentialTest test({mu0, sc.alpha, ThresholdVariant::TestPlusOne});
      int stop = 0;
      for (int n = 1; n <= sc.n_max && stop == 0; ++n)
        if (test.step(draw(sc, n, rng)).fired) stop = n;
      bool censored = stop == 0;
      if (censored) ++censored_count;
      else {
        ++fired_count;
        stops.push_back(double(stop));
      }
      csv << rep << "," << sc.seed << "," << (censored ? sc.n_max : stop)
          << "," << (censored ? 1 : 0) << "\n";
    }
  } else if (mode == "cs") {
    csv << "replicate,seed,stop_time,censored,coverage_violated\n";
    const Vector truth = sc.null_dist.mean();
    for (int rep = 0; rep < sc.replicates; ++rep) {
      std::mt19937_64 rng = replicate_rng(sc.seed, std::uint64_t(rep));
      StreamState state(sc.null_dist.dim());
      int violation_at = 0;
      for (int n = 1; n <= sc.n_max; ++n) {
        state.push(draw(sc, n, rng));
        if (!cs_membership(state, truth, sc.alpha)) {
          violation_at = n;
          break;
        }
      }
      bool violated = violation_at > 0;
      if (violated) ++fired_count;
      else ++censored_count;
      extras.push_back(violated ? 1.0 : 0.0);
      csv << rep << "," << sc.seed << ","
          << (violated ? violation_at : sc.n_max) << ","
          << (violated ? 0 : 1) << "," << (violated ? 1 : 0) << "\n";
    }
  } else if (mode == "cd") {
    csv << "replicate,seed,stop_time,censored,delay\n";
    for (int rep = 0; rep < sc.replicates; ++rep) {
      std::mt19937_64 rng = replicate_rng(sc.seed, std::uint64_t(rep));
      ChangeDetector det(mu0, sc.alpha, window);
      int stop = 0;
      for (int n = 1; n <= sc.n_max && stop == 0; ++n)
        if (det.step(draw(sc, n, rng)).fired) stop = n;
      bool censored = stop == 0;
      // Censored runs count at the horizon: conservative for ARL.
      stops.push_back(double(censored ? sc.n_max : stop));
      int delay = -1;
      if (!censored) {
        ++fired_count;
        if (sc.change_at && stop >= *sc.change_at) {
          delay = stop - *sc.change_at;
          extras.push_back(double(delay));
        }
      } else {
        ++censored_count;
      }
      csv << rep << "," << sc.seed << "," << (censored ? sc.n_max : stop)
          << "," << (censored ? 1 : 0) << "," << delay << "\n";
    }
  } else {
    std::cerr << "unknown mode '" << mode << "' (expected test|cs|cd)\n";
    return kExitUsage;
  }
  csv.close();

  json summary{{"mode", mode},
               {"replicates", sc.replicates},
               {"fired", fired_count},
               {"censored", censored_count},
               {"censor_rate", double(censored_count) / sc.replicates}};
  if (!stops.empty()) summary["stop_time"] = summary_json(summarize(stops));
  if (mode == "cs") {
    SummaryStats v = summarize(extras);
    summary["violation_rate"] = v.mean;
    summary["violation_se"] = v.se;
  } else if (mode == "cd" && !extras.empty()) {
    summary["delay"] = summary_json(summarize(extras));
  }
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_oracle_check(int instances, int dim, std::uint64_t seed) {
  if (dim < 1 || dim > 3) {
    std::cerr << "oracle-check supports K in {1,2,3} (corner enumeration)\n";
    return kExitUsage;
  }
  std::mt19937_64 rng = replicate_rng(seed, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> natoms(2, 10);
  double max_gap = 0.0;
  for (int i = 0; i < instances; ++i) {
    int m = natoms(rng);
    std::vector<Vector> atoms(m, Vector(dim));
    Vector w(m);
    double ws = 0.0;
    for (int a = 0; a < m; ++a) {
      for (int j = 0; j < dim; ++j) atoms[a][j] = unif(rng);
      w[a] = unif(rng) + 1e-3;
      ws += w[a];
    }
    for (double& v : w) v /= ws;
    Vector mu(dim);
    for (int j = 0; j < dim; ++j) mu[j] = 0.1 + 0.8 * unif(rng);
    FiniteDistribution p(atoms, w);
    double dual = klinf(p, mu).value;
    double primal = primal_klinf_finite(p, mu).value;
    max_gap = std::max(max_gap, std::abs(dual - primal));
  }
  json out{{"instances", instances}, {"dim", dim},
           {"seed", seed},           {"max_gap", max_gap},
           {"pass", max_gap <= 1e-5}};
  std::cout << out.dump(2) << "\n";
  return max_gap <= 1e-5 ? kExitOk : kExitNoConverge;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained minimum-divergence computations on [0,1]^K"};
  app.require_subcommand(1);

  std::string dist_file, mu_csv, spec_name = "kl", g_name = "identity";
  std::string c_spec, scenario_file, out_file = "out.csv", mode = "test";
  double tol = 1e-7;
  int level = 4, window = 500, replicates = 100, dim = 1;
  std::uint64_t seed = 0;

  auto* klinf_cmd = app.add_subcommand("klinf", "Mean-constrained KLinf");
  klinf_cmd->add_option("--dist", dist_file)->required();
  klinf_cmd->add_option("--mu", mu_csv)->required();
  klinf_cmd->add_option("--tol", tol);

  auto* fdiv_cmd = app.add_subcommand("fdiv", "Mean-constrained f-divergence");
  fdiv_cmd->add_option("--dist", dist_file)->required();
  fdiv_cmd->add_option("--mu", mu_csv)->required();
  fdiv_cmd->add_option("--spec", spec_name, "kl | hellinger | chi2");
  fdiv_cmd->add_option("--tol", tol);

  auto* gen_cmd = app.add_subcommand("general", "General-constraint KLinf");
  gen_cmd->add_option("--dist", dist_file)->required();
  gen_cmd->add_option("--g", g_name, "identity | powers:j | norms");
  gen_cmd->add_option("--constraint", c_spec)->required();
  gen_cmd->add_option("--tol", tol);

  auto* chan_cmd = app.add_subcommand("channel", "Dyadic discretization");
  chan_cmd->add_option("--dist", dist_file)->required();
  chan_cmd->add_option("--k", level)->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo experiments");
  sim_cmd->add_option("--scenario", scenario_file)->required();
  sim_cmd->add_option("--mode", mode, "test | cs | cd");
  sim_cmd->add_option("--out", out_file);
  sim_cmd->add_option("--window", window);

  auto* oracle_cmd =
      app.add_subcommand("oracle-check", "Primal/dual gap report");
  oracle_cmd->add_option("--replicates", replicates);
  oracle_cmd->add_option("--k", dim);
  oracle_cmd->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (klinf_cmd->parsed()) return cmd_klinf(dist_file, mu_csv, tol);
    if (fdiv_cmd->parsed())
      return cmd_fdiv(dist_file, mu_csv, spec_name, tol);
    if (gen_cmd->parsed()) return cmd_general(dist_file, g_name, c_spec, tol);
    if (chan_cmd->parsed()) return cmd_channel(dist_file, level);
    if (sim_cmd->parsed())
      return cmd_simulate(scenario_file, mode, out_file, window);
    if (oracle_cmd->parsed()) return cmd_oracle_check(replicates, dim, seed);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
