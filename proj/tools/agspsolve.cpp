#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "agsp/agsp_builder.hpp"
#include "agsp/errors.hpp"
#include "agsp/grid_hamiltonian.hpp"
#include "agsp/instances.hpp"
#include "agsp/io.hpp"
#include "agsp/pauli.hpp"
#include "agsp/solver.hpp"

namespace {

using nlohmann::json;

/// Entropy-derived seed used when the caller does not pass one.
std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

double parse_gamma(const std::string& s, bool* is_auto) {
  *is_auto = (s == "auto");
  if (*is_auto) return std::nan("");
  double g = 0.0;
  try {
    size_t used = 0;
    g = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw agsp::Error("--gamma must be a positive real or \"auto\"");
  }
  if (!(g > 0.0)) throw agsp::Error("--gamma must be positive");
  return g;
}

void write_text(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw agsp::Error("cannot write " + path);
  for (const auto& l : lines) out << l << '\n';
}

struct SolveArgs {
  std::string instance;
  std::string gamma = "auto";
  long dbound = 1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string mode = "practical";
  int repeats = 5;
  std::string out = "solve-out";
};

int run_solve(const SolveArgs& a) {
  agsp::GridHamiltonian ham = agsp::read_instance(a.instance);
  bool auto_gamma = false;
  const double gamma = parse_gamma(a.gamma, &auto_gamma);
  const std::uint64_t seed = a.seed_given ? a.seed : random_seed();
  if (!a.seed_given) std::cout << "seed " << seed << " (from entropy)\n";
  if (auto_gamma) {
    std::cout << "gamma auto: measuring the local gap on capped rectangles; "
                 "treat the estimate as a lower bound\n";
  }
  const auto mode = a.mode == "theory" ? agsp::ParamMode::theory
                                       : agsp::ParamMode::practical;

  agsp::SolveResult res =
      agsp::solve(ham, gamma, a.dbound, a.delta, seed, mode, a.repeats);

  const std::string mps_path = a.out + ".mps.json";
  agsp::write_mps(res.space, ham.height(), ham.q(), mps_path);

  std::vector<std::string> log = res.log;
  for (const auto& it : res.iterations) {
    log.push_back("column " + std::to_string(it.column) + ": sampled " +
                  std::to_string(it.sampled_dim) + ", bond " +
                  std::to_string(it.pre_trim_bond) + " -> " +
                  std::to_string(it.post_trim_bond) + ", dim " +
                  std::to_string(it.dim));
  }
  const std::string log_path = a.out + ".log";
  write_text(log_path, log);

  json summary;
  summary["instance"] = a.instance;
  summary["width"] = ham.width();
  summary["height"] = ham.height();
  summary["q"] = ham.q();
  summary["dim"] = res.dim;
  summary["residual"] = res.residual;
  summary["seed"] = res.seed;
  summary["mode"] = a.mode;
  summary["delta"] = a.delta;
  json iters = json::array();
  for (const auto& it : res.iterations) {
    iters.push_back(json{{"column", it.column},
                         {"sampled_dim", it.sampled_dim},
                         {"pre_trim_bond", it.pre_trim_bond},
                         {"post_trim_bond", it.post_trim_bond},
                         {"dim", it.dim}});
  }
  summary["iterations"] = std::move(iters);
  const std::string summary_path = a.out + ".summary.json";
  {
    std::ofstream out(summary_path);
    if (!out) throw agsp::Error("cannot write " + summary_path);
    out << summary.dump(1) << '\n';
  }

  std::cout << "dim " << res.dim << " residual " << res.residual << " seed "
            << res.seed << '\n';
  std::cout << "wrote " << mps_path << ' ' << log_path << ' ' << summary_path
            << '\n';
  return 0;
}

struct ExpectArgs {
  std::string mps;
  int k = 1;
  std::string out;
  std::string json_out;
};

int run_expectations(const ExpectArgs& a) {
  agsp::StoredMps stored = agsp::read_mps(a.mps);
  agsp::PauliTable table =
      agsp::pauli_table(stored.mps, stored.height, stored.q, a.k);
  agsp::write_pauli_tsv(table, a.out);
  if (!a.json_out.empty()) agsp::write_pauli_json(table, a.json_out);
  std::cout << "dim " << table.dim << " words " << table.words.size()
            << " -> " << a.out << '\n';
  return 0;
}

struct GapArgs {
  std::string instance;
  int max_sites = 0;
};

int run_gap(const GapArgs& a) {
  agsp::GridHamiltonian ham = agsp::read_instance(a.instance);
  const double g = agsp::local_gap(ham, a.max_sites);
  std::cout << "local gap " << g;
  if (a.max_sites > 0) {
    std::cout << " (rectangles up to " << a.max_sites
              << " sites; lower-bound estimate)";
  }
  std::cout << '\n';
  return 0;
}

struct VerifyArgs {
  std::string instance;
  int m = 1, t = 1, p = 1;
  std::string gamma = "auto";
  bool calibrate = false;
};

int run_verify(const VerifyArgs& a) {
  agsp::GridHamiltonian ham = agsp::read_instance(a.instance);
  bool auto_gamma = false;
  agsp::BuildOptions opts;
  opts.gamma = parse_gamma(a.gamma, &auto_gamma);
  opts.calibrate = a.calibrate;
  agsp::AgspBundle bundle = agsp::build_kappa(ham, a.m, a.t, a.p, opts);
  for (const auto& l : bundle.build_log) std::cout << l << '\n';
  std::cout << "certified shrinking bound " << bundle.delta_bound << '\n';
  std::cout << "cut ranks:";
  for (long r : bundle.cut_ranks) std::cout << ' ' << r;
  std::cout << '\n';

  try {
    agsp::MeasuredShrink ms = agsp::measure_shrinking(ham, bundle.kappa);
    std::cout << "measured shrinking " << ms.delta << ", ground defect "
              << ms.ground_defect << '\n';
    if (ms.delta > bundle.delta_bound + 1e-9 || ms.ground_defect > 1e-6) {
      std::cout << "BOUND VIOLATED\n";
      return 1;
    }
    std::cout << "bound holds\n";
  } catch (const agsp::CapExceeded&) {
    std::cout << "grid too large to densify; skipping the dense measurement\n";
  }
  return 0;
}

struct GenArgs {
  int width = 3, height = 2, q = 2;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool unique = false;
  long target_d = 1;
  std::string out;
};

int run_gen_planted(const GenArgs& a) {
  const std::uint64_t seed = a.seed_given ? a.seed : random_seed();
  if (!a.seed_given) std::cout << "seed " << seed << " (from entropy)\n";
  std::vector<int> planted;
  agsp::GridHamiltonian ham =
      agsp::gen_planted_csp(a.width, a.height, seed, a.unique, &planted);
  agsp::write_instance(ham, a.out);
  std::cout << "planted";
  for (int b : planted) std::cout << ' ' << b;
  std::cout << "\nwrote " << a.out << '\n';
  return 0;
}

int run_gen_random(const GenArgs& a) {
  const std::uint64_t seed = a.seed_given ? a.seed : random_seed();
  if (!a.seed_given) std::cout << "seed " << seed << " (from entropy)\n";
  agsp::GridHamiltonian ham =
      agsp::gen_random_ff(a.width, a.height, a.q, seed, a.target_d);
  agsp::write_instance(ham, a.out);
  std::cout << "degeneracy " << a.target_d << "\nwrote " << a.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ground-space tools for frustration-free grid Hamiltonians"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand(
      "solve", "approximate the ground space of an instance");
  solve->add_option("--instance", sa.instance, "instance JSON file")
      ->required();
  solve->add_option("--gamma", sa.gamma, "local gap, or \"auto\" to measure");
  solve->add_option("--dbound", sa.dbound, "upper bound on the degeneracy");
  solve->add_option("--delta", sa.delta, "target closeness in (0, 1)");
  CLI::Option* sseed = solve->add_option("--seed", sa.seed, "RNG seed");
  solve->add_option("--mode", sa.mode, "theory | practical")
      ->check(CLI::IsMember({"theory", "practical"}));
  solve->add_option("--repeats", sa.repeats, "independent boost repetitions");
  solve->add_option("--out", sa.out, "output file prefix");

  ExpectArgs ea;
  CLI::App* expect = app.add_subcommand(
      "expectations", "tabulate low-weight clock/shift expectations");
  expect->add_option("--mps", ea.mps, "subspace MPS JSON file")->required();
  expect->add_option("--k", ea.k, "maximum word support (capped at 2)");
  expect->add_option("--out", ea.out, "output TSV file")->required();
  expect->add_option("--json", ea.json_out, "optional JSON export");

  GapArgs ga;
  CLI::App* gap = app.add_subcommand("gap", "measure the local gap");
  gap->add_option("--instance", ga.instance, "instance JSON file")->required();
  gap->add_option("--max-sites", ga.max_sites,
                  "restrict to rectangles with at most this many sites");

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand(
      "verify-agsp", "build kappa(m, t, p) and check its shrinking bound");
  verify->add_option("--instance", va.instance, "instance JSON file")
      ->required();
  verify->add_option("--m", va.m, "noise-set exponent")->required();
  verify->add_option("--t", va.t, "band width scale")->required();
  verify->add_option("--p", va.p, "power")->required();
  verify->add_option("--gamma", va.gamma, "local gap, or \"auto\"");
  verify->add_flag("--calibrate", va.calibrate,
                   "fit the tail constant on a dense detector layer");

  GenArgs na;
  CLI::App* gen = app.add_subcommand("gen", "generate test instances");
  gen->require_subcommand(1);
  CLI::App* planted = gen->add_subcommand(
      "planted-csp", "planted classical constraint instance (q = 2)");
  CLI::App* randff = gen->add_subcommand(
      "random-ff", "random frustration-free instance with planted products");
  CLI::Option* gseed = nullptr;
  for (CLI::App* sub : {planted, randff}) {
    sub->add_option("--width", na.width, "grid width")->required();
    sub->add_option("--height", na.height, "grid height")->required();
    CLI::Option* o = sub->add_option("--seed", na.seed, "RNG seed");
    if (sub == planted) gseed = o;
    sub->add_option("--out", na.out, "output instance file")->required();
  }
  CLI::Option* rseed = randff->get_option("--seed");
  planted->add_flag("--unique", na.unique, "plant a unique assignment");
  randff->add_option("--q", na.q, "local dimension");
  randff->add_option("--target-d", na.target_d, "ground degeneracy to plant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  sa.seed_given = sseed->count() > 0;
  na.seed_given = (gseed && gseed->count() > 0) || (rseed && rseed->count() > 0);

  try {
    if (solve->parsed()) return run_solve(sa);
    if (expect->parsed()) return run_expectations(ea);
    if (gap->parsed()) return run_gap(ga);
    if (verify->parsed()) return run_verify(va);
    if (gen->parsed()) {
      if (planted->parsed()) return run_gen_planted(na);
      if (randff->parsed()) return run_gen_random(na);
    }
  } catch (const agsp::NoViableOutput& ex) {
    std::cerr << "no viable output: " << ex.what() << '\n';
    return 1;
  } catch (const agsp::Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 64;
}
