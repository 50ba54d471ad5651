#pragma once

#include <string>
#include <vector>

#include "agsp/agsp_builder.hpp"
#include "agsp/grid_hamiltonian.hpp"
#include "agsp/mps.hpp"

namespace agsp {

/// Knobs for one randomized sweep of the column algorithm.
struct SolverParams {
  AgspParams agsp;          ///< (m, t, p) the bundle was built with
  long v = 8;               ///< sample dimension per column
  double eps = 1e-8;        ///< trim threshold (0 disables trimming)
  double delta = 0.05;      ///< restriction/acceptance energy threshold
  double delta_goal = 0.1;  ///< end-to-end closeness target
  double gamma = 1.0;       ///< local gap
  long dbound = 1;          ///< degeneracy upper bound
  unsigned long long seed = 0;
  ParamMode mode = ParamMode::practical;
};

/// Per-column record of one sweep.
struct IterationLog {
  int column = 0;
  long sampled_dim = 0;    ///< dimension actually drawn (clamped to space)
  long pre_trim_bond = 0;  ///< max bond after applying the projector part
  long post_trim_bond = 0;
  long dim = 0;  ///< subspace dimension after the iteration
};

/// Output subspace plus run accounting.
struct SolveResult {
  SubspaceMps space;
  long dim = 0;
  double residual = 0.0;  ///< operator norm of H restricted to the output
  unsigned long long seed = 0;
  std::vector<IterationLog> iterations;
  std::vector<std::string> log;
};

/// H restricted to y's frame: sum of per-term frame contractions (no dense
/// materialization of H).
Matrix hamiltonian_restriction(const GridHamiltonian& ham,
                               const SubspaceMps& y);

/// One seeded sweep: per column, extend - sample - apply the left part of
/// the AGSP MPO - trim; finally keep the low-energy support of
/// I - kappa^dag kappa restricted to the sweep's subspace.
SolveResult run_algorithm1(const GridHamiltonian& ham, const AgspBundle& bundle,
                           const SolverParams& params);

/// Fill V, eps, delta for the given target. Theory mode pins the analysis
/// formulas (documented in the implementation); practical mode keeps
/// desk-scale defaults that the caller may override.
SolverParams select_parameters(const GridHamiltonian& ham,
                               const AgspBundle& bundle, double gamma,
                               long dbound, double delta_goal, ParamMode mode);

/// Run `repetitions` independently seeded sweeps (seed, then derivedseeds)
/// and return the accepted result (residual <= delta) of maximal dimension,
/// ties broken by lower residual. Throws NoViableOutput when every sweep
/// fails the energy test.
SolveResult boost(const GridHamiltonian& ham, const AgspBundle& bundle,
                  int repetitions, const SolverParams& params);

/// End to end: choose AGSP knobs, build the bundle, select solver knobs,
/// and boost. gamma = NaN measures the local gap first (capped rectangles).
SolveResult solve(const GridHamiltonian& ham, double gamma, long dbound,
                  double delta_goal, unsigned long long seed,
                  ParamMode mode = ParamMode::practical, int repetitions = 5,
                  const BuildOptions& build_opts = {});

}  // namespace agsp
