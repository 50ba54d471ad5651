#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "agsp/bands.hpp"
#include "agsp/grid_hamiltonian.hpp"
#include "agsp/linalg.hpp"
#include "agsp/mpo.hpp"

namespace agsp {

/// Knobs m, t, p of the approximate ground-space projector kappa(m, t, p).
struct AgspParams {
  int m = 1;  ///< noise-set exponent (robust AND arity per wide band is < m)
  int t = 1;  ///< narrow-band width scale; bands have width <= 4t
  int p = 1;  ///< power applied to the one-shot operator
};

/// Options controlling how kappa is assembled and bounded.
struct BuildOptions {
  double gamma = std::nan("");  ///< local gap; NaN = measure it from the instance
  double shrink_c = 0.1;        ///< constant c in the 2e^{-c t sqrt(gamma)} tail bound
  bool calibrate = false;       ///< measure c from a dense one-layer detector instead
  bool exact_projectors = false;  ///< debug: use exact kernel projectors for Q-hat
  long band_cap = 1L << 12;     ///< densification cap for narrow-band restrictions
  long wide_cap = 1L << 12;     ///< densification cap for per-wide-band blocks
  double trim_tol = 1e-10;      ///< singular-value cutoff while squaring the MPO
  double rank_tol = 1e-12;      ///< threshold for counting entanglement ranks
  bool allow_clipped = true;    ///< permit wide bands clipped by the grid edge
};

/// A built AGSP: the MPO, its band layout, and the certified shrinking data.
struct AgspBundle {
  AgspParams params;
  BandLayout layout;
  Mpo kappa;                    ///< one tensor per column of the grid
  double gamma = 1.0;           ///< local gap used during the build
  double shrink_c = 0.1;        ///< constant entering the shrinking bound
  double delta_bound = 1.0;     ///< certified (or calibrated) shrinking factor
  std::vector<long> cut_ranks;  ///< entanglement rank across each vertical cut
  std::vector<std::string> build_log;

  long max_rank() const;
};

/// Exact kernel projector of the Hamiltonian restricted to one narrow band.
Matrix band_projector(const GridHamiltonian& ham, const BandLayout& layout,
                      const NarrowBand& band, long dense_cap = 1L << 20);

/// Low-degree step-polynomial filter approximating the band projector.
///
/// Returns Step(H_B / (C t h)) where Step fixes 0 -> 1 and sends
/// [gamma/(C t h), 1] into [-1/20, 1/20].  The result acts only on the
/// band's sites.
Matrix approx_band_projector(const GridHamiltonian& ham, const BandLayout& layout,
                             const NarrowBand& band, double gamma,
                             long dense_cap = 1L << 20);

/// Rigorous shrinking factor (W' e^{-m} + 2 e^{-c t sqrt(gamma)})^{2p}.
double shrinking_factor_bound(int m, int t, int p, int wide_count, double gamma,
                              double c);

/// Fit the constant c by measuring the dense detector layer.
///
/// Builds the exact odd-then-even band-projector product, measures its norm
/// on the orthogonal complement of the ground space, and solves
/// ||D L P_perp|| = 2 e^{-c t sqrt(gamma)} for c, capping at 6 and applying
/// a 0.8 safety factor. Only feasible for instances small enough to
/// densify; any c at or below the fit keeps the shrinking bound valid for
/// this instance.
double calibrate_shrinking_c(const GridHamiltonian& ham, const BandLayout& layout,
                             double gamma, long dense_cap = 1L << 13);

/// Assemble the column-grouped MPO for kappa(m, t, p) and certify its bound.
AgspBundle build_kappa(const GridHamiltonian& ham, int m, int t, int p,
                       const BuildOptions& opts = {});

/// Dense measurement of the actual shrinking: ||kappa P_perp||^2 plus the
/// defect ||kappa P_Z - P_Z|| (how far kappa is from fixing the ground
/// space). Throws CapExceeded when the full grid cannot be densified.
struct MeasuredShrink {
  double delta = 1.0;
  double ground_defect = 0.0;
};
MeasuredShrink measure_shrinking(const GridHamiltonian& ham, const Mpo& kappa,
                                 long dense_cap = 1L << 12);

/// How the (m, t, p) knobs are selected.
enum class ParamMode {
  theory,     ///< closed-form choice from the asymptotic analysis
  practical,  ///< smallest knobs whose measured R * Delta meets the target
};

/// A chosen knob triple together with the predicted entanglement-rank scale.
struct ChosenParams {
  int m = 1;
  int t = 1;
  int p = 1;
  double predicted_log_rank = 0.0;  ///< natural-log bound on the cut rank
  double predicted_delta = 1.0;     ///< shrinking factor at these knobs
  bool met_target = true;  ///< practical search: rank * shrink <= delta held
};

/// Closed-form parameter choice from the gap, column height, and accuracy.
ChosenParams choose_parameters(double gamma, int height, int q, double delta);

/// Empirical parameter choice: grid-search (m, t, p) in increasing cost
/// order, build each candidate, and return the first whose measured
/// rank-times-shrink meets the target — or the best scoring candidate with
/// met_target = false when none does.
ChosenParams choose_parameters(const GridHamiltonian& ham, double gamma,
                               double delta, const BuildOptions& opts = {});

}  // namespace agsp
