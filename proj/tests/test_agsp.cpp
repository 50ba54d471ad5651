#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "agsp/agsp_builder.hpp"
#include "agsp/bands.hpp"
#include "agsp/errors.hpp"
#include "agsp/instances.hpp"
#include "agsp/mpo.hpp"
#include "agsp/rng.hpp"
#include "agsp/spectral.hpp"
#include "support/oracles.hpp"

using namespace agsp;

namespace {

/// Oracle restriction of the Hamiltonian to a site set, little-endian over
/// the sites' sorted positions.
Matrix restricted_ref(const GridHamiltonian& ham, std::vector<Site> sites) {
  std::vector<long> positions;
  for (const auto& s : sites) positions.push_back(site_position(s, ham.height()));
  std::sort(positions.begin(), positions.end());
  long dim = 1;
  for (size_t i = 0; i < positions.size(); ++i) dim *= ham.q();
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& term : ham.terms()) {
    std::vector<long> slots;
    bool inside = true;
    for (const auto& s : term.sites) {
      const long p = site_position(s, ham.height());
      const auto it = std::find(positions.begin(), positions.end(), p);
      if (it == positions.end()) inside = false;
      slots.push_back(it - positions.begin());
    }
    if (inside)
      out += oracle::embed_ref(term.matrix, slots,
                               static_cast<long>(positions.size()), ham.q());
  }
  return out;
}

}  // namespace

TEST_CASE("spectral_projection picks eigenwindows") {
  Rng rng(61);
  Matrix g = gaussian_matrix(rng, 8, 8);
  Matrix h = 0.5 * (g + g.adjoint());
  Eigh e = eigh(h);
  const double split = e.values(3) + 0.5 * (e.values(4) - e.values(3));
  Matrix p = spectral_projection(h, e.values(0) - 1.0, split);
  Matrix want = e.vectors.leftCols(4) * e.vectors.leftCols(4).adjoint();
  CHECK((p - want).norm() <= 1e-10);
  CHECK((p * p - p).norm() <= 1e-10);
  CHECK_THROWS_AS(spectral_projection(g, -10.0, 10.0), NotHermitian);
}

TEST_CASE("kernel_projector equals the zero-eigenspace projector") {
  GridHamiltonian ham = gen_planted_csp(3, 2, 2, /*unique=*/false);
  Matrix dense = oracle::dense_hamiltonian(ham);
  Matrix p = kernel_projector(dense);
  Matrix z = oracle::kernel_basis_ref(dense, kZeroEigTol);
  CHECK((p - z * z.adjoint()).norm() <= 1e-9);
}

TEST_CASE("band_projector is the exact kernel projector of the band restriction") {
  GridHamiltonian ham = gen_planted_csp(4, 2, 9, /*unique=*/true);
  BandLayout lay = layout_bands(ham.width(), ham.height(), 1, 1, true);
  for (const auto& nb : lay.narrow) {
    Matrix got = band_projector(ham, lay, nb);
    Matrix rest = restricted_ref(ham, lay.band_sites(nb));
    Matrix z = oracle::kernel_basis_ref(rest, kZeroEigTol);
    CHECK((got - z * z.adjoint()).norm() <= 1e-9);
  }
}

TEST_CASE("approx_band_projector fixes the kernel and stays near the projector") {
  GridHamiltonian ham = gen_planted_csp(4, 2, 14, /*unique=*/false);
  const double gamma = 1.0;
  BandLayout lay = layout_bands(ham.width(), ham.height(), 1, 1, true);
  for (const auto& nb : lay.narrow) {
    Matrix qhat = approx_band_projector(ham, lay, nb, gamma);
    Matrix q = band_projector(ham, lay, nb);
    CHECK(hermiticity_defect(qhat) <= 1e-10);
    CHECK(operator_norm(Matrix(qhat * q - q)) <= 1e-11);  // kernel fixed
    CHECK(operator_norm(Matrix(qhat - q)) <= 0.05 + 1e-9);
  }
}

TEST_CASE("build_kappa assembles exactly the banded operator product") {
  const double gamma = 1.0;
  for (auto [w, h, p, seed] : std::vector<std::array<int, 4>>{
           {4, 1, 1, 3}, {4, 1, 2, 4}, {3, 2, 1, 5}}) {
    GridHamiltonian ham =
        gen_planted_csp(w, h, static_cast<unsigned long long>(seed), false);
    BuildOptions opts;
    opts.gamma = gamma;
    AgspBundle bundle = build_kappa(ham, 1, 1, p, opts);
    CHECK(bundle.kappa.width() == ham.width());
    CHECK(!bundle.build_log.empty());
    CHECK(static_cast<int>(bundle.cut_ranks.size()) ==
          std::max(0, ham.width() - 1));
    Matrix got = mpo_to_dense(bundle.kappa);
    Matrix want = oracle::kappa_ref(ham, 1, 1, p, gamma);
    CHECK(operator_norm(Matrix(got - want)) <= 1e-9);
  }
}

TEST_CASE("kappa acts as the identity on the ground space") {
  GridHamiltonian ham = gen_planted_csp(4, 2, 17, /*unique=*/false);
  BuildOptions opts;
  opts.gamma = 1.0;
  AgspBundle bundle = build_kappa(ham, 2, 1, 2, opts);
  Matrix z = exact_ground_space(ham);
  Matrix kd = mpo_to_dense(bundle.kappa);
  CHECK((kd * z - z).norm() <= 1e-9);

  // Debug mode with exact projectors keeps the fixed space too.
  BuildOptions ex = opts;
  ex.exact_projectors = true;
  AgspBundle eb = build_kappa(ham, 2, 1, 1, ex);
  CHECK((mpo_to_dense(eb.kappa) * z - z).norm() <= 1e-9);
}

TEST_CASE("certified bound formula and measured shrinking") {
  GridHamiltonian ham = gen_planted_csp(4, 2, 17, /*unique=*/true);
  BuildOptions opts;
  opts.gamma = 1.0;
  opts.calibrate = true;
  const int m = 2, t = 1, p = 2;
  AgspBundle bundle = build_kappa(ham, m, t, p, opts);
  const int wc = bundle.layout.wide_count();
  CHECK(bundle.delta_bound ==
        doctest::Approx(shrinking_factor_bound(m, t, p, wc, bundle.gamma,
                                               bundle.shrink_c))
            .epsilon(1e-12));
  const double direct =
      std::pow(wc * std::exp(-m) + 2.0 * std::exp(-bundle.shrink_c * t), 2.0 * p);
  CHECK(bundle.delta_bound == doctest::Approx(direct).epsilon(1e-12));

  MeasuredShrink ms = measure_shrinking(ham, bundle.kappa);
  CHECK(ms.ground_defect <= 1e-9);
  CHECK(ms.delta <= bundle.delta_bound + 1e-9);
  CHECK_THROWS_AS(measure_shrinking(ham, bundle.kappa, 8), CapExceeded);
}

TEST_CASE("gamma defaults to the measured local gap") {
  GridHamiltonian ham = gen_planted_csp(4, 1, 6, /*unique=*/true);
  AgspBundle bundle = build_kappa(ham, 1, 1, 1);
  CHECK(bundle.gamma == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("calibrated tail constant is positive, capped, and valid") {
  GridHamiltonian ham = gen_planted_csp(4, 2, 17, /*unique=*/true);
  BandLayout lay = layout_bands(ham.width(), ham.height(), 1, 1, true);
  const double c = calibrate_shrinking_c(ham, lay, 1.0);
  CHECK(c > 0.0);
  CHECK(c <= 6.0);
}

TEST_CASE("practical parameter choice finds the smallest working knobs") {
  GridHamiltonian ham = gen_planted_csp(4, 1, 6, /*unique=*/true);
  BuildOptions opts;
  opts.gamma = 1.0;
  ChosenParams cp = choose_parameters(ham, 1.0, 0.5, opts);
  CHECK(cp.met_target);
  CHECK(cp.m == 1);
  CHECK(cp.t == 1);
  CHECK(cp.p == 1);
  CHECK(cp.predicted_delta <= 0.5);
}

TEST_CASE("theory parameter choice scales sanely") {
  ChosenParams a = choose_parameters(1.0, 1, 2, 0.1);
  CHECK(a.m >= 1);
  CHECK(a.t >= a.m);
  CHECK(a.p >= 1);
  CHECK(a.predicted_log_rank > 0.0);
  CHECK(a.predicted_delta >= 0.0);  // may underflow to zero at large m*p
  CHECK(a.predicted_delta < 1.0);
  // Smaller gap costs more.
  ChosenParams b = choose_parameters(0.01, 1, 2, 0.1);
  CHECK(b.t >= a.t);
  CHECK(b.p >= a.p);
  // Tighter accuracy cannot shrink the power.
  ChosenParams cteam = choose_parameters(1.0, 1, 2, 1e-4);
  CHECK(cteam.p >= a.p);
  CHECK(cteam.predicted_delta <= a.predicted_delta + 1e-15);
}
