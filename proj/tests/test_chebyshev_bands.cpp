#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "agsp/bands.hpp"
#include "agsp/chebyshev.hpp"
#include "agsp/errors.hpp"
#include "agsp/rng.hpp"
#include "support/oracles.hpp"

using namespace agsp;

TEST_CASE("chebyshev_t matches the closed form inside and outside [-1, 1]") {
  for (int n = 0; n <= 12; ++n)
    for (double x : {-2.5, -1.0, -0.3, 0.0, 0.7, 1.0, 3.2})
      CHECK(chebyshev_t(n, x) ==
            doctest::Approx(oracle::chebyshev_t_ref(n, x)).epsilon(1e-11));
}

TEST_CASE("chebyshev_fit is exact on polynomials of the fitted degree") {
  auto fn = [](double x) { return 2.0 * x * x * x - x + 0.25; };
  ChebyshevSeries s = chebyshev_fit(fn, 3, -0.5, 2.0);
  CHECK(s.degree() == 3);
  for (int i = 0; i <= 50; ++i) {
    double x = -0.5 + 2.5 * i / 50.0;
    CHECK(s.eval(x) == doctest::Approx(fn(x)).epsilon(1e-12));
  }
}

TEST_CASE("eval_on_operator agrees with scalar application in the eigenbasis") {
  Rng rng(51);
  Matrix g = gaussian_matrix(rng, 6, 6);
  Matrix h = 0.5 * (g + g.adjoint());
  h /= (2.0 * operator_norm(h));
  h += 0.5 * Matrix::Identity(6, 6);  // spectrum inside [0, 1]
  ChebyshevSeries s = chebyshev_fit(
      [](double x) { return std::cos(3.0 * x) + x * x; }, 9, 0.0, 1.0);
  Eigh e = eigh(h);
  Matrix d = Matrix::Zero(6, 6);
  for (int i = 0; i < 6; ++i) d(i, i) = s.eval(e.values(i));
  Matrix want = e.vectors * d * e.vectors.adjoint();
  CHECK((s.eval_on_operator(h) - want).norm() <= 1e-10);
}

TEST_CASE("step polynomial fixes zero exactly and suppresses [eta, 1]") {
  for (double eta : {0.5, 0.1, 0.01}) {
    StepPolynomial step = build_step_polynomial(eta);
    CHECK(step.eval(0.0) == 1.0);  // bit-for-bit
    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      double x = eta + (1.0 - eta) * i / 10000.0;
      worst = std::max(worst, std::abs(step.eval(x)));
    }
    CHECK(worst <= 0.05 + 1e-9);
    // Minimal degree for the Chebyshev amplitude argument.
    const double y0 = (1.0 + eta) / (1.0 - eta);
    CHECK(oracle::chebyshev_t_ref(step.degree, y0) >= 20.0 - 1e-9);
    if (step.degree > 1)
      CHECK(oracle::chebyshev_t_ref(step.degree - 1, y0) < 20.0 + 1e-9);
  }
  CHECK_THROWS_AS(build_step_polynomial(0.0), DegenerateThreshold);
  CHECK_THROWS_AS(build_step_polynomial(-0.1), DegenerateThreshold);
  CHECK_THROWS_AS(build_step_polynomial(1.0), DegenerateThreshold);
  CHECK_THROWS_AS(build_step_polynomial(1.0 - 1e-12), DegenerateThreshold);
}

TEST_CASE("robust AND equals one at all-ones and is tiny on noise points") {
  Rng rng(52);
  for (int m = 1; m <= 8; ++m) {
    RobustAndPolynomial p = build_robust_and(m);
    CHECK(p.arity == m);
    CHECK(p.amplifier_power == (m + 1) / 2);
    CHECK(p.eval(std::vector<double>(static_cast<size_t>(m), 1.0)) == 1.0);
    const double cap = std::exp(-m);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> xs(static_cast<size_t>(m));
      const long forced = rng.uniform_int(m);
      for (int i = 0; i < m; ++i) {
        const bool noise = (i == forced) || rng.uniform() < 0.5;
        xs[static_cast<size_t>(i)] =
            noise ? (rng.uniform() - 0.5) / 10.0 : 1.0;
      }
      CHECK(std::abs(p.eval(xs)) <= cap + 1e-12);
    }
  }
  RobustAndPolynomial narrow = build_robust_and(5, 2);
  CHECK(narrow.arity == 2);
  CHECK(narrow.amplifier_power == 3);
  CHECK(narrow.eval({1.0, 1.0}) == 1.0);
  CHECK_THROWS_AS(build_robust_and(0), ShapeMismatch);
  CHECK_THROWS_AS(build_robust_and(3, 0), ShapeMismatch);
}

TEST_CASE("cleanup polynomial is pinned at one and small on the noise window") {
  RobustAndPolynomial p = build_robust_and(4);
  CHECK(p.cleanup.eval(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double e2 = std::exp(-2.0);
  for (int i = 0; i <= 200; ++i) {
    double x = -0.05 + 0.1 * i / 200.0;
    CHECK(std::abs(p.cleanup.eval(x)) <= e2 + 1e-12);
  }
}

TEST_CASE("eval_and_on_operators factors the AND over disjoint supports") {
  Rng rng(53);
  auto bounded_hermitian = [&](long n) {
    Matrix g = gaussian_matrix(rng, n, n);
    Matrix h = 0.5 * (g + g.adjoint());
    return Matrix(h / (1.05 * operator_norm(h)));  // spectrum inside [-1, 1]
  };
  std::vector<SupportedOperator> ops = {
      {{Site{1, 1}, Site{1, 2}}, bounded_hermitian(4)},
      {{Site{3, 1}}, bounded_hermitian(2)},
  };
  RobustAndPolynomial p = build_robust_and(5, 2);
  FactoredOperator fo = eval_and_on_operators(p, ops);
  REQUIRE(fo.factors.size() == 2);
  CHECK(fo.factors[0].sites == ops[0].sites);

  // Dense oracle on a 3x2 grid: AND through each operator's own eigenbasis.
  const long n_slots = 6;
  Matrix want = Matrix::Identity(64, 64);
  for (const auto& op : ops) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(op.matrix);
    Matrix d = Matrix::Zero(op.matrix.rows(), op.matrix.cols());
    for (long i = 0; i < es.eigenvalues().size(); ++i)
      d(i, i) = std::pow(p.cleanup.eval(es.eigenvalues()(i)),
                         p.amplifier_power);
    Matrix mapped = es.eigenvectors() * d * es.eigenvectors().adjoint();
    std::vector<long> slots;
    for (const auto& s : op.sites) slots.push_back(site_position(s, 2));
    want = want * oracle::embed_ref(mapped, slots, n_slots, 2);
  }
  want /= p.denominator;

  Matrix got = Matrix::Identity(64, 64);
  for (const auto& f : fo.factors) {
    std::vector<long> slots;
    for (const auto& s : f.sites) slots.push_back(site_position(s, 2));
    got = got * oracle::embed_ref(f.matrix, slots, n_slots, 2);
  }
  got *= fo.scalar;
  CHECK((got - want).norm() <= 1e-9);

  CHECK_THROWS_AS(eval_and_on_operators(p, {ops[0]}), ShapeMismatch);
  std::vector<SupportedOperator> clash = {
      {{Site{1, 1}}, bounded_hermitian(2)},
      {{Site{1, 1}}, bounded_hermitian(2)},
  };
  RobustAndPolynomial p2 = build_robust_and(2);
  CHECK_THROWS_AS(eval_and_on_operators(p2, clash), OverlappingSupports);
}

namespace {

void check_layout_invariants(const BandLayout& lay, int w, int m, int t) {
  // Narrow band index i covers (3it - 2t, 3it + 2t], clipped to the grid.
  std::vector<bool> covered(static_cast<size_t>(w + 1), false);
  std::map<int, const NarrowBand*> by_index;
  for (const auto& nb : lay.narrow) {
    CHECK(nb.col_lo == std::max(1, 3 * nb.index * t - 2 * t + 1));
    CHECK(nb.col_hi == std::min(w, 3 * nb.index * t + 2 * t));
    CHECK(nb.col_lo <= nb.col_hi);
    by_index[nb.index] = &nb;
    for (int c = nb.col_lo; c <= nb.col_hi; ++c)
      covered[static_cast<size_t>(c)] = true;
    CHECK(lay.narrow_by_index(nb.index).col_lo == nb.col_lo);
    CHECK(static_cast<int>(lay.band_sites(nb).size()) ==
          nb.width() * lay.grid_height);
  }
  for (int c = 1; c <= w; ++c) CHECK(covered[static_cast<size_t>(c)]);

  // Same-parity bands are pairwise disjoint; neighbours overlap in <= t.
  for (const auto& a : lay.narrow)
    for (const auto& b : lay.narrow) {
      if (a.index >= b.index) continue;
      const int overlap =
          std::min(a.col_hi, b.col_hi) - std::max(a.col_lo, b.col_lo) + 1;
      if (a.index % 2 == b.index % 2) CHECK(overlap <= 0);
      if (b.index == a.index + 1) CHECK(overlap <= t);
    }

  // Wide strips tile the grid; xi lists exactly the odd bands that exist,
  // each inside its strip.
  int expect_lo = 1;
  std::map<int, int> odd_uses;
  for (const auto& wb : lay.wide) {
    CHECK(wb.col_lo == expect_lo);
    CHECK(wb.col_lo == 6 * (wb.index - 1) * m * t + 1);
    CHECK(wb.col_hi == std::min(w, 6 * wb.index * m * t));
    expect_lo = wb.col_hi + 1;
    for (int idx : wb.xi) {
      CHECK(idx % 2 == 1);
      CHECK(idx > 2 * (wb.index - 1) * m);
      CHECK(idx < 2 * wb.index * m);
      REQUIRE(by_index.count(idx) == 1);
      const NarrowBand* nb = by_index[idx];
      CHECK(nb->col_lo > wb.col_lo);
      CHECK(nb->col_hi <= wb.col_hi);
      // Strictly inside unless both band and strip are clipped by the edge.
      if (nb->col_hi < lay.grid_width) CHECK(nb->col_hi < wb.col_hi);
      ++odd_uses[idx];
    }
  }
  CHECK(expect_lo == w + 1);
  for (const auto& nb : lay.narrow)
    if (!nb.even()) CHECK(odd_uses[nb.index] == 1);
  long total_uses = 0;
  for (const auto& kv : odd_uses) {
    CHECK(kv.second == 1);
    total_uses += kv.second;
  }
  long odd_count = 0;
  for (const auto& nb : lay.narrow)
    if (!nb.even()) ++odd_count;
  CHECK(total_uses == odd_count);
}

}  // namespace

TEST_CASE("band layout invariants across grid shapes") {
  for (auto [w, m, t] : std::vector<std::array<int, 3>>{
           {24, 1, 1}, {30, 2, 1}, {40, 1, 2}, {13, 1, 1}, {36, 1, 3}}) {
    BandLayout lay = layout_bands(w, 2, m, t, false);
    CHECK_FALSE(lay.clipped);
    check_layout_invariants(lay, w, m, t);
  }
  // Clipped layouts keep the invariants with the flag set.
  for (auto [w, m, t] : std::vector<std::array<int, 3>>{
           {5, 1, 1}, {11, 2, 1}, {9, 1, 2}}) {
    CHECK_THROWS_AS(layout_bands(w, 2, m, t, false), GridTooNarrow);
    BandLayout lay = layout_bands(w, 2, m, t, true);
    CHECK(lay.clipped);
    check_layout_invariants(lay, w, m, t);
  }
}

TEST_CASE("band layout explicit small example") {
  BandLayout lay = layout_bands(24, 3, 1, 1, false);
  REQUIRE(lay.narrow.size() == 9);
  CHECK(lay.narrow[0].index == 0);
  CHECK(lay.narrow[0].col_lo == 1);
  CHECK(lay.narrow[0].col_hi == 2);
  CHECK(lay.narrow[1].col_lo == 2);
  CHECK(lay.narrow[1].col_hi == 5);
  CHECK(lay.narrow[2].col_lo == 5);
  CHECK(lay.narrow[2].col_hi == 8);
  CHECK(lay.narrow[0].even());
  CHECK_FALSE(lay.narrow[1].even());
  REQUIRE(lay.wide.size() == 4);
  CHECK(lay.wide[0].col_lo == 1);
  CHECK(lay.wide[0].col_hi == 6);
  CHECK(lay.wide[3].col_hi == 24);
  REQUIRE(lay.wide[0].xi.size() == 1);
  CHECK(lay.wide[0].xi[0] == 1);
  REQUIRE(lay.wide[3].xi.size() == 1);
  CHECK(lay.wide[3].xi[0] == 7);
}
