#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "agsp/errors.hpp"
#include "agsp/grid_hamiltonian.hpp"
#include "agsp/instances.hpp"
#include "agsp/linalg.hpp"
#include "agsp/rng.hpp"
#include "support/oracles.hpp"

using namespace agsp;

namespace {

Matrix hermitian_in_unit_box(Rng& rng, long n) {
  Matrix g = gaussian_matrix(rng, n, n);
  Matrix h = 0.5 * (g + g.adjoint());
  Eigh e = eigh(h);
  RealVector vals = e.values;
  const double lo = vals.minCoeff(), hi = vals.maxCoeff();
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals(i) = (vals(i) - lo) / std::max(hi - lo, 1e-12);
  return e.vectors * vals.asDiagonal().toDenseMatrix().cast<Complex>() *
         e.vectors.adjoint();
}

}  // namespace

TEST_CASE("site_position is column-major little-endian") {
  CHECK(site_position({1, 1}, 3) == 0);
  CHECK(site_position({1, 3}, 3) == 2);
  CHECK(site_position({2, 1}, 3) == 3);
  CHECK(site_position({4, 2}, 3) == 10);
}

TEST_CASE("canonicalize_term reorders big-endian input to sorted little-endian") {
  Rng rng(41);
  const int q = 2;
  Matrix a = hermitian_in_unit_box(rng, 2);
  Matrix b = hermitian_in_unit_box(rng, 2);
  Site sa{2, 1}, sb{1, 1};  // sb < sa

  // Listing [sa, sb] big-endian makes sb the fastest digit, which is already
  // the internal layout of the sorted pair (sb, sa).
  InteractionTerm t1 = canonicalize_term({sa, sb}, oracle::kron_ref(b, a), q);
  REQUIRE(t1.sites.size() == 2);
  CHECK(t1.sites[0] == sb);
  CHECK(t1.sites[1] == sa);
  CHECK((t1.matrix - oracle::kron_ref(b, a)).norm() <= 1e-13);

  // Listing [sb, sa] big-endian makes sa the fastest digit; the canonical
  // form must swap the two digits.
  InteractionTerm t2 = canonicalize_term({sb, sa}, oracle::kron_ref(a, b), q);
  CHECK((t2.matrix - oracle::kron_ref(b, a)).norm() <= 1e-13);

  CHECK_THROWS_AS(canonicalize_term({}, Matrix::Identity(1, 1), q),
                  ShapeMismatch);
  CHECK_THROWS_AS(canonicalize_term({sa, sa}, Matrix::Identity(4, 4), q),
                  ShapeMismatch);
  CHECK_THROWS_AS(canonicalize_term({sa}, Matrix::Identity(3, 3), q),
                  ShapeMismatch);
}

TEST_CASE("embed_at_positions matches digit-surgery reference") {
  Rng rng(42);
  const int q = 3;
  Matrix op = gaussian_matrix(rng, 9, 9);
  Matrix got = embed_at_positions(op, {3, 1}, 4, q);
  Matrix want = oracle::embed_ref(op, {3, 1}, 4, q);
  CHECK((got - want).norm() <= 1e-12 * want.norm());
  CHECK_THROWS_AS(embed_at_positions(op, {0, 4}, 4, q), ShapeMismatch);
  CHECK_THROWS_AS(embed_at_positions(op, {0}, 4, q), ShapeMismatch);
}

TEST_CASE("constructor validation") {
  const int q = 2;
  std::vector<InteractionTerm> ok = {
      canonicalize_term({{1, 1}, {2, 1}}, Matrix::Identity(4, 4), q)};
  CHECK_NOTHROW(GridHamiltonian(2, 1, q, ok));
  CHECK_THROWS_AS(GridHamiltonian(0, 1, q, ok), ShapeMismatch);
  CHECK_THROWS_AS(GridHamiltonian(2, 1, 1, ok), ShapeMismatch);

  // Out-of-grid site.
  CHECK_THROWS_AS(GridHamiltonian(1, 1, q, ok), ShapeMismatch);

  // Unsorted sites are rejected (canonicalize_term is the entry point).
  std::vector<InteractionTerm> bad = ok;
  std::swap(bad[0].sites[0], bad[0].sites[1]);
  CHECK_THROWS_AS(GridHamiltonian(2, 1, q, bad), ShapeMismatch);

  // Eigenvalues above 1: 2 * projector.
  std::vector<InteractionTerm> hot = {
      canonicalize_term({{1, 1}}, 2.0 * (Matrix(2, 2) << 1, 0, 0, 0).finished(),
                        q)};
  CHECK_THROWS_AS(GridHamiltonian(2, 1, q, hot), NotHermitian);
}

TEST_CASE("tall grids are transposed to wide ones") {
  Rng rng(43);
  const int q = 2;
  Matrix m = hermitian_in_unit_box(rng, 4);
  // 2 x 3 grid with a term on {(1,2), (2,1)}; the transposed 3 x 2 grid
  // carries the same term on swapped coordinates.
  GridHamiltonian tall(2, 3, q,
                       {canonicalize_term({{1, 2}, {2, 1}}, m, q)});
  GridHamiltonian wide(3, 2, q,
                       {canonicalize_term({{2, 1}, {1, 2}}, m, q)});
  CHECK(tall.width() == 3);
  CHECK(tall.height() == 2);
  CHECK(tall.column_dim() == 4);
  REQUIRE(tall.terms().size() == 1);
  const auto& tt = tall.terms()[0];
  const auto& wt = wide.terms()[0];
  REQUIRE(tt.sites.size() == 2);
  CHECK(tt.sites[0] == wt.sites[0]);
  CHECK(tt.sites[1] == wt.sites[1]);
  CHECK((tt.matrix - wt.matrix).norm() <= 1e-13);
}

TEST_CASE("interaction degree and diameter bookkeeping") {
  const int q = 2;
  Matrix edge = Matrix::Zero(4, 4);
  edge(3, 3) = 1.0;  // |11><11|
  std::vector<InteractionTerm> terms = {
      canonicalize_term({{1, 1}, {2, 1}}, edge, q),
      canonicalize_term({{2, 1}, {3, 1}}, edge, q),
      canonicalize_term({{2, 1}, {2, 2}}, edge, q),
  };
  GridHamiltonian h(3, 2, q, terms);
  CHECK(h.interaction_degree_c() == 12);  // site (2,1) touches 3 terms
  CHECK(h.diameter_bound() == 1);
  GridHamiltonian empty(3, 2, q, {});
  CHECK(empty.interaction_degree_c() == 4);
  CHECK(empty.diameter_bound() == 0);
}

TEST_CASE("restrict_to_region matches the reference embedding") {
  Rng rng(44);
  const int q = 2;
  std::vector<InteractionTerm> terms;
  // Horizontal and vertical edges of a 3x2 grid with random term matrices.
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y)
      terms.push_back(canonicalize_term({{x, y}, {x + 1, y}},
                                        hermitian_in_unit_box(rng, 4), q));
  for (int x = 1; x <= 3; ++x)
    terms.push_back(canonicalize_term({{x, 1}, {x, 2}},
                                      hermitian_in_unit_box(rng, 4), q));
  GridHamiltonian h(3, 2, q, terms);

  Rectangle rect{1, 2, 1, 2};
  SubHamiltonian sub = restrict_to_region(h, rect.sites());
  REQUIRE(sub.sites.size() == 4);
  // Oracle: embed every fully-inside term over the sorted region slots.
  Matrix want = Matrix::Zero(16, 16);
  for (const auto& t : h.terms()) {
    std::vector<long> slots;
    bool inside = true;
    for (const auto& s : t.sites) {
      long slot = -1;
      for (size_t i = 0; i < sub.sites.size(); ++i)
        if (sub.sites[i] == s) slot = static_cast<long>(i);
      if (slot < 0) inside = false;
      slots.push_back(slot);
    }
    if (inside) want += oracle::embed_ref(t.matrix, slots, 4, q);
  }
  CHECK((sub.matrix - want).norm() <= 1e-12 * std::max(1.0, want.norm()));
  CHECK_THROWS_AS(restrict_to_region(h, rect.sites(), 8), CapExceeded);
}

TEST_CASE("local_gap agrees with brute force over rectangles") {
  const int q = 2;
  for (unsigned long long seed : {7ull, 8ull}) {
    GridHamiltonian h = gen_planted_csp(3, 2, seed, /*unique=*/true);
    CHECK(local_gap(h) == doctest::Approx(oracle::brute_local_gap(h, 0))
                              .epsilon(1e-10));
    CHECK(local_gap(h, 4) == doctest::Approx(oracle::brute_local_gap(h, 4))
                                 .epsilon(1e-10));
  }
  // All-projector instances have local gap exactly 1.
  GridHamiltonian h = gen_planted_csp(4, 1, 3, /*unique=*/false);
  CHECK(local_gap(h) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("verify_frustration_free counts ground degeneracy") {
  const int q = 2;
  Matrix edge = Matrix::Zero(4, 4);
  edge(3, 3) = 1.0;  // reject 11 on horizontal pairs
  std::vector<InteractionTerm> terms;
  for (int y = 1; y <= 2; ++y)
    terms.push_back(canonicalize_term({{1, y}, {2, y}}, edge, q));
  GridHamiltonian h(2, 2, q, terms);
  FrustrationReport rep = verify_frustration_free(h);
  CHECK(rep.frustration_free);
  CHECK(rep.ground_energy == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.degeneracy == 9);

  Matrix half = 0.5 * Matrix::Identity(2, 2);
  GridHamiltonian frustrated(2, 1, q,
                             {canonicalize_term({{1, 1}}, half, q)});
  FrustrationReport bad = verify_frustration_free(frustrated);
  CHECK_FALSE(bad.frustration_free);
  CHECK(bad.ground_energy == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(bad.degeneracy == 0);
}

TEST_CASE("exact_ground_space spans the zero eigenspace") {
  GridHamiltonian h = gen_planted_csp(3, 2, 5, /*unique=*/false);
  Matrix z = exact_ground_space(h);
  CHECK(z.cols() == 2);
  Matrix dense = oracle::dense_hamiltonian(h);
  CHECK((dense * z).norm() <= 1e-8);
  CHECK((z.adjoint() * z - Matrix::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("planted generator produces the promised ground spaces") {
  std::vector<int> planted;
  GridHamiltonian h = gen_planted_csp(4, 2, 12, /*unique=*/true, &planted);
  REQUIRE(planted.size() == 8);
  FrustrationReport rep = verify_frustration_free(h);
  CHECK(rep.frustration_free);
  CHECK(rep.degeneracy == 1);
  // The planted basis state is a ground vector of every (diagonal) term.
  long idx = 0;
  for (long p = static_cast<long>(planted.size()) - 1; p >= 0; --p)
    idx = idx * 2 + planted[static_cast<size_t>(p)];
  Matrix dense = oracle::dense_hamiltonian(h);
  CHECK(std::abs(dense(idx, idx)) <= 1e-12);

  GridHamiltonian pair = gen_planted_csp(3, 2, 21, /*unique=*/false);
  CHECK(verify_frustration_free(pair).degeneracy == 2);
}

TEST_CASE("random product-state generator hits the target degeneracy") {
  GridHamiltonian h = gen_random_ff(3, 2, 2, 31, 2);
  FrustrationReport rep = verify_frustration_free(h);
  CHECK(rep.frustration_free);
  CHECK(rep.degeneracy == 2);
  GridHamiltonian h3 = gen_random_ff(3, 1, 3, 32, 1);
  CHECK(verify_frustration_free(h3).degeneracy == 1);
}
