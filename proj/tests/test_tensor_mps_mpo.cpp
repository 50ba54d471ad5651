#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "agsp/errors.hpp"
#include "agsp/mpo.hpp"
#include "agsp/mps.hpp"
#include "agsp/rng.hpp"
#include "agsp/tensor.hpp"
#include "support/oracles.hpp"

using namespace agsp;

namespace {

SubspaceMps random_mps(Rng& rng, int width, long phys, long deg) {
  Matrix frame = gaussian_matrix(
      rng, static_cast<long>(std::pow(static_cast<double>(phys), width)), deg);
  return mps_from_dense_frame(frame, width, phys);
}

Mpo random_mpo(Rng& rng, int width, long phys) {
  const long dim = static_cast<long>(std::pow(static_cast<double>(phys), width));
  Matrix dense = gaussian_matrix(rng, dim, dim);
  std::vector<long> dims(static_cast<size_t>(width), phys);
  return mpo_from_dense(dense, dims);
}

}  // namespace

TEST_CASE("tensor mat views, permutation, and reshape") {
  Tensor t({2, 3, 4});
  for (long i = 0; i < t.size(); ++i) t.data()[i] = Complex(i, -i);
  // mat(1): rows = first index, fastest-first linear order.
  CHECK(t.mat(1)(1, 2 + 3 * 3) == Complex(1 + 2 * (2 + 3 * 3), -(1 + 2 * (2 + 3 * 3))));
  Tensor p = t.permuted({2, 0, 1});
  CHECK(p.dim(0) == 4);
  CHECK(p.dim(1) == 2);
  CHECK(p.dim(2) == 3);
  for (long a = 0; a < 2; ++a)
    for (long b = 0; b < 3; ++b)
      for (long c = 0; c < 4; ++c)
        CHECK(p.data()[c + 4 * (a + 2 * b)] == t.data()[a + 2 * (b + 3 * c)]);
  Tensor r = t.reshaped({6, 4});
  CHECK(r.mat(1)(5, 3) == t.data()[5 + 6 * 3]);
}

TEST_CASE("mps dense round trip and reference contraction") {
  Rng rng(21);
  SubspaceMps y = random_mps(rng, 3, 2, 3);
  Matrix dense = mps_to_dense_frame(y);
  CHECK(dense.rows() == 8);
  CHECK(dense.cols() == 3);
  CHECK((dense - oracle::mps_frame_ref(y)).norm() <= 1e-12 * dense.norm());
}

TEST_CASE("extend_by_column appends an identity column") {
  Rng rng(22);
  SubspaceMps y = random_mps(rng, 2, 2, 2);
  Matrix before = mps_to_dense_frame(y);
  SubspaceMps ext = extend_by_column(y, 2);
  CHECK(ext.width() == 3);
  CHECK(ext.deg_dim() == 4);
  Matrix after = mps_to_dense_frame(ext);
  // Columns enumerate (old frame) x (new basis state), old index fastest.
  CHECK((after - oracle::kron_ref(before, Matrix::Identity(2, 2))).norm() <=
        1e-12 * after.norm());
}

TEST_CASE("orthonormalize keeps the span and sets the isometry flag") {
  Rng rng(23);
  SubspaceMps y = random_mps(rng, 3, 2, 5);
  Matrix before = mps_to_dense_frame(y);
  CHECK_FALSE(y.isometry);
  orthonormalize(y);
  CHECK(y.isometry);
  Matrix after = mps_to_dense_frame(y);
  CHECK((after.adjoint() * after - Matrix::Identity(after.cols(), after.cols()))
            .norm() <= 1e-10);
  CHECK(oracle::min_cos2_ref(after, before) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(oracle::min_cos2_ref(before, after) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mps_overlap equals the dense Gram matrix") {
  Rng rng(24);
  SubspaceMps a = random_mps(rng, 3, 2, 2);
  SubspaceMps b = random_mps(rng, 3, 2, 4);
  Matrix gram = mps_overlap(a, b);
  Matrix want = mps_to_dense_frame(a).adjoint() * mps_to_dense_frame(b);
  CHECK((gram - want).norm() <= 1e-11 * std::max(1.0, want.norm()));
}

TEST_CASE("apply_on_degeneracy selects sub-frames") {
  Rng rng(25);
  SubspaceMps y = random_mps(rng, 2, 3, 4);
  Matrix map = gaussian_matrix(rng, 4, 2);
  SubspaceMps z = apply_on_degeneracy(y, map);
  CHECK(z.deg_dim() == 2);
  CHECK((mps_to_dense_frame(z) - mps_to_dense_frame(y) * map).norm() <= 1e-11);
  CHECK_THROWS_AS(apply_on_degeneracy(y, gaussian_matrix(rng, 3, 2)),
                  DimensionMismatch);
}

TEST_CASE("mpo dense round trip, identity, and reference contraction") {
  Rng rng(26);
  Mpo a = random_mpo(rng, 3, 2);
  Matrix dense = mpo_to_dense(a);
  CHECK((dense - oracle::mpo_dense_ref(a)).norm() <= 1e-11 * dense.norm());
  Mpo id = mpo_identity({2, 2, 2});
  CHECK((mpo_to_dense(id) - Matrix::Identity(8, 8)).norm() <= 1e-14);
}

TEST_CASE("mpo_multiply composes operators (a after b)") {
  Rng rng(27);
  Mpo a = random_mpo(rng, 2, 3);
  Mpo b = random_mpo(rng, 2, 3);
  Matrix want = mpo_to_dense(a) * mpo_to_dense(b);
  CHECK((mpo_to_dense(mpo_multiply(a, b)) - want).norm() <= 1e-10 * want.norm());
}

TEST_CASE("mpo_apply equals dense operator application") {
  Rng rng(28);
  Mpo k = random_mpo(rng, 3, 2);
  SubspaceMps y = random_mps(rng, 3, 2, 2);
  Matrix before = mps_to_dense_frame(y);
  SubspaceMps moved = mpo_apply(k, y, /*orthonormal=*/false);
  CHECK((mps_to_dense_frame(moved) - mpo_to_dense(k) * before).norm() <=
        1e-10 * before.norm());
  SubspaceMps ortho = mpo_apply(k, y);
  Matrix f = mps_to_dense_frame(ortho);
  CHECK((f.adjoint() * f - Matrix::Identity(f.cols(), f.cols())).norm() <= 1e-9);
  CHECK(oracle::min_cos2_ref(f, mpo_to_dense(k) * before) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mpo_apply merges an open right bond into the degeneracy index") {
  Rng rng(29);
  // Kappa on 3 columns applied to a width-2 subspace: the dangling MPO bond
  // at the cut widens the frame label.
  Mpo k = random_mpo(rng, 3, 2);
  SubspaceMps y = random_mps(rng, 2, 2, 1);
  SubspaceMps moved = mpo_apply(k, y, /*orthonormal=*/false);
  CHECK(moved.width() == 2);
  const long cut_rank = k.bond(2);
  CHECK(moved.deg_dim() == 1 * cut_rank);
  // The merged frame must span exactly { (I ⊗ <r|) K (y ⊗ e_r) : r }:
  // compare span projectors against the dense partial application.
  Matrix kd = mpo_to_dense(k);              // 8 x 8
  Matrix yf = mps_to_dense_frame(y);        // 4 x 1
  Matrix big = kd * oracle::kron_ref(yf, Matrix::Identity(2, 2));  // 8 x 2
  // Fold the third column's physical index into the column label.
  Matrix folded = Matrix::Zero(4, 4);
  for (long r = 0; r < 8; ++r)
    for (long c = 0; c < 2; ++c) folded(r % 4, c + 2 * (r / 4)) = big(r, c);
  Matrix got = mps_to_dense_frame(moved);
  auto span_projector = [](const Matrix& f) {
    Eigen::JacobiSVD<Matrix> svd(f, Eigen::ComputeThinU);
    long r = 0;
    for (long i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++r;
    Matrix u = svd.matrixU().leftCols(r);
    return Matrix(u * u.adjoint());
  };
  CHECK((span_projector(folded) - span_projector(got)).norm() <= 1e-9);
}

TEST_CASE("mpo_trim_rank certifies its Frobenius error") {
  Rng rng(30);
  Mpo a = random_mpo(rng, 4, 2);
  Matrix dense = mpo_to_dense(a);
  TrimReport rep;
  Mpo trimmed = mpo_trim_rank(a, 1e-2, &rep);
  CHECK(trimmed.max_bond() <= a.max_bond());
  const double err = (mpo_to_dense(trimmed) - dense).norm();
  CHECK(err <= rep.frobenius_bound + 1e-9);
  Mpo kept = mpo_trim_rank(a, 0.0);
  CHECK((mpo_to_dense(kept) - dense).norm() <= 1e-10 * dense.norm());
}

TEST_CASE("local_operators_to_mpo and contract_expectation match dense") {
  Rng rng(31);
  const int w = 3, h = 2, q = 2;
  Matrix g1 = gaussian_matrix(rng, 2, 2);
  Matrix op1 = 0.5 * (g1 + g1.adjoint());
  Matrix op2 = gaussian_matrix(rng, 4, 4);
  std::vector<LocalOperator> factors = {
      LocalOperator{{Site{1, 2}}, op1},
      LocalOperator{{Site{2, 1}, Site{3, 1}}, op2},
  };
  Mpo a = local_operators_to_mpo(factors, w, h, q);
  Matrix want = oracle::embed_ref(op1, {1}, 6, q) *
                oracle::embed_ref(op2, {2, 4}, 6, q);
  CHECK((mpo_to_dense(a) - want).norm() <= 1e-11 * want.norm());

  SubspaceMps y = random_mps(rng, 3, 4, 3);
  Matrix f = mps_to_dense_frame(y);
  Matrix got = contract_expectation(y, factors, h, q);
  Matrix ref = f.adjoint() * want * f;
  CHECK((got - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
  CHECK((contract_expectation(y, a) - ref).norm() <=
        1e-10 * std::max(1.0, ref.norm()));
}

TEST_CASE("refine_coarse_mpo reproduces the grouped operator") {
  Rng rng(32);
  // Two groups of widths 2 and 1 over qubits, with a rank-3 connecting bond.
  const long d = 2;
  CoarseMpo cm;
  cm.phys = d;
  cm.cols = {2, 1};
  Tensor a({1, 4, 4, 3});
  Tensor b({3, 2, 2, 1});
  for (long i = 0; i < a.size(); ++i) a.data()[i] = Complex(rng.normal(), rng.normal());
  for (long i = 0; i < b.size(); ++i) b.data()[i] = Complex(rng.normal(), rng.normal());
  cm.mpo.tensors = {a, b};
  Mpo fine = refine_coarse_mpo(cm);
  CHECK(fine.width() == 3);

  // Dense reference: contract the coarse chain directly, then interleave the
  // two-qubit group's (out, in) digits into per-qubit pairs.
  Matrix dense = Matrix::Zero(8, 8);
  for (long bo = 0; bo < 4; ++bo)
    for (long bi = 0; bi < 4; ++bi)
      for (long co = 0; co < 2; ++co)
        for (long ci = 0; ci < 2; ++ci) {
          Complex v = 0.0;
          for (long r = 0; r < 3; ++r)
            v += a.data()[0 + 1 * (bo + 4 * (bi + 4 * r))] *
                 b.data()[r + 3 * (co + 2 * (ci + 2 * 0))];
          dense(bo % 2 + 2 * ((bo / 2) % 2) + 4 * co,
                bi % 2 + 2 * ((bi / 2) % 2) + 4 * ci) = v;
        }
  CHECK((mpo_to_dense(fine) - dense).norm() <= 1e-11 * dense.norm());
}

TEST_CASE("mps trim helpers report cut spectra consistently") {
  Rng rng(33);
  SubspaceMps y = random_mps(rng, 3, 2, 2);
  auto spectra = mps_cut_spectra(y);
  REQUIRE(spectra.size() == 2);
  // The spectra describe the orthonormalized frame: the squared values
  // across cut 1 are the eigenvalues of the left reduction of the span
  // projector (basis independent).
  Matrix f = mps_to_dense_frame(y);
  Eigen::HouseholderQR<Matrix> qr(f);
  Matrix frame = qr.householderQ() * Matrix::Identity(f.rows(), f.cols());
  Matrix rho = Matrix::Zero(2, 2);
  for (long r = 0; r < 8; ++r)
    for (long rp = 0; rp < 8; ++rp)
      if (r / 2 == rp / 2)
        for (long c = 0; c < 2; ++c)
          rho(r % 2, rp % 2) += frame(r, c) * std::conj(frame(rp, c));
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  std::vector<double> want;
  for (long i = es.eigenvalues().size() - 1; i >= 0; --i)
    if (es.eigenvalues()(i) > 1e-12) want.push_back(std::sqrt(es.eigenvalues()(i)));
  REQUIRE(spectra[0].size() >= want.size());
  for (size_t i = 0; i < want.size(); ++i)
    CHECK(spectra[0][i] == doctest::Approx(want[i]).epsilon(1e-9));
  double sum_sq = 0.0;
  for (double s : spectra[0]) sum_sq += s * s;
  CHECK(sum_sq == doctest::Approx(2.0).epsilon(1e-9));

  const long r1 = schmidt_rank(y, 1, 1e-9);
  CHECK(r1 >= 1);
  CHECK(r1 <= 2);
  CHECK_THROWS_AS(schmidt_rank(y, 3, 1e-9), ShapeMismatch);
}
