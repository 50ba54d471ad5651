#include "agsp/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "agsp/errors.hpp"
#include "agsp/rng.hpp"

namespace agsp {

double overlap(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw DimensionMismatch("overlap: frames live in different spaces");
  if (a.cols() == 0) return 1.0;  // empty space: vacuously covered
  if (b.cols() == 0) return 0.0;
  Matrix cross = a.adjoint() * b;   // K_a x K_b
  Matrix gram = cross * cross.adjoint();
  Eigh eg = eigh(gram);
  return std::clamp(eg.values[0], 0.0, 1.0);
}

double viability_error(const Matrix& y, const Matrix& z) {
  return 1.0 - overlap(z, y);
}

double closeness(const Matrix& a, const Matrix& b) {
  return std::max(viability_error(a, b), viability_error(b, a));
}

ViabilityReport compare_subspaces(const Matrix& y, const Matrix& z) {
  ViabilityReport r;
  r.mu = overlap(z, y);
  r.delta = 1.0 - r.mu;
  r.delta_amplitude = 1.0 - std::sqrt(r.mu);
  r.closeness = std::max(r.delta, 1.0 - overlap(y, z));
  return r;
}

SubspaceMps random_subspace(const SubspaceMps& y, long v,
                            unsigned long long seed) {
  const long deg = y.deg_dim();
  if (v > deg) throw VTooLarge("random_subspace: sample dimension too large");
  if (v == deg && y.isometry) return y;
  Rng rng(seed);
  Matrix frame = haar_frame(rng, deg, v);
  return apply_on_degeneracy(y, frame);
}

namespace {

// Right environment of an orthonormal MPS at `cut`: the cut-bond matrix
// whose eigenvalues are those of the left reduced density matrix
// tr_right(P_y) (the left part is an isometry, so the spectra agree).
Matrix right_environment(const SubspaceMps& y, int cut) {
  const int w = y.width();
  Matrix e = Matrix::Identity(y.deg_dim(), y.deg_dim());
  for (int i = w; i > cut; --i) {
    const Tensor& t = y.tensors[static_cast<size_t>(i - 1)];
    Matrix f = t.mat(2) * e;  // (l*p, r) x (r, r') -> (l*p, r')
    Eigen::Map<const Matrix> fm(f.data(), t.dim(0), t.dim(1) * e.cols());
    e = fm * t.mat(1).adjoint();
  }
  return e;
}

}  // namespace

SubspaceMps trim_eps(const SubspaceMps& y, int cut_at, double eps) {
  if (eps <= 0.0) return y;
  if (cut_at < 1 || cut_at >= y.width()) return y;
  SubspaceMps w = y;
  if (!w.isometry) orthonormalize(w);
  const long dim_y = w.deg_dim();

  Matrix env = right_environment(w, cut_at);
  Eigh eg = eigh((env + env.adjoint()) / 2.0);
  long first = 0;
  while (first < eg.values.size() && eg.values[first] < eps) ++first;
  const long keep = eg.values.size() - first;
  if (keep == eg.values.size()) return w;
  if (static_cast<double>(keep) > static_cast<double>(dim_y) / eps + 1e-9)
    throw ShapeMismatch("trim_eps: Markov rank bound violated");
  if (keep == 0) {
    // Everything falls below the threshold; the trimmed space is empty.
    SubspaceMps empty = w;
    Tensor& last = empty.tensors.back();
    last = Tensor::from_matrix(Matrix(last.dim(0) * last.dim(1), 0),
                               {last.dim(0), last.dim(1), 0}, 2);
    return empty;
  }
  Matrix u = eg.vectors.rightCols(keep);

  Tensor& tc = w.tensors[static_cast<size_t>(cut_at - 1)];
  tc = Tensor::from_matrix(tc.mat(2) * u, {tc.dim(0), tc.dim(1), keep}, 2);
  Tensor& tn = w.tensors[static_cast<size_t>(cut_at)];
  tn = Tensor::from_matrix(u.adjoint() * tn.mat(1),
                           {keep, tn.dim(1), tn.dim(2)}, 1);
  orthonormalize(w);
  return w;
}

SubspaceMps trim_chain(const SubspaceMps& y, double eps) {
  SubspaceMps w = y;
  for (int c = w.width() - 1; c >= 1; --c) w = trim_eps(w, c, eps);
  return w;
}

Matrix restrict_operator(const Mpo& a, const SubspaceMps& y) {
  Matrix r = contract_expectation(y, a);
  if (a.hermitian_flag) r = (r + Matrix(r.adjoint())) / 2.0;
  return r;
}

Matrix restrict_operator(const Matrix& a, const SubspaceMps& y,
                         long dense_cap) {
  Matrix f = mps_to_dense_frame(y, dense_cap);
  if (a.rows() != f.rows())
    throw DimensionMismatch("restrict_operator: operator/frame mismatch");
  return f.adjoint() * a * f;
}

SubspaceMps low_energy_support(const SubspaceMps& y, const Matrix& hres,
                               double delta) {
  if (hres.rows() != y.deg_dim())
    throw DimensionMismatch("low_energy_support: matrix is not on y's frame");
  require_hermitian(hres, 1e-8, "low_energy_support");
  Eigh eg = eigh((hres + hres.adjoint()) / 2.0);
  long lo = 0;
  while (lo < eg.values.size() && eg.values[lo] < -kZeroEigTol) ++lo;
  long hi = lo;
  while (hi < eg.values.size() && eg.values[hi] <= delta) ++hi;
  return apply_on_degeneracy(y, eg.vectors.middleCols(lo, hi - lo));
}

ErrorReductionCheck error_reduction_check(const Matrix& v, const Matrix& z,
                                          const Matrix& kappa) {
  ErrorReductionCheck r;
  r.mu_before = overlap(z, v);
  r.delta_before = 1.0 - r.mu_before;
  Matrix moved = orthonormal_columns(kappa * v);
  r.mu_after = overlap(z, moved);
  r.delta_after = 1.0 - r.mu_after;
  Matrix pperp =
      Matrix::Identity(z.rows(), z.rows()) - Matrix(z * z.adjoint());
  const double s = operator_norm(kappa * pperp);
  r.shrink = s * s;
  return r;
}

}  // namespace agsp
