#include "agsp/mps.hpp"

#include <algorithm>
#include <cmath>

#include "agsp/errors.hpp"

namespace agsp {

namespace {

// Split m = u * rest at a relative singular-value floor; returns the kept
// rank. u gets the left factor, rest = diag(s) * vh the right one.
long split_svd(const Matrix& m, double rel_tol, Matrix& u, Matrix& rest,
               std::vector<double>* spectrum = nullptr) {
  Svd d = svd_thin(m);
  const double top = d.s.size() ? d.s[0] : 0.0;
  long keep = 0;
  for (Eigen::Index k = 0; k < d.s.size(); ++k)
    if (d.s[k] > rel_tol * top && d.s[k] > 0.0) ++keep;
  if (keep == 0 && d.s.size() > 0) keep = 1;  // never emit an empty bond
  if (spectrum) {
    spectrum->assign(d.s.data(), d.s.data() + d.s.size());
  }
  u = d.u.leftCols(keep);
  rest = d.s.head(keep).asDiagonal() * d.vh.topRows(keep);
  return keep;
}

}  // namespace

long SubspaceMps::max_bond() const {
  long b = 1;
  for (const auto& t : tensors) b = std::max(b, t.dim(2));
  return b;
}

SubspaceMps extend_by_column(const SubspaceMps& y, long phys) {
  SubspaceMps out = y;
  const long l = y.deg_dim();
  Tensor t({l, phys, l * phys});
  // T[a, p, a + l*p] = 1: identity viewed as (l*phys) x (l*phys).
  t.mat(2) = Matrix::Identity(l * phys, l * phys);
  out.tensors.push_back(std::move(t));
  out.isometry = y.isometry || y.tensors.empty();
  return out;
}

SubspaceMps full_space_mps(int w, long phys) {
  SubspaceMps y;
  y.isometry = true;
  for (int i = 0; i < w; ++i) y = extend_by_column(y, phys);
  return y;
}

SubspaceMps mps_from_dense_frame(const Matrix& frame, int width, long phys) {
  long expect = 1;
  for (int i = 0; i < width; ++i) expect *= phys;
  if (frame.rows() != expect)
    throw ShapeMismatch("mps_from_dense_frame: row count mismatch");
  SubspaceMps y;
  const long deg = frame.cols();
  // Work matrix: rows = remaining physical indices (little-endian), cols =
  // (processed-left-bond is folded in as the row-fastest digit each step).
  Matrix rest = frame;  // (phys^width) x deg
  long lbond = 1;
  for (int i = 0; i < width; ++i) {
    long rows_here = lbond * phys;
    long rest_cols = rest.size() / rows_here;
    Eigen::Map<const Matrix> m(rest.data(), rows_here, rest_cols);
    if (i + 1 == width) {
      y.tensors.push_back(Tensor::from_matrix(m, {lbond, phys, rest_cols}, 2));
      break;
    }
    Matrix u, next;
    long keep = split_svd(m, 1e-13, u, next);
    y.tensors.push_back(Tensor::from_matrix(u, {lbond, phys, keep}, 2));
    // next is keep x (remaining digits * deg), column-major, so the new
    // left bond is already the fastest index for the next fold.
    rest = std::move(next);
    lbond = keep;
  }
  // The frame is represented exactly (tail kept in the last tensor), so the
  // columns are only orthonormal if the input's were; callers decide.
  y.isometry = false;
  return y;
}

Matrix mps_to_dense_frame(const SubspaceMps& y, long dense_cap) {
  long dim = 1;
  for (int i = 0; i < y.width(); ++i) {
    dim *= y.phys_dim(i);
    if (dim > dense_cap)
      throw CapExceeded("mps_to_dense_frame: dense dimension exceeds cap");
  }
  Matrix acc = Matrix::Identity(1, 1);  // (dim so far) x bond
  for (int i = 0; i < y.width(); ++i) {
    const Tensor& t = y.tensors[static_cast<size_t>(i)];
    Matrix next = acc * t.mat(1);  // (dim_prev) x (phys * right)
    // Column-major, so (dim_prev, phys) fold into the new leading block.
    acc = Eigen::Map<const Matrix>(next.data(), next.rows() * t.dim(1),
                                   next.cols() / t.dim(1));
  }
  return acc;
}

void orthonormalize(SubspaceMps& y, double rank_tol) {
  for (int i = 0; i < y.width(); ++i) {
    Tensor& t = y.tensors[static_cast<size_t>(i)];
    Matrix u, rest;
    long keep = split_svd(t.mat(2), rank_tol, u, rest);
    t = Tensor::from_matrix(u, {t.dim(0), t.dim(1), keep}, 2);
    if (i + 1 < y.width()) {
      Tensor& n = y.tensors[static_cast<size_t>(i + 1)];
      Matrix folded = rest * n.mat(1);  // keep x (phys * right)
      n = Tensor::from_matrix(folded, {keep, n.dim(1), n.dim(2)}, 1);
    }
    // At the last column `rest` maps the old degeneracy frame onto an
    // orthonormal one of the same span; dropping it is exactly the
    // orthonormalization of the frame.
  }
  y.isometry = true;
}

Matrix mps_overlap(const SubspaceMps& a, const SubspaceMps& b) {
  if (a.width() != b.width())
    throw DimensionMismatch("mps_overlap: widths differ");
  Matrix e = Matrix::Identity(1, 1);  // (bond_a x bond_b)
  for (int i = 0; i < a.width(); ++i) {
    const Tensor& ta = a.tensors[static_cast<size_t>(i)];
    const Tensor& tb = b.tensors[static_cast<size_t>(i)];
    if (ta.dim(1) != tb.dim(1))
      throw DimensionMismatch("mps_overlap: physical dimensions differ");
    Matrix tmp = e * tb.mat(1);  // (la) x (p * rb)
    Eigen::Map<const Matrix> folded(tmp.data(), tmp.rows() * tb.dim(1),
                                    tb.dim(2));  // (la * p) x rb
    e = ta.mat(2).adjoint() * folded;            // (ra) x (rb)
  }
  return e;
}

std::vector<std::vector<double>> mps_cut_spectra(const SubspaceMps& y) {
  SubspaceMps c = y;
  orthonormalize(c, 0.0);
  std::vector<std::vector<double>> spectra(
      static_cast<size_t>(std::max(0, c.width() - 1)));
  // Right-to-left sweep: at each cut the left part is canonical and the
  // right part has been made canonical by previous steps, so the singular
  // values are the true Schmidt coefficients.
  for (int i = c.width() - 1; i >= 1; --i) {
    Tensor& t = c.tensors[static_cast<size_t>(i)];
    Svd d = svd_thin(t.mat(1));  // (l) x (p * r)
    spectra[static_cast<size_t>(i - 1)].assign(d.s.data(),
                                               d.s.data() + d.s.size());
    long keep = d.s.size();
    t = Tensor::from_matrix(d.vh, {keep, t.dim(1), t.dim(2)}, 1);
    Tensor& prev = c.tensors[static_cast<size_t>(i - 1)];
    Matrix folded = prev.mat(2) * (d.u * d.s.asDiagonal());
    prev = Tensor::from_matrix(folded, {prev.dim(0), prev.dim(1), keep}, 2);
  }
  return spectra;
}

long schmidt_rank(const SubspaceMps& y, int cut, double tol) {
  auto spectra = mps_cut_spectra(y);
  if (cut < 1 || cut > static_cast<int>(spectra.size()))
    throw ShapeMismatch("schmidt_rank: cut out of range");
  const auto& s = spectra[static_cast<size_t>(cut - 1)];
  if (s.empty()) return 0;
  long r = 0;
  for (double v : s)
    if (v > tol * s[0]) ++r;
  return r;
}

SubspaceMps apply_on_degeneracy(const SubspaceMps& y, const Matrix& map) {
  if (y.tensors.empty())
    throw ShapeMismatch("apply_on_degeneracy: empty MPS");
  if (map.rows() != y.deg_dim())
    throw DimensionMismatch("apply_on_degeneracy: map rows != deg dim");
  SubspaceMps out = y;
  Tensor& last = out.tensors.back();
  Matrix folded = last.mat(2) * map;
  last = Tensor::from_matrix(folded, {last.dim(0), last.dim(1), map.cols()},
                             2);
  return out;
}

}  // namespace agsp
