#include "agsp/mpo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "agsp/errors.hpp"

namespace agsp {

namespace {

long checked_total_dim(const std::vector<long>& phys, long cap,
                       const char* what) {
  long dim = 1;
  for (long p : phys) {
    if (p < 1) throw ShapeMismatch("non-positive physical dimension");
    if (dim > cap / p)
      throw CapExceeded(std::string(what) + ": dense dimension exceeds cap");
    dim *= p;
  }
  return dim;
}

// Interleave a dense operator into the (pair_1, ..., pair_w) layout where
// pair_j = out_j + d_j * in_j, little-endian over j.
std::vector<Complex> interleave_dense(const Matrix& op,
                                      const std::vector<long>& phys) {
  const long dim = op.rows();
  std::vector<Complex> v(static_cast<size_t>(dim) * static_cast<size_t>(dim));
  std::vector<long> out_digit(phys.size()), in_digit(phys.size());
  for (long col = 0; col < dim; ++col) {
    long c = col;
    for (size_t j = 0; j < phys.size(); ++j) {
      in_digit[j] = c % phys[j];
      c /= phys[j];
    }
    for (long row = 0; row < dim; ++row) {
      long r = row;
      long lin = 0, stride = 1;
      for (size_t j = 0; j < phys.size(); ++j) {
        out_digit[j] = r % phys[j];
        r /= phys[j];
        lin += (out_digit[j] + phys[j] * in_digit[j]) * stride;
        stride *= phys[j] * phys[j];
      }
      v[static_cast<size_t>(lin)] = op(row, col);
    }
  }
  return v;
}

long split_svd(const Matrix& m, double rel_tol, Matrix& u, Matrix& rest,
               double* dropped_sq = nullptr,
               std::vector<double>* spectrum = nullptr) {
  Svd d = svd_thin(m);
  const double top = d.s.size() ? d.s[0] : 0.0;
  long keep = 0;
  for (Eigen::Index k = 0; k < d.s.size(); ++k)
    if (d.s[k] > rel_tol * top && d.s[k] > 0.0) ++keep;
  if (keep == 0 && d.s.size() > 0) keep = 1;
  if (spectrum) spectrum->assign(d.s.data(), d.s.data() + d.s.size());
  if (dropped_sq) {
    double acc = 0.0;
    for (Eigen::Index k = keep; k < d.s.size(); ++k) acc += d.s[k] * d.s[k];
    *dropped_sq = acc;
  }
  u = d.u.leftCols(keep);
  rest = d.s.head(keep).asDiagonal() * d.vh.topRows(keep);
  return keep;
}

// Left-canonicalize in place (SVD sweep, no truncation beyond dead
// directions).
void left_canonicalize(Mpo& a) {
  for (int i = 0; i + 1 < a.width(); ++i) {
    Tensor& t = a.tensors[static_cast<size_t>(i)];
    Matrix u, rest;
    long keep = split_svd(t.mat(3), 0.0, u, rest);
    t = Tensor::from_matrix(u, {t.dim(0), t.dim(1), t.dim(2), keep}, 3);
    Tensor& n = a.tensors[static_cast<size_t>(i + 1)];
    Matrix folded = rest * n.mat(1);
    n = Tensor::from_matrix(folded, {keep, n.dim(1), n.dim(2), n.dim(3)}, 1);
  }
}

// Right-to-left sweep shared by trimming, spectra measurement and rank
// counting. Truncates at rel. tolerance `tol` (with a numerical floor).
void right_sweep(Mpo& a, double tol, double* total_dropped_sq,
                 std::vector<std::vector<double>>* spectra) {
  const double eff = std::max(tol, 1e-13);
  if (spectra)
    spectra->assign(static_cast<size_t>(std::max(0, a.width() - 1)), {});
  for (int i = a.width() - 1; i >= 1; --i) {
    Tensor& t = a.tensors[static_cast<size_t>(i)];
    Svd d = svd_thin(t.mat(1));  // (l) x (o*i*r), keep the right factor
    const double top = d.s.size() ? d.s[0] : 0.0;
    long keep = 0;
    for (Eigen::Index k = 0; k < d.s.size(); ++k)
      if (d.s[k] > eff * top && d.s[k] > 0.0) ++keep;
    if (keep == 0 && d.s.size() > 0) keep = 1;
    if (spectra)
      (*spectra)[static_cast<size_t>(i - 1)].assign(d.s.data(),
                                                    d.s.data() + d.s.size());
    if (total_dropped_sq)
      for (Eigen::Index k = keep; k < d.s.size(); ++k)
        *total_dropped_sq += d.s[k] * d.s[k];
    t = Tensor::from_matrix(d.vh.topRows(keep),
                            {keep, t.dim(1), t.dim(2), t.dim(3)}, 1);
    Tensor& p = a.tensors[static_cast<size_t>(i - 1)];
    Matrix folded = p.mat(3) * (d.u.leftCols(keep) *
                                d.s.head(keep).asDiagonal());
    p = Tensor::from_matrix(folded, {p.dim(0), p.dim(1), p.dim(2), keep}, 3);
  }
}

}  // namespace

std::vector<long> Mpo::bond_dims() const {
  std::vector<long> b;
  b.push_back(tensors.empty() ? 1 : tensors.front().dim(0));
  for (const auto& t : tensors) b.push_back(t.dim(3));
  return b;
}

long Mpo::max_bond() const {
  long b = 1;
  for (const auto& t : tensors) b = std::max(b, t.dim(3));
  return b;
}

Mpo mpo_identity(const std::vector<long>& phys) {
  Mpo a;
  a.hermitian_flag = true;
  for (long p : phys) {
    Tensor t({1, p, p, 1});
    t.mat(2) = Matrix::Identity(p, p);
    a.tensors.push_back(std::move(t));
  }
  return a;
}

Mpo mpo_from_dense(const Matrix& op, const std::vector<long>& phys,
                   double tol) {
  const long dim = checked_total_dim(phys, 1L << 26, "mpo_from_dense");
  if (op.rows() != dim || op.cols() != dim)
    throw ShapeMismatch("mpo_from_dense: operator dimension mismatch");
  Mpo a;
  a.hermitian_flag = hermiticity_defect(op) <= 1e-10;
  const int w = static_cast<int>(phys.size());
  std::vector<Complex> inter = interleave_dense(op, phys);
  Matrix rest = Eigen::Map<Matrix>(inter.data(), dim * dim, 1);
  long lbond = 1;
  const double eff = std::max(tol, 1e-13);
  for (int i = 0; i < w; ++i) {
    const long d = phys[static_cast<size_t>(i)];
    long rows = lbond * d * d;
    long cols = rest.size() / rows;
    Eigen::Map<const Matrix> m(rest.data(), rows, cols);
    if (i + 1 == w) {
      a.tensors.push_back(Tensor::from_matrix(m, {lbond, d, d, cols}, 3));
      break;
    }
    Matrix u, next;
    long keep = split_svd(m, eff, u, next);
    a.tensors.push_back(Tensor::from_matrix(u, {lbond, d, d, keep}, 3));
    rest = std::move(next);
    lbond = keep;
  }
  return a;
}

Matrix mpo_to_dense(const Mpo& a, long dense_cap) {
  std::vector<long> phys;
  for (const auto& t : a.tensors) phys.push_back(t.dim(1));
  const long dim = checked_total_dim(phys, dense_cap, "mpo_to_dense");
  Matrix acc = Matrix::Identity(1, 1);
  for (const auto& t : a.tensors) {
    // Tensor (l, o, i, r) is already the interleaved (l, pair, r) layout.
    Matrix next = acc * t.mat(1);  // (prev) x (o*i*r)
    acc = Eigen::Map<const Matrix>(next.data(),
                                   next.rows() * t.dim(1) * t.dim(2),
                                   next.cols() / (t.dim(1) * t.dim(2)));
  }
  // acc is a (prod of pair dims) x 1 vector in interleaved order; split the
  // pairs back into (row, col) indices.
  Matrix out(dim, dim);
  std::vector<long> pair(phys.size());
  for (long lin = 0; lin < dim * dim; ++lin) {
    long v = lin, row = 0, col = 0, stride = 1;
    for (size_t j = 0; j < phys.size(); ++j) {
      long pj = v % (phys[j] * phys[j]);
      v /= phys[j] * phys[j];
      row += (pj % phys[j]) * stride;
      col += (pj / phys[j]) * stride;
      stride *= phys[j];
    }
    out(row, col) = acc(lin, 0);
  }
  return out;
}

Mpo refine_coarse_mpo(const CoarseMpo& coarse, double tol) {
  const long d = coarse.phys;
  if (d < 1) throw ShapeMismatch("refine_coarse_mpo: bad physical dimension");
  if (coarse.cols.size() != coarse.mpo.tensors.size())
    throw ShapeMismatch("refine_coarse_mpo: group count mismatch");
  Mpo out;
  out.hermitian_flag = coarse.mpo.hermitian_flag;
  const double eff = std::max(tol, 1e-13);
  for (size_t g = 0; g < coarse.mpo.tensors.size(); ++g) {
    const Tensor& c = coarse.mpo.tensors[g];
    const int k = coarse.cols[g];
    if (k < 1) throw ShapeMismatch("refine_coarse_mpo: empty group");
    long big = 1;
    for (int j = 0; j < k; ++j) big *= d;
    if (c.dim(1) != big || c.dim(2) != big)
      throw ShapeMismatch("refine_coarse_mpo: group dimension mismatch");
    const long lb = c.dim(0), rb = c.dim(3);
    if (k == 1) {
      out.tensors.push_back(c);
      continue;
    }
    // Interleave (l, out, in, r) -> (l, pair_1, ..., pair_k, r) with
    // pair_j = out_j + d * in_j, little-endian over j. l stays fastest.
    std::vector<Complex> v(static_cast<size_t>(c.size()));
    const Complex* src = c.data();
    for (long i = 0; i < big; ++i) {
      for (long o = 0; o < big; ++o) {
        long oo = o, ii = i, pair = 0, stride = 1;
        for (int j = 0; j < k; ++j) {
          pair += (oo % d + d * (ii % d)) * stride;
          oo /= d;
          ii /= d;
          stride *= d * d;
        }
        const long src_base = lb * (o + big * i);
        const long dst_base = lb * pair;
        const long block = lb * big * big;
        for (long r = 0; r < rb; ++r)
          std::copy(src + src_base + block * r, src + src_base + block * r + lb,
                    v.begin() + dst_base + block * r);
      }
    }
    // Peel per-column tensors off the interleaved block left to right.
    long lbond = lb;
    long remaining = c.size();
    Matrix rest = Eigen::Map<Matrix>(v.data(), remaining, 1);
    for (int j = 0; j < k; ++j) {
      const long rows = lbond * d * d;
      const long cols = rest.size() / rows;
      Eigen::Map<const Matrix> m(rest.data(), rows, cols);
      if (j + 1 == k) {
        out.tensors.push_back(Tensor::from_matrix(m, {lbond, d, d, rb}, 3));
        break;
      }
      Matrix u, next;
      long keep = split_svd(m, eff, u, next);
      out.tensors.push_back(Tensor::from_matrix(u, {lbond, d, d, keep}, 3));
      rest = std::move(next);
      lbond = keep;
    }
  }
  return out;
}

Mpo mpo_multiply(const Mpo& a, const Mpo& b) {
  if (a.width() != b.width())
    throw ShapeMismatch("mpo_multiply: widths differ");
  Mpo c;
  for (int i = 0; i < a.width(); ++i) {
    const Tensor& ta = a.tensors[static_cast<size_t>(i)];
    const Tensor& tb = b.tensors[static_cast<size_t>(i)];
    if (ta.dim(2) != tb.dim(1))
      throw ShapeMismatch("mpo_multiply: physical dimensions differ");
    Tensor ap = ta.permuted({0, 1, 3, 2});  // (la, ao, ra, k)
    Tensor bp = tb.permuted({1, 0, 2, 3});  // (k, lb, bi, rb)
    Matrix m = ap.mat(3) * bp.mat(1);
    Tensor t = Tensor::from_matrix(
        m, {ta.dim(0), ta.dim(1), ta.dim(3), tb.dim(0), tb.dim(2), tb.dim(3)},
        3);
    t = t.permuted({0, 3, 1, 4, 2, 5});  // (la, lb, ao, bi, ra, rb)
    c.tensors.push_back(t.reshaped({ta.dim(0) * tb.dim(0), ta.dim(1),
                                    tb.dim(2), ta.dim(3) * tb.dim(3)}));
  }
  return c;
}

SubspaceMps mpo_apply(const Mpo& k, const SubspaceMps& y, bool orthonormal) {
  if (y.width() > k.width())
    throw ShapeMismatch("mpo_apply: state wider than operator");
  SubspaceMps out;
  for (int i = 0; i < y.width(); ++i) {
    const Tensor& tk = k.tensors[static_cast<size_t>(i)];
    const Tensor& ty = y.tensors[static_cast<size_t>(i)];
    if (tk.dim(2) != ty.dim(1))
      throw ShapeMismatch("mpo_apply: physical dimension mismatch");
    Tensor kp = tk.permuted({0, 1, 3, 2});  // (lk, o, rk, pin)
    Tensor yp = ty.permuted({1, 0, 2});     // (pin, ly, ry)
    Matrix m = kp.mat(3) * yp.mat(1);
    Tensor t = Tensor::from_matrix(
        m, {tk.dim(0), tk.dim(1), tk.dim(3), ty.dim(0), ty.dim(2)}, 3);
    t = t.permuted({0, 3, 1, 2, 4});  // (lk, ly, o, rk, ry)
    out.tensors.push_back(t.reshaped(
        {tk.dim(0) * ty.dim(0), tk.dim(1), tk.dim(3) * ty.dim(2)}));
  }
  out.isometry = false;
  if (orthonormal) orthonormalize(out);
  return out;
}

Mpo mpo_trim_rank(const Mpo& a, double tol, TrimReport* report) {
  Mpo c = a;
  if (c.width() <= 1) {
    if (report) report->frobenius_bound = 0.0;
    return c;
  }
  left_canonicalize(c);
  double dropped_sq = 0.0;
  right_sweep(c, tol, &dropped_sq, nullptr);
  if (report) report->frobenius_bound = std::sqrt(dropped_sq);
  return c;
}

std::vector<std::vector<double>> mpo_cut_spectra(const Mpo& a) {
  Mpo c = a;
  if (c.width() <= 1) return {};
  left_canonicalize(c);
  std::vector<std::vector<double>> spectra;
  right_sweep(c, 0.0, nullptr, &spectra);
  return spectra;
}

long schmidt_rank(const Mpo& a, int cut, double tol) {
  auto spectra = mpo_cut_spectra(a);
  if (cut < 1 || cut > static_cast<int>(spectra.size()))
    throw ShapeMismatch("schmidt_rank: cut out of range");
  const auto& s = spectra[static_cast<size_t>(cut - 1)];
  if (s.empty()) return 0;
  long r = 0;
  for (double v : s)
    if (v > tol * s[0]) ++r;
  return r;
}

Mpo local_operators_to_mpo(const std::vector<LocalOperator>& factors, int w,
                           int h, int q, long dense_cap) {
  long d = 1;
  for (int i = 0; i < h; ++i) d *= q;
  Mpo acc = mpo_identity(std::vector<long>(static_cast<size_t>(w), d));

  std::set<Site> seen;
  for (const auto& f : factors)
    for (const auto& s : f.sites)
      if (!seen.insert(s).second)
        throw OverlappingSupports("local operator factors share a site");

  for (const auto& f : factors) {
    if (f.sites.empty()) throw ShapeMismatch("local operator without sites");
    if (!std::is_sorted(f.sites.begin(), f.sites.end()))
      throw ShapeMismatch("local operator sites not sorted");
    int c1 = f.sites.front().x, c2 = f.sites.front().x;
    for (const auto& s : f.sites) {
      if (s.x < 1 || s.x > w || s.y < 1 || s.y > h)
        throw ShapeMismatch("local operator site outside grid");
      c1 = std::min(c1, s.x);
      c2 = std::max(c2, s.x);
    }
    const int span = c2 - c1 + 1;
    std::vector<long> pos;
    for (const auto& s : f.sites)
      pos.push_back(static_cast<long>(s.x - c1) * h + (s.y - 1));
    long span_dim = checked_total_dim(
        std::vector<long>(static_cast<size_t>(span), d), dense_cap,
        "local_operators_to_mpo");
    (void)span_dim;
    Matrix dense = embed_at_positions(f.matrix, pos,
                                      static_cast<long>(span) * h, q);
    Mpo part = mpo_from_dense(dense,
                              std::vector<long>(static_cast<size_t>(span), d));
    // Surround with identity columns to full width.
    Mpo fullw = mpo_identity(std::vector<long>(static_cast<size_t>(w), d));
    for (int i = 0; i < span; ++i)
      fullw.tensors[static_cast<size_t>(c1 - 1 + i)] =
          part.tensors[static_cast<size_t>(i)];
    fullw.hermitian_flag = part.hermitian_flag;
    acc = mpo_multiply(acc, fullw);
  }
  return acc;
}

Matrix contract_expectation(const SubspaceMps& z,
                            const std::vector<LocalOperator>& factors, int h,
                            int q) {
  Mpo a = local_operators_to_mpo(factors, z.width(), h, q);
  return contract_expectation(z, a);
}

Matrix contract_expectation(const SubspaceMps& z, const Mpo& a) {
  if (a.width() != z.width())
    throw ShapeMismatch("contract_expectation: widths differ");
  Tensor e({1, 1, 1});
  e.data()[0] = Complex(1, 0);
  for (int i = 0; i < z.width(); ++i) {
    const Tensor& tz = z.tensors[static_cast<size_t>(i)];
    const Tensor& to = a.tensors[static_cast<size_t>(i)];
    if (to.dim(1) != tz.dim(1) || to.dim(2) != tz.dim(1))
      throw ShapeMismatch("contract_expectation: physical dims differ");
    // F[a, c, pin, b'] = sum_b E[a,b,c] Z[b,pin,b']
    Matrix fm = e.permuted({0, 2, 1}).mat(2) * tz.mat(1);
    Tensor f = Tensor::from_matrix(
        fm, {e.dim(0), e.dim(2), tz.dim(1), tz.dim(2)}, 2);
    // G[a, b', pout, c'] = sum_{c,pin} F[a,c,pin,b'] O[c,pout,pin,c']
    Matrix gm = f.permuted({0, 3, 1, 2}).mat(2) *
                to.permuted({0, 2, 1, 3}).mat(2);
    Tensor g = Tensor::from_matrix(
        gm, {e.dim(0), tz.dim(2), to.dim(1), to.dim(3)}, 2);
    // E'[a', b', c'] = sum_{a,pout} conj(Zbra[a,pout,a']) G[a,b',pout,c']
    Matrix em = tz.mat(2).adjoint() * g.permuted({0, 2, 1, 3}).mat(2);
    e = Tensor::from_matrix(em, {tz.dim(2), tz.dim(2), to.dim(3)}, 1);
  }
  return Matrix(e.mat(1));  // (deg x deg), final operator bond is 1
}

}  // namespace agsp
