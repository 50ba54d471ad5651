#include "agsp/agsp_builder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "agsp/chebyshev.hpp"
#include "agsp/errors.hpp"
#include "agsp/spectral.hpp"

namespace agsp {

namespace {

// Contract checks on the band filters are exact-diagonalization work; skip
// them above this dimension (the construction is the same either way).
constexpr long kVerifyDim = 2048;

long ipow_cap(long base, int e, long cap, const char* what) {
  long r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > cap / base) throw CapExceeded(std::string(what) + " exceeds cap");
    r *= base;
  }
  return r;
}

// op acts on a contiguous run of columns inside a strip; surround it with
// identities on `before` columns below (faster digits) and `after` above.
Matrix embed_in_strip(const Matrix& op, int before, int after, long d,
                      long cap) {
  const long db = ipow_cap(d, before, cap, "strip embedding");
  const long da = ipow_cap(d, after, cap, "strip embedding");
  Matrix res = kron_le(op, Matrix::Identity(da, da));
  if (db > 1) res = kron_le(Matrix::Identity(db, db), res);
  return res;
}

void log_line(AgspBundle& b, const std::string& s) { b.build_log.push_back(s); }

std::string fmt_double(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

// Largest site count whose dense dimension fits the cap.
int sites_fitting_cap(int q, long cap) {
  int k = 0;
  long dim = 1;
  while (dim <= cap / q) {
    dim *= q;
    ++k;
  }
  return std::max(k, 1);
}

}  // namespace

long AgspBundle::max_rank() const {
  long r = 1;
  for (long x : cut_ranks) r = std::max(r, x);
  return r;
}

Matrix band_projector(const GridHamiltonian& ham, const BandLayout& layout,
                      const NarrowBand& band, long dense_cap) {
  SubHamiltonian sub = restrict_to_region(ham, layout.band_sites(band),
                                          dense_cap);
  return kernel_projector(sub.matrix);
}

Matrix approx_band_projector(const GridHamiltonian& ham,
                             const BandLayout& layout, const NarrowBand& band,
                             double gamma, long dense_cap) {
  if (!(gamma > 0.0)) throw DegenerateThreshold("local gap must be positive");
  SubHamiltonian sub = restrict_to_region(ham, layout.band_sites(band),
                                          dense_cap);
  const double scale = static_cast<double>(ham.interaction_degree_c()) *
                       layout.t * ham.height();
  StepPolynomial step = build_step_polynomial(gamma / scale);
  Matrix qhat = step.eval_on_operator(sub.matrix / scale);

  if (sub.matrix.rows() <= kVerifyDim) {
    // The filter must fix the band kernel and stay uniformly close to the
    // exact projector; a violation means the claimed gap is wrong.
    Matrix q = kernel_projector(sub.matrix);
    if (operator_norm(qhat * q - q) > 1e-8)
      throw DegenerateThreshold("band filter does not fix the band kernel");
    if (operator_norm(qhat - q) > step.suppression_bound + 1e-6)
      throw DegenerateThreshold(
          "band filter exceeds its suppression bound; local gap too small?");
  }
  return qhat;
}

double shrinking_factor_bound(int m, int t, int p, int wide_count, double gamma,
                              double c) {
  const double base = wide_count * std::exp(-static_cast<double>(m)) +
                      2.0 * std::exp(-c * t * std::sqrt(gamma));
  return std::pow(base, 2.0 * p);
}

double calibrate_shrinking_c(const GridHamiltonian& ham,
                             const BandLayout& layout, double gamma,
                             long dense_cap) {
  const long d = ham.column_dim();
  const long dim =
      ipow_cap(d, ham.width(), dense_cap, "detector-layer densification");
  Matrix odd = Matrix::Identity(dim, dim);
  Matrix even = Matrix::Identity(dim, dim);
  for (const NarrowBand& nb : layout.narrow) {
    Matrix q = band_projector(ham, layout, nb, dense_cap);
    Matrix e = embed_in_strip(q, nb.col_lo - 1, ham.width() - nb.col_hi, d,
                              dense_cap);
    // Same-parity bands are disjoint, so the in-parity order is free.
    if (nb.even())
      even = even * e;
    else
      odd = odd * e;
  }
  Matrix layer = odd * even;
  SubHamiltonian full = restrict_to_region(
      ham, Rectangle{1, ham.width(), 1, ham.height()}.sites(), dense_cap);
  Matrix pz = kernel_projector(full.matrix);
  const double detected =
      operator_norm(layer * (Matrix::Identity(dim, dim) - pz));
  const double c_fit = -std::log(std::max(detected, 1e-15) / 2.0) /
                       (layout.t * std::sqrt(gamma));
  return 0.8 * std::min(c_fit, 6.0);
}

AgspBundle build_kappa(const GridHamiltonian& ham, int m, int t, int p,
                       const BuildOptions& opts) {
  if (p < 1) throw NonPowerOfTwoPower("power must be a positive integer");
  if (m < 1 || t < 1) throw ShapeMismatch("band parameters must be >= 1");

  AgspBundle out;
  out.params = AgspParams{m, t, p};
  out.layout =
      layout_bands(ham.width(), ham.height(), m, t, opts.allow_clipped);
  const BandLayout& lay = out.layout;
  const long d = ham.column_dim();
  const int wc = lay.wide_count();

  if (std::isnan(opts.gamma)) {
    const int fit = sites_fitting_cap(ham.q(), opts.band_cap);
    out.gamma = local_gap(ham, ham.n_sites() <= fit ? 0 : fit, opts.band_cap);
    log_line(out, "measured local gap " + fmt_double(out.gamma) +
                      (ham.n_sites() <= fit
                           ? ""
                           : " (rectangles up to " + std::to_string(fit) +
                                 " sites)"));
  } else {
    out.gamma = opts.gamma;
  }
  if (!(out.gamma > 0.0) || !std::isfinite(out.gamma))
    throw DegenerateThreshold("local gap must be positive and finite");

  log_line(out, "bands: " + std::to_string(lay.narrow.size()) + " narrow, " +
                    std::to_string(wc) + " wide" +
                    (lay.clipped ? " (clipped)" : ""));

  // Classify even bands: fully inside one wide strip, or straddling the cut
  // between strip j and j+1 (at most one per cut since even bands are
  // pairwise disjoint and narrower than a strip).
  std::vector<std::vector<const NarrowBand*>> inside(
      static_cast<size_t>(wc));
  std::vector<const NarrowBand*> straddle(static_cast<size_t>(wc), nullptr);
  for (const NarrowBand& nb : lay.narrow) {
    if (!nb.even()) continue;
    int j = -1;
    for (int k = 0; k < wc; ++k)
      if (lay.wide[static_cast<size_t>(k)].col_lo <= nb.col_lo &&
          nb.col_lo <= lay.wide[static_cast<size_t>(k)].col_hi)
        j = k;
    if (j < 0) throw ShapeMismatch("even band outside every wide strip");
    if (nb.col_hi <= lay.wide[static_cast<size_t>(j)].col_hi) {
      inside[static_cast<size_t>(j)].push_back(&nb);
    } else {
      if (j + 1 >= wc || straddle[static_cast<size_t>(j)])
        throw ShapeMismatch("inconsistent straddling even band");
      straddle[static_cast<size_t>(j)] = &nb;
    }
  }

  // SVD-split each straddling even projector at its cut into matching
  // left/right factor lists; these become the coarse bond indices.
  struct CutSplit {
    std::vector<Matrix> left;   // acting on the cut-side tail of strip j
    std::vector<Matrix> right;  // acting on the head of strip j+1
    int k_left = 0, k_right = 0;
  };
  std::vector<CutSplit> cuts(static_cast<size_t>(wc));
  for (int j = 0; j + 1 < wc; ++j) {
    const NarrowBand* nb = straddle[static_cast<size_t>(j)];
    if (!nb) continue;
    const int cut_col = lay.wide[static_cast<size_t>(j)].col_hi;
    CutSplit& cs = cuts[static_cast<size_t>(j)];
    cs.k_left = cut_col - nb->col_lo + 1;
    cs.k_right = nb->col_hi - cut_col;
    const long dl = ipow_cap(d, cs.k_left, opts.band_cap, "straddle split");
    const long dr = ipow_cap(d, cs.k_right, opts.band_cap, "straddle split");
    Matrix q = band_projector(ham, lay, *nb, opts.band_cap);
    Mpo two = mpo_from_dense(q, {dl, dr});
    const long r = two.bond(1);
    const Tensor& a = two.tensors[0];
    const Tensor& b = two.tensors[1];
    for (long al = 0; al < r; ++al) {
      cs.left.push_back(
          Eigen::Map<const Matrix>(a.data() + al * dl * dl, dl, dl));
      Matrix rm(dr, dr);
      for (long i = 0; i < dr; ++i)
        for (long o = 0; o < dr; ++o) rm(o, i) = b.data()[al + r * (o + dr * i)];
      cs.right.push_back(std::move(rm));
    }
    log_line(out, "even band " + std::to_string(nb->index) +
                      " straddles cut " + std::to_string(cut_col) +
                      " with rank " + std::to_string(r));
  }

  // One coarse tensor per wide strip: scalar * (AND factors) * (inside even
  // projectors) * (straddle halves), bonds indexing the straddle factors.
  std::vector<Tensor> coarse;
  std::vector<int> group_cols;
  for (int j = 0; j < wc; ++j) {
    const WideBand& wb = lay.wide[static_cast<size_t>(j)];
    const long dim = ipow_cap(d, wb.width(), opts.wide_cap, "wide strip");
    Matrix base = Matrix::Identity(dim, dim);

    if (!wb.xi.empty()) {
      std::vector<SupportedOperator> ops;
      std::vector<const NarrowBand*> nbs;
      for (int idx : wb.xi) {
        const NarrowBand& nb = lay.narrow_by_index(idx);
        Matrix qh = opts.exact_projectors
                        ? band_projector(ham, lay, nb, opts.band_cap)
                        : approx_band_projector(ham, lay, nb, out.gamma,
                                                opts.band_cap);
        ops.push_back(SupportedOperator{lay.band_sites(nb), std::move(qh)});
        nbs.push_back(&nb);
      }
      RobustAndPolynomial and_poly =
          build_robust_and(m, static_cast<int>(ops.size()));
      FactoredOperator fo = eval_and_on_operators(and_poly, ops);
      for (size_t i = 0; i < fo.factors.size(); ++i) {
        const NarrowBand& nb = *nbs[i];
        base = base * embed_in_strip(fo.factors[i].matrix,
                                     nb.col_lo - wb.col_lo,
                                     wb.col_hi - nb.col_hi, d, opts.wide_cap);
      }
      base *= fo.scalar;
    }
    for (const NarrowBand* nb : inside[static_cast<size_t>(j)])
      base = base * embed_in_strip(band_projector(ham, lay, *nb, opts.band_cap),
                                   nb->col_lo - wb.col_lo,
                                   wb.col_hi - nb->col_hi, d, opts.wide_cap);

    const CutSplit* lc =
        j > 0 && straddle[static_cast<size_t>(j - 1)]
            ? &cuts[static_cast<size_t>(j - 1)]
            : nullptr;
    const CutSplit* rc =
        straddle[static_cast<size_t>(j)] ? &cuts[static_cast<size_t>(j)]
                                         : nullptr;
    const long lb = lc ? static_cast<long>(lc->right.size()) : 1;
    const long rb = rc ? static_cast<long>(rc->left.size()) : 1;

    Tensor ct({lb, dim, dim, rb});
    for (long al = 0; al < lb; ++al) {
      Matrix ta = base;
      if (lc)
        ta = ta * embed_in_strip(lc->right[static_cast<size_t>(al)], 0,
                                 wb.width() - lc->k_right, d, opts.wide_cap);
      for (long bt = 0; bt < rb; ++bt) {
        Matrix mfull =
            rc ? Matrix(ta * embed_in_strip(
                                 rc->left[static_cast<size_t>(bt)],
                                 wb.width() - rc->k_left, 0, d, opts.wide_cap))
               : ta;
        for (long i = 0; i < dim; ++i)
          for (long o = 0; o < dim; ++o)
            ct.data()[al + lb * (o + dim * (i + dim * bt))] = mfull(o, i);
      }
    }
    coarse.push_back(std::move(ct));
    group_cols.push_back(wb.width());
    log_line(out, "strip " + std::to_string(j + 1) + ": dim " +
                      std::to_string(dim) + ", bonds (" + std::to_string(lb) +
                      ", " + std::to_string(rb) + ")");
  }

  CoarseMpo cm;
  cm.mpo.tensors = std::move(coarse);
  cm.cols = std::move(group_cols);
  cm.phys = d;

  // Raise to the p-th power at the coarse level by binary exponentiation,
  // compressing after every product.
  double trim_err = 0.0;
  if (p > 1) {
    Mpo acc;
    bool have_acc = false;
    Mpo cur = cm.mpo;
    int rem = p;
    while (true) {
      if (rem & 1) {
        TrimReport rep;
        acc = have_acc ? mpo_trim_rank(mpo_multiply(acc, cur), opts.trim_tol,
                                       &rep)
                       : cur;
        have_acc = true;
        trim_err += rep.frobenius_bound;
      }
      rem >>= 1;
      if (!rem) break;
      TrimReport rep;
      cur = mpo_trim_rank(mpo_multiply(cur, cur), opts.trim_tol, &rep);
      trim_err += rep.frobenius_bound;
    }
    cm.mpo = std::move(acc);
    log_line(out, "power " + std::to_string(p) + " trim residual " +
                      fmt_double(trim_err));
  }

  out.kappa = refine_coarse_mpo(cm);
  out.kappa = mpo_trim_rank(out.kappa, 0.0);

  std::vector<std::vector<double>> spectra = mpo_cut_spectra(out.kappa);
  for (const std::vector<double>& s : spectra) {
    long rank = 0;
    const double top = s.empty() ? 0.0 : s[0];
    for (double x : s)
      if (x > opts.rank_tol * top && x > 0.0) ++rank;
    out.cut_ranks.push_back(std::max(rank, 1L));
  }

  out.shrink_c = opts.calibrate ? calibrate_shrinking_c(ham, lay, out.gamma,
                                                        opts.wide_cap)
                                : opts.shrink_c;
  out.delta_bound =
      shrinking_factor_bound(m, t, p, wc, out.gamma, out.shrink_c);
  log_line(out, "max cut rank " + std::to_string(out.max_rank()) +
                    ", shrinking bound " + fmt_double(out.delta_bound) +
                    " (c = " + fmt_double(out.shrink_c) + ")");
  return out;
}

MeasuredShrink measure_shrinking(const GridHamiltonian& ham, const Mpo& kappa,
                                 long dense_cap) {
  MeasuredShrink ms;
  Matrix k = mpo_to_dense(kappa, dense_cap);
  SubHamiltonian full = restrict_to_region(
      ham, Rectangle{1, ham.width(), 1, ham.height()}.sites(), dense_cap);
  Matrix pz = kernel_projector(full.matrix);
  const long dim = k.rows();
  const double shrunk =
      operator_norm(k * (Matrix::Identity(dim, dim) - pz));
  ms.delta = shrunk * shrunk;
  ms.ground_defect = operator_norm(k * pz - pz);
  return ms;
}

ChosenParams choose_parameters(double gamma, int height, int q, double delta) {
  if (!(gamma > 0.0)) throw DegenerateThreshold("local gap must be positive");
  if (!(delta > 0.0) || delta >= 1.0)
    throw ShapeMismatch("accuracy must lie in (0, 1)");
  const double cc = 4.0;
  const double g = std::min(gamma, 1.0);
  const double h = static_cast<double>(height);
  const double lg = std::max(std::log(h * q / g), 1.0);
  const double ct = 4.0 * cc * cc * lg;
  const double n_eff = std::max(h * h, 2.0);

  const double m1 = std::pow(ct, 2.0 / 3.0) * std::pow(g, -1.0 / 6.0) *
                    std::cbrt(h);
  const double m2 =
      std::pow(g, 0.25) * std::sqrt(2.0 * cc / (ct * h) * std::log(1.0 / delta));
  const double m3 = 2.0 * std::log(n_eff);

  ChosenParams cp;
  cp.m = static_cast<int>(std::ceil(std::max({m1, m2, m3, 1.0})));
  cp.t = static_cast<int>(std::ceil(cp.m / std::sqrt(g)));
  cp.p = static_cast<int>(std::ceil(ct * cp.m * h / std::sqrt(g)));
  cp.predicted_log_rank =
      cc *
      (static_cast<double>(cp.m) * cp.m * h / std::sqrt(g) +
       cp.p * std::pow(g, -0.25) * std::sqrt(h / static_cast<double>(cp.m))) *
      lg;
  cp.predicted_delta = std::exp(-static_cast<double>(cp.m) * cp.p / cc);
  return cp;
}

ChosenParams choose_parameters(const GridHamiltonian& ham, double gamma,
                               double delta, const BuildOptions& opts) {
  if (!(gamma > 0.0)) throw DegenerateThreshold("local gap must be positive");
  if (!(delta > 0.0) || delta >= 1.0)
    throw ShapeMismatch("accuracy must lie in (0, 1)");

  struct Cand {
    int m, t, p;
    long cost;
  };
  std::vector<Cand> cands;
  for (int m = 1; m <= 3; ++m)
    for (int t = 1; t <= 3; ++t) {
      const int strip_cols = std::min(6 * m * t, ham.width());
      long dim = 1;
      bool fits = true;
      for (int i = 0; i < strip_cols && fits; ++i) {
        if (dim > opts.wide_cap / ham.column_dim()) fits = false;
        dim *= ham.column_dim();
      }
      if (!fits) continue;
      for (int p = 1; p <= 16; p *= 2)
        cands.push_back(Cand{m, t, p, dim * p});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.p != b.p) return a.p < b.p;
    if (a.m != b.m) return a.m < b.m;
    return a.t < b.t;
  });

  BuildOptions bopts = opts;
  bopts.gamma = gamma;
  bool have_best = false;
  ChosenParams best;
  double best_score = 0.0;
  for (const Cand& c : cands) {
    AgspBundle bundle;
    try {
      bundle = build_kappa(ham, c.m, c.t, c.p, bopts);
    } catch (const CapExceeded&) {
      continue;
    } catch (const DegenerateThreshold&) {
      continue;
    }
    const long rank = bundle.max_rank();
    double shrink = bundle.delta_bound;
    try {
      shrink = std::min(
          shrink, measure_shrinking(ham, bundle.kappa, opts.wide_cap).delta);
    } catch (const CapExceeded&) {
      // Grid too large to measure densely; the certified bound stands.
    }
    const double score = rank * shrink;
    ChosenParams cp;
    cp.m = c.m;
    cp.t = c.t;
    cp.p = c.p;
    cp.predicted_log_rank = std::log(static_cast<double>(std::max(rank, 1L)));
    cp.predicted_delta = shrink;
    if (score <= delta) return cp;
    cp.met_target = false;
    if (!have_best || score < best_score) {
      best = cp;
      best_score = score;
      have_best = true;
    }
  }
  if (!have_best)
    throw CapExceeded("no searchable parameter choice fits the caps");
  return best;
}

}  // namespace agsp
