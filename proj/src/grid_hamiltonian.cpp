#include "agsp/grid_hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "agsp/errors.hpp"

namespace agsp {

namespace {

long ipow_checked(long base, int exp, long cap) {
  long v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > cap / base)
      throw CapExceeded("dense dimension " + std::to_string(base) + "^" +
                        std::to_string(exp) + " exceeds cap " +
                        std::to_string(cap));
    v *= base;
  }
  return v;
}

std::vector<long> digits_of(long v, int q, int k) {
  std::vector<long> d(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    d[static_cast<size_t>(j)] = v % q;
    v /= q;
  }
  return d;
}

// Permute a little-endian k-qudit matrix so new digit i equals old digit
// perm[i].
Matrix permute_digits(const Matrix& m, int q, const std::vector<int>& perm) {
  const int k = static_cast<int>(perm.size());
  long dk = 1;
  for (int j = 0; j < k; ++j) dk *= q;
  std::vector<long> map(static_cast<size_t>(dk));
  for (long v = 0; v < dk; ++v) {
    auto d = digits_of(v, q, k);
    long out = 0, p = 1;
    for (int i = 0; i < k; ++i) {
      out += d[static_cast<size_t>(perm[i])] * p;
      p *= q;
    }
    map[static_cast<size_t>(v)] = out;
  }
  Matrix r(dk, dk);
  for (long cc = 0; cc < dk; ++cc)
    for (long rr = 0; rr < dk; ++rr)
      r(map[static_cast<size_t>(rr)], map[static_cast<size_t>(cc)]) = m(rr, cc);
  return r;
}

}  // namespace

std::vector<Site> Rectangle::sites() const {
  std::vector<Site> s;
  s.reserve(static_cast<size_t>(site_count()));
  for (int x = x_lo; x <= x_hi; ++x)
    for (int y = y_lo; y <= y_hi; ++y) s.push_back({x, y});
  return s;
}

InteractionTerm canonicalize_term(std::vector<Site> sites, Matrix m, int q) {
  const int k = static_cast<int>(sites.size());
  if (k == 0) throw ShapeMismatch("term with empty support");
  long dk = 1;
  for (int j = 0; j < k; ++j) dk *= q;
  if (m.rows() != dk || m.cols() != dk)
    throw ShapeMismatch("term matrix dimension " + std::to_string(m.rows()) +
                        " does not match q^" + std::to_string(k));

  // Input is big-endian over the listed sites, which is the same matrix read
  // little-endian over the reversed site list; reverse the list (the matrix
  // needs no permutation), then sort.
  std::reverse(sites.begin(), sites.end());

  std::vector<int> order(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) order[static_cast<size_t>(j)] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return sites[static_cast<size_t>(a)] < sites[static_cast<size_t>(b)];
  });
  std::vector<Site> sorted(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    sorted[static_cast<size_t>(i)] = sites[static_cast<size_t>(order[i])];
  for (int i = 0; i + 1 < k; ++i)
    if (sorted[static_cast<size_t>(i)] == sorted[static_cast<size_t>(i + 1)])
      throw ShapeMismatch("term lists a site twice");
  m = permute_digits(m, q, order);
  return InteractionTerm{std::move(sorted), std::move(m)};
}

GridHamiltonian::GridHamiltonian(int width, int height, int q,
                                 std::vector<InteractionTerm> terms)
    : w_(width), h_(height), q_(q), terms_(std::move(terms)) {
  if (w_ < 1 || h_ < 1) throw ShapeMismatch("grid dimensions must be >= 1");
  if (q_ < 2) throw ShapeMismatch("local dimension must be >= 2");

  if (h_ > w_) {
    // Convention: grids are at least as wide as tall.
    std::swap(w_, h_);
    for (auto& t : terms_) {
      const int k = static_cast<int>(t.sites.size());
      for (auto& s : t.sites) std::swap(s.x, s.y);
      std::vector<int> order(static_cast<size_t>(k));
      for (int j = 0; j < k; ++j) order[static_cast<size_t>(j)] = j;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return t.sites[static_cast<size_t>(a)] < t.sites[static_cast<size_t>(b)];
      });
      std::vector<Site> sorted(static_cast<size_t>(k));
      for (int i = 0; i < k; ++i)
        sorted[static_cast<size_t>(i)] = t.sites[static_cast<size_t>(order[i])];
      t.matrix = permute_digits(t.matrix, q_, order);
      t.sites = std::move(sorted);
    }
  }

  std::vector<int> degree(static_cast<size_t>(w_ * h_), 0);
  for (auto& t : terms_) {
    if (t.sites.empty()) throw ShapeMismatch("term with empty support");
    if (!std::is_sorted(t.sites.begin(), t.sites.end()))
      throw ShapeMismatch("term sites not in canonical order");
    long dk = 1;
    for (size_t j = 0; j < t.sites.size(); ++j) dk *= q_;
    if (t.matrix.rows() != dk || t.matrix.cols() != dk)
      throw ShapeMismatch("term matrix dimension mismatch");
    for (auto& s : t.sites) {
      if (s.x < 1 || s.x > w_ || s.y < 1 || s.y > h_)
        throw ShapeMismatch("term site outside the grid");
      degree[static_cast<size_t>(site_position(s, h_))]++;
    }
    t.matrix = require_hermitian(t.matrix, 1e-10, "interaction term");
    Eigh e = eigh(t.matrix);
    if (e.values.minCoeff() < -1e-10 || e.values.maxCoeff() > 1.0 + 1e-10)
      throw NotHermitian("term eigenvalues outside [0, 1]");
    for (auto& a : t.sites)
      for (auto& b : t.sites)
        diameter_ = std::max(
            diameter_, std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)));
  }
  int maxdeg = 1;
  for (int d : degree) maxdeg = std::max(maxdeg, d);
  c_ = 4 * maxdeg;
}

long GridHamiltonian::column_dim() const {
  return ipow_checked(q_, h_, std::numeric_limits<long>::max() / 2);
}

Matrix embed_at_positions(const Matrix& op, const std::vector<long>& positions,
                          long n_slots, int q) {
  const int k = static_cast<int>(positions.size());
  long dk = 1;
  for (int j = 0; j < k; ++j) dk *= q;
  if (op.rows() != dk || op.cols() != dk)
    throw ShapeMismatch("embed_at_positions: operator dimension mismatch");

  std::vector<char> used(static_cast<size_t>(n_slots), 0);
  for (long p : positions) {
    if (p < 0 || p >= n_slots)
      throw ShapeMismatch("embed_at_positions: slot out of range");
    used[static_cast<size_t>(p)] = 1;
  }
  std::vector<long> rest_slots;
  for (long p = 0; p < n_slots; ++p)
    if (!used[static_cast<size_t>(p)]) rest_slots.push_back(p);

  std::vector<long> pow(static_cast<size_t>(n_slots));
  long acc = 1;
  for (long p = 0; p < n_slots; ++p) {
    pow[static_cast<size_t>(p)] = acc;
    acc *= q;
  }
  const long dim = acc;
  long rest = dim / dk;

  // Spread indices of the operator digits and of the identity digits.
  std::vector<long> spread_op(static_cast<size_t>(dk));
  for (long a = 0; a < dk; ++a) {
    auto d = digits_of(a, q, k);
    long s = 0;
    for (int j = 0; j < k; ++j)
      s += d[static_cast<size_t>(j)] * pow[static_cast<size_t>(positions[static_cast<size_t>(j)])];
    spread_op[static_cast<size_t>(a)] = s;
  }
  std::vector<long> spread_rest(static_cast<size_t>(rest));
  for (long r = 0; r < rest; ++r) {
    auto d = digits_of(r, q, static_cast<int>(rest_slots.size()));
    long s = 0;
    for (size_t j = 0; j < rest_slots.size(); ++j)
      s += d[j] * pow[static_cast<size_t>(rest_slots[j])];
    spread_rest[static_cast<size_t>(r)] = s;
  }

  Matrix out = Matrix::Zero(dim, dim);
  for (long b = 0; b < dk; ++b)
    for (long a = 0; a < dk; ++a) {
      const Complex v = op(a, b);
      if (v == Complex(0, 0)) continue;
      for (long r = 0; r < rest; ++r)
        out(spread_op[static_cast<size_t>(a)] + spread_rest[static_cast<size_t>(r)],
            spread_op[static_cast<size_t>(b)] + spread_rest[static_cast<size_t>(r)]) += v;
    }
  return out;
}

SubHamiltonian restrict_to_region(const GridHamiltonian& h,
                                  const std::vector<Site>& region,
                                  long dense_cap) {
  std::vector<Site> sites = region;
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  const int k = static_cast<int>(sites.size());
  long dim = ipow_checked(h.q(), k, dense_cap);

  std::set<Site> in_region(sites.begin(), sites.end());
  auto slot_of = [&](const Site& s) -> long {
    return static_cast<long>(
        std::lower_bound(sites.begin(), sites.end(), s) - sites.begin());
  };

  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    bool inside = true;
    for (const auto& s : t.sites)
      if (!in_region.count(s)) {
        inside = false;
        break;
      }
    if (!inside) continue;
    std::vector<long> pos;
    pos.reserve(t.sites.size());
    for (const auto& s : t.sites) pos.push_back(slot_of(s));
    m += embed_at_positions(t.matrix, pos, k, h.q());
  }
  return SubHamiltonian{std::move(sites), std::move(m)};
}

double local_gap(const GridHamiltonian& h, int max_sites, long dense_cap) {
  double gamma = std::numeric_limits<double>::infinity();
  for (int a = 1; a <= h.width(); ++a)
    for (int b = a; b <= h.width(); ++b)
      for (int c = 1; c <= h.height(); ++c)
        for (int d = c; d <= h.height(); ++d) {
          Rectangle rect{a, b, c, d};
          if (max_sites > 0 && rect.site_count() > max_sites) continue;
          SubHamiltonian sub = restrict_to_region(h, rect.sites(), dense_cap);
          Eigh e = eigh(sub.matrix);
          for (Eigen::Index i = 0; i < e.values.size(); ++i)
            if (e.values[i] > kZeroEigTol) {
              gamma = std::min(gamma, e.values[i]);
              break;  // ascending order: first nonzero is the smallest
            }
        }
  return gamma;
}

FrustrationReport verify_frustration_free(const GridHamiltonian& h,
                                          long dense_cap) {
  Rectangle all{1, h.width(), 1, h.height()};
  SubHamiltonian sub = restrict_to_region(h, all.sites(), dense_cap);
  Eigh e = eigh(sub.matrix);
  FrustrationReport r;
  r.ground_energy = e.values.size() ? e.values[0] : 0.0;
  r.frustration_free = r.ground_energy < kZeroEigTol;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] < kZeroEigTol) r.degeneracy++;
  return r;
}

}  // namespace agsp
