#include "agsp/instances.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "agsp/errors.hpp"
#include "agsp/rng.hpp"

namespace agsp {

namespace {

constexpr int kMaxAttempts = 500;

/// All unordered adjacent pairs, each sorted.
std::vector<std::pair<Site, Site>> adjacent_pairs(int w, int h) {
  std::vector<std::pair<Site, Site>> edges;
  for (int x = 1; x <= w; ++x) {
    for (int y = 1; y <= h; ++y) {
      if (x + 1 <= w) edges.push_back({{x, y}, {x + 1, y}});
      if (y + 1 <= h) edges.push_back({{x, y}, {x, y + 1}});
    }
  }
  return edges;
}

Vector random_unit_vector(Rng& rng, int q) {
  Vector v(q);
  for (int i = 0; i < q; ++i) v(i) = rng.cgauss();
  double n = v.norm();
  while (n < 1e-12) {
    for (int i = 0; i < q; ++i) v(i) = rng.cgauss();
    n = v.norm();
  }
  return v / n;
}

}  // namespace

Matrix exact_ground_space(const GridHamiltonian& ham, long dense_cap) {
  Rectangle all{1, ham.width(), 1, ham.height()};
  SubHamiltonian sub = restrict_to_region(ham, all.sites(), dense_cap);
  Eigh e = eigh(sub.matrix);
  long d = 0;
  while (d < e.values.size() && e.values(d) < kZeroEigTol) ++d;
  return e.vectors.leftCols(d);
}

GridHamiltonian gen_planted_csp(int w, int h, unsigned long long seed,
                                bool unique, std::vector<int>* planted) {
  if (w < 1 || h < 1) throw ShapeMismatch("grid dimensions must be >= 1");
  const int n = w * h;
  if (n > 24) throw CapExceeded("planted instance too large to enumerate");
  if (n < 2) throw ShapeMismatch("planted instances need at least two sites");
  const long total = 1L << n;
  const auto edges = adjacent_pairs(w, h);

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(attempt)));

    std::vector<int> bits(static_cast<size_t>(n));
    for (auto& b : bits) b = static_cast<int>(rng.uniform_int(2));

    // Rejected patterns per edge, little-endian over the sorted pair.
    std::vector<InteractionTerm> terms;
    std::vector<std::array<char, 4>> rejected(edges.size(), {0, 0, 0, 0});
    for (size_t e = 0; e < edges.size(); ++e) {
      const long p1 = site_position(edges[e].first, h);
      const long p2 = site_position(edges[e].second, h);
      const int good = bits[static_cast<size_t>(p1)] +
                       2 * bits[static_cast<size_t>(p2)];
      const int good2 = unique ? good : 3 - good;  // complement pattern
      Matrix m = Matrix::Zero(4, 4);
      bool any = false;
      for (int pat = 0; pat < 4; ++pat) {
        if (pat == good || pat == good2) continue;
        if (rng.uniform() < 0.75) {
          m(pat, pat) = 1.0;
          rejected[e][static_cast<size_t>(pat)] = 1;
          any = true;
        }
      }
      if (any) {
        terms.push_back(
            InteractionTerm{{edges[e].first, edges[e].second}, std::move(m)});
      }
    }

    // Classical brute force over assignments: satisfying iff no edge sees a
    // rejected pattern.  Cheap because every term is diagonal.
    long count = 0;
    for (long a = 0; a < total; ++a) {
      bool ok = true;
      for (size_t e = 0; e < edges.size() && ok; ++e) {
        const int b1 = static_cast<int>(
            (a >> site_position(edges[e].first, h)) & 1);
        const int b2 = static_cast<int>(
            (a >> site_position(edges[e].second, h)) & 1);
        ok = !rejected[e][static_cast<size_t>(b1 + 2 * b2)];
      }
      if (ok && ++count > 2) break;
    }

    const long want = unique ? 1 : 2;
    if (count != want) continue;

    if (planted) *planted = bits;
    return GridHamiltonian(w, h, 2, std::move(terms));
  }
  throw Error("planted instance generation did not converge");
}

GridHamiltonian gen_random_ff(int w, int h, int q, unsigned long long seed,
                              long target_d) {
  if (w < 1 || h < 1) throw ShapeMismatch("grid dimensions must be >= 1");
  if (q < 2) throw ShapeMismatch("local dimension must be >= 2");
  if (target_d < 1) throw ShapeMismatch("target degeneracy must be >= 1");
  const int n = w * h;
  if (n < 2) throw ShapeMismatch("instances need at least two sites");
  const auto edges = adjacent_pairs(w, h);

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(Rng::derive(seed, 0x5eed0000ull + static_cast<std::uint64_t>(attempt)));

    // target_d random product states; site factors indexed by position.
    std::vector<std::vector<Vector>> factors(static_cast<size_t>(target_d));
    for (auto& f : factors) {
      f.reserve(static_cast<size_t>(n));
      for (int s = 0; s < n; ++s) f.push_back(random_unit_vector(rng, q));
    }

    std::vector<InteractionTerm> terms;
    for (const auto& edge : edges) {
      const long p1 = site_position(edge.first, h);
      const long p2 = site_position(edge.second, h);
      Matrix span(static_cast<long>(q) * q, target_d);
      for (long r = 0; r < target_d; ++r) {
        span.col(r) = kron_le(factors[static_cast<size_t>(r)][p1],
                              factors[static_cast<size_t>(r)][p2]);
      }
      Matrix basis = orthonormal_columns(span);
      Matrix proj = Matrix::Identity(q * q, q * q) - basis * basis.adjoint();
      if (proj.norm() < 1e-12) continue;  // planted span fills the pair space
      terms.push_back(InteractionTerm{{edge.first, edge.second}, std::move(proj)});
    }

    GridHamiltonian ham(w, h, q, std::move(terms));
    FrustrationReport rep = verify_frustration_free(ham);
    if (rep.frustration_free && rep.degeneracy == target_d) return ham;
  }
  throw Error("random frustration-free generation did not converge");
}

}  // namespace agsp
