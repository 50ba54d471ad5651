#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agsp/linalg.hpp"

namespace agsp {

/// Lattice site, 1-based: x = column in [1, W], y = row in [1, h].
struct Site {
  int x = 0;
  int y = 0;
  friend bool operator==(const Site& a, const Site& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend bool operator<(const Site& a, const Site& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  }
};

/// Position of a site in the canonical qudit ordering (column-major:
/// column 1 rows 1..h, then column 2, ...). Dense indices are little-endian
/// over positions: position 0 is the fastest digit.
inline long site_position(const Site& s, int height) {
  return static_cast<long>(s.x - 1) * height + (s.y - 1);
}

/// One local interaction 0 <= matrix <= I acting on a few sites.
/// Sites are kept sorted; the matrix is indexed little-endian over the
/// sorted site list (first site = fastest digit).
struct InteractionTerm {
  std::vector<Site> sites;
  Matrix matrix;
};

/// Axis-aligned rectangle [x_lo,x_hi] x [y_lo,y_hi] (inclusive, clipped to
/// the grid by the caller).
struct Rectangle {
  int x_lo = 1, x_hi = 1, y_lo = 1, y_hi = 1;
  std::vector<Site> sites() const;
  long site_count() const {
    return static_cast<long>(x_hi - x_lo + 1) * (y_hi - y_lo + 1);
  }
};

/// Dense restriction of the Hamiltonian to a site set.
struct SubHamiltonian {
  std::vector<Site> sites;  // canonical (sorted) order
  Matrix matrix;            // dimension q^{sites.size()}
};

/// Frustration test result: is the ground energy (numerically) zero, what
/// is it, and how degenerate is the ground space.
struct FrustrationReport {
  bool frustration_free = false;
  double ground_energy = 0.0;
  long degeneracy = 0;
};

/// W x h lattice of q-dimensional qudits with local terms 0 <= H_i <= I.
/// Inputs with h > W are transposed on construction so h <= W always holds.
class GridHamiltonian {
 public:
  GridHamiltonian(int width, int height, int q,
                  std::vector<InteractionTerm> terms);

  int width() const { return w_; }
  int height() const { return h_; }
  int q() const { return q_; }
  int n_sites() const { return w_ * h_; }
  long column_dim() const;  // q^h
  const std::vector<InteractionTerm>& terms() const { return terms_; }

  /// 4x the maximum number of terms touching any one qudit (at least 4);
  /// used to scale band Hamiltonians, since a width-4t band holds at most
  /// (this constant) * t * h terms, each of norm <= 1.
  int interaction_degree_c() const { return c_; }

  /// Max Chebyshev distance between two sites within one term's support.
  int diameter_bound() const { return diameter_; }

 private:
  int w_, h_, q_, c_ = 4, diameter_ = 0;
  std::vector<InteractionTerm> terms_;
};

/// Normalize a term given in arbitrary site order with a big-endian matrix
/// (first listed site = most significant digit, the on-disk convention)
/// into sorted-site, little-endian internal form.
InteractionTerm canonicalize_term(std::vector<Site> sites, Matrix m, int q);

/// Embed `op` (little-endian over `positions`, each a qudit slot in
/// [0, n_slots)) into the q^{n_slots}-dimensional space, identity elsewhere.
Matrix embed_at_positions(const Matrix& op, const std::vector<long>& positions,
                          long n_slots, int q);

/// Sum of all terms whose support lies inside S, embedded on S's qudits.
/// Throws CapExceeded when q^{|S|} exceeds dense_cap.
SubHamiltonian restrict_to_region(const GridHamiltonian& h,
                                  const std::vector<Site>& region,
                                  long dense_cap = 1L << 20);

/// Smallest nonzero eigenvalue (below 1e-9 counts as zero) over all grid
/// rectangles, restricted to rectangles with at most max_sites sites when
/// max_sites > 0. Returns +infinity if every rectangle spectrum is {0}.
/// With max_sites == 0 every rectangle is required to fit the dense cap.
double local_gap(const GridHamiltonian& h, int max_sites = 0,
                 long dense_cap = 1L << 20);

/// Dense diagonalization of the full Hamiltonian: frustration-free iff the
/// smallest eigenvalue is < 1e-9; degeneracy = count of eigenvalues < 1e-9.
FrustrationReport verify_frustration_free(const GridHamiltonian& h,
                                          long dense_cap = 1L << 20);

/// Eigenvalue threshold under which a value is treated as exactly zero.
inline constexpr double kZeroEigTol = 1e-9;

}  // namespace agsp
