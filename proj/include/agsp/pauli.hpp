#pragma once

#include <string>
#include <vector>

#include "agsp/grid_hamiltonian.hpp"
#include "agsp/linalg.hpp"
#include "agsp/mps.hpp"

namespace agsp {

/// One clock/shift factor X^a Z^b acting on a single lattice site.
struct PauliFactor {
  Site site;
  int x_pow = 0;
  int z_pow = 0;
};

/// A product of single-site clock/shift factors on distinct sites.
///
/// Factors are kept sorted by site position and each factor is non-identity;
/// the empty product is the identity word.
struct PauliWord {
  std::vector<PauliFactor> factors;

  /// Printable label such as "X(1,2)*Z^2(2,1)"; the identity word is "I".
  std::string label() const;
};

/// Dense q x q matrix of X^a Z^b where X|r> = |r+1 mod q> and Z|r> = w^r |r>.
Matrix clock_shift_matrix(int q, int x_pow, int z_pow);

/// Expectation tables of low-weight clock/shift words on a subspace.
///
/// `entries[w]` is the dim x dim matrix with (i,j) entry <z_i| sigma_w |z_j>
/// over an orthonormal basis {z_i} of the tabulated space.  The identity word
/// comes first; the rest are ordered by support size, then by the site
/// combination, then by the exponent tuple (first site most significant).
struct PauliTable {
  int width = 0;
  int height = 0;
  int q = 2;
  int k = 1;
  long dim = 0;
  std::vector<PauliWord> words;
  std::vector<Matrix> entries;
};

/// Tabulates all words of support at most k over the given sites (all sites
/// when the filter is empty) against the subspace held by `z`.
///
/// Throws CapExceeded when k exceeds `k_cap` or the table would hold more
/// than `entry_cap` scalar entries.
PauliTable pauli_table(const SubspaceMps& z, int height, int q, int k,
                       const std::vector<Site>& site_filter = {},
                       int k_cap = 2, long entry_cap = 1L << 22);

/// Decodes a basis-state assignment from the single-site clock expectations
/// of a one-dimensional (or nearly classical) tabulated space.
///
/// Returns one digit in [0, q) per site, indexed by site position.  Throws
/// AmbiguousSign when the two most likely digits at some site are closer
/// than 0.1 in estimated probability.
std::vector<int> read_assignment(const PauliTable& table);

}  // namespace agsp
