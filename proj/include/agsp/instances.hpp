#pragma once

#include <vector>

#include "agsp/grid_hamiltonian.hpp"
#include "agsp/linalg.hpp"

namespace agsp {

/// Dense orthonormal basis of the zero-energy space of the full Hamiltonian
/// (eigenvalues below kZeroEigTol count as zero).  One column per ground
/// vector, little-endian over site positions.
Matrix exact_ground_space(const GridHamiltonian& ham, long dense_cap = 1L << 20);

/// Planted classical constraint instance on a W x h grid of qubits.
///
/// Every adjacent pair carries a diagonal projector that rejects a random
/// subset of the bit patterns not compatible with a planted assignment, so
/// the instance is frustration free with local gap 1 by construction.  The
/// generator resamples until the ground degeneracy is exactly 1 (unique) or
/// exactly 2 (the planted string and its complement).  When `planted` is
/// non-null it receives the planted bits indexed by site position.
GridHamiltonian gen_planted_csp(int w, int h, unsigned long long seed,
                                bool unique, std::vector<int>* planted = nullptr);

/// Random frustration-free instance with prescribed ground degeneracy.
///
/// Plants `target_d` Haar-random product states and puts, on every adjacent
/// pair, the projector onto the orthogonal complement of their two-site
/// restrictions; the planted products then span the kernel of every term.
/// Resamples until dense diagonalization confirms degeneracy == target_d.
GridHamiltonian gen_random_ff(int w, int h, int q, unsigned long long seed,
                              long target_d);

}  // namespace agsp
