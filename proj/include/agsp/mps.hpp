#pragma once

#include <vector>

#include "agsp/tensor.hpp"

namespace agsp {

/// Column-grouped matrix product state describing a SUBSPACE: each tensor
/// has indices (left bond, column physical index, right bond) and the right
/// bond of the last tensor is the dangling degeneracy index enumerating a
/// frame of the subspace. When `isometry` is set the reconstructed
/// (q^{h·width} x deg_dim) frame has orthonormal columns.
struct SubspaceMps {
  std::vector<Tensor> tensors;
  bool isometry = false;

  int width() const { return static_cast<int>(tensors.size()); }
  long phys_dim(int i) const { return tensors[static_cast<size_t>(i)].dim(1); }
  long deg_dim() const {
    return tensors.empty() ? 1 : tensors.back().dim(2);
  }
  /// Bond between columns `cut` and `cut+1` (1-based cut = columns kept on
  /// the left); cut = width() returns the degeneracy bond.
  long bond(int cut) const {
    return tensors[static_cast<size_t>(cut - 1)].dim(2);
  }
  long max_bond() const;
};

/// full space of one extra column appended on the right: the new tensor is
/// the identity reshaped, so the degeneracy bond becomes deg * phys.
SubspaceMps extend_by_column(const SubspaceMps& y, long phys);

/// Width-w MPS of the full product space (deg bond = total dimension);
/// w >= 1. Useful as the starting frame for dense comparisons.
SubspaceMps full_space_mps(int w, long phys);

/// Exact MPS factorization of a dense frame (dim = phys^width rows).
SubspaceMps mps_from_dense_frame(const Matrix& frame, int width, long phys);

/// Dense (phys^width x deg) frame; throws CapExceeded past dense_cap rows.
Matrix mps_to_dense_frame(const SubspaceMps& y, long dense_cap = 1L << 20);

/// Left-canonical SVD sweep. Restores the isometry flag and prunes
/// numerically dead directions (relative singular-value floor rank_tol),
/// which may lower the degeneracy dimension to the frame's true rank.
void orthonormalize(SubspaceMps& y, double rank_tol = 1e-12);

/// Hermitian K_a x K_b overlap matrix <a_i | b_j>.
Matrix mps_overlap(const SubspaceMps& a, const SubspaceMps& b);

/// Singular values across every vertical cut (cut = 1 .. width-1), computed
/// on a canonicalized copy; these are the frame's Schmidt coefficients.
std::vector<std::vector<double>> mps_cut_spectra(const SubspaceMps& y);

long schmidt_rank(const SubspaceMps& y, int cut, double tol);

/// Contract the degeneracy bond with `map` (deg x k), e.g. to select a
/// sub-frame or apply a random isometry on the frame label.
SubspaceMps apply_on_degeneracy(const SubspaceMps& y, const Matrix& map);

}  // namespace agsp
