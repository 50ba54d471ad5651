#pragma once

#include <vector>

#include "agsp/grid_hamiltonian.hpp"
#include "agsp/mps.hpp"
#include "agsp/tensor.hpp"

namespace agsp {

/// Column-grouped matrix product operator: tensor i has indices
/// (left bond, out physical, in physical, right bond); first left bond and
/// last right bond are 1. Physical dimensions may differ per tensor (the
/// coarse wide-band form groups several columns into one tensor).
struct Mpo {
  std::vector<Tensor> tensors;
  bool hermitian_flag = false;

  int width() const { return static_cast<int>(tensors.size()); }
  long phys_dim(int i) const { return tensors[static_cast<size_t>(i)].dim(1); }
  long bond(int cut) const {  // after tensor `cut` (1-based), cut < width
    return tensors[static_cast<size_t>(cut - 1)].dim(3);
  }
  std::vector<long> bond_dims() const;  // width+1 entries, ends are 1
  long max_bond() const;
};

Mpo mpo_identity(const std::vector<long>& phys);

/// Exact (up to a 1e-13 relative singular-value floor) MPO factorization of
/// a dense operator over the given physical dimensions; tol > 0 truncates
/// relative to each cut's largest singular value.
Mpo mpo_from_dense(const Matrix& op, const std::vector<long>& phys,
                   double tol = 0.0);

/// Dense reconstruction; throws CapExceeded past dense_cap total dimension.
Matrix mpo_to_dense(const Mpo& a, long dense_cap = 1L << 13);

/// Operator product a * b (a applied after b). Bond dimensions multiply.
Mpo mpo_multiply(const Mpo& a, const Mpo& b);

/// Apply the first width(y) tensors of k to y. When y is narrower than k,
/// the open right bond of the last applied tensor is merged into the
/// degeneracy index. The result is re-orthonormalized by default (same
/// column space, possibly lower degeneracy rank); pass orthonormal = false
/// to keep the raw frame (needed when the caller wants Gram matrices of
/// the un-normalized image).
SubspaceMps mpo_apply(const Mpo& k, const SubspaceMps& y,
                      bool orthonormal = true);

/// MPO whose tensor j groups cols[j] adjacent columns of uniform physical
/// dimension `phys` into one site of dimension phys^cols[j].
struct CoarseMpo {
  Mpo mpo;
  std::vector<int> cols;
  long phys = 1;
};

/// Split every grouped tensor back into per-column tensors by iterated SVD
/// (relative cutoff tol, floored at 1e-13). Bonds at the original group
/// boundaries are preserved.
Mpo refine_coarse_mpo(const CoarseMpo& coarse, double tol = 0.0);

struct TrimReport {
  double frobenius_bound = 0.0;  // sqrt(sum of dropped singular values^2)
};

/// Two-pass canonical compression: singular values below tol * (cut max)
/// are dropped. tol = 0 removes only numerically dead directions.
Mpo mpo_trim_rank(const Mpo& a, double tol, TrimReport* report = nullptr);

/// Singular values of the operator (as a Frobenius-normalized vector)
/// across every cut, on a canonicalized copy.
std::vector<std::vector<double>> mpo_cut_spectra(const Mpo& a);

long schmidt_rank(const Mpo& a, int cut, double tol);

/// Operator on a few sites: dense matrix over the sorted site list
/// (little-endian), identity on every other site.
struct LocalOperator {
  std::vector<Site> sites;
  Matrix matrix;
};

/// Expand a product of local operators with pairwise disjoint supports into
/// a width-w MPO on columns of dimension q^h (sites are mapped to columns
/// through their x coordinate and to in-column digits through y).
Mpo local_operators_to_mpo(const std::vector<LocalOperator>& factors, int w,
                           int h, int q, long dense_cap = 1L << 13);

/// D x D matrix of <z_i| O |z_j> for O given as factored local operators.
Matrix contract_expectation(const SubspaceMps& z,
                            const std::vector<LocalOperator>& factors, int h,
                            int q);

/// <z_i| A |z_j> for an arbitrary MPO of matching width.
Matrix contract_expectation(const SubspaceMps& z, const Mpo& a);

}  // namespace agsp
