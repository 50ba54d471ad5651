#pragma once

#include "agsp/linalg.hpp"
#include "agsp/mpo.hpp"
#include "agsp/mps.hpp"

namespace agsp {

/// Proximity of a subspace pair. Overlap is in the squared-projection
/// convention: mu = min over unit vectors of one space of the squared
/// projection onto the other. delta_amplitude = 1 - sqrt(mu) is the
/// convention the trimming bounds are proved in.
struct ViabilityReport {
  double delta = 1.0;            ///< 1 - mu, covering direction
  double mu = 0.0;               ///< worst-case squared projection
  double delta_amplitude = 1.0;  ///< 1 - sqrt(mu)
  double closeness = 1.0;        ///< two-sided: max of both one-sided deltas
};

/// min over unit y in span(a) of ||P_b y||^2. Columns of both arguments
/// must be orthonormal frames of their spaces in a common dense space.
double overlap(const Matrix& a, const Matrix& b);

/// How badly y fails to cover z: 1 - overlap(z, y).
double viability_error(const Matrix& y, const Matrix& z);

/// Symmetric two-sided error: max of the two covering errors.
double closeness(const Matrix& a, const Matrix& b);

/// Full report on how well y covers z (delta, mu, amplitude, closeness).
ViabilityReport compare_subspaces(const Matrix& y, const Matrix& z);

/// Haar-random v-dimensional subspace of y, drawn on the degeneracy bond;
/// deterministic given seed. Throws VTooLarge when v exceeds dim(y).
SubspaceMps random_subspace(const SubspaceMps& y, long v,
                            unsigned long long seed);

/// Modular trim at one cut: project y through the spectral support
/// [eps, infinity) of the left reduced density matrix tr_right(P_y), then
/// re-orthonormalize. eps = 0 and out-of-range cuts are identity maps.
/// The kept left-bond rank is at most dim(y)/eps (Markov), asserted.
SubspaceMps trim_eps(const SubspaceMps& y, int cut_at, double eps);

/// trim_eps applied at cuts width-1, width-2, ..., 1 (rightmost first).
SubspaceMps trim_chain(const SubspaceMps& y, double eps);

/// A restricted to y's frame: Gamma A Gamma^dag (dim(y) x dim(y)).
Matrix restrict_operator(const Mpo& a, const SubspaceMps& y);
Matrix restrict_operator(const Matrix& a, const SubspaceMps& y,
                         long dense_cap = 1L << 20);

/// Sub-frame of y spanned by eigenvectors of hres with eigenvalues in
/// [-1e-9, delta]; hres must be Hermitian on y's frame labels.
SubspaceMps low_energy_support(const SubspaceMps& y, const Matrix& hres,
                               double delta);

/// Measurement of the error-reduction inequality for one dense triple:
/// viability data of v for z before and after applying kappa, plus kappa's
/// measured shrinking factor on z-perp.
struct ErrorReductionCheck {
  double delta_before = 0.0, mu_before = 1.0;
  double delta_after = 0.0, mu_after = 1.0;
  double shrink = 0.0;  ///< measured ||kappa P_{z-perp}||^2
};
ErrorReductionCheck error_reduction_check(const Matrix& v, const Matrix& z,
                                          const Matrix& kappa);

}  // namespace agsp
