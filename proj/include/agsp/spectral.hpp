#pragma once

#include "agsp/linalg.hpp"

namespace agsp {

/// Orthogonal projector onto the span of eigenvectors of A with eigenvalue
/// in [lo, hi] (endpoints inclusive). A must be Hermitian to 1e-10.
Matrix spectral_projection(const Matrix& a, double lo, double hi);

/// Projector onto the numerical kernel: eigenvalues in [-1e-9, 1e-9].
Matrix kernel_projector(const Matrix& a);

}  // namespace agsp
