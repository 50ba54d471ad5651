#include "agsp/spectral.hpp"

#include "agsp/errors.hpp"
#include "agsp/grid_hamiltonian.hpp"

namespace agsp {

Matrix spectral_projection(const Matrix& a, double lo, double hi) {
  Matrix h = require_hermitian(a, 1e-10, "spectral_projection input");
  Eigh e = eigh(h);
  const Eigen::Index n = h.rows();
  Eigen::Index first = n, count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (e.values[i] >= lo && e.values[i] <= hi) {
      if (first == n) first = i;
      ++count;
    } else if (first != n) {
      break;  // eigenvalues ascending: the selected block is contiguous
    }
  }
  if (count == 0) return Matrix::Zero(n, n);
  Matrix v = e.vectors.middleCols(first, count);
  return v * v.adjoint();
}

Matrix kernel_projector(const Matrix& a) {
  return spectral_projection(a, -kZeroEigTol, kZeroEigTol);
}

}  // namespace agsp
