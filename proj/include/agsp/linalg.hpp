#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

namespace agsp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Result of a Hermitian eigendecomposition, eigenvalues ascending.
struct Eigh {
  RealVector values;
  Matrix vectors;  // column k is the eigenvector for values[k]
};

/// Thin singular value decomposition A = U * diag(s) * Vh.
struct Svd {
  Matrix u;
  RealVector s;  // descending
  Matrix vh;
};

/// Full Hermitian eigendecomposition (LAPACK zheevd; Eigen fallback for
/// tiny matrices or if the divide-and-conquer driver fails to converge).
Eigh eigh(const Matrix& a);

/// Thin SVD (LAPACK zgesdd, falling back to zgesvd / Eigen on failure).
Svd svd_thin(const Matrix& a);

/// Max |A(i,j) - conj(A(j,i))| over all entries.
double hermiticity_defect(const Matrix& a);

/// Throws NotHermitian if the defect exceeds tol; returns (A + A^dag)/2.
Matrix require_hermitian(const Matrix& a, double tol = 1e-10,
                         const char* what = "matrix");

/// Spectral norm. Exact via SVD for n <= dense_limit, else power iteration
/// on A^dag A (deterministic start vector, relative tolerance 1e-10).
double operator_norm(const Matrix& a, Eigen::Index dense_limit = 1024);

/// Kronecker product where `low` acts on the faster-varying index:
/// out[i + da*j, k + da*l] = low(i,k) * high(j,l).
Matrix kron_le(const Matrix& low, const Matrix& high);

/// Orthonormal basis for the span of the columns of A: thin QR with
/// columns of zero weight dropped (relative tolerance `tol`).
Matrix orthonormal_columns(const Matrix& a, double tol = 1e-12);

}  // namespace agsp
