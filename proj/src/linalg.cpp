#include "agsp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agsp/errors.hpp"
#include "agsp/rng.hpp"

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace agsp {

namespace {
// Below this size Eigen's own solvers beat the LAPACK call overhead and
// are plenty accurate; they also serve as the fallback path.
constexpr Eigen::Index kTinyDim = 32;

Eigh eigh_eigen(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  return {es.eigenvalues(), es.eigenvectors()};
}

Svd svd_eigen(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> js(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {js.matrixU(), js.singularValues(), js.matrixV().adjoint()};
}
}  // namespace

Eigh eigh(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeMismatch("eigh: matrix not square");
  const Eigen::Index n = a.rows();
  if (n == 0) return {RealVector(0), Matrix(0, 0)};
  if (n <= kTinyDim) return eigh_eigen(a);

  Matrix v = a;
  RealVector w(n);
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L',
                                   static_cast<lapack_int>(n), v.data(),
                                   static_cast<lapack_int>(n), w.data());
  if (info != 0) return eigh_eigen(a);
  return {std::move(w), std::move(v)};
}

Svd svd_thin(const Matrix& a) {
  const Eigen::Index m = a.rows(), n = a.cols(), k = std::min(m, n);
  if (k == 0) return {Matrix(m, 0), RealVector(0), Matrix(0, n)};
  if (std::max(m, n) <= kTinyDim) return svd_eigen(a);

  Matrix work = a;
  Matrix u(m, k), vt(k, n);
  RealVector s(k);
  lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'S', static_cast<lapack_int>(m),
      static_cast<lapack_int>(n), work.data(), static_cast<lapack_int>(m),
      s.data(), u.data(), static_cast<lapack_int>(m), vt.data(),
      static_cast<lapack_int>(k));
  if (info != 0) {
    // Divide-and-conquer occasionally fails to converge; retry with the
    // plain QR-iteration driver before giving up to Eigen.
    work = a;
    RealVector superb(k > 1 ? k - 1 : 1);
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S',
                          static_cast<lapack_int>(m),
                          static_cast<lapack_int>(n), work.data(),
                          static_cast<lapack_int>(m), s.data(), u.data(),
                          static_cast<lapack_int>(m), vt.data(),
                          static_cast<lapack_int>(k), superb.data());
    if (info != 0) return svd_eigen(a);
  }
  return {std::move(u), std::move(s), std::move(vt)};
}

double hermiticity_defect(const Matrix& a) {
  if (a.rows() != a.cols() || a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

Matrix require_hermitian(const Matrix& a, double tol, const char* what) {
  if (a.rows() != a.cols())
    throw NotHermitian(std::string(what) + ": not square");
  const double defect = hermiticity_defect(a);
  if (defect > tol)
    throw NotHermitian(std::string(what) + ": hermiticity defect " +
                       std::to_string(defect) + " exceeds tolerance");
  return 0.5 * (a + a.adjoint());
}

double operator_norm(const Matrix& a, Eigen::Index dense_limit) {
  if (a.size() == 0) return 0.0;
  if (std::max(a.rows(), a.cols()) <= dense_limit) {
    Svd d = svd_thin(a);
    return d.s.size() ? d.s[0] : 0.0;
  }
  // Power iteration on A^dag A with a deterministic, mildly tilted start.
  const Eigen::Index n = a.cols();
  Vector v(n);
  for (Eigen::Index j = 0; j < n; ++j)
    v[j] = Complex(1.0 + 1e-3 * static_cast<double>(j % 97) / 97.0,
                   1e-4 * static_cast<double>(j % 13));
  v.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vector av = a * v;
    double next = av.squaredNorm();
    Vector w = a.adjoint() * av;
    double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 2 && std::abs(next - sigma2) <= 1e-13 * std::max(next, 1e-300)) {
      sigma2 = next;
      break;
    }
    sigma2 = next;
  }
  return std::sqrt(sigma2);
}

Matrix kron_le(const Matrix& low, const Matrix& high) {
  Matrix out(low.rows() * high.rows(), low.cols() * high.cols());
  for (Eigen::Index l = 0; l < high.cols(); ++l)
    for (Eigen::Index j = 0; j < high.rows(); ++j)
      out.block(j * low.rows(), l * low.cols(), low.rows(), low.cols()) =
          high(j, l) * low;
  return out;
}

Matrix haar_frame(Rng& rng, Eigen::Index dim, Eigen::Index v) {
  if (v > dim)
    throw VTooLarge("haar_frame: " + std::to_string(v) +
                    " columns requested in dimension " + std::to_string(dim));
  Matrix g = gaussian_matrix(rng, dim, v);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, v);
  // Fix the gauge so the implied R has positive real diagonal; this makes
  // Q exactly Haar-distributed rather than Haar-up-to-phases.
  for (Eigen::Index k = 0; k < v; ++k) {
    Complex d = qr.matrixQR()(k, k);
    double ad = std::abs(d);
    if (ad > 0.0) q.col(k) *= d / ad;
  }
  return q;
}

Matrix orthonormal_columns(const Matrix& a, double tol) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const auto& rdiag = qr.matrixR().diagonal();
  double top = rdiag.size() ? std::abs(rdiag[0]) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < std::min(a.rows(), a.cols()); ++k)
    if (std::abs(rdiag[k]) > tol * top) ++rank;
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), rank);
  return q;
}

}  // namespace agsp
