#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "agsp/linalg.hpp"

namespace agsp {

/// Seeded random source. Gaussian variates use a hand-rolled Box–Muller
/// transform on top of mt19937_64 so streams are bit-reproducible across
/// platforms and standard-library versions (std::normal_distribution is
/// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Standard complex normal (unit total variance).
  Complex cgauss() {
    double re = normal();
    double im = normal();
    return Complex(re * 0.70710678118654752440, im * 0.70710678118654752440);
  }

  /// Uniform integer in [0, n), rejection-sampled (no modulo bias).
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  std::uint64_t raw() { return gen_(); }

  /// Deterministic per-stream seed derivation (splitmix64 mix).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Matrix of iid standard complex Gaussians, filled column by column.
inline Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.cgauss();
  return g;
}

/// Haar-random isometry dim x v (v columns of a Haar unitary): Gaussian
/// matrix, thin QR, phases fixed so R has positive real diagonal.
Matrix haar_frame(Rng& rng, Eigen::Index dim, Eigen::Index v);

}  // namespace agsp
