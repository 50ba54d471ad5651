#pragma once

#include <functional>
#include <vector>

#include "agsp/grid_hamiltonian.hpp"
#include "agsp/linalg.hpp"

namespace agsp {

/// Polynomial in the Chebyshev basis over [lo, hi]:
/// p(x) = sum_k c_k T_k(u), u = (2x - lo - hi)/(hi - lo). Clenshaw
/// evaluation; monomial coefficients are never formed.
struct ChebyshevSeries {
  std::vector<double> coeffs;  // c_0 .. c_f
  double lo = -1.0, hi = 1.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double eval(double x) const;
  /// Matrix functional calculus by the same Clenshaw recurrence; A must be
  /// Hermitian with spectrum inside [lo, hi] for a sensible result.
  Matrix eval_on_operator(const Matrix& a) const;
};

/// Interpolate a function at Chebyshev nodes of [lo, hi] into a degree-f
/// series (exact for polynomials of degree <= f).
ChebyshevSeries chebyshev_fit(const std::function<double(double)>& fn, int f,
                              double lo, double hi);

/// T_n(x) for any real x, stable for |x| > 1 via hyperbolic form.
double chebyshev_t(int n, double x);

/// Low-degree filter with Step(0) = 1 exactly and |Step| <= bound on
/// [eta, 1]: Step(x) = T_f((1 + eta - 2x)/(1 - eta)) / T_f((1+eta)/(1-eta)),
/// f minimal with the denominator >= 1/bound.
struct StepPolynomial {
  int degree = 0;
  ChebyshevSeries series;  // over [0, 1]
  double threshold = 0.0;  // eta
  double suppression_bound = 0.05;

  double eval(double x) const { return series.eval(x); }
  Matrix eval_on_operator(const Matrix& a) const {
    return series.eval_on_operator(a);
  }
};

/// Throws DegenerateThreshold unless 0 < eta < 1 (with a 1e-9 margin at
/// the top end).
StepPolynomial build_step_polynomial(double eta, double bound = 0.05);

/// m-variate AND surrogate: AND(x) = prod_i s(x_i)^amp / norm with s a
/// rescaled Chebyshev cleanup (s(1) = 1, |s| <= e^-2 on [-1/20, 1/20]) and
/// amp = ceil(m/2). Equal to 1 at the all-ones point; magnitude <= e^-m
/// whenever every coordinate lies in [-1/20, 1/20] ∪ {1} and at least one
/// is in the noise window.
struct RobustAndPolynomial {
  int arity = 1;
  ChebyshevSeries cleanup;  // s, over [-1, 1]
  int amplifier_power = 1;  // amp
  double denominator = 1.0;  // s(1)^{arity * amp}

  double eval(const std::vector<double>& xs) const;
};

/// Build the AND surrogate at strength m (amp = ceil(m/2), noise magnitude
/// <= e^-m). arity defaults to m; a smaller arity keeps the same strength
/// with fewer inputs (a clipped edge strip sees fewer odd bands).
RobustAndPolynomial build_robust_and(int m, int arity = -1);

/// Hermitian operator together with the sites it acts on (dense on those
/// sites, little-endian over the sorted site list).
struct SupportedOperator {
  std::vector<Site> sites;
  Matrix matrix;
};

/// AND evaluated on commuting operators with pairwise disjoint supports,
/// kept factored: result = scalar * prod_i factors[i] (each factor lives on
/// its own site set). Throws OverlappingSupports if two supports share a
/// site.
struct FactoredOperator {
  std::vector<SupportedOperator> factors;
  double scalar = 1.0;
};

FactoredOperator eval_and_on_operators(const RobustAndPolynomial& and_poly,
                                       const std::vector<SupportedOperator>& ops);

}  // namespace agsp
