#include "agsp/chebyshev.hpp"

#include <cmath>
#include <set>
#include <string>

#include "agsp/errors.hpp"

namespace agsp {

double chebyshev_t(int n, double x) {
  if (x >= 1.0) return std::cosh(n * std::acosh(x));
  if (x <= -1.0) {
    double v = std::cosh(n * std::acosh(-x));
    return (n % 2) ? -v : v;
  }
  return std::cos(n * std::acos(x));
}

double ChebyshevSeries::eval(double x) const {
  const double u = (2.0 * x - lo - hi) / (hi - lo);
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree(); k >= 1; --k) {
    double b = coeffs[static_cast<size_t>(k)] + 2.0 * u * b1 - b2;
    b2 = b1;
    b1 = b;
  }
  // Compensated final combination: the recurrence intermediates can dwarf
  // the value, and a plain sum would then freeze the result's low bits and
  // make exact pinning of special values (Step(0) == 1) impossible.
  const double prod = u * b1;
  const double perr = std::fma(u, b1, -prod);
  const double vals[4] = {coeffs[0], prod, -b2, perr};
  double sum = 0.0, comp = 0.0;
  for (double v : vals) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

Matrix ChebyshevSeries::eval_on_operator(const Matrix& a) const {
  const Eigen::Index n = a.rows();
  Matrix u = (2.0 * a - (lo + hi) * Matrix::Identity(n, n)) / (hi - lo);
  Matrix b1 = Matrix::Zero(n, n), b2 = Matrix::Zero(n, n);
  for (int k = degree(); k >= 1; --k) {
    Matrix b = coeffs[static_cast<size_t>(k)] * Matrix::Identity(n, n) +
               2.0 * (u * b1) - b2;
    b2 = std::move(b1);
    b1 = std::move(b);
  }
  return coeffs[0] * Matrix::Identity(n, n) + u * b1 - b2;
}

ChebyshevSeries chebyshev_fit(const std::function<double(double)>& fn, int f,
                              double lo, double hi) {
  const int n = f + 1;
  std::vector<double> vals(static_cast<size_t>(n));
  const double pi = 3.14159265358979323846;
  for (int j = 0; j < n; ++j) {
    double u = std::cos(pi * (j + 0.5) / n);
    vals[static_cast<size_t>(j)] = fn(lo + (hi - lo) * 0.5 * (u + 1.0));
  }
  ChebyshevSeries s;
  s.lo = lo;
  s.hi = hi;
  s.coeffs.resize(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += vals[static_cast<size_t>(j)] * std::cos(pi * k * (j + 0.5) / n);
    s.coeffs[static_cast<size_t>(k)] = acc * (k == 0 ? 1.0 : 2.0) / n;
  }
  return s;
}

StepPolynomial build_step_polynomial(double eta, double bound) {
  if (!(eta > 0.0) || eta >= 1.0 - 1e-9)
    throw DegenerateThreshold("step threshold eta = " + std::to_string(eta) +
                              " not inside (0, 1)");
  const double y0 = (1.0 + eta) / (1.0 - eta);
  const double target = 1.0 / bound;
  int f = std::max(
      1, static_cast<int>(std::ceil(std::acosh(target) / std::acosh(y0))));
  while (chebyshev_t(f, y0) < target) ++f;  // guard against rounding
  const double t0 = chebyshev_t(f, y0);

  StepPolynomial p;
  p.degree = f;
  p.threshold = eta;
  p.suppression_bound = bound;
  p.series = chebyshev_fit(
      [&](double x) {
        return chebyshev_t(f, (1.0 + eta - 2.0 * x) / (1.0 - eta)) / t0;
      },
      f, 0.0, 1.0);
  // The ground space must be fixed exactly: nudge the constant term until
  // the Clenshaw evaluation returns 1.0 at x = 0 bit-for-bit.
  for (int it = 0; it < 8; ++it) {
    double d = 1.0 - p.series.eval(0.0);
    if (d == 0.0) break;
    p.series.coeffs[0] += d;
  }
  // The additive correction can oscillate around the last ulp; eval(0) has
  // slope exactly 1 in the constant term, so a one-ulp walk terminates.
  for (int it = 0; it < 256; ++it) {
    const double v = p.series.eval(0.0);
    if (v == 1.0) break;
    p.series.coeffs[0] = std::nextafter(
        p.series.coeffs[0], v < 1.0 ? HUGE_VAL : -HUGE_VAL);
  }
  return p;
}

double RobustAndPolynomial::eval(const std::vector<double>& xs) const {
  double acc = 1.0;
  for (double x : xs) {
    double s = cleanup.eval(x);
    for (int a = 0; a < amplifier_power; ++a) acc *= s;
  }
  return acc / denominator;
}

RobustAndPolynomial build_robust_and(int m, int arity) {
  if (m < 1) throw ShapeMismatch("AND strength must be >= 1");
  if (arity < 0) arity = m;
  if (arity < 1) throw ShapeMismatch("AND arity must be >= 1");
  const double e2 = std::exp(2.0);
  int d = 1;
  while (chebyshev_t(d, 20.0) < e2) ++d;
  const double td = chebyshev_t(d, 20.0);

  RobustAndPolynomial p;
  p.arity = arity;
  p.amplifier_power = (m + 1) / 2;
  p.cleanup =
      chebyshev_fit([&](double x) { return chebyshev_t(d, 20.0 * x) / td; }, d,
                    -1.0, 1.0);
  // Denominator computed by the same multiplication order eval uses, so
  // eval(1, ..., 1) divides out to exactly 1.0.
  double s1 = p.cleanup.eval(1.0);
  double denom = 1.0;
  for (int i = 0; i < arity; ++i)
    for (int a = 0; a < p.amplifier_power; ++a) denom *= s1;
  p.denominator = denom;
  return p;
}

FactoredOperator eval_and_on_operators(
    const RobustAndPolynomial& and_poly,
    const std::vector<SupportedOperator>& ops) {
  if (static_cast<int>(ops.size()) != and_poly.arity)
    throw ShapeMismatch("AND arity " + std::to_string(and_poly.arity) +
                        " but " + std::to_string(ops.size()) +
                        " operators supplied");
  std::set<Site> seen;
  for (const auto& op : ops)
    for (const auto& s : op.sites)
      if (!seen.insert(s).second)
        throw OverlappingSupports("band operators share site (" +
                                  std::to_string(s.x) + "," +
                                  std::to_string(s.y) + ")");

  FactoredOperator out;
  out.scalar = 1.0 / and_poly.denominator;
  for (const auto& op : ops) {
    Matrix s = and_poly.cleanup.eval_on_operator(op.matrix);
    Matrix f = Matrix::Identity(s.rows(), s.cols());
    for (int a = 0; a < and_poly.amplifier_power; ++a) f = f * s;
    out.factors.push_back({op.sites, std::move(f)});
  }
  return out;
}

}  // namespace agsp
