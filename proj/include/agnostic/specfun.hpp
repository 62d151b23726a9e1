#pragma once

// Distribution kernel: normal, Student-t, noncentral-t and F distribution
// functions on top of the regularized incomplete beta function.
//
// Everything here is pure and reentrant.

#include <functional>

namespace agnostic::specfun {

/// A value in [0, 1]. Construction checks the range.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

/// Strictly positive (possibly fractional) degrees of freedom.
class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

 private:
  double value_;
};

Probability std_normal_cdf(double x);
/// Upper tail 1 - Phi(x), computed without cancellation.
Probability std_normal_sf(double x);
double std_normal_pdf(double x);
double std_normal_quantile(double p);

/// I_x(a, b).
Probability regularized_incomplete_beta(double a, double b, double x);

Probability student_t_cdf(double x, DegreesOfFreedom df);
/// P(T > x), accurate in the upper tail.
Probability student_t_sf(double x, DegreesOfFreedom df);
double student_t_pdf(double x, DegreesOfFreedom df);
double student_t_quantile(double p, DegreesOfFreedom df);

/// CDF of the noncentral t with noncentrality `delta`. Uses the incomplete
/// beta series for |delta| <= 37 and direct quadrature beyond that.
Probability noncentral_t_cdf(double x, DegreesOfFreedom df, double delta);

Probability f_cdf(double x, DegreesOfFreedom df1, DegreesOfFreedom df2);
/// P(F > x), accurate in the upper tail.
Probability f_sf(double x, DegreesOfFreedom df1, DegreesOfFreedom df2);

/// Root of an increasing function on [lo, hi] by bisection, to an absolute
/// tolerance on the function value (or until the bracket collapses).
/// Throws NumericError if f(lo) > 0 or f(hi) < 0.
double solve_increasing(const std::function<double(double)>& f, double lo,
                        double hi, double value_tolerance);

}  // namespace agnostic::specfun
