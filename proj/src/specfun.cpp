#include "agnostic/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "agnostic/errors.hpp"

namespace agnostic::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Noncentrality above which the Poisson-weighted series underflows.
constexpr double kSeriesDeltaLimit = 37.0;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": non-finite argument");
  }
}

void require_not_nan(double x, const char* what) {
  if (std::isnan(x)) throw DomainError(std::string(what) + ": NaN argument");
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 20000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw NumericError("incomplete beta: continued fraction did not converge");
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
double gauss_kronrod_adaptive(const F& f, double a, double b, double tol,
                              int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  // Halving the tolerance stops paying once it is below rounding noise.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::fabs(kronrod);
  if (depth <= 0 || std::fabs(kronrod - gauss) <= std::max(tol, floor)) return kronrod;
  return gauss_kronrod_adaptive(f, a, center, 0.5 * tol, depth - 1) +
         gauss_kronrod_adaptive(f, center, b, 0.5 * tol, depth - 1);
}

// P(T <= x) for T = (Z + delta) / S, S = sqrt(chi2_df / df), integrating
// Phi(x s - delta) against the density of S.
double noncentral_t_cdf_quadrature(double x, double df, double delta) {
  const double half_df = 0.5 * df;
  const double log_norm = std::log(2.0) + half_df * std::log(half_df) -
                          std::lgamma(half_df);
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double log_density =
        log_norm + (df - 1.0) * std::log(s) - half_df * s * s;
    return std::exp(log_density) * 0.5 * std::erfc(-(x * s - delta) / std::numbers::sqrt2);
  };
  const double mode = df > 1.0 ? std::sqrt((df - 1.0) / df) : 0.0;
  const double spread = 1.0 / std::sqrt(2.0 * df);
  const double lo = std::max(0.0, mode - 40.0 * spread);
  const double hi = mode + 40.0 * spread + 1.0;
  constexpr int kPanels = 64;
  const double width = (hi - lo) / kPanels;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double a = lo + i * width;
    total += gauss_kronrod_adaptive(integrand, a, a + width, 1e-15, 20);
  }
  return clamp01(total);
}

// AS 243 (Lenth 1989) series, valid for moderate |delta|.
double noncentral_t_cdf_series(double t, double df, double delta) {
  constexpr int kMaxTerms = 5000;
  constexpr double kErrMax = 1e-13;
  const bool negate = t < 0.0;
  const double tt = negate ? -t : t;
  const double del = negate ? -delta : delta;

  double tnc = 0.0;
  const double x = tt * tt / (tt * tt + df);
  if (x > 0.0) {
    const double lambda = del * del;
    double p = 0.5 * std::exp(-0.5 * lambda);
    double q = std::sqrt(2.0 / std::numbers::pi) * p * del;
    double s = 0.5 - p;
    double a = 0.5;
    const double b = 0.5 * df;
    const double rxb = std::pow(1.0 - x, b);
    const double albeta = 0.5 * std::log(std::numbers::pi) + std::lgamma(b) -
                          std::lgamma(0.5 + b);
    double xodd = regularized_incomplete_beta(a, b, x);
    double godd = 2.0 * rxb * std::exp(a * std::log(x) - albeta);
    double xeven = 1.0 - rxb;
    double geven = b * x * rxb;
    tnc = p * xodd + q * xeven;
    for (int en = 1; en <= kMaxTerms; ++en) {
      a += 1.0;
      xodd -= godd;
      xeven -= geven;
      godd *= x * (a + b - 1.0) / a;
      geven *= x * (a + b - 0.5) / (a + 0.5);
      p *= lambda / (2.0 * en);
      q *= lambda / (2.0 * en + 1.0);
      s -= p;
      tnc += p * xodd + q * xeven;
      const double bound = 2.0 * s * (xodd - godd);
      if (std::fabs(bound) <= kErrMax && 2.0 * en > lambda) break;
      if (en == kMaxTerms) {
        throw NumericError("noncentral t: series did not converge");
      }
    }
  }
  tnc += 0.5 * std::erfc(del / std::numbers::sqrt2);
  return clamp01(negate ? 1.0 - tnc : tnc);
}

// Wichura AS 241 (PPND16).
double normal_quantile_as241(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("probability outside [0, 1]: " + std::to_string(value));
  }
}

DegreesOfFreedom::DegreesOfFreedom(double value) : value_(value) {
  if (!(value > 0.0) || std::isinf(value)) {
    throw DomainError("degrees of freedom must be positive and finite: " +
                      std::to_string(value));
  }
}

Probability std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return Probability(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

Probability std_normal_sf(double x) {
  require_finite(x, "std_normal_sf");
  return Probability(0.5 * std::erfc(x / std::numbers::sqrt2));
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0, 1)");
  }
  return normal_quantile_as241(p);
}

Probability regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("incomplete beta: shape parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("incomplete beta: x outside [0, 1]");
  }
  if (x == 0.0) return Probability(0.0);
  if (x == 1.0) return Probability(1.0);
  const double log_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return Probability(clamp01(front * beta_continued_fraction(a, b, x) / a));
  }
  return Probability(
      clamp01(1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b));
}

Probability student_t_cdf(double x, DegreesOfFreedom df) {
  require_not_nan(x, "student_t_cdf");
  if (x == 0.0) return Probability(0.5);
  if (std::isinf(x)) return Probability(x > 0.0 ? 1.0 : 0.0);
  const double t2 = x * x;
  const double nu = df.value();
  if (t2 < nu) {
    const double central =
        0.5 * regularized_incomplete_beta(0.5, 0.5 * nu, t2 / (nu + t2));
    return Probability(x > 0.0 ? 0.5 + central : 0.5 - central);
  }
  const double tail =
      0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, nu / (nu + t2));
  return Probability(x > 0.0 ? 1.0 - tail : tail);
}

Probability student_t_sf(double x, DegreesOfFreedom df) {
  require_not_nan(x, "student_t_sf");
  return student_t_cdf(-x, df);
}

double student_t_pdf(double x, DegreesOfFreedom df) {
  const double nu = df.value();
  const double log_pdf = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                         0.5 * std::log(nu * std::numbers::pi) -
                         0.5 * (nu + 1.0) * std::log1p(x * x / nu);
  return std::exp(log_pdf);
}

double student_t_quantile(double p, DegreesOfFreedom df) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("student_t_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  // Solve on the upper half: P(T > x) = tail with tail <= 0.5 exact.
  const bool lower = p < 0.5;
  const double tail = lower ? p : 1.0 - p;
  const double nu = df.value();

  auto excess = [&](double x) { return student_t_sf(x, df).value() - tail; };

  // Cornish-Fisher start from the normal quantile.
  const double z = -normal_quantile_as241(tail);
  double x = z + (z * z * z + z) / (4.0 * nu) +
             (5.0 * std::pow(z, 5) + 16.0 * z * z * z + 3.0 * z) / (96.0 * nu * nu);
  if (!std::isfinite(x) || x <= 0.0) x = z;

  double lo = 0.0;
  double hi = std::max(x, 1.0);
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("student_t_quantile: no bracket");
  }
  x = std::clamp(x, lo, hi);
  for (int iter = 0; iter < 300; ++iter) {
    const double fx = excess(x);
    if (std::fabs(fx) <= 1e-15 * std::max(tail, 1e-300) || fx == 0.0) break;
    // sf is decreasing: fx > 0 means x is too small.
    if (fx > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x + fx / student_t_pdf(x, df);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 4.0 * kEps * std::fabs(x)) {
      x = next;
      break;
    }
    x = next;
  }
  return lower ? -x : x;
}

Probability noncentral_t_cdf(double x, DegreesOfFreedom df, double delta) {
  require_not_nan(x, "noncentral_t_cdf");
  require_finite(delta, "noncentral_t_cdf");
  if (delta == 0.0) return student_t_cdf(x, df);
  if (std::isinf(x)) return Probability(x > 0.0 ? 1.0 : 0.0);
  if (std::fabs(delta) > kSeriesDeltaLimit) {
    return Probability(noncentral_t_cdf_quadrature(x, df.value(), delta));
  }
  return Probability(noncentral_t_cdf_series(x, df.value(), delta));
}

Probability f_cdf(double x, DegreesOfFreedom df1, DegreesOfFreedom df2) {
  require_not_nan(x, "f_cdf");
  if (x < 0.0) throw DomainError("f_cdf: x must be non-negative");
  if (x == 0.0) return Probability(0.0);
  if (std::isinf(x)) return Probability(1.0);
  const double num = df1.value() * x;
  return regularized_incomplete_beta(0.5 * df1.value(), 0.5 * df2.value(),
                                     num / (num + df2.value()));
}

Probability f_sf(double x, DegreesOfFreedom df1, DegreesOfFreedom df2) {
  require_not_nan(x, "f_sf");
  if (x < 0.0) throw DomainError("f_sf: x must be non-negative");
  if (x == 0.0) return Probability(1.0);
  if (std::isinf(x)) return Probability(0.0);
  const double num = df1.value() * x;
  return regularized_incomplete_beta(0.5 * df2.value(), 0.5 * df1.value(),
                                     df2.value() / (num + df2.value()));
}

double solve_increasing(const std::function<double(double)>& f, double lo,
                        double hi, double value_tolerance) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) {
    throw NumericError("solve_increasing: root not bracketed");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (std::fabs(fmid) <= value_tolerance) return mid;
    if (fmid < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 2.0 * kEps * std::max(1.0, std::fabs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace agnostic::specfun
