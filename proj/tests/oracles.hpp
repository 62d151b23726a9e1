#pragma once

// Reference implementations used only by the tests. They avoid the library's
// special functions so that agreement means something.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// 20-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
inline constexpr std::array<double, 10> kGlNodes{
    0.0765265211334973337546404, 0.2277858511416450780804962,
    0.3737060887154195606725482, 0.5108670019508270980043641,
    0.6360536807265150254528367, 0.7463319064601507926143051,
    0.8391169718222188233945291, 0.9122344282513259058677524,
    0.9639719272779137912676661, 0.9931285991850949247861224};
inline constexpr std::array<double, 10> kGlWeights{
    0.1527533871307258506980843, 0.1491729864726037467878287,
    0.1420961093183820513292983, 0.1316886384491766268984945,
    0.1181945319615184173123774, 0.1019301198172404350367501,
    0.0832767415767047487247581, 0.0626720483341090635695065,
    0.0406014298003869413310400, 0.0176140071391521183118620};

template <class F>
double gauss_legendre(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    double s = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      s += kGlWeights[i] * (f(mid - half * kGlNodes[i]) + f(mid + half * kGlNodes[i]));
    }
    total += s * half;
  }
  return total;
}

// Phi by its Taylor series for moderate |x| and a continued fraction in the
// tails.
inline double normal_cdf(double x) {
  if (std::fabs(x) < 4.0) {
    double term = x;
    double sum = x;
    for (int k = 1; k < 200; ++k) {
      term *= -x * x / 2.0 / k;
      const double add = term / (2 * k + 1);
      sum += add;
      if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
    }
    return 0.5 + sum / std::sqrt(2.0 * std::numbers::pi);
  }
  const double z = std::fabs(x);
  double frac = z;
  for (int k = 300; k >= 1; --k) frac = z + k / frac;
  const double tail = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) / frac;
  return x > 0 ? 1.0 - tail : tail;
}

// P(T <= x) for noncentral t: E[Phi(x sqrt(W / df) - delta)] with W ~ chi^2_df,
// integrated over s = sqrt(W) to remove the density singularity at zero.
inline double noncentral_t_cdf(double x, double df, double delta) {
  const double log_norm = (1.0 - 0.5 * df) * std::log(2.0) - std::lgamma(0.5 * df);
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double log_density = log_norm + (df - 1.0) * std::log(s) - 0.5 * s * s;
    return normal_cdf(x * s / std::sqrt(df) - delta) * std::exp(log_density);
  };
  const double upper = std::sqrt(df) + 12.0;
  const double lower = std::max(0.0, std::sqrt(df) - 12.0);
  return gauss_legendre(integrand, lower, upper, 400);
}

// Exact permutation p-value by walking all bitmasks of the pooled sample.
// The statistic is accumulated in pooled index order.
inline double permutation_p(std::span<const double> x, std::span<const double> y) {
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto total = pooled.size();
  const auto n_y = y.size();
  double scale = 0.0;
  for (double v : pooled) scale = std::max(scale, std::fabs(v));
  const double tol = 1e-9 * (1.0 + scale);

  auto stat = [&](std::uint32_t mask) {
    double sy = 0.0;
    double sx = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      if (mask >> i & 1u) {
        sy += pooled[i];
      } else {
        sx += pooled[i];
      }
    }
    return sy / static_cast<double>(n_y) - sx / static_cast<double>(total - n_y);
  };
  std::uint32_t observed_mask = 0;
  for (std::size_t i = x.size(); i < total; ++i) observed_mask |= 1u << i;
  const double observed = stat(observed_mask);

  std::uint64_t hits = 0;
  std::uint64_t count = 0;
  for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != n_y) continue;
    ++count;
    if (stat(mask) >= observed - tol) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(count);
}

inline double rss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::VectorXd b = X.householderQr().solve(y);
  return (y - X * b).squaredNorm();
}

// F statistic for dropping the columns in `dropped` (H0: those coefficients
// are zero), from restricted and full residual sums of squares.
inline double drop_columns_f(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const std::vector<int>& dropped) {
  std::vector<int> keep;
  for (int c = 0; c < X.cols(); ++c) {
    if (std::find(dropped.begin(), dropped.end(), c) == dropped.end()) keep.push_back(c);
  }
  Eigen::MatrixXd R(X.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) R.col(static_cast<Eigen::Index>(k)) = X.col(keep[k]);
  const double full = rss(X, y);
  const double restricted = rss(R, y);
  const double q = static_cast<double>(dropped.size());
  const double df = static_cast<double>(X.rows() - X.cols());
  return ((restricted - full) / q) / (full / df);
}

}  // namespace oracle
