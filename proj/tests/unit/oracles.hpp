#pragma once

// Independent numerical oracles used by the tests. These deliberately
// avoid the library's analytic shortcuts: the Fourier oracle is a plain
// trapezoid quadrature of the transform integral, the distribution
// helpers are textbook formulas.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rootstate/basis.hpp"

namespace oracles {

// (1/sqrt(2 pi)) int phi_j(x) exp(-i p x) dx by trapezoid on a truncated
// domain; the integrand decays like a Gaussian, so the rule converges
// spectrally.
inline std::complex<double> fourier_of_phi(const rootstate::ContinuousBasis& basis, int j,
                                           double p) {
  const double a = basis.scale();
  const double half = a * (std::sqrt(2.0 * (2 * basis.size() + 1)) + 10.0);
  const int points = 1 << 13;
  const double h = 2.0 * half / (points - 1);
  std::complex<double> sum = 0.0;
  for (int k = 0; k < points; ++k) {
    double x = -half + k * h;
    double w = (k == 0 || k == points - 1) ? 0.5 : 1.0;
    sum += w * basis.phi(j, x) * std::exp(std::complex<double>(0.0, -p * x));
  }
  return sum * h / std::sqrt(2.0 * M_PI);
}

// trapezoid of f over [-half, half]
inline double trapezoid(const std::function<double(double)>& f, double half, int points) {
  const double h = 2.0 * half / (points - 1);
  double sum = 0.0;
  for (int k = 0; k < points; ++k) {
    double w = (k == 0 || k == points - 1) ? 0.5 : 1.0;
    sum += w * f(-half + k * h);
  }
  return sum * h;
}

// two-sided Kolmogorov-Smirnov statistic of sorted sample values
// against a cdf
inline double ks_statistic(std::vector<double> values,
                           const std::function<double(double)>& cdf) {
  std::sort(values.begin(), values.end());
  const double n = double(values.size());
  double d = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    double f = cdf(values[i]);
    d = std::max(d, std::abs(f - double(i) / n));
    d = std::max(d, std::abs(f - double(i + 1) / n));
  }
  return d;
}

// standard normal cdf
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace oracles
