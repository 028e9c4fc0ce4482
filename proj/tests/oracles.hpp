#pragma once

// Test-only reference computations, kept independent of the library code
// paths they check.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

// -G m rho * integral over a uniform ball of 1/|x - y| d^3y, by tensor-product
// quadrature in spherical coordinates about the ball center.
inline double ball_potential_quadrature(double G, double m, double mass,
                                        double radius, const double center[3],
                                        const double x[3], int n = 32) {
  const auto [gx, gw] = gauss_legendre(n);
  const double rho = mass / (4.0 / 3.0 * M_PI * radius * radius * radius);
  const int nphi = 2 * n;
  double acc = 0.0;
  for (int ir = 0; ir < n; ++ir) {
    const double r = 0.5 * radius * (gx[ir] + 1.0);
    const double wr = 0.5 * radius * gw[ir] * r * r;
    for (int it = 0; it < n; ++it) {
      const double ct = gx[it];
      const double st = std::sqrt(1.0 - ct * ct);
      for (int ip = 0; ip < nphi; ++ip) {
        const double ph = 2.0 * M_PI * ip / nphi;
        const double y0 = center[0] + r * st * std::cos(ph);
        const double y1 = center[1] + r * st * std::sin(ph);
        const double y2 = center[2] + r * ct;
        const double d = std::sqrt((x[0] - y0) * (x[0] - y0) +
                                   (x[1] - y1) * (x[1] - y1) +
                                   (x[2] - y2) * (x[2] - y2));
        acc += wr * gw[it] * (2.0 * M_PI / nphi) / d;
      }
    }
  }
  return -G * m * rho * acc;
}

// Central difference derivative.
inline double central_difference(const std::function<double(double)>& f,
                                 double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
