#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace zenograv {

// Embedded Dormand-Prince 5(4) pair with FSAL. The caller drives the loop:
// attempt a step, inspect the error estimate, accept or shrink.
template <int N>
class DormandPrince {
 public:
  using State = Eigen::Matrix<double, N, 1>;

  struct Step {
    State y;       // 5th-order solution
    State dydt;    // derivative at the new point (FSAL)
    double error;  // scaled RMS error estimate, accept when <= 1
  };

  // `scale` holds per-component absolute magnitudes added to the relative
  // tolerance when scaling the error estimate.
  DormandPrince(double rel_tol, State scale) : rel_tol_(rel_tol), scale_(scale) {}

  template <typename Rhs>
  Step attempt(const Rhs& f, double t, const State& y, const State& k1,
               double h) const {
    const State k2 = f(t + c2 * h, State(y + h * (a21 * k1)));
    const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
    const State k4 =
        f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 +
                                                  a53 * k3 + a54 * k4)));
    const State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                             a64 * k4 + a65 * k5)));
    Step out;
    out.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    out.dydt = f(t + h, out.y);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                           e7 * out.dydt);
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
      const double sc =
          scale_[i] + rel_tol_ * std::max(std::abs(y[i]), std::abs(out.y[i]));
      const double r = err[i] / sc;
      acc += r * r;
    }
    out.error = std::sqrt(acc / N);
    return out;
  }

  // Step size controller with the usual safety factor and growth limits.
  static double next_step(double h, double error) {
    if (!(error > 0.0)) return h * 5.0;
    const double factor = 0.9 * std::pow(error, -0.2);
    return h * std::clamp(factor, 0.2, 5.0);
  }

 private:
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b*, difference between the 5th and embedded 4th order weights.
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  double rel_tol_;
  State scale_;
};

}  // namespace zenograv
