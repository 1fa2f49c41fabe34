#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "geotrig/error.hpp"

namespace geotrig::ode {

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 2'000'000;
};

/// Adaptive Dormand–Prince 5(4) integrator with first-same-as-last reuse.
///
/// `advance_to` always lands exactly on the requested abscissa, so a caller can
/// sample the solution on a fixed grid without interpolation error.
template <std::size_t N, class Rhs>
class DormandPrince {
 public:
  using State = std::array<double, N>;

  DormandPrince(Rhs rhs, double s0, const State& y0, double h0, Tolerances tol)
      : rhs_(std::move(rhs)), s_(s0), y_(y0), h_(h0), tol_(tol) {
    k1_ = rhs_(s_, y_);
  }

  double position() const { return s_; }
  const State& state() const { return y_; }
  const State& derivative() const { return k1_; }
  long steps() const { return accepted_ + rejected_; }

  void advance_to(double target) {
    const double span = std::abs(target - s_);
    if (span == 0.0) return;
    const double dir = target > s_ ? 1.0 : -1.0;
    const double h_floor = 1e-14 * std::max(std::abs(target), std::abs(s_)) + 1e-300;
    while ((target - s_) * dir > 0.0) {
      if (accepted_ + rejected_ > tol_.max_steps) throw NumericalError("integrator exceeded step budget");
      double h = std::min(std::abs(h_), std::abs(target - s_));
      bool last = h >= std::abs(target - s_) * (1.0 - 1e-12);
      if (last) h = std::abs(target - s_);
      if (h < h_floor && !last) throw NumericalError("step size underflow at s = " + std::to_string(s_));

      State y_new, err;
      State k7;
      step(dir * h, y_new, err, k7);
      const double e = error_norm(err, y_new);
      if (e <= 1.0) {
        s_ = last ? target : s_ + dir * h;
        y_ = y_new;
        k1_ = k7;
        ++accepted_;
        const double fac = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
        // A short final step to hit the target should not shrink the carried step.
        if (!last || fac > 1.0) h_ = dir * h * fac;
      } else {
        ++rejected_;
        h_ = dir * h * std::clamp(0.9 * std::pow(e, -0.2), 0.1, 0.9);
      }
    }
  }

 private:
  Rhs rhs_;
  double s_;
  State y_;
  State k1_{};
  double h_;
  Tolerances tol_;
  long accepted_ = 0;
  long rejected_ = 0;

  double error_norm(const State& err, const State& y_new) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = tol_.atol + tol_.rtol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
      const double r = err[i] / sc;
      sum += r * r;
    }
    return std::sqrt(sum / N);
  }

  void step(double h, State& y_new, State& err, State& k7) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const State& k1 = k1_;
    State t;
    for (std::size_t i = 0; i < N; ++i) t[i] = y_[i] + h * a21 * k1[i];
    const State k2 = rhs_(s_ + c2 * h, t);
    for (std::size_t i = 0; i < N; ++i) t[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const State k3 = rhs_(s_ + c3 * h, t);
    for (std::size_t i = 0; i < N; ++i) t[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const State k4 = rhs_(s_ + c4 * h, t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const State k5 = rhs_(s_ + c5 * h, t);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const State k6 = rhs_(s_ + h, t);
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = rhs_(s_ + h, y_new);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
};

}  // namespace geotrig::ode
