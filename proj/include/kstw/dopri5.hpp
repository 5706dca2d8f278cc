#pragma once

// Dormand-Prince 5(4) with PI step control and the native 4th-order dense
// output (Hairer, Norsett & Wanner, "Solving ODEs I", routine DOPRI5).
// Time always increases; callers fold the direction into the right-hand side.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace kstw::detail {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State<N>, 5> r{};

  State<N> operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
    return y;
  }
  double t1() const { return t0 + h; }
};

struct StepperOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double safety = 0.9;
  double fac_min = 0.2;  // step ratio bounds per accepted step
  double fac_max = 10.0;
  double beta = 0.04;
  double invalid_shrink = 0.25;  // step reduction when a stage leaves the domain
};

struct StepRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rhs: bool(double t, const State<N>& y, State<N>& dydt); false means y is
// outside the domain and the step has to be retried with a smaller h.
template <std::size_t N>
class DormandPrince5 {
 public:
  using Rhs = std::function<bool(double, const State<N>&, State<N>&)>;

  DormandPrince5(Rhs rhs, StepperOptions opt) : rhs_(std::move(rhs)), opt_(opt) {}

  // Returns false if the initial point is outside the domain.
  bool reset(double t, const State<N>& y) {
    t_ = t;
    y_ = y;
    err_old_ = 1e-4;
    last_rejected_ = false;
    h_next_ = 0.0;
    return rhs_(t_, y_, k1_);
  }

  double t() const { return t_; }
  const State<N>& y() const { return y_; }
  const State<N>& dydt() const { return k1_; }
  const DenseSegment<N>& segment() const { return seg_; }
  double suggested_step() const { return h_next_; }

  // Starting step guess after Hairer's hinit, capped by h_cap.
  double initial_step(double h_cap) {
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt_.atol + opt_.rtol * std::fabs(y_[i]);
      d0 += (y_[i] / sc) * (y_[i] / sc);
      d1 += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, h_cap);
    State<N> y1, f1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + h0 * k1_[i];
    if (!rhs_(t_ + h0, y1, f1)) return h0 * 0.01;
    double d2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt_.atol + opt_.rtol * std::fabs(y_[i]);
      d2 += ((f1[i] - k1_[i]) / sc) * ((f1[i] - k1_[i]) / sc);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, h_cap});
  }

  // Advances by one accepted step of size <= h_cap. Throws StepRejected if the
  // step size falls below h_min.
  void step(double h_cap, double h_min) {
    double h = h_next_ > 0 ? std::min(h_next_, h_cap) : initial_step(h_cap);
    const double expo = 0.2 - opt_.beta * 0.75;
    for (;;) {
      if (!(h >= h_min)) throw StepRejected("step size underflow");
      State<N> y_new;
      double err = 0.0;
      if (!attempt(h, y_new, err)) {
        h *= opt_.invalid_shrink;
        last_rejected_ = true;
        continue;
      }
      const double fac11 = std::pow(err, expo);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(err_old_, opt_.beta);
        fac = std::clamp(fac / opt_.safety, 1.0 / opt_.fac_max, 1.0 / opt_.fac_min);
        double h_new = h / fac;
        if (last_rejected_) h_new = std::min(h_new, h);
        err_old_ = std::max(err, 1e-4);
        last_rejected_ = false;
        build_dense(h, y_new);
        t_ += h;
        y_ = y_new;
        k1_ = k7_;
        h_next_ = h_new;
        return;
      }
      h /= std::min(1.0 / opt_.fac_min, fac11 / opt_.safety);
      last_rejected_ = true;
    }
  }

 private:
  bool attempt(double h, State<N>& y_new, double& err) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    State<N> yt;
    auto stage = [&](double c, auto&& combine, State<N>& k) {
      for (std::size_t i = 0; i < N; ++i) yt[i] = y_[i] + h * combine(i);
      return rhs_(t_ + c * h, yt, k);
    };
    if (!stage(c2, [&](std::size_t i) { return a21 * k1_[i]; }, k2_)) return false;
    if (!stage(c3, [&](std::size_t i) { return a31 * k1_[i] + a32 * k2_[i]; }, k3_)) return false;
    if (!stage(c4, [&](std::size_t i) { return a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]; }, k4_))
      return false;
    if (!stage(c5, [&](std::size_t i) {
          return a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i];
        }, k5_))
      return false;
    if (!stage(1.0, [&](std::size_t i) {
          return a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i];
        }, k6_))
      return false;
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] +
                              a76 * k6_[i]);
    if (!rhs_(t_ + h, y_new, k7_)) return false;
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                            e6 * k6_[i] + e7 * k7_[i]);
      const double sc = opt_.atol + opt_.rtol * std::max(std::fabs(y_[i]), std::fabs(y_new[i]));
      acc += (e / sc) * (e / sc);
    }
    err = std::sqrt(acc / N);
    return std::isfinite(err);
  }

  void build_dense(double h, const State<N>& y_new) {
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    seg_.t0 = t_;
    seg_.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y_new[i] - y_[i];
      const double bspl = h * k1_[i] - ydiff;
      seg_.r[0][i] = y_[i];
      seg_.r[1][i] = ydiff;
      seg_.r[2][i] = bspl;
      seg_.r[3][i] = ydiff - h * k7_[i] - bspl;
      seg_.r[4][i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] +
                          d7 * k7_[i]);
    }
  }

  Rhs rhs_;
  StepperOptions opt_;
  double t_ = 0.0;
  State<N> y_{}, k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{}, k7_{};
  double err_old_ = 1e-4;
  double h_next_ = 0.0;
  bool last_rejected_ = false;
  DenseSegment<N> seg_{};
};

}  // namespace kstw::detail
