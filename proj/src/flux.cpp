#include "kstw/flux.hpp"

#include <cmath>
#include <limits>

#include "kstw/errors.hpp"

namespace kstw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - t^p for t = 1 - gap/c, accurate when gap is tiny.
double one_minus_pow(double gap_over_c, double p) {
  return -std::expm1(p * std::log1p(-gap_over_c));
}

void check_domain(const FluxLimiter& lim, double y) {
  if (!(std::fabs(y) < lim.c))
    throw DomainError("g_inverse: |y| >= c (flux boundary reached)");
}

}  // namespace

FluxLimiter FluxLimiter::linear(double mu) { return {LimiterKind::Linear, mu, 1.0, 2.0}; }

FluxLimiter FluxLimiter::relativistic(double mu, double c) {
  return {LimiterKind::Relativistic, mu, c, 2.0};
}

FluxLimiter FluxLimiter::larson(double mu, double c, double p) {
  return {LimiterKind::Larson, mu, c, p};
}

void FluxLimiter::validate() const {
  if (!(mu > 0) || !std::isfinite(mu)) throw ParameterError("limiter: mu must be > 0");
  if (saturated() && (!(c > 0) || !std::isfinite(c)))
    throw ParameterError("limiter: c must be > 0");
  if (kind == LimiterKind::Larson && (!(p > 1) || !std::isfinite(p)))
    throw ParameterError("limiter: Larson exponent p must be > 1");
}

std::string to_string(LimiterKind kind) {
  switch (kind) {
    case LimiterKind::Linear: return "linear";
    case LimiterKind::Relativistic: return "relativistic";
    case LimiterKind::Larson: return "larson";
  }
  return "unknown";
}

LimiterKind limiter_kind_from_string(const std::string& name) {
  if (name == "linear") return LimiterKind::Linear;
  if (name == "relativistic") return LimiterKind::Relativistic;
  if (name == "larson") return LimiterKind::Larson;
  throw ParameterError("unknown limiter kind '" + name + "'");
}

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

double phi(const FluxLimiter& lim, double s) {
  switch (lim.kind) {
    case LimiterKind::Linear:
      return lim.mu * s;
    case LimiterKind::Relativistic: {
      const double t = lim.mu * s / lim.c;
      return lim.c * t / std::hypot(1.0, t);
    }
    case LimiterKind::Larson: {
      const double t = lim.mu * std::fabs(s) / lim.c;
      double mag;
      if (t <= 1.0)
        mag = lim.c * t / std::pow(1.0 + std::pow(t, lim.p), 1.0 / lim.p);
      else
        mag = lim.c / std::pow(1.0 + std::pow(t, -lim.p), 1.0 / lim.p);
      return std::copysign(mag, s);
    }
  }
  return 0.0;
}

double phi_prime(const FluxLimiter& lim, double s) {
  switch (lim.kind) {
    case LimiterKind::Linear:
      return lim.mu;
    case LimiterKind::Relativistic: {
      const double t = lim.mu * s / lim.c;
      const double q = 1.0 + t * t;
      return lim.mu / (q * std::sqrt(q));
    }
    case LimiterKind::Larson: {
      // Phi' = mu (1 + t^p)^(-1-1/p)
      const double t = lim.mu * std::fabs(s) / lim.c;
      if (t <= 1.0) return lim.mu * std::pow(1.0 + std::pow(t, lim.p), -1.0 - 1.0 / lim.p);
      const double tp = std::pow(t, -lim.p);
      return lim.mu * std::pow(tp, 1.0 + 1.0 / lim.p) * std::pow(1.0 + tp, -1.0 - 1.0 / lim.p);
    }
  }
  return 0.0;
}

double g_inverse(const FluxLimiter& lim, double y) {
  switch (lim.kind) {
    case LimiterKind::Linear:
      return y / lim.mu;
    case LimiterKind::Relativistic:
      check_domain(lim, y);
      return lim.c * y / (lim.mu * std::sqrt((lim.c - y) * (lim.c + y)));
    case LimiterKind::Larson: {
      check_domain(lim, y);
      const double ay = std::fabs(y);
      const double d = one_minus_pow((lim.c - ay) / lim.c, lim.p);
      return std::copysign(ay / (lim.mu * std::pow(d, 1.0 / lim.p)), y);
    }
  }
  return 0.0;
}

double g_inverse_prime(const FluxLimiter& lim, double y) {
  switch (lim.kind) {
    case LimiterKind::Linear:
      return 1.0 / lim.mu;
    case LimiterKind::Relativistic: {
      check_domain(lim, y);
      const double q = (lim.c - y) * (lim.c + y);
      return lim.c * lim.c * lim.c / (lim.mu * q * std::sqrt(q));
    }
    case LimiterKind::Larson: {
      check_domain(lim, y);
      const double d = one_minus_pow((lim.c - std::fabs(y)) / lim.c, lim.p);
      return std::pow(d, -1.0 - 1.0 / lim.p) / lim.mu;
    }
  }
  return 0.0;
}

double g_near_saturation(const FluxLimiter& lim, double gap, int side) {
  if (!lim.saturated()) throw ParameterError("g_near_saturation needs a saturated limiter");
  if (!(gap > 0)) throw DomainError("g_near_saturation: gap must be > 0");
  const double y = lim.c - gap;
  double mag;
  if (lim.kind == LimiterKind::Relativistic)
    mag = lim.c * y / (lim.mu * std::sqrt(gap * (2.0 * lim.c - gap)));
  else
    mag = y / (lim.mu * std::pow(one_minus_pow(gap / lim.c, lim.p), 1.0 / lim.p));
  return side >= 0 ? mag : -mag;
}

Interval slope_domain(const FluxLimiter& lim, double a, double sigma) {
  if (!lim.saturated()) return {-kInf, kInf};
  return {(sigma - lim.c) / a, (sigma + lim.c) / a};
}

}  // namespace kstw
