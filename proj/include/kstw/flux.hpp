#pragma once

#include <string>

namespace kstw {

enum class LimiterKind { Linear, Relativistic, Larson };

// Diffusion nonlinearity Phi. Linear: Phi(s) = mu*s. Relativistic:
// mu*s/sqrt(1 + (mu/c)^2 s^2). Larson: mu*s/(1 + (mu|s|/c)^p)^(1/p).
struct FluxLimiter {
  LimiterKind kind = LimiterKind::Linear;
  double mu = 1.0;
  double c = 1.0;  // ignored for Linear
  double p = 2.0;  // Larson exponent only

  static FluxLimiter linear(double mu = 1.0);
  static FluxLimiter relativistic(double mu, double c);
  static FluxLimiter larson(double mu, double c, double p);

  bool saturated() const { return kind != LimiterKind::Linear; }
  // Throws ParameterError when mu, c or p are out of range.
  void validate() const;
};

std::string to_string(LimiterKind kind);
LimiterKind limiter_kind_from_string(const std::string& name);

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return lo < x && x < hi; }
  bool bounded() const;
};

double phi(const FluxLimiter& lim, double s);
double phi_prime(const FluxLimiter& lim, double s);

// Inverse of phi. Throws DomainError for |y| >= c on saturated limiters.
double g_inverse(const FluxLimiter& lim, double y);
// Derivative of the inverse, 1/Phi'(g(y)).
double g_inverse_prime(const FluxLimiter& lim, double y);

// g(side*(c - gap)) for 0 < gap <= c, without forming c - gap. side = +1 or -1.
double g_near_saturation(const FluxLimiter& lim, double gap, int side);

// Open v-interval on which g(a*v - sigma) is defined.
Interval slope_domain(const FluxLimiter& lim, double a, double sigma);

}  // namespace kstw
