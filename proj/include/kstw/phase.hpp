#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kstw/flux.hpp"

namespace kstw {

using Vec2 = std::array<double, 2>;

// Parameters of the reduced traveling-wave system. Every derived quantity is
// computed here once.
class ModelParams {
 public:
  ModelParams(double a, double sigma, double gamma, double lambda,
              FluxLimiter limiter = FluxLimiter::linear());

  double a() const { return a_; }
  double sigma() const { return sigma_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  const FluxLimiter& limiter() const { return limiter_; }

  // sqrt(lambda/gamma)
  double v_star() const { return v_star_; }
  // |mu - a| v_star; reduces to |1 - a| v_star for mu = 1.
  double sigma_star() const { return sigma_star_; }
  Interval slope_domain() const { return domain_; }

  // g(a v - sigma); throws DomainError outside the slope domain.
  double g_of(double v) const { return g_inverse(limiter_, a_ * v - sigma_); }
  bool sigma_is_critical() const;

 private:
  double a_, sigma_, gamma_, lambda_;
  FluxLimiter limiter_;
  double v_star_, sigma_star_;
  Interval domain_;
};

enum class StabilityLabel { StableNode, UnstableNode, Saddle, StableFocus, UnstableFocus, Degenerate };
std::string to_string(StabilityLabel label);

struct Equilibrium {
  double w = 0.0;
  double v = 0.0;
  std::array<std::complex<double>, 2> eigenvalues{};
  std::optional<std::array<Vec2, 2>> eigenvectors;  // present for real eigenvalues
  StabilityLabel label = StabilityLabel::Degenerate;
};

struct Eigenstructure {
  std::array<std::complex<double>, 2> values{};
  std::optional<std::array<Vec2, 2>> vectors;
};

// Linear-case regimes: A (a<mu, sigma<sigma*), B (a<mu, sigma>sigma*),
// C (a=mu), D (a>mu, sigma<sigma*), E (a>mu, sigma>sigma*).
enum class Regime { A, B, C, D, E, Critical };
std::string to_string(Regime r);
Regime regime(const ModelParams& p);

// (w', v') = (w (g(av - sigma) - v), (lambda - gamma v^2 - w)/gamma)
Vec2 rhs(const ModelParams& p, double w, double v);
std::array<Vec2, 2> jacobian(const ModelParams& p, double w, double v);

struct Nullclines {
  std::vector<std::pair<double, double>> parabola;  // (v, w), w = lambda - gamma v^2 >= 0, v in the slope domain
  std::vector<double> vertical_lines;                // v with g(av - sigma) = v
};
Nullclines nullclines(const ModelParams& p, const std::vector<double>& v_grid);

std::vector<Equilibrium> equilibria(const ModelParams& p);

// Throws DegenerateError when an eigenvalue vanishes.
Eigenstructure eigenstructure(const ModelParams& p, const Equilibrium& e);

// Attractor test in a given time direction (+1 forward, -1 backward).
bool attracting(const Equilibrium& e, int direction);

}  // namespace kstw
