#include "kstw/phase.hpp"

#include <algorithm>
#include <cmath>

#include "kstw/errors.hpp"

namespace kstw {

namespace {

constexpr int kBracketCells = 4096;

struct Spectrum {
  std::array<std::complex<double>, 2> values;
  std::optional<std::array<Vec2, 2>> vectors;
  bool degenerate = false;
};

Spectrum spectrum(const std::array<Vec2, 2>& J) {
  const double tr = J[0][0] + J[1][1];
  const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  const double half = 0.5 * tr;
  const double disc = half * half - det;
  Spectrum out;
  if (disc >= 0) {
    const double root = std::sqrt(disc);
    // avoid cancellation in the smaller root
    const double q = half + std::copysign(root, half == 0.0 ? 1.0 : half);
    double x1 = q;
    double x2 = q != 0.0 ? det / q : half - root;
    if (x1 > x2) std::swap(x1, x2);
    out.values = {std::complex<double>(x1), std::complex<double>(x2)};
    std::array<Vec2, 2> vecs{};
    const std::array<double, 2> xs{x1, x2};
    for (int i = 0; i < 2; ++i) {
      // second row: J10 e0 + J11 e1 = x e1, J10 = -1/gamma never vanishes
      vecs[i] = {(xs[i] - J[1][1]) / J[1][0], 1.0};
    }
    out.vectors = vecs;
  } else {
    const double im = std::sqrt(-disc);
    out.values = {std::complex<double>(half, -im), std::complex<double>(half, im)};
  }
  const double scale = std::max(std::abs(out.values[0]), std::abs(out.values[1]));
  for (const auto& x : out.values)
    if (std::fabs(x.real()) <= 1e-9 * scale || scale == 0.0) out.degenerate = true;
  return out;
}

StabilityLabel label_of(const Spectrum& s) {
  if (s.degenerate) return StabilityLabel::Degenerate;
  const double r0 = s.values[0].real(), r1 = s.values[1].real();
  if (s.values[0].imag() != 0.0)
    return r0 < 0 ? StabilityLabel::StableFocus : StabilityLabel::UnstableFocus;
  if (r0 < 0 && r1 < 0) return StabilityLabel::StableNode;
  if (r0 > 0 && r1 > 0) return StabilityLabel::UnstableNode;
  return StabilityLabel::Saddle;
}

Equilibrium make_equilibrium(const ModelParams& p, double w, double v, bool force_degenerate) {
  Equilibrium e;
  e.w = w;
  e.v = v;
  const Spectrum s = spectrum(jacobian(p, w, v));
  e.eigenvalues = s.values;
  e.eigenvectors = s.vectors;
  e.label = force_degenerate ? StabilityLabel::Degenerate : label_of(s);
  return e;
}

// Roots of g(av - sigma) - v on the open slope domain of a saturated limiter.
std::vector<double> saturated_vertical_roots(const ModelParams& p) {
  const Interval dom = p.slope_domain();
  auto h = [&](double v) { return p.g_of(v) - v; };
  const double width = dom.hi - dom.lo;
  std::vector<double> roots;
  // h -> -inf at the lower end and +inf at the upper end
  double left = dom.lo;
  double h_left = -1.0;
  for (int i = 1; i <= kBracketCells; ++i) {
    const double right = i == kBracketCells ? dom.hi : dom.lo + width * i / kBracketCells;
    const double h_right = i == kBracketCells ? 1.0 : h(right);
    if (h_right == 0.0) {
      roots.push_back(right);
    } else if ((h_left < 0) != (h_right < 0) && h_left != 0.0) {
      double lo = left, hi = right;
      const bool rising = h_left < 0;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double hm = h(mid);
        if (hm == 0.0) { lo = hi = mid; break; }
        if ((hm < 0) == rising) lo = mid; else hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    left = right;
    h_left = h_right;
  }
  return roots;
}

}  // namespace

ModelParams::ModelParams(double a, double sigma, double gamma, double lambda, FluxLimiter limiter)
    : a_(a), sigma_(sigma), gamma_(gamma), lambda_(lambda), limiter_(limiter) {
  if (!(a > 0) || !std::isfinite(a)) throw ParameterError("a must be > 0");
  if (!(sigma > 0) || !std::isfinite(sigma)) throw ParameterError("sigma must be > 0");
  if (!(gamma > 0) || !std::isfinite(gamma)) throw ParameterError("gamma must be > 0");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw ParameterError("lambda must be >= 0");
  limiter_.validate();
  v_star_ = std::sqrt(lambda / gamma);
  sigma_star_ = std::fabs(limiter_.mu - a) * v_star_;
  domain_ = kstw::slope_domain(limiter_, a, sigma);
}

bool ModelParams::sigma_is_critical() const {
  if (sigma_star_ == 0.0) return false;
  return std::fabs(sigma_ - sigma_star_) <= 1e-9 * sigma_star_;
}

std::string to_string(StabilityLabel label) {
  switch (label) {
    case StabilityLabel::StableNode: return "StableNode";
    case StabilityLabel::UnstableNode: return "UnstableNode";
    case StabilityLabel::Saddle: return "Saddle";
    case StabilityLabel::StableFocus: return "StableFocus";
    case StabilityLabel::UnstableFocus: return "UnstableFocus";
    case StabilityLabel::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::A: return "A";
    case Regime::B: return "B";
    case Regime::C: return "C";
    case Regime::D: return "D";
    case Regime::E: return "E";
    case Regime::Critical: return "critical";
  }
  return "unknown";
}

Regime regime(const ModelParams& p) {
  const double mu = p.limiter().mu;
  if (p.a() == mu) return Regime::C;
  if (p.sigma_is_critical()) return Regime::Critical;
  const bool below = p.sigma() < p.sigma_star();
  if (p.a() < mu) return below ? Regime::A : Regime::B;
  return below ? Regime::D : Regime::E;
}

Vec2 rhs(const ModelParams& p, double w, double v) {
  return {w * (p.g_of(v) - v), (p.lambda() - p.gamma() * v * v - w) / p.gamma()};
}

std::array<Vec2, 2> jacobian(const ModelParams& p, double w, double v) {
  const double y = p.a() * v - p.sigma();
  const double g = g_inverse(p.limiter(), y);
  const double gp = g_inverse_prime(p.limiter(), y);
  return {Vec2{g - v, w * (p.a() * gp - 1.0)}, Vec2{-1.0 / p.gamma(), -2.0 * v}};
}

Nullclines nullclines(const ModelParams& p, const std::vector<double>& v_grid) {
  Nullclines n;
  const Interval dom = p.slope_domain();
  for (double v : v_grid) {
    const double w = p.lambda() - p.gamma() * v * v;
    if (w >= 0 && dom.contains(v)) n.parabola.emplace_back(v, w);
  }
  const FluxLimiter& lim = p.limiter();
  if (!lim.saturated()) {
    if (p.a() != lim.mu) n.vertical_lines.push_back(p.sigma() / (p.a() - lim.mu));
  } else {
    n.vertical_lines = saturated_vertical_roots(p);
  }
  return n;
}

std::vector<Equilibrium> equilibria(const ModelParams& p) {
  std::vector<Equilibrium> out;
  const double vs = p.v_star();
  const Interval dom = p.slope_domain();
  const bool critical = p.sigma_is_critical();
  const double mu = p.limiter().mu;
  const bool lambda_zero = p.lambda() == 0.0;

  if (!p.limiter().saturated()) {
    // the point that merges with (w3, v3) at sigma = sigma_star
    const bool merge_plus = p.a() > mu;
    out.push_back(make_equilibrium(p, 0.0, vs, lambda_zero || (critical && merge_plus)));
    out.push_back(make_equilibrium(p, 0.0, -vs, lambda_zero || (critical && !merge_plus)));
    if (p.a() != mu) {
      const double v3 = p.sigma() / (p.a() - mu);
      const double w3 = p.lambda() - p.gamma() * v3 * v3;
      if (w3 > 0 && !critical) out.push_back(make_equilibrium(p, w3, v3, false));
    }
    return out;
  }

  if (dom.contains(vs)) out.push_back(make_equilibrium(p, 0.0, vs, lambda_zero));
  if (dom.contains(-vs) && !lambda_zero) out.push_back(make_equilibrium(p, 0.0, -vs, false));
  for (double v : saturated_vertical_roots(p)) {
    const double w = p.lambda() - p.gamma() * v * v;
    if (w > 0) out.push_back(make_equilibrium(p, w, v, false));
  }
  return out;
}

Eigenstructure eigenstructure(const ModelParams& p, const Equilibrium& e) {
  const Spectrum s = spectrum(jacobian(p, e.w, e.v));
  if (s.degenerate || e.label == StabilityLabel::Degenerate)
    throw DegenerateError("eigenstructure: zero eigenvalue at a degenerate equilibrium");
  return {s.values, s.vectors};
}

bool attracting(const Equilibrium& e, int direction) {
  if (e.label == StabilityLabel::Degenerate) return false;
  for (const auto& x : e.eigenvalues)
    if (!(direction * x.real() < 0)) return false;
  return true;
}

}  // namespace kstw
