#include "kstw/shooting.hpp"

#include <cmath>

#include "kstw/errors.hpp"

namespace kstw {

std::string to_string(TrajectoryClass c) {
  switch (c) {
    case TrajectoryClass::EscapesBelow: return "EscapesBelow";
    case TrajectoryClass::EscapesAbove: return "EscapesAbove";
    case TrajectoryClass::EntersParabola: return "EntersParabola";
    case TrajectoryClass::ConvergesTo: return "ConvergesTo";
    case TrajectoryClass::Bounded: return "Bounded";
  }
  return "unknown";
}

std::string to_string(ThresholdMethod m) {
  switch (m) {
    case ThresholdMethod::ManifoldTrace: return "ManifoldTrace";
    case ThresholdMethod::Bisection: return "Bisection";
    case ThresholdMethod::Both: return "Both";
  }
  return "unknown";
}

Controls classify_controls() {
  Controls c;
  c.w_min = 0.0;
  return c;
}

Classification classify_trajectory(const ModelParams& p, double w0, double v0, const Controls& controls) {
  const Direction d = v0 < -p.v_star() ? Direction::Backward : Direction::Forward;
  const Trajectory tr = integrate(p, w0, v0, d, controls);
  Classification out;
  out.termination = tr.termination;
  switch (tr.termination.kind) {
    case TerminationKind::VBlowUpMinus:
      out.kind = TrajectoryClass::EscapesBelow;
      return out;
    case TerminationKind::VBlowUpPlus:
      out.kind = TrajectoryClass::EscapesAbove;
      return out;
    case TerminationKind::ConvergedToEquilibrium:
      out.kind = TrajectoryClass::ConvergesTo;
      out.equilibrium = equilibria(p)[*tr.termination.equilibrium_index];
      return out;
    case TerminationKind::Bounded:
      out.kind = TrajectoryClass::Bounded;
      return out;
    default:
      break;
  }
  if (tr.entered_parabola(p)) {
    out.kind = TrajectoryClass::EntersParabola;
    return out;
  }
  throw Inconclusive("classify_trajectory: run ended with " + to_string(tr.termination.kind) +
                     " and no class signature");
}

ManifoldTrace trace_manifold(const ModelParams& p, const Equilibrium& saddle, ManifoldKind kind,
                             double v_stop, Controls controls) {
  if (saddle.label != StabilityLabel::Saddle)
    throw ParameterError("trace_manifold: equilibrium is not a saddle");
  const Eigenstructure es = eigenstructure(p, saddle);
  const int idx = kind == ManifoldKind::Stable ? (es.values[0].real() < 0 ? 0 : 1)
                                               : (es.values[0].real() > 0 ? 0 : 1);
  Vec2 e = (*es.vectors)[idx];
  const double norm = std::hypot(e[0], e[1]);
  e = {e[0] / norm, e[1] / norm};
  const double toward = v_stop >= saddle.v ? 1.0 : -1.0;
  if (e[1] * toward < 0) e = {-e[0], -e[1]};

  controls.v_stop = v_stop;
  controls.stop_at_equilibrium = false;
  controls.w_min = 0.0;
  const Direction dir = kind == ManifoldKind::Stable ? Direction::Backward : Direction::Forward;
  const double h = 1e-7 * (1.0 + std::hypot(saddle.w, saddle.v));

  for (double sgn : {1.0, -1.0}) {
    const Vec2 seed{saddle.w + sgn * h * e[0], saddle.v + sgn * h * e[1]};
    if (!(seed[0] > 0)) continue;
    Trajectory tr;
    try {
      tr = integrate(p, seed[0], seed[1], dir, controls);
    } catch (const StepSizeUnderflow&) {
      continue;
    }
    if (tr.termination.kind != TerminationKind::ReachedTarget) continue;
    ManifoldTrace out;
    out.height = tr.termination.w;
    out.curve = std::move(tr);
    out.seed_offset = sgn * h;
    out.seed = seed;
    out.eigenvector = e;
    return out;
  }
  throw SeedEscaped("trace_manifold: neither seed orientation reaches v_stop");
}

ManifoldTrace trace_stable_manifold(const ModelParams& p, const Equilibrium& saddle, double v_stop,
                                    const Controls& controls) {
  return trace_manifold(p, saddle, ManifoldKind::Stable, v_stop, controls);
}

std::optional<std::pair<Equilibrium, ManifoldKind>> threshold_saddle(const ModelParams& p, double v0) {
  if (p.limiter().saturated() || p.sigma_is_critical()) return std::nullopt;
  const auto eqs = equilibria(p);
  const Regime r = regime(p);
  const Equilibrium* target = nullptr;
  ManifoldKind kind = ManifoldKind::Stable;
  if (v0 > p.v_star()) {
    for (const auto& e : eqs) {
      const bool is_third = e.w > 0;
      if (r == Regime::A ? is_third : (e.w == 0 && e.v == -p.v_star())) target = &e;
    }
  } else if (v0 < -p.v_star() && r == Regime::A) {
    for (const auto& e : eqs)
      if (e.w > 0) target = &e;
    kind = ManifoldKind::Unstable;
  }
  if (!target || target->label != StabilityLabel::Saddle) return std::nullopt;
  return std::make_pair(*target, kind);
}

ThresholdResult find_w0_star(const ModelParams& p, double v0,
                             std::optional<std::pair<double, double>> hint, const ShootingOptions& opt) {
  if (p.limiter().saturated())
    throw RegimeViolation("find_w0_star: threshold theory covers the linear limiter only");
  if (p.sigma_is_critical())
    throw DegenerateError("find_w0_star: sigma = sigma_star has no unique threshold");
  const bool upper = v0 > p.v_star();
  const bool lower = v0 < -p.v_star() && regime(p) == Regime::A;
  if (!upper && !lower)
    throw RegimeViolation("find_w0_star: need v0 > v* or (v0 < -v*, a < mu, sigma < sigma*)");

  const TrajectoryClass escape = upper ? TrajectoryClass::EscapesBelow : TrajectoryClass::EscapesAbove;
  auto escapes = [&](double w0) { return classify_trajectory(p, w0, v0, opt.controls).kind == escape; };

  double guess = std::max(1.0, p.lambda() + p.gamma() * v0 * v0);
  auto [lo, hi] = hint.value_or(std::make_pair(guess / 4, guess * 4));
  if (!(lo > 0) || !(hi > lo)) throw ParameterError("find_w0_star: bracket must satisfy 0 < lo < hi");
  int n = 0;
  while (!escapes(hi)) {
    if (++n > opt.max_expansions) throw NoDichotomy("find_w0_star: no escape found above the bracket");
    lo = hi;
    hi *= 4;
  }
  n = 0;
  while (escapes(lo)) {
    if (++n > opt.max_expansions) throw NoDichotomy("find_w0_star: every trial escapes");
    hi = lo;
    lo /= 4;
  }
  while (hi - lo > opt.rel_width * hi) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    if (escapes(mid)) hi = mid; else lo = mid;
  }

  ThresholdResult out;
  out.v0 = v0;
  out.bracket = {lo, hi};
  out.classifier_tol = opt.rel_width;
  out.bisection_estimate = std::sqrt(lo * hi);
  out.w0_star = out.bisection_estimate;
  out.method = ThresholdMethod::Bisection;
  if (opt.cross_check) {
    if (auto saddle = threshold_saddle(p, v0)) {
      Controls c = opt.controls;
      const double h = trace_manifold(p, saddle->first, saddle->second, v0, c).height;
      out.manifold_estimate = h;
      if (std::fabs(h - out.bisection_estimate) <= opt.agreement_tol * out.bisection_estimate)
        out.method = ThresholdMethod::Both;
    }
  }
  return out;
}

}  // namespace kstw
