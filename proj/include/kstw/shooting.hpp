#pragma once

#include <optional>
#include <string>
#include <utility>

#include "kstw/integrate.hpp"
#include "kstw/phase.hpp"

namespace kstw {

enum class TrajectoryClass { EscapesBelow, EscapesAbove, EntersParabola, ConvergesTo, Bounded };
std::string to_string(TrajectoryClass c);

struct Classification {
  TrajectoryClass kind = TrajectoryClass::Bounded;
  std::optional<Equilibrium> equilibrium;  // for ConvergesTo
  TerminationEvent termination;
};

// Integration controls used for classification: WVanished disabled so orbits
// that hug the w = 0 axis near a saddle still reach their real fate.
Controls classify_controls();

// Forward run for v0 >= -v*, backward run for v0 < -v*. Throws Inconclusive
// when the run ends without a recognizable signature.
Classification classify_trajectory(const ModelParams& p, double w0, double v0,
                                   const Controls& controls = classify_controls());

enum class ManifoldKind { Stable, Unstable };

struct ManifoldTrace {
  Trajectory curve;
  double height = 0.0;  // w where v = v_stop
  double seed_offset = 0.0;
  Vec2 seed{};
  Vec2 eigenvector{};
};

// Seeds at saddle + h e (h = 1e-7 (1 + |saddle|), e the eigenvector of the
// requested kind, oriented toward v_stop) and integrates until v = v_stop:
// backward in time for the stable manifold, forward for the unstable one.
// The opposite seed sign is tried before SeedEscaped is thrown.
ManifoldTrace trace_manifold(const ModelParams& p, const Equilibrium& saddle, ManifoldKind kind,
                             double v_stop, Controls controls = {});
ManifoldTrace trace_stable_manifold(const ModelParams& p, const Equilibrium& saddle, double v_stop,
                                    const Controls& controls = {});

enum class ThresholdMethod { ManifoldTrace, Bisection, Both };
std::string to_string(ThresholdMethod m);

struct ThresholdResult {
  double v0 = 0.0;
  double w0_star = 0.0;
  ThresholdMethod method = ThresholdMethod::Bisection;
  std::pair<double, double> bracket{};
  double classifier_tol = 1e-10;
  double bisection_estimate = 0.0;
  std::optional<double> manifold_estimate;
};

struct ShootingOptions {
  double rel_width = 1e-10;
  int max_expansions = 12;
  double agreement_tol = 1e-6;
  bool cross_check = true;
  Controls controls = classify_controls();
};

// The saddle whose invariant manifold separates the two classes at v0, and
// whether that manifold is the stable (v0 > v*) or unstable (v0 < -v*) one.
std::optional<std::pair<Equilibrium, ManifoldKind>> threshold_saddle(const ModelParams& p, double v0);

// Throws DegenerateError at sigma = sigma*, RegimeViolation outside the
// covered regimes, NoDichotomy if the bracket cannot be made to straddle.
ThresholdResult find_w0_star(const ModelParams& p, double v0,
                             std::optional<std::pair<double, double>> bracket_hint = std::nullopt,
                             const ShootingOptions& options = {});

}  // namespace kstw
