#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kstw/dopri5.hpp"
#include "kstw/phase.hpp"

namespace kstw {

enum class Direction { Forward, Backward, Both };
std::string to_string(Direction d);

enum class TerminationKind {
  VBlowUpPlus,
  VBlowUpMinus,
  ConvergedToEquilibrium,
  FluxBoundaryLow,
  FluxBoundaryHigh,
  WVanished,
  MaxSpan,
  Bounded,
  ReachedTarget,    // controls.v_stop crossed
  EnteredParabola,  // controls.stop_on_parabola_entry
};
std::string to_string(TerminationKind k);

struct TerminationEvent {
  TerminationKind kind = TerminationKind::MaxSpan;
  std::optional<std::size_t> equilibrium_index;  // into equilibria(p)
  double s = 0.0;  // where the event was recorded
  double w = 0.0;
  double v = 0.0;
};

struct Controls {
  double rtol = 1e-10;
  double atol = 1e-12;
  double v_max = 1e6;
  double w_min = 1e-12;  // 0 disables WVanished
  double eq_tol = 1e-9;
  double dwell = 5.0;
  double boundary_eps_rel = 1e-9;  // times c
  double s_max = 1e3;
  double max_step = 0.05;
  double blowup_resolution = 0.05;  // step <= blowup_resolution / |v|
  bool stop_at_equilibrium = true;
  bool stop_on_parabola_entry = false;
  std::optional<double> v_stop;
  std::size_t max_steps = 5'000'000;
};

struct TrajectorySample {
  double s, w, v, I;
};

// One accepted step of the augmented state (ln w, v, I) in the integration
// variable tau, with s = s_origin + dir * tau.
struct DenseRecord {
  detail::DenseSegment<3> seg;
  double s_origin = 0.0;
  int dir = 1;
  double s_lo() const;
  double s_hi() const;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // ascending s
  Direction direction = Direction::Forward;
  TerminationEvent termination;                        // end reached in `direction`
  std::optional<TerminationEvent> backward_termination;  // joined orbits only
  double s_minus = std::numeric_limits<double>::quiet_NaN();
  double s_plus = std::numeric_limits<double>::quiet_NaN();
  std::vector<DenseRecord> dense;  // ascending s

  // (w, v, I) at any s covered by the samples, from the dense output.
  std::array<double, 3> state_at(double s) const;
  bool entered_parabola(const ModelParams& p) const;
};

// Integrates from (w0, v0) at s0 until the first event. Throws
// StepSizeUnderflow if the controller cannot proceed.
Trajectory integrate(const ModelParams& p, double w0, double v0, Direction direction,
                     const Controls& controls = {}, double s0 = 0.0);

// Glues a backward and a forward run that share their initial point.
Trajectory join(const Trajectory& backward, const Trajectory& forward);

// Chart coordinate x on the slope domain that keeps the graph equations
// regular up to the flux boundary. Linear: x = v. Relativistic:
// a v - sigma = c sin x. Larson: a v - sigma = c sgn(x) (1 - (1 - |x|)^m)
// with m = 2p/(p - 1).
class SlopeChart {
 public:
  SlopeChart() = default;
  explicit SlopeChart(const ModelParams& p);
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double v_of(double x) const;
  double x_of(double v) const;
  double dv_dx(double x) const;
  // g(a v(x) - sigma) * dv/dx; finite on the closed chart interval.
  double g_dv(double x) const;
  // Chart coordinate where c - |a v - sigma| = gap on the given side.
  double x_at_gap(double gap, int side) const;
  bool closed() const { return saturated_; }

 private:
  FluxLimiter lim_;
  double a_ = 1.0, sigma_ = 0.0;
  bool saturated_ = false;
  double m_ = 1.0;
  double lo_ = 0.0, hi_ = 0.0;
};

struct GraphSample {
  double x, v, W, dW_dx;
};

struct SampledGraph {
  SlopeChart chart;
  std::vector<GraphSample> samples;  // ascending x
  bool used_reciprocal = false;      // integrated in Y = 1/W

  double W_at_x(double x) const;  // cubic Hermite
  double W_at(double v) const { return W_at_x(chart.x_of(v)); }
  double v_min() const { return samples.front().v; }
  double v_max() const { return samples.back().v; }
};

struct GraphControls {
  double rtol = 1e-12;
  double atol = 1e-14;
  double max_step = 0.005;  // in chart units
  double denom_eps = 1e-10;
  std::optional<bool> reciprocal;  // default: Y when saturated and W_anchor > lambda
};

// W(v) along an orbit, from v_anchor to v_target. v_target may be a flux
// boundary of a saturated limiter. Throws DenominatorVanished when the orbit
// meets the parabola w = lambda - gamma v^2.
SampledGraph integrate_graph_W(const ModelParams& p, double v_anchor, double W_anchor,
                               double v_target, const GraphControls& controls = {});

struct ArcSample {
  double s, v, w, I;
};

// s(v) = s_start + int dv / v'(v) along the graph, with I = int v ds.
// Samples are returned in the order v_start -> v_end. Throws SignChange if
// v' changes sign on the way.
std::vector<ArcSample> reconstruct_s_from_v(const ModelParams& p, const SampledGraph& graph,
                                            double v_start, double v_end, double s_start);

}  // namespace kstw
