#include "kstw/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kstw/errors.hpp"

namespace kstw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using State3 = detail::State<3>;

// Bisection for the first root of phi along one dense step, phi(t0) < 0 <= phi(t1).
double locate(const detail::DenseSegment<3>& seg, const std::function<double(const State3&)>& phi) {
  double lo = seg.t0, hi = seg.t1();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (phi(seg(mid)) < 0) lo = mid; else hi = mid;
  }
  return hi;
}

struct BoxStats {
  double max_abs_v = 0.0;
  double max_w = 0.0;
  double min_w = kInf;
  void add(double w, double v) {
    max_abs_v = std::max(max_abs_v, std::fabs(v));
    max_w = std::max(max_w, w);
    min_w = std::min(min_w, w);
  }
};

}  // namespace

std::string to_string(Direction d) {
  switch (d) {
    case Direction::Forward: return "forward";
    case Direction::Backward: return "backward";
    case Direction::Both: return "both";
  }
  return "unknown";
}

std::string to_string(TerminationKind k) {
  switch (k) {
    case TerminationKind::VBlowUpPlus: return "VBlowUpPlus";
    case TerminationKind::VBlowUpMinus: return "VBlowUpMinus";
    case TerminationKind::ConvergedToEquilibrium: return "ConvergedToEquilibrium";
    case TerminationKind::FluxBoundaryLow: return "FluxBoundaryLow";
    case TerminationKind::FluxBoundaryHigh: return "FluxBoundaryHigh";
    case TerminationKind::WVanished: return "WVanished";
    case TerminationKind::MaxSpan: return "MaxSpan";
    case TerminationKind::Bounded: return "Bounded";
    case TerminationKind::ReachedTarget: return "ReachedTarget";
    case TerminationKind::EnteredParabola: return "EnteredParabola";
  }
  return "unknown";
}

double DenseRecord::s_lo() const {
  const double a = s_origin + dir * seg.t0, b = s_origin + dir * seg.t1();
  return std::min(a, b);
}

double DenseRecord::s_hi() const {
  const double a = s_origin + dir * seg.t0, b = s_origin + dir * seg.t1();
  return std::max(a, b);
}

std::array<double, 3> Trajectory::state_at(double s) const {
  if (samples.empty()) throw ParameterError("state_at on an empty trajectory");
  if (s < samples.front().s || s > samples.back().s)
    throw ParameterError("state_at: s outside the sampled range");
  auto it = std::lower_bound(dense.begin(), dense.end(), s,
                             [](const DenseRecord& r, double x) { return r.s_hi() < x; });
  if (it == dense.end()) {
    const auto& b = samples.back();
    return {b.w, b.v, b.I};
  }
  const double tau = it->dir * (s - it->s_origin);
  const State3 y = it->seg(tau);
  return {std::exp(y[0]), y[1], y[2]};
}

bool Trajectory::entered_parabola(const ModelParams& p) const {
  for (const auto& x : samples)
    if (x.w < p.lambda() - p.gamma() * x.v * x.v) return true;
  return false;
}

Trajectory integrate(const ModelParams& p, double w0, double v0, Direction direction,
                     const Controls& ctl, double s0) {
  if (direction == Direction::Both) {
    return join(integrate(p, w0, v0, Direction::Backward, ctl, s0),
                integrate(p, w0, v0, Direction::Forward, ctl, s0));
  }
  if (!(w0 > 0) || !std::isfinite(w0)) throw DomainError("integrate: w0 must be > 0");
  if (!std::isfinite(v0) || !p.slope_domain().contains(v0))
    throw DomainError("integrate: v0 outside the slope domain");

  const int dir = direction == Direction::Forward ? 1 : -1;
  const FluxLimiter& lim = p.limiter();
  const double boundary_eps = ctl.boundary_eps_rel * lim.c;
  const double lambda = p.lambda(), gamma = p.gamma(), a = p.a(), sigma = p.sigma();

  const std::vector<Equilibrium> eqs = equilibria(p);
  std::vector<std::size_t> attractors;
  for (std::size_t i = 0; i < eqs.size(); ++i)
    if (attracting(eqs[i], dir)) attractors.push_back(i);

  auto f = [&](double, const State3& y, State3& dy) {
    const double v = y[1];
    const double arg = a * v - sigma;
    if (!std::isfinite(y[0]) || !std::isfinite(v)) return false;
    if (lim.saturated() && !(std::fabs(arg) < lim.c)) return false;
    const double w = std::exp(y[0]);
    dy[0] = dir * (g_inverse(lim, arg) - v);
    dy[1] = dir * (lambda - gamma * v * v - w) / gamma;
    dy[2] = dir * v;
    return std::isfinite(dy[0]) && std::isfinite(dy[1]);
  };

  detail::StepperOptions opt;
  opt.rtol = ctl.rtol;
  opt.atol = ctl.atol;
  detail::DormandPrince5<3> stepper(f, opt);
  if (!stepper.reset(0.0, {std::log(w0), v0, 0.0}))
    throw DomainError("integrate: initial point outside the domain");

  Trajectory tr;
  tr.direction = direction;
  tr.samples.push_back({s0, w0, v0, 0.0});

  BoxStats late;
  bool dwelling = false;
  std::size_t dwell_index = 0;
  double dwell_start = 0.0;
  const double box_v = 10.0 * std::max({1.0, p.v_star(), std::fabs(v0)});
  const double box_w = 10.0 * std::max({1.0, lambda, w0});

  auto finish = [&](TerminationKind kind, double end) {
    const auto& last = tr.samples.back();
    tr.termination.kind = kind;
    tr.termination.s = last.s;
    tr.termination.w = last.w;
    tr.termination.v = last.v;
    if (dir > 0) tr.s_plus = end; else tr.s_minus = end;
  };
  auto push = [&](double tau, const State3& y) {
    tr.samples.push_back({s0 + dir * tau, std::exp(y[0]), y[1], y[2]});
  };

  for (std::size_t n = 0;; ++n) {
    if (n >= ctl.max_steps) {
      const auto& b = tr.samples.back();
      throw StepSizeUnderflow("integrate: step budget exhausted", b.s, b.w, b.v);
    }
    const double tau = stepper.t();
    const State3 y_old = stepper.y();
    const double remaining = ctl.s_max - tau;
    const double cap = std::min({ctl.max_step, ctl.blowup_resolution / std::max(1.0, std::fabs(y_old[1])),
                                 remaining});
    try {
      stepper.step(cap, 1e-14 * std::max(1.0, tau));
    } catch (const detail::StepRejected&) {
      const auto& b = tr.samples.back();
      throw StepSizeUnderflow("integrate: step size underflow", b.s, b.w, b.v);
    }
    const auto& seg = stepper.segment();
    tr.dense.push_back({seg, s0, dir});
    const State3& y = stepper.y();
    const double t_new = stepper.t();
    const double w = std::exp(y[0]), v = y[1];

    if (std::fabs(v) >= ctl.v_max) {
      const double tc = locate(seg, [&](const State3& z) { return std::fabs(z[1]) - ctl.v_max; });
      const State3 yc = seg(tc);
      push(tc, yc);
      const double sc = s0 + dir * tc;
      finish(yc[1] > 0 ? TerminationKind::VBlowUpPlus : TerminationKind::VBlowUpMinus,
             sc - 1.0 / yc[1]);
      break;
    }
    if (ctl.v_stop) {
      const double target = *ctl.v_stop;
      const double before = y_old[1] - target, after = v - target;
      if (after == 0.0 || (before < 0) != (after < 0)) {
        const double sgn = before < 0 ? 1.0 : -1.0;
        const double tc = locate(seg, [&](const State3& z) { return sgn * (z[1] - target); });
        State3 yc = seg(tc);
        yc[1] = target;
        push(tc, yc);
        finish(TerminationKind::ReachedTarget, std::numeric_limits<double>::quiet_NaN());
        break;
      }
    }
    if (ctl.stop_on_parabola_entry) {
      auto gap = [&](const State3& z) { return lambda - gamma * z[1] * z[1] - std::exp(z[0]); };
      if (gap(y_old) < 0 && gap(y) >= 0) {
        const double tc = locate(seg, gap);
        push(tc, seg(tc));
        finish(TerminationKind::EnteredParabola, std::numeric_limits<double>::quiet_NaN());
        break;
      }
    }
    push(t_new, y);

    if (lim.saturated()) {
      const double arg = a * v - sigma;
      if (lim.c - std::fabs(arg) <= boundary_eps) {
        finish(arg > 0 ? TerminationKind::FluxBoundaryHigh : TerminationKind::FluxBoundaryLow,
               tr.samples.back().s);
        break;
      }
    }

    bool near_zero_eq = false;
    bool in_ball = false;
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      const double d = std::hypot(w - eqs[i].w, v - eqs[i].v);
      if (eqs[i].w == 0.0 && d < 1e-6) near_zero_eq = true;
      if (d < ctl.eq_tol &&
          std::find(attractors.begin(), attractors.end(), i) != attractors.end()) {
        in_ball = true;
        if (!dwelling || dwell_index != i) {
          dwelling = true;
          dwell_index = i;
          dwell_start = t_new;
        }
      }
    }
    if (!in_ball) dwelling = false;
    if (ctl.stop_at_equilibrium && dwelling && t_new - dwell_start >= ctl.dwell) {
      finish(TerminationKind::ConvergedToEquilibrium, dir * kInf);
      tr.termination.equilibrium_index = dwell_index;
      break;
    }
    if (ctl.w_min > 0 && w < ctl.w_min && !near_zero_eq) {
      finish(TerminationKind::WVanished, dir * kInf);
      break;
    }

    if (t_new >= 0.5 * ctl.s_max) late.add(w, v);
    if (t_new >= ctl.s_max * (1.0 - 1e-15)) {
      const bool bounded = late.max_abs_v <= box_v && late.max_w <= box_w && late.min_w >= 1e-8;
      finish(bounded ? TerminationKind::Bounded : TerminationKind::MaxSpan, dir * kInf);
      break;
    }
  }

  if (dir < 0) {
    std::reverse(tr.samples.begin(), tr.samples.end());
    std::reverse(tr.dense.begin(), tr.dense.end());
  }
  return tr;
}

Trajectory join(const Trajectory& backward, const Trajectory& forward) {
  if (backward.samples.empty() || forward.samples.empty())
    throw ParameterError("join: empty trajectory");
  const auto& b = backward.samples.back();
  const auto& f = forward.samples.front();
  if (b.s != f.s || b.w != f.w || b.v != f.v)
    throw ParameterError("join: runs do not share their initial point");
  Trajectory out;
  out.direction = Direction::Both;
  out.samples = backward.samples;
  out.samples.insert(out.samples.end(), forward.samples.begin() + 1, forward.samples.end());
  out.dense = backward.dense;
  out.dense.insert(out.dense.end(), forward.dense.begin(), forward.dense.end());
  out.termination = forward.termination;
  out.backward_termination = backward.termination;
  out.s_minus = backward.s_minus;
  out.s_plus = forward.s_plus;
  return out;
}

}  // namespace kstw
