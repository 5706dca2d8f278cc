// Orbit-as-graph integration W(v) and the recovery of s along it.
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "kstw/errors.hpp"
#include "kstw/integrate.hpp"

namespace kstw {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace

SlopeChart::SlopeChart(const ModelParams& p)
    : lim_(p.limiter()), a_(p.a()), sigma_(p.sigma()), saturated_(p.limiter().saturated()) {
  switch (lim_.kind) {
    case LimiterKind::Linear:
      lo_ = -std::numeric_limits<double>::infinity();
      hi_ = std::numeric_limits<double>::infinity();
      break;
    case LimiterKind::Relativistic:
      lo_ = -kHalfPi;
      hi_ = kHalfPi;
      break;
    case LimiterKind::Larson:
      m_ = 2.0 * lim_.p / (lim_.p - 1.0);
      lo_ = -1.0;
      hi_ = 1.0;
      break;
  }
}

double SlopeChart::v_of(double x) const {
  switch (lim_.kind) {
    case LimiterKind::Linear:
      return x;
    case LimiterKind::Relativistic:
      return (lim_.c * std::sin(x) + sigma_) / a_;
    case LimiterKind::Larson: {
      const double r = 1.0 - std::fabs(x);
      const double y = std::copysign(lim_.c * (1.0 - std::pow(r, m_)), x);
      return (y + sigma_) / a_;
    }
  }
  return x;
}

double SlopeChart::x_of(double v) const {
  if (!saturated_) return v;
  const double y = a_ * v - sigma_;
  const double gap = std::max(0.0, lim_.c - std::fabs(y));
  if (lim_.kind == LimiterKind::Relativistic) {
    if (std::fabs(y) < 0.5 * lim_.c) return std::asin(y / lim_.c);
    return std::copysign(kHalfPi - 2.0 * std::asin(std::sqrt(gap / (2.0 * lim_.c))), y);
  }
  return std::copysign(1.0 - std::pow(gap / lim_.c, 1.0 / m_), y);
}

double SlopeChart::dv_dx(double x) const {
  switch (lim_.kind) {
    case LimiterKind::Linear:
      return 1.0;
    case LimiterKind::Relativistic:
      return lim_.c * std::cos(x) / a_;
    case LimiterKind::Larson:
      return lim_.c * m_ * std::pow(1.0 - std::fabs(x), m_ - 1.0) / a_;
  }
  return 1.0;
}

double SlopeChart::g_dv(double x) const {
  switch (lim_.kind) {
    case LimiterKind::Linear:
      return g_inverse(lim_, a_ * x - sigma_);
    case LimiterKind::Relativistic:
      return lim_.c * lim_.c * std::sin(x) / (lim_.mu * a_);
    case LimiterKind::Larson: {
      const double r = 1.0 - std::fabs(x);
      if (r <= 0.0) return 0.0;
      const double p = lim_.p;
      const double rm = std::pow(r, m_);
      const double y = std::copysign(lim_.c * (1.0 - rm), x);
      // D^(1/p) with D = 1 - (1 - r^m)^p ~ p r^m for small r
      const double droot = rm > 1e-200 ? std::pow(-std::expm1(p * std::log1p(-rm)), 1.0 / p)
                                       : std::exp((std::log(p) + m_ * std::log(r)) / p);
      return y * (lim_.c * m_ * std::pow(r, m_ - 1.0) / a_) / (lim_.mu * droot);
    }
  }
  return 0.0;
}

double SlopeChart::x_at_gap(double gap, int side) const {
  if (!saturated_) throw ParameterError("x_at_gap needs a saturated limiter");
  const double sgn = side >= 0 ? 1.0 : -1.0;
  if (lim_.kind == LimiterKind::Relativistic)
    return sgn * (kHalfPi - 2.0 * std::asin(std::sqrt(gap / (2.0 * lim_.c))));
  return sgn * (1.0 - std::pow(gap / lim_.c, 1.0 / m_));
}

double SampledGraph::W_at_x(double x) const {
  if (samples.empty()) throw ParameterError("W_at_x on an empty graph");
  if (samples.size() == 1) return samples.front().W;
  const double span = samples.back().x - samples.front().x;
  if (x < samples.front().x - 1e-12 * span || x > samples.back().x + 1e-12 * span)
    throw ParameterError("W_at_x: x outside the sampled graph");
  x = std::clamp(x, samples.front().x, samples.back().x);
  auto it = std::upper_bound(samples.begin(), samples.end(), x,
                             [](double xv, const GraphSample& g) { return xv < g.x; });
  if (it == samples.end()) return samples.back().W;
  if (it == samples.begin()) return samples.front().W;
  const GraphSample& r = *it;
  const GraphSample& l = *(it - 1);
  const double h = r.x - l.x;
  const double t = (x - l.x) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * l.W + (t3 - 2 * t2 + t) * h * l.dW_dx +
         (-2 * t3 + 3 * t2) * r.W + (t3 - t2) * h * r.dW_dx;
}

SampledGraph integrate_graph_W(const ModelParams& p, double v_anchor, double W_anchor,
                               double v_target, const GraphControls& ctl) {
  const Interval dom = p.slope_domain();
  if (!dom.contains(v_anchor)) throw DomainError("integrate_graph_W: anchor outside the slope domain");
  if (!(v_target >= dom.lo && v_target <= dom.hi))
    throw DomainError("integrate_graph_W: target outside the closed slope domain");
  if (!(W_anchor > 0) || !std::isfinite(W_anchor))
    throw DomainError("integrate_graph_W: W_anchor must be > 0");

  SampledGraph graph{SlopeChart(p), {}, false};
  const SlopeChart& chart = graph.chart;
  const double lambda = p.lambda(), gamma = p.gamma();
  const bool recip = ctl.reciprocal.value_or(p.limiter().saturated() && W_anchor > lambda);
  graph.used_reciprocal = recip;

  const double den0 = lambda - W_anchor - gamma * v_anchor * v_anchor;
  if (std::fabs(den0) < ctl.denom_eps)
    throw DenominatorVanished("integrate_graph_W: anchor on the parabola");
  const int side = sign_of(den0);

  double x_a = chart.x_of(v_anchor);
  double x_t = v_target == dom.lo ? chart.lo() : (v_target == dom.hi ? chart.hi() : chart.x_of(v_target));
  const double total = std::fabs(x_t - x_a);
  const int dir = x_t >= x_a ? 1 : -1;

  auto W_of = [&](double z) { return recip ? 1.0 / z : z; };
  // returns d(state)/dx; false when the stage leaves the admissible side
  auto slope = [&](double x, double z, double& dz) {
    if (!(z > 0) || !std::isfinite(z)) return false;
    const double v = chart.v_of(x);
    const double F = chart.g_dv(x) - v * chart.dv_dx(x);
    if (recip) {
      const double den_y = 1.0 + z * (gamma * v * v - lambda);
      if (sign_of(-den_y) != side) return false;
      dz = gamma * z * z * F / den_y;
    } else {
      const double den = lambda - z - gamma * v * v;
      if (sign_of(den) != side) return false;
      dz = gamma * z * F / den;
    }
    return std::isfinite(dz);
  };
  auto f = [&](double tau, const detail::State<1>& y, detail::State<1>& dy) {
    double dz;
    if (!slope(x_a + dir * tau, y[0], dz)) return false;
    dy[0] = dir * dz;
    return true;
  };
  auto record = [&](double x, double z) {
    double dz = 0.0;
    slope(x, z, dz);
    const double W = W_of(z);
    const double dW = recip ? -W * W * dz : dz;
    graph.samples.push_back({x, chart.v_of(x), W, dW});
  };

  const double z0 = recip ? 1.0 / W_anchor : W_anchor;
  record(x_a, z0);
  if (total == 0.0) return graph;

  detail::StepperOptions opt;
  opt.rtol = ctl.rtol;
  opt.atol = ctl.atol;
  detail::DormandPrince5<1> stepper(f, opt);
  if (!stepper.reset(0.0, {z0})) throw DenominatorVanished("integrate_graph_W: singular anchor");

  while (stepper.t() < total) {
    const double remaining = total - stepper.t();
    try {
      stepper.step(std::min(ctl.max_step, remaining), 1e-15 * std::max(1.0, total));
    } catch (const detail::StepRejected&) {
      throw DenominatorVanished("integrate_graph_W: orbit stalled against the parabola");
    }
    if (total - stepper.t() <= 1e-14 * total) {
      // land exactly on the target so chart endpoints are hit
      record(x_t, stepper.y()[0]);
    } else {
      record(x_a + dir * stepper.t(), stepper.y()[0]);
    }
    const GraphSample& g = graph.samples.back();
    const double den = lambda - g.W - gamma * g.v * g.v;
    if (std::fabs(den) < ctl.denom_eps)
      throw DenominatorVanished("integrate_graph_W: orbit reached the parabola");
    if (total - stepper.t() <= 1e-14 * total) break;
  }
  if (dir < 0) std::reverse(graph.samples.begin(), graph.samples.end());
  return graph;
}

std::vector<ArcSample> reconstruct_s_from_v(const ModelParams& p, const SampledGraph& graph,
                                            double v_start, double v_end, double s_start) {
  const SlopeChart& chart = graph.chart;
  const Interval dom = p.slope_domain();
  auto to_x = [&](double v) {
    if (v == dom.lo) return chart.lo();
    if (v == dom.hi) return chart.hi();
    return chart.x_of(v);
  };
  const double x_s = to_x(v_start), x_e = to_x(v_end);
  const double lambda = p.lambda(), gamma = p.gamma();

  std::vector<double> nodes{x_s};
  for (const auto& g : graph.samples)
    if ((g.x > std::min(x_s, x_e)) && (g.x < std::max(x_s, x_e))) nodes.push_back(g.x);
  nodes.push_back(x_e);
  if (x_e < x_s) std::sort(nodes.begin() + 1, nodes.end() - 1, std::greater<>());

  int ref_sign = 0;
  auto den_at = [&](double x) {
    const double v = chart.v_of(x);
    const double den = lambda - gamma * v * v - graph.W_at_x(x);
    const int sg = sign_of(den);
    if (ref_sign == 0) ref_sign = sg;
    if (sg != ref_sign) throw SignChange("reconstruct_s_from_v: v' changes sign along the graph");
    return den;
  };
  auto ds_dx = [&](double x) { return gamma * chart.dv_dx(x) / den_at(x); };
  auto dI_dx = [&](double x) { return chart.v_of(x) * ds_dx(x); };

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  std::vector<ArcSample> out;
  double s = s_start, I = 0.0;
  den_at(0.5 * (nodes[0] + nodes[1]));
  out.push_back({s, chart.v_of(x_s), graph.W_at_x(x_s), I});
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double x0 = nodes[i - 1], x1 = nodes[i];
    if (x1 == x0) continue;
    s += GK::integrate(ds_dx, x0, x1, 8, 1e-14);
    I += GK::integrate(dI_dx, x0, x1, 8, 1e-14);
    den_at(x1);
    out.push_back({s, chart.v_of(x1), graph.W_at_x(x1), I});
  }
  out.front().v = v_start;
  out.back().v = v_end;
  return out;
}

}  // namespace kstw
