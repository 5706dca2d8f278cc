#include "kstw/profiles.hpp"

#include <algorithm>
#include <cmath>

#include "kstw/errors.hpp"
#include "kstw/shooting.hpp"

namespace kstw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kVanish = 1e-3;
constexpr double kGrowth = 1e3;
constexpr double kSlopeEps = 0.1;
constexpr std::size_t kMinFitSamples = 20;

void fill_extents(WaveProfile& prof) {
  prof.u_max = 0.0;
  prof.S_max = 0.0;
  for (const auto& x : prof.samples) {
    prof.u_max = std::max(prof.u_max, x.u);
    prof.S_max = std::max(prof.S_max, x.S);
  }
  const std::size_t n = prof.samples.size();
  auto take = [&](bool left, bool finite) {
    EndValues e{0.0, 0.0};
    const std::size_t m = finite ? std::max<std::size_t>(1, n / 100) : 1;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& x = left ? prof.samples[i] : prof.samples[n - 1 - i];
      e.u = std::max(e.u, x.u);
      e.S = std::max(e.S, x.S);
    }
    return e;
  };
  prof.at_s_minus = take(true, std::isfinite(prof.s_minus));
  prof.at_s_plus = take(false, std::isfinite(prof.s_plus));
}

// Cuts one side of the orbit where it passes closest to `target`; that end is
// then an asymptotic approach and is reported infinite.
Trajectory cut_at_closest_approach(Trajectory tr, const Equilibrium& target, double s0, bool forward_side) {
  auto dist = [&](const TrajectorySample& x) { return std::hypot(x.w - target.w, x.v - target.v); };
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const auto& x = tr.samples[i];
    if (forward_side ? x.s < s0 : x.s > s0) continue;
    const double d = dist(x);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  TerminationEvent ev;
  ev.kind = TerminationKind::ConvergedToEquilibrium;
  ev.s = tr.samples[best].s;
  ev.w = tr.samples[best].w;
  ev.v = tr.samples[best].v;
  if (forward_side) {
    tr.samples.resize(best + 1);
    tr.s_plus = kInf;
    tr.termination = ev;
  } else {
    tr.samples.erase(tr.samples.begin(), tr.samples.begin() + best);
    tr.s_minus = -kInf;
    tr.backward_termination = ev;
  }
  return tr;
}

ProfileType measured_type(const WaveProfile& prof, bool for_u) {
  auto f = [&](const ProfileSample& x) { return for_u ? x.u : x.S; };
  const double fmax = for_u ? prof.u_max : prof.S_max;
  const double f0 = for_u ? prof.anchors.u0 : prof.anchors.S0;
  const double end_minus = for_u ? prof.at_s_minus.u : prof.at_s_minus.S;
  const double end_plus = for_u ? prof.at_s_plus.u : prof.at_s_plus.S;
  const bool left_finite = std::isfinite(prof.s_minus);
  const bool right_finite = std::isfinite(prof.s_plus);
  const bool vanish_left = left_finite && end_minus <= kVanish * fmax;
  const bool grow_left = !left_finite && f(prof.samples.front()) >= kGrowth * f0;
  const bool vanish_right = right_finite && end_plus <= kVanish * fmax;
  const bool tail_vanish = !right_finite && f(prof.samples.back()) <= kVanish * fmax;
  const bool tail_grow = !right_finite && f(prof.samples.back()) >= kGrowth * f0;
  if (vanish_left && vanish_right) return ProfileType::A1;
  if (vanish_left && tail_vanish) return ProfileType::A2;
  if (vanish_left && tail_grow) return ProfileType::A3;
  if (grow_left && vanish_right) return ProfileType::A4;
  return ProfileType::Unclassified;
}

SlopeKind categorize(double rho, bool left) {
  if (rho < 1 - kSlopeEps) return left ? SlopeKind::PlusInfinity : SlopeKind::MinusInfinity;
  if (rho <= 1 + kSlopeEps) return left ? SlopeKind::FinitePositive : SlopeKind::FiniteNegative;
  return SlopeKind::Zero;
}

}  // namespace

std::string to_string(ProfileType t) {
  switch (t) {
    case ProfileType::A1: return "A1";
    case ProfileType::A2: return "A2";
    case ProfileType::A3: return "A3";
    case ProfileType::A4: return "A4";
    case ProfileType::SaturatedFrontConcave: return "SaturatedFrontConcave";
    case ProfileType::SaturatedFrontConvex: return "SaturatedFrontConvex";
    case ProfileType::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

std::string to_string(SlopeKind k) {
  switch (k) {
    case SlopeKind::PlusInfinity: return "+inf";
    case SlopeKind::MinusInfinity: return "-inf";
    case SlopeKind::FinitePositive: return "finite-positive";
    case SlopeKind::FiniteNegative: return "finite-negative";
    case SlopeKind::Zero: return "zero";
    case SlopeKind::Unknown: return "unknown";
  }
  return "unknown";
}

std::string to_string(FrontBranch b) { return b == FrontBranch::Above ? "above" : "below"; }

WaveProfile reconstruct(const ModelParams& p, const Trajectory& traj, double s0, double S0,
                        std::optional<double> u0) {
  (void)p;
  if (!(S0 > 0) || !std::isfinite(S0)) throw ParameterError("reconstruct: S0 must be > 0");
  const auto st0 = traj.state_at(s0);
  const double w_s0 = st0[0];
  if (u0 && std::fabs(*u0 / S0 - w_s0) > 1e-9 * w_s0)
    throw AnchorMismatch("reconstruct: u0/S0 differs from w(s0)");
  WaveProfile prof;
  prof.anchors = {s0, S0, w_s0 * S0, st0[1]};
  prof.samples.reserve(traj.samples.size());
  for (const auto& x : traj.samples) {
    const double S = S0 * std::exp(x.I - st0[2]);
    prof.samples.push_back({x.s, x.w * S, S});
    prof.w.push_back(x.w);
    prof.v.push_back(x.v);
  }
  prof.s_minus = std::isnan(traj.s_minus) ? traj.samples.front().s : traj.s_minus;
  prof.s_plus = std::isnan(traj.s_plus) ? traj.samples.back().s : traj.s_plus;
  prof.orbit = traj;
  fill_extents(prof);
  return prof;
}

double S_at(const WaveProfile& profile, double s) {
  if (!profile.orbit) throw ParameterError("S_at: profile has no orbit");
  const double I0 = profile.orbit->state_at(profile.anchors.s0)[2];
  return profile.anchors.S0 * std::exp(profile.orbit->state_at(s)[2] - I0);
}

ProfileOptions default_profile_options() {
  ProfileOptions o;
  o.controls.v_max = 1e10;
  o.controls.w_min = 0.0;
  o.controls.stop_at_equilibrium = false;
  o.controls.s_max = 100.0;
  return o;
}

WaveProfile linear_profile(const ModelParams& p, double w0, double v0, double s0, double S0,
                           const ProfileOptions& opt) {
  if (p.limiter().saturated()) throw ParameterError("linear_profile: use saturated_front for saturated limiters");
  Trajectory tr = integrate(p, w0, v0, Direction::Both, opt.controls, s0);
  if (opt.w0_star && std::fabs(w0 / *opt.w0_star - 1) <= 1e-9) {
    if (auto saddle = threshold_saddle(p, v0))
      tr = cut_at_closest_approach(std::move(tr), saddle->first, s0, v0 > 0);
  }
  WaveProfile prof = reconstruct(p, tr, s0, S0, w0 * S0);
  prof.anchors.v0 = v0;
  if (opt.w0_star) {
    const ProfileLabels labels = classify_profile(prof, p, *opt.w0_star);
    prof.u_type = labels.u_type;
    prof.S_type = labels.S_type;
  }
  if (std::isfinite(prof.s_minus) && std::isfinite(prof.s_plus)) {
    try {
      prof.endpoint_slopes = endpoint_slopes(prof, p);
    } catch (const InsufficientResolution&) {
    }
  }
  return prof;
}

ProfileLabels classify_profile(const WaveProfile& prof, const ModelParams& p, double w0_star) {
  ProfileLabels out;
  const double ratio = prof.anchors.u0 / prof.anchors.S0;
  const double rel = ratio / w0_star - 1;
  const int side = std::fabs(rel) <= 1e-9 ? 0 : (rel > 0 ? 1 : -1);
  const double v0 = prof.anchors.v0;
  const double av = p.a() * p.v_star();
  using T = ProfileType;
  if (!p.limiter().saturated() && v0 > p.v_star()) {
    if (side > 0) {
      out.prescribed_u = out.prescribed_S = T::A1;
    } else if (side == 0) {
      out.prescribed_u = out.prescribed_S = T::A2;
    } else if (av < p.sigma()) {
      out.prescribed_u = T::A2;
      out.prescribed_S = T::A3;
    } else if (av > p.sigma()) {
      out.prescribed_u = out.prescribed_S = T::A3;
    }
  } else if (!p.limiter().saturated() && v0 < -p.v_star() && regime(p) == Regime::A) {
    out.prescribed_u = out.prescribed_S = side > 0 ? T::A1 : T::A4;
  }
  out.measured_u = measured_type(prof, true);
  out.measured_S = measured_type(prof, false);
  out.u_type = out.measured_u == out.prescribed_u ? out.prescribed_u : T::Unclassified;
  out.S_type = out.measured_S == out.prescribed_S ? out.prescribed_S : T::Unclassified;
  return out;
}

EndpointSlopes endpoint_slopes(const WaveProfile& prof, const ModelParams& p) {
  if (p.limiter().saturated()) throw ParameterError("endpoint_slopes: linear limiter only");
  if (!std::isfinite(prof.s_minus) || !std::isfinite(prof.s_plus))
    throw ParameterError("endpoint_slopes: profile support is not compact");
  EndpointSlopes out;
  const auto& smp = prof.samples;
  const std::size_t n = smp.size();
  for (bool left : {true, false}) {
    const double edge = left ? prof.s_minus : prof.s_plus;
    const std::size_t ext = left ? 0 : n - 1;
    const double d_min = std::fabs(smp[ext].s - edge);
    if (!(d_min > 0)) throw InsufficientResolution("endpoint_slopes: sample sits on the endpoint");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& x = smp[left ? k : n - 1 - k];
      const double d = std::fabs(x.s - edge);
      if (d > 10 * d_min) break;
      const double lx = std::log(d), ly = std::log(x.u);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    if (m < kMinFitSamples)
      throw InsufficientResolution("endpoint_slopes: fewer than 20 samples in the last decade");
    const double rho = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double u_prime = (left ? 1.0 : -1.0) * smp[ext].u / d_min;
    const double S_prime = prof.v[ext] * smp[ext].S;
    if (left) {
      out.rho_minus = rho;
      out.u_prime_at_s_minus = categorize(rho, true);
      out.u_prime_minus = u_prime;
      out.S_prime_at_s_minus = S_prime;
    } else {
      out.rho_plus = rho;
      out.u_prime_at_s_plus = categorize(rho, false);
      out.u_prime_plus = u_prime;
      out.S_prime_at_s_plus = S_prime;
    }
  }
  return out;
}

double flux_relation_residual(const WaveProfile& prof, const ModelParams& p) {
  const double mu = p.limiter().mu;
  const double a = p.a() / mu, sigma = p.sigma() / mu;
  const auto& an = prof.anchors;
  double worst = 0.0;
  for (const auto& x : prof.samples) {
    const double lr = std::log(x.u / an.u0) - a * std::log(x.S / an.S0) + sigma * (x.s - an.s0);
    worst = std::max(worst, std::fabs(std::expm1(lr)));
  }
  return worst;
}

double elliptic_residual(const WaveProfile& prof, const ModelParams& p, int n, double h) {
  if (!prof.orbit) throw ParameterError("elliptic_residual: profile has no orbit");
  const double lo = prof.samples.front().s, hi = prof.samples.back().s;
  const double len = hi - lo;
  const double a = lo + 0.1 * len, b = hi - 0.1 * len;
  h = std::min(h, 0.05 * len);
  const double I0 = prof.orbit->state_at(prof.anchors.s0)[2];
  auto S = [&](double s) { return prof.anchors.S0 * std::exp(prof.orbit->state_at(s)[2] - I0); };
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = a + (b - a) * i / std::max(1, n - 1);
    const double d2 = (-S(s + 2 * h) + 16 * S(s + h) - 30 * S(s) + 16 * S(s - h) - S(s - 2 * h)) / (12 * h * h);
    const auto st = prof.orbit->state_at(s);
    const double Ss = S(s), u = st[0] * Ss;
    worst = std::max(worst, std::fabs(p.gamma() * d2 - p.lambda() * Ss + u));
    scale = std::max(scale, std::fabs(p.gamma() * d2) + p.lambda() * Ss + u);
  }
  return scale > 0 ? worst / scale : 0.0;
}

SaturatedFront saturated_front(const ModelParams& p, double v0, double w0, FrontBranch branch, double s0,
                               double S0, const FrontOptions& opt) {
  if (!p.limiter().saturated()) throw ParameterError("saturated_front: needs a saturated limiter");
  const Interval dom = p.slope_domain();
  if (!dom.contains(v0)) throw DomainError("saturated_front: v0 outside the slope domain");
  if (!(w0 > 0) || !(S0 > 0)) throw ParameterError("saturated_front: w0 and S0 must be > 0");
  const double lambda = p.lambda(), gamma = p.gamma();
  if (branch == FrontBranch::Above) {
    if (!(w0 > lambda)) throw RegimeViolation("saturated_front: above branch needs W > lambda");
  } else {
    if (!(-p.v_star() < dom.lo && dom.hi < p.v_star()))
      throw RegimeViolation("saturated_front: closed slope domain not inside (-v*, v*)");
    if (!(w0 < lambda - gamma * v0 * v0))
      throw RegimeViolation("saturated_front: below branch needs w0 under the parabola");
  }

  GraphControls gc = opt.graph;
  gc.reciprocal = branch == FrontBranch::Above;
  SampledGraph up, down;
  try {
    up = integrate_graph_W(p, v0, w0, dom.hi, gc);
    down = integrate_graph_W(p, v0, w0, dom.lo, gc);
  } catch (const DenominatorVanished& e) {
    throw RegimeViolation(std::string("saturated_front: ") + e.what());
  }
  SaturatedFront front;
  front.branch = branch;
  front.graph = down;
  front.graph.samples.insert(front.graph.samples.end(), up.samples.begin() + 1, up.samples.end());
  for (const auto& g : front.graph.samples) {
    const bool ok = branch == FrontBranch::Above ? g.W > lambda : g.W < lambda - gamma * g.v * g.v;
    if (!ok) throw RegimeViolation("saturated_front: graph leaves the branch region");
  }

  std::vector<ArcSample> to_hi, to_lo;
  try {
    to_hi = reconstruct_s_from_v(p, front.graph, v0, dom.hi, s0);
    to_lo = reconstruct_s_from_v(p, front.graph, v0, dom.lo, s0);
  } catch (const SignChange& e) {
    throw RegimeViolation(std::string("saturated_front: ") + e.what());
  }
  // above: v decreases in s, so the upper flux level is s_minus
  std::vector<ArcSample>& left = branch == FrontBranch::Above ? to_hi : to_lo;
  std::vector<ArcSample>& right = branch == FrontBranch::Above ? to_lo : to_hi;
  front.arc.assign(left.rbegin(), left.rend());
  front.arc.insert(front.arc.end(), right.begin() + 1, right.end());
  for (std::size_t i = 1; i < front.arc.size(); ++i)
    if (!(front.arc[i].s > front.arc[i - 1].s)) throw RegimeViolation("saturated_front: s is not monotone");

  WaveProfile& prof = front.profile;
  prof.anchors = {s0, S0, w0 * S0, v0};
  for (const auto& x : front.arc) {
    const double S = S0 * std::exp(x.I);
    prof.samples.push_back({x.s, x.w * S, S});
    prof.w.push_back(x.w);
    prof.v.push_back(x.v);
  }
  prof.s_minus = front.arc.front().s;
  prof.s_plus = front.arc.back().s;
  prof.u_type = prof.S_type =
      branch == FrontBranch::Above ? ProfileType::SaturatedFrontConcave : ProfileType::SaturatedFrontConvex;
  fill_extents(prof);
  prof.at_s_minus = {prof.samples.front().u, prof.samples.front().S};
  prof.at_s_plus = {prof.samples.back().u, prof.samples.back().S};

  const double k = p.v_star();
  auto cont = [&](const ProfileSample& x, double v) {
    Continuation c;
    c.edge = x.s;
    c.k = k;
    if (k > 0) {
      c.A = 0.5 * x.S * (1 + v / k);
      c.B = 0.5 * x.S * (1 - v / k);
    } else {
      c.A = x.S;
      c.B = x.S * v;
    }
    return c;
  };
  prof.continuation = std::make_pair(cont(prof.samples.front(), front.arc.front().v),
                                     cont(prof.samples.back(), front.arc.back().v));

  auto vprime = [&](const ArcSample& x) { return (lambda - gamma * x.v * x.v - x.w) / gamma; };
  front.w_at_s_minus = front.arc.front().w;
  front.w_at_s_plus = front.arc.back().w;
  front.v_prime_at_s_minus = vprime(front.arc.front());
  front.v_prime_at_s_plus = vprime(front.arc.back());
  return front;
}

double front_w_prime(const SaturatedFront& front, const ModelParams& p, int side, double gap) {
  const FluxLimiter& lim = p.limiter();
  const int sgn = side >= 0 ? 1 : -1;
  const double x = front.graph.chart.x_at_gap(gap, sgn);
  const double W = front.graph.W_at_x(x);
  const double v = (sgn * (lim.c - gap) + p.sigma()) / p.a();
  return W * (g_near_saturation(lim, gap, sgn) - v);
}

}  // namespace kstw
