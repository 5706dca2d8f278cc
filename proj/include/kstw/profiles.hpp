#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kstw/integrate.hpp"
#include "kstw/phase.hpp"

namespace kstw {

enum class ProfileType { A1, A2, A3, A4, SaturatedFrontConcave, SaturatedFrontConvex, Unclassified };
std::string to_string(ProfileType t);

enum class SlopeKind { PlusInfinity, MinusInfinity, FinitePositive, FiniteNegative, Zero, Unknown };
std::string to_string(SlopeKind k);

struct EndpointSlopes {
  SlopeKind u_prime_at_s_minus = SlopeKind::Unknown;
  SlopeKind u_prime_at_s_plus = SlopeKind::Unknown;
  double rho_minus = std::numeric_limits<double>::quiet_NaN();  // u ~ dist^rho
  double rho_plus = std::numeric_limits<double>::quiet_NaN();
  double u_prime_minus = std::numeric_limits<double>::quiet_NaN();  // u/dist at the last sample
  double u_prime_plus = std::numeric_limits<double>::quiet_NaN();
  double S_prime_at_s_minus = std::numeric_limits<double>::quiet_NaN();  // v S at the last sample
  double S_prime_at_s_plus = std::numeric_limits<double>::quiet_NaN();
};

struct Anchors {
  double s0 = 0.0;
  double S0 = 1.0;
  double u0 = 0.0;
  double v0 = 0.0;
};

struct ProfileSample {
  double s, u, S;
};

// S(s) = A exp(k (s - edge)) + B exp(-k (s - edge)) beyond a support edge,
// matching S and S' there (linear in s when k = 0).
struct Continuation {
  double edge = 0.0;
  double k = 0.0;
  double A = 0.0;
  double B = 0.0;
};

struct EndValues {
  double u = std::numeric_limits<double>::quiet_NaN();
  double S = std::numeric_limits<double>::quiet_NaN();
};

struct WaveProfile {
  std::vector<ProfileSample> samples;  // ascending s
  std::vector<double> w, v;            // orbit values at the samples
  double s_minus = -std::numeric_limits<double>::infinity();
  double s_plus = std::numeric_limits<double>::infinity();
  ProfileType u_type = ProfileType::Unclassified;
  ProfileType S_type = ProfileType::Unclassified;
  EndpointSlopes endpoint_slopes;
  Anchors anchors;
  double u_max = 0.0;
  double S_max = 0.0;
  // max over the outermost 1% of samples at finite ends, last sample otherwise
  EndValues at_s_minus, at_s_plus;
  std::optional<std::pair<Continuation, Continuation>> continuation;
  std::optional<Trajectory> orbit;  // linear profiles keep their dense orbit
};

// u = w S, S = S0 exp(I(s) - I(s0)). Throws AnchorMismatch when u0/S0 is not
// w(s0) to 1e-9.
WaveProfile reconstruct(const ModelParams& p, const Trajectory& traj, double s0, double S0,
                        std::optional<double> u0 = std::nullopt);

// S at any s on the support of a profile that carries its orbit.
double S_at(const WaveProfile& profile, double s);

struct ProfileOptions {
  Controls controls;
  std::optional<double> w0_star;  // enables threshold truncation and labels
};
// v_max 1e10 so that finite ends are resolved to u/max ~ 1e-5, WVanished
// off, no stop at equilibria, tails truncated at span 100.
ProfileOptions default_profile_options();

// Integrates both directions from (w0, v0) at s0 and reconstructs. With
// w0 == w0_star the run is cut at its closest approach to the threshold
// saddle and the corresponding end is reported infinite.
WaveProfile linear_profile(const ModelParams& p, double w0, double v0, double s0, double S0,
                           const ProfileOptions& options = default_profile_options());

struct ProfileLabels {
  ProfileType prescribed_u = ProfileType::Unclassified;
  ProfileType prescribed_S = ProfileType::Unclassified;
  ProfileType measured_u = ProfileType::Unclassified;
  ProfileType measured_S = ProfileType::Unclassified;
  ProfileType u_type = ProfileType::Unclassified;  // prescribed if measured agrees
  ProfileType S_type = ProfileType::Unclassified;
};

ProfileLabels classify_profile(const WaveProfile& profile, const ModelParams& p, double w0_star);

// Log-log fit of u against the distance to each finite end over the last
// decade of samples. Throws InsufficientResolution with < 20 samples there.
EndpointSlopes endpoint_slopes(const WaveProfile& profile, const ModelParams& p);

// max |u S0^a' e^{sigma'(s - s0)} / (u0 S^a') - 1| with a' = a/mu, sigma' = sigma/mu
double flux_relation_residual(const WaveProfile& profile, const ModelParams& p);

// max |gamma S'' - lambda S + u| / scale over n interior points, S'' by
// 5-point centered differences of the dense S(s).
double elliptic_residual(const WaveProfile& profile, const ModelParams& p, int n = 200,
                         double h = 5e-3);

enum class FrontBranch { Above, Below };
std::string to_string(FrontBranch b);

struct FrontOptions {
  GraphControls graph;
};

struct SaturatedFront {
  WaveProfile profile;
  FrontBranch branch = FrontBranch::Above;
  SampledGraph graph;  // both halves, ascending chart coordinate
  std::vector<ArcSample> arc;  // ascending s
  double w_at_s_minus = 0.0, w_at_s_plus = 0.0;
  double v_prime_at_s_minus = 0.0, v_prime_at_s_plus = 0.0;
};

// Compactly supported front of a saturated limiter. Above: W > lambda on the
// whole slope domain, v decreasing. Below: requires the closed slope domain
// inside (-v*, v*) and W < lambda - gamma v^2, v increasing. Throws
// RegimeViolation when the branch conditions fail.
SaturatedFront saturated_front(const ModelParams& p, double v0, double w0, FrontBranch branch,
                               double s0, double S0, const FrontOptions& options = {});

// w' = W (g - v) at distance gap from the flux level on the given side
// (+1: a v - sigma -> c, -1: a v - sigma -> -c).
double front_w_prime(const SaturatedFront& front, const ModelParams& p, int side, double gap);

}  // namespace kstw
