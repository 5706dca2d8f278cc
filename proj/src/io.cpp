#include "kstw/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "kstw/errors.hpp"

namespace kstw::io {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double x = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end)
    throw ParameterError("not a number: '" + std::string(text) + "'");
  return x;
}

namespace {

std::vector<std::vector<double>> read_csv(std::istream& is, std::string_view header, std::size_t cols) {
  std::string line;
  if (!std::getline(is, line) || line != header)
    throw ParameterError("csv: expected header '" + std::string(header) + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      row.push_back(parse_double(std::string_view(line).substr(pos, comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (row.size() != cols) throw ParameterError("csv: wrong number of fields");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& samples) {
  os << "s,w,v,I\n";
  for (const auto& x : samples)
    os << format_double(x.s) << ',' << format_double(x.w) << ',' << format_double(x.v) << ','
       << format_double(x.I) << '\n';
}

std::vector<TrajectorySample> read_trajectory_csv(std::istream& is) {
  std::vector<TrajectorySample> out;
  for (const auto& r : read_csv(is, "s,w,v,I", 4)) out.push_back({r[0], r[1], r[2], r[3]});
  return out;
}

void write_profile_csv(std::ostream& os, const std::vector<ProfileSample>& samples) {
  os << "s,u,S\n";
  for (const auto& x : samples)
    os << format_double(x.s) << ',' << format_double(x.u) << ',' << format_double(x.S) << '\n';
}

std::vector<ProfileSample> read_profile_csv(std::istream& is) {
  std::vector<ProfileSample> out;
  for (const auto& r : read_csv(is, "s,u,S", 3)) out.push_back({r[0], r[1], r[2]});
  return out;
}

json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) return parse_double(j.get<std::string>());
  if (!j.is_number()) throw ParameterError("expected a number, got " + j.dump());
  return j.get<double>();
}

json to_json(const FluxLimiter& lim) {
  json j{{"kind", to_string(lim.kind)}, {"mu", lim.mu}};
  if (lim.kind != LimiterKind::Linear) j["c"] = lim.c;
  if (lim.kind == LimiterKind::Larson) j["p"] = lim.p;
  return j;
}

json to_json(const ModelParams& p) {
  return {{"a", p.a()},           {"sigma", p.sigma()},
          {"gamma", p.gamma()},   {"lambda", p.lambda()},
          {"limiter", to_json(p.limiter())},
          {"v_star", p.v_star()}, {"sigma_star", p.sigma_star()},
          {"slope_domain", {number(p.slope_domain().lo), number(p.slope_domain().hi)}}};
}

json to_json(const Equilibrium& e) {
  json ev = json::array();
  for (const auto& z : e.eigenvalues) ev.push_back({{"re", z.real()}, {"im", z.imag()}});
  json j{{"w", e.w}, {"v", e.v}, {"label", to_string(e.label)}, {"eigenvalues", ev}};
  if (e.eigenvectors) {
    json vs = json::array();
    for (const auto& x : *e.eigenvectors) vs.push_back({x[0], x[1]});
    j["eigenvectors"] = vs;
  }
  return j;
}

json to_json(const TerminationEvent& e) {
  json j{{"kind", to_string(e.kind)}, {"s", number(e.s)}, {"w", number(e.w)}, {"v", number(e.v)}};
  if (e.equilibrium_index) j["equilibrium_index"] = *e.equilibrium_index;
  return j;
}

json to_json(const ThresholdResult& r) {
  json j{{"v0", r.v0},
         {"w0_star", r.w0_star},
         {"method", to_string(r.method)},
         {"bracket", {r.bracket.first, r.bracket.second}},
         {"classifier_tol", r.classifier_tol},
         {"bisection_estimate", r.bisection_estimate}};
  j["manifold_estimate"] = r.manifold_estimate ? json(*r.manifold_estimate) : json(nullptr);
  return j;
}

json to_json(const EndpointSlopes& e) {
  return {{"u_prime_at_s_minus", to_string(e.u_prime_at_s_minus)},
          {"u_prime_at_s_plus", to_string(e.u_prime_at_s_plus)},
          {"rho_minus", number(e.rho_minus)},
          {"rho_plus", number(e.rho_plus)},
          {"u_prime_minus", number(e.u_prime_minus)},
          {"u_prime_plus", number(e.u_prime_plus)},
          {"S_prime_at_s_minus", number(e.S_prime_at_s_minus)},
          {"S_prime_at_s_plus", number(e.S_prime_at_s_plus)}};
}

json to_json(const Continuation& c) {
  return {{"edge", c.edge}, {"k", c.k}, {"A", c.A}, {"B", c.B}};
}

json profile_metadata(const WaveProfile& prof) {
  json j{{"s_minus", number(prof.s_minus)},
         {"s_plus", number(prof.s_plus)},
         {"u_type", to_string(prof.u_type)},
         {"S_type", to_string(prof.S_type)},
         {"endpoint_slopes", to_json(prof.endpoint_slopes)},
         {"anchors", {{"s0", prof.anchors.s0}, {"S0", prof.anchors.S0}, {"u0", prof.anchors.u0}, {"v0", prof.anchors.v0}}},
         {"u_max", prof.u_max},
         {"S_max", prof.S_max},
         {"at_s_minus", {{"u", number(prof.at_s_minus.u)}, {"S", number(prof.at_s_minus.S)}}},
         {"at_s_plus", {{"u", number(prof.at_s_plus.u)}, {"S", number(prof.at_s_plus.S)}}},
         {"samples", prof.samples.size()}};
  if (prof.continuation)
    j["continuation_coefficients"] = {{"left", to_json(prof.continuation->first)},
                                      {"right", to_json(prof.continuation->second)}};
  else
    j["continuation_coefficients"] = nullptr;
  return j;
}

}  // namespace kstw::io
