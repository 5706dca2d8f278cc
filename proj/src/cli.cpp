#include "kstw/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "kstw/errors.hpp"
#include "kstw/io.hpp"
#include "kstw/profiles.hpp"
#include "kstw/shooting.hpp"

namespace kstw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Every option is held as text so that flag values and config values go
// through one parser, and a bad number can be reported with its flag name.
class Options {
 public:
  void add(CLI::App* app, const std::string& name, const std::string& help, std::string def = "") {
    auto& slot = values_[key(app, name)];
    slot.text = std::move(def);
    slot.opt = app->add_option("--" + name, slot.text, help);
    slot.owner = app;
  }
  // Subcommand whose options shadow the global ones in lookups.
  void use(CLI::App* sub) { scope_ = sub; }

  bool given(const std::string& name) const { return !text(name).empty(); }
  const std::string& text(const std::string& name) const {
    if (scope_) {
      const auto it = values_.find(key(scope_, name));
      if (it != values_.end()) return it->second.text;
    }
    const auto it = values_.find(key(nullptr, name));
    if (it == values_.end()) throw std::logic_error("undeclared option " + name);
    return it->second.text;
  }

  double num(const std::string& name) const {
    const std::string& t = text(name);
    if (t.empty()) throw ParameterError("--" + name + " is required");
    try {
      return io::parse_double(t);
    } catch (const ParameterError&) {
      throw ParameterError("--" + name + ": '" + t + "' is not a number");
    }
  }
  std::optional<double> maybe(const std::string& name) const {
    if (!given(name)) return std::nullopt;
    return num(name);
  }

  // Config values fill options that were not given on the command line.
  // Keys of other subcommands are accepted and ignored.
  void merge(const json& cfg) {
    if (!cfg.is_object()) throw ParameterError("config: top level must be an object");
    for (const auto& [name, value] : cfg.items()) {
      bool known = false;
      for (auto& [k, slot] : values_) {
        if (k.second != name) continue;
        known = true;
        if (slot.owner != root_ && slot.owner != scope_) continue;
        if (slot.opt->count() > 0) continue;
        slot.text = as_text(name, value);
      }
      if (!known) throw ParameterError("config: unknown key '" + name + "'");
    }
  }
  void set_root(CLI::App* root) { root_ = root; }

 private:
  std::pair<const CLI::App*, std::string> key(const CLI::App* app, const std::string& name) const {
    return {app == root_ ? nullptr : app, name};
  }

  static std::string as_text(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return io::format_double(v.get<double>());
    if (v.is_array()) {
      std::string out;
      for (const auto& x : v) {
        if (!x.is_number()) throw ParameterError("config: '" + key + "' must hold numbers");
        if (!out.empty()) out += ',';
        out += io::format_double(x.get<double>());
      }
      return out;
    }
    throw ParameterError("config: unsupported value for '" + key + "'");
  }

  struct Slot {
    std::string text;
    CLI::Option* opt = nullptr;
    CLI::App* owner = nullptr;
  };
  std::map<std::pair<const CLI::App*, std::string>, Slot> values_;
  CLI::App* root_ = nullptr;
  CLI::App* scope_ = nullptr;
};

ModelParams params_from(const Options& o, std::optional<double> sigma_override = std::nullopt,
                        std::optional<double> a_override = std::nullopt) {
  const std::string kind = o.text("limiter");
  FluxLimiter lim;
  try {
    lim.kind = limiter_kind_from_string(kind);
  } catch (const std::exception&) {
    throw ParameterError("--limiter: unknown limiter '" + kind + "'");
  }
  lim.mu = o.num("mu");
  lim.c = o.num("c");
  lim.p = o.num("p");
  const double a = a_override ? *a_override : o.num("a");
  const double sigma = sigma_override ? *sigma_override : o.num("sigma");
  return ModelParams(a, sigma, o.num("gamma"), o.num("lambda"), lim);
}

Controls controls_from(const Options& o, Controls c = {}) {
  if (auto r = o.maybe("rtol")) c.rtol = *r;
  if (auto a = o.maybe("atol")) c.atol = *a;
  if (!(c.rtol > 0) || !(c.atol > 0)) throw ParameterError("--rtol and --atol must be > 0");
  return c;
}

fs::path out_dir(const Options& o) {
  fs::path dir = o.text("out");
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParameterError("cannot write " + path.string());
  f << content;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

bool truthy(const Options& o, const std::string& name) {
  const std::string& t = o.text(name);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ParameterError("--" + name + ": expected true or false, got '" + t + "'");
}

std::string fate(TerminationKind k) {
  switch (k) {
    case TerminationKind::ConvergedToEquilibrium: return "ConvergesTo";
    case TerminationKind::VBlowUpMinus: return "EscapesBelow";
    case TerminationKind::VBlowUpPlus: return "EscapesAbove";
    default: return to_string(k);
  }
}

Direction direction_from(const std::string& t) {
  if (t == "forward") return Direction::Forward;
  if (t == "backward") return Direction::Backward;
  if (t == "both") return Direction::Both;
  throw ParameterError("--direction: expected forward, backward or both, got '" + t + "'");
}

// The threshold commands need a saddle whose manifold separates the classes.
void require_threshold_regime(const ModelParams& p, double v0) {
  if (p.limiter().saturated()) throw ParameterError("threshold needs the linear limiter");
  if (p.sigma_is_critical()) throw ParameterError("sigma equals sigma* (within 1e-9): threshold undefined");
  if (!threshold_saddle(p, v0))
    throw ParameterError("no threshold at this v0: need v0 > v*, or v0 < -v* with a < mu and sigma < sigma*");
}

// Orbit through (w0, v0) for a saturated limiter in graph coordinates, used
// when the time-domain stepper cannot pass the steep part near saturation.
std::vector<TrajectorySample> graph_orbit(const ModelParams& p, double w0, double v0) {
  const Interval dom = p.slope_domain();
  const auto up = integrate_graph_W(p, v0, w0, dom.hi);
  const auto down = integrate_graph_W(p, v0, w0, dom.lo);
  SampledGraph merged = down;
  merged.samples.insert(merged.samples.end(), up.samples.begin() + 1, up.samples.end());
  const auto hi = reconstruct_s_from_v(p, merged, v0, dom.hi, 0.0);
  const auto lo = reconstruct_s_from_v(p, merged, v0, dom.lo, 0.0);
  std::vector<TrajectorySample> out;
  for (const auto& x : hi) out.push_back({x.s, x.w, x.v, x.I});
  for (std::size_t i = 1; i < lo.size(); ++i) out.push_back({lo[i].s, lo[i].w, lo[i].v, lo[i].I});
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.s < r.s; });
  return out;
}

int cmd_equilibria(const Options& o, std::ostream& out) {
  const ModelParams p = params_from(o);
  json eqs = json::array();
  for (const auto& e : equilibria(p)) eqs.push_back(io::to_json(e));
  const json report{{"params", io::to_json(p)}, {"regime", to_string(regime(p))}, {"equilibria", eqs}};
  write_json(out_dir(o) / "equilibria.json", report);
  out << report.dump(2) << "\n";
  return kOk;
}

int cmd_portrait(const Options& o, std::ostream& out) {
  const ModelParams p = params_from(o);
  const auto vs = parse_grid(o.text("v-grid"), "v-grid");
  const auto ws = parse_grid(o.text("w-grid"), "w-grid");
  for (double w : ws)
    if (!(w > 0)) throw ParameterError("--w-grid: seeds need w > 0");
  const Direction dir = direction_from(o.text("direction"));
  Controls c = controls_from(o);
  c.s_max = o.num("s-max");
  const fs::path dir_path = out_dir(o);

  json seeds = json::array();
  std::size_t idx = 0;
  for (double w0 : ws) {
    for (double v0 : vs) {
      char name[32];
      std::snprintf(name, sizeof name, "seed_%04zu.csv", idx);
      json rec{{"index", idx}, {"w0", w0}, {"v0", v0}, {"file", name}};
      std::vector<TrajectorySample> samples;
      try {
        const Trajectory tr = integrate(p, w0, v0, dir, c);
        samples = tr.samples;
        rec["method"] = "time";
        rec["termination"] = io::to_json(tr.termination);
        rec["fate"] = fate(tr.termination.kind);
        if (tr.backward_termination) rec["backward_termination"] = io::to_json(*tr.backward_termination);
      } catch (const StepSizeUnderflow& e) {
        if (!p.limiter().saturated()) throw;
        samples = graph_orbit(p, w0, v0);
        rec["method"] = "graph";
        rec["fate"] = "FluxBoundary";
        rec["note"] = e.what();
      }
      std::ostringstream csv;
      io::write_trajectory_csv(csv, samples);
      write_file(dir_path / name, csv.str());
      seeds.push_back(rec);
      ++idx;
    }
  }
  const json index{{"params", io::to_json(p)},
                   {"regime", to_string(regime(p))},
                   {"direction", to_string(dir)},
                   {"seeds", seeds}};
  write_json(dir_path / "index.json", index);
  out << json{{"regime", to_string(regime(p))}, {"seeds", seeds.size()}, {"index", (dir_path / "index.json").string()}}.dump()
      << "\n";
  return kOk;
}

ShootingOptions shooting_from(const Options& o) {
  ShootingOptions s;
  s.controls = controls_from(o, s.controls);
  s.cross_check = truthy(o, "cross-check");
  return s;
}

int cmd_shoot(const Options& o, std::ostream& out) {
  const ModelParams p = params_from(o);
  const double v0 = o.given("v0") ? o.num("v0") : 2 * p.v_star();
  require_threshold_regime(p, v0);
  std::optional<std::pair<double, double>> hint;
  if (o.given("bracket")) {
    const auto b = parse_grid(o.text("bracket"), "bracket");
    if (b.size() != 2 || !(0 < b[0] && b[0] < b[1])) throw ParameterError("--bracket: expected lo,hi with 0 < lo < hi");
    hint = std::make_pair(b[0], b[1]);
  }
  const ThresholdResult r = find_w0_star(p, v0, hint, shooting_from(o));
  const json report{{"params", io::to_json(p)}, {"regime", to_string(regime(p))}, {"threshold", io::to_json(r)}};
  write_json(out_dir(o) / "shoot.json", report);
  out << report.dump(2) << "\n";
  return kOk;
}

int cmd_profile(const Options& o, std::ostream& out) {
  const ModelParams p = params_from(o);
  const double s0 = o.num("s0"), S0 = o.num("S0");
  const fs::path dir = out_dir(o);
  json meta{{"params", io::to_json(p)}, {"regime", to_string(regime(p))}};
  WaveProfile prof;
  std::vector<TrajectorySample> orbit;

  if (p.limiter().saturated()) {
    const double v0 = o.num("v0"), w0 = o.num("w0");
    const std::string b = o.text("branch");
    if (b != "above" && b != "below") throw ParameterError("--branch: expected above or below");
    const auto fr = saturated_front(p, v0, w0, b == "above" ? FrontBranch::Above : FrontBranch::Below, s0, S0);
    prof = fr.profile;
    for (const auto& x : fr.arc) orbit.push_back({x.s, x.w, x.v, x.I});
    meta["front"] = {{"branch", b},
                     {"w_at_s_minus", fr.w_at_s_minus},
                     {"w_at_s_plus", fr.w_at_s_plus},
                     {"v_prime_at_s_minus", fr.v_prime_at_s_minus},
                     {"v_prime_at_s_plus", fr.v_prime_at_s_plus}};
  } else {
    const double v0 = o.given("v0") ? o.num("v0") : 2 * p.v_star();
    ProfileOptions po = default_profile_options();
    po.controls = controls_from(o, po.controls);
    const bool has_threshold = !p.sigma_is_critical() && threshold_saddle(p, v0).has_value();
    if (has_threshold && truthy(o, "classify")) {
      const ThresholdResult r = find_w0_star(p, v0, std::nullopt, shooting_from(o));
      po.w0_star = r.w0_star;
      meta["threshold"] = io::to_json(r);
    }
    double w0;
    if (o.given("w0-factor")) {
      if (!po.w0_star) throw ParameterError("--w0-factor needs a threshold at this v0");
      w0 = o.num("w0-factor") * *po.w0_star;
    } else {
      w0 = o.num("w0");
    }
    if (!(w0 > 0)) throw ParameterError("--w0 must be > 0");
    prof = linear_profile(p, w0, v0, s0, S0, po);
    orbit = prof.orbit->samples;
    meta["flux_relation_residual"] = flux_relation_residual(prof, p);
    meta["orbit_termination"] = io::to_json(prof.orbit->termination);
    if (prof.orbit->backward_termination) meta["orbit_backward_termination"] = io::to_json(*prof.orbit->backward_termination);
  }
  meta["profile"] = io::profile_metadata(prof);

  std::ostringstream pcsv, ocsv;
  io::write_profile_csv(pcsv, prof.samples);
  io::write_trajectory_csv(ocsv, orbit);
  write_file(dir / "profile.csv", pcsv.str());
  write_file(dir / "orbit.csv", ocsv.str());
  write_json(dir / "profile.json", meta);
  out << json{{"u_type", to_string(prof.u_type)},
              {"S_type", to_string(prof.S_type)},
              {"s_minus", io::number(prof.s_minus)},
              {"s_plus", io::number(prof.s_plus)}}
             .dump()
      << "\n";
  return kOk;
}

struct SweepPoint {
  double a, sigma;
};

struct SweepRow {
  double a = 0, sigma = 0;
  std::string regime, u_type = "-", S_type = "-", note;
  std::optional<double> w0_star;
  bool failed = false;
};

SweepRow sweep_one(const Options& o, const SweepPoint& pt) {
  SweepRow row{pt.a, pt.sigma, "", "-", "-", "", std::nullopt, false};
  const ModelParams p = params_from(o, pt.sigma, pt.a);
  row.regime = to_string(regime(p));
  const double v0 = o.num("v0-factor") * p.v_star();
  if (p.limiter().saturated() || p.sigma_is_critical() || !threshold_saddle(p, v0)) {
    row.note = "no threshold";
    return row;
  }
  try {
    const ThresholdResult r = find_w0_star(p, v0, std::nullopt, shooting_from(o));
    row.w0_star = r.w0_star;
    ProfileOptions po = default_profile_options();
    po.controls = controls_from(o, po.controls);
    po.w0_star = r.w0_star;
    const WaveProfile prof = linear_profile(p, o.num("w0-factor") * r.w0_star, v0, 0.0, 1.0, po);
    row.u_type = to_string(prof.u_type);
    row.S_type = to_string(prof.S_type);
  } catch (const NumericalError& e) {
    row.failed = true;
    row.note = e.what();
  }
  return row;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  // sigma factors scale sigma*; where sigma* = 0 (a = mu) they scale v*
  std::vector<SweepPoint> pts;
  const ModelParams base = params_from(o, 1.0, 1.0);
  const double mu = base.limiter().mu, vstar = base.v_star();
  auto sigma_for = [&](double a, double f) {
    const double ss = std::fabs(mu - a) * vstar;
    return f * (ss > 0 ? ss : vstar);
  };
  if (o.given("random")) {
    const double nd = o.num("random");
    if (!(nd >= 1) || nd != std::floor(nd)) throw ParameterError("--random: expected a positive integer");
    const auto ar = parse_grid(o.text("a-range"), "a-range");
    const auto fr = parse_grid(o.text("sigma-factor-range"), "sigma-factor-range");
    if (ar.size() != 2 || fr.size() != 2 || !(0 < ar[0] && ar[0] < ar[1]) || !(0 < fr[0] && fr[0] < fr[1]))
      throw ParameterError("--a-range/--sigma-factor-range: expected lo,hi with 0 < lo < hi");
    const double seed = o.num("seed");
    if (!(seed >= 0) || seed != std::floor(seed)) throw ParameterError("--seed: expected a non-negative integer");
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> ua(ar[0], ar[1]), uf(fr[0], fr[1]);
    for (std::size_t i = 0; i < static_cast<std::size_t>(nd); ++i) {
      const double a = ua(rng);
      pts.push_back({a, sigma_for(a, uf(rng))});
    }
  } else {
    const auto as = parse_grid(o.text("a-grid"), "a-grid");
    if (o.given("sigma-grid")) {
      for (double a : as)
        for (double s : parse_grid(o.text("sigma-grid"), "sigma-grid")) pts.push_back({a, s});
    } else {
      for (double a : as)
        for (double f : parse_grid(o.text("sigma-factors"), "sigma-factors")) pts.push_back({a, sigma_for(a, f)});
    }
  }
  for (const auto& pt : pts) params_from(o, pt.sigma, pt.a);  // validate before dispatch

  std::size_t threads = std::thread::hardware_concurrency();
  if (o.given("threads")) {
    const double t = o.num("threads");
    if (!(t >= 1) || t != std::floor(t)) throw ParameterError("--threads: expected a positive integer");
    threads = static_cast<std::size_t>(t);
  }
  threads = std::clamp<std::size_t>(threads, 1, pts.size());

  std::vector<SweepRow> rows(pts.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < pts.size(); i = next++) rows[i] = sweep_one(o, pts[i]);
    });
  for (auto& th : pool) th.join();

  std::ostringstream csv;
  csv << "a,sigma,regime,w0_star,u_type,S_type,note\n";
  json table = json::array();
  bool failed = false;
  for (const auto& r : rows) {
    failed = failed || r.failed;
    csv << io::format_double(r.a) << ',' << io::format_double(r.sigma) << ',' << r.regime << ','
        << (r.w0_star ? io::format_double(*r.w0_star) : "") << ',' << r.u_type << ',' << r.S_type << ",\""
        << r.note << "\"\n";
    table.push_back({{"a", r.a},
                     {"sigma", r.sigma},
                     {"regime", r.regime},
                     {"w0_star", r.w0_star ? json(*r.w0_star) : json(nullptr)},
                     {"u_type", r.u_type},
                     {"S_type", r.S_type},
                     {"note", r.note}});
  }
  const fs::path dir = out_dir(o);
  write_file(dir / "sweep.csv", csv.str());
  write_json(dir / "sweep.json", table);
  out << csv.str();
  return failed ? kNumericalError : kOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  auto num = [&](std::string_view t) {
    try {
      return io::parse_double(t);
    } catch (const ParameterError&) {
      throw ParameterError("--" + flag + ": '" + std::string(t) + "' is not a number");
    }
  };
  if (text.find(':') != std::string::npos) {
    const auto c1 = text.find(':'), c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ParameterError("--" + flag + ": expected lo:hi:n");
    const double lo = num(std::string_view(text).substr(0, c1));
    const double hi = num(std::string_view(text).substr(c1 + 1, c2 - c1 - 1));
    const double n = num(std::string_view(text).substr(c2 + 1));
    if (!(n >= 1) || n != std::floor(n)) throw ParameterError("--" + flag + ": point count must be a positive integer");
    const auto m = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < m; ++i) out.push_back(m == 1 ? lo : lo + (hi - lo) * i / (m - 1));
  } else {
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
      const auto comma = text.find(',', pos);
      out.push_back(num(std::string_view(text).substr(pos, comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (out.empty()) throw ParameterError("--" + flag + ": empty grid");
  for (double x : out)
    if (!std::isfinite(x)) throw ParameterError("--" + flag + ": non-finite value");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traveling waves of the logarithmic-sensitivity Keller-Segel model", "kstw"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  o.set_root(&app);
  std::string config;
  app.add_option("--config", config, "JSON file with option values; flags override it");
  o.add(&app, "out", "output directory", ".");
  o.add(&app, "rtol", "relative tolerance");
  o.add(&app, "atol", "absolute tolerance");
  o.add(&app, "cross-check", "thresholds: also trace the saddle manifold", "true");
  o.add(&app, "a", "chemotactic exponent a > 0");
  o.add(&app, "sigma", "wave speed sigma > 0");
  o.add(&app, "gamma", "diffusivity of S", "1");
  o.add(&app, "lambda", "decay rate of S", "1");
  o.add(&app, "limiter", "linear, relativistic or larson", "linear");
  o.add(&app, "mu", "viscosity", "1");
  o.add(&app, "c", "saturation speed", "1");
  o.add(&app, "p", "Larson exponent", "2");

  auto* eq = app.add_subcommand("equilibria", "equilibria with eigenvalues and labels");
  auto* portrait = app.add_subcommand("portrait", "trajectories from a grid of seeds");
  o.add(portrait, "v-grid", "seed v values");
  o.add(portrait, "w-grid", "seed w values");
  o.add(portrait, "direction", "forward, backward or both", "forward");
  o.add(portrait, "s-max", "span cap", "50");
  auto* shoot = app.add_subcommand("shoot", "threshold w0* at v0");
  o.add(shoot, "v0", "initial slope (default 2 v*)");
  o.add(shoot, "bracket", "initial bracket lo,hi");
  auto* profile = app.add_subcommand("profile", "reconstruct (u, S)");
  o.add(profile, "w0", "initial u0/S0");
  o.add(profile, "w0-factor", "initial u0/S0 as a multiple of w0*");
  o.add(profile, "v0", "initial slope S'/S");
  o.add(profile, "s0", "anchor position", "0");
  o.add(profile, "S0", "anchor value of S", "1");
  o.add(profile, "branch", "saturated fronts: above or below", "above");
  o.add(profile, "classify", "compute w0* and label the profile", "true");
  auto* sweep = app.add_subcommand("sweep", "regimes, thresholds and types over (a, sigma)");
  o.add(sweep, "a-grid", "values of a", "0.5,1,2");
  o.add(sweep, "sigma-factors", "sigma as multiples of sigma* (of v* when sigma* = 0)", "0.5,1.5");
  o.add(sweep, "sigma-grid", "absolute sigma values (overrides --sigma-factors)");
  o.add(sweep, "random", "number of random (a, sigma) draws instead of a grid");
  o.add(sweep, "a-range", "random draws: lo,hi for a", "0.25,2.5");
  o.add(sweep, "sigma-factor-range", "random draws: lo,hi for the sigma factor", "0.1,2");
  o.add(sweep, "seed", "random draws: generator seed", "0");
  o.add(sweep, "v0-factor", "v0 as a multiple of v*", "2");
  o.add(sweep, "w0-factor", "profile u0/S0 as a multiple of w0*", "2");
  o.add(sweep, "threads", "worker threads");

  std::vector<std::string> argv_store{"kstw"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "kstw: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    o.use(app.get_subcommands().front());
    if (!config.empty()) {
      std::ifstream f(config);
      if (!f) throw ParameterError("--config: cannot read " + config);
      json cfg;
      try {
        cfg = json::parse(f);
      } catch (const json::exception& e) {
        throw ParameterError(std::string("--config: ") + e.what());
      }
      o.merge(cfg);
    }
    if (eq->parsed()) return cmd_equilibria(o, out);
    if (portrait->parsed()) return cmd_portrait(o, out);
    if (shoot->parsed()) return cmd_shoot(o, out);
    if (profile->parsed()) return cmd_profile(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    return kConfigError;
  } catch (const ParameterError& e) {
    err << "kstw: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "kstw: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const fs::filesystem_error& e) {
    err << "kstw: " << e.what() << "\n";
    return kConfigError;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace kstw::cli
