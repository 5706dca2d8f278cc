#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "kstw/cli.hpp"
#include "kstw/errors.hpp"
#include "kstw/io.hpp"
#include "kstw/profiles.hpp"

using namespace kstw;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kstw_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("double formatting round trips") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 20000) {
    const std::uint64_t b = bits(rng);
    double x;
    std::memcpy(&x, &b, sizeof x);
    if (!std::isfinite(x)) continue;
    const double y = io::parse_double(io::format_double(x));
    CHECK(std::memcmp(&x, &y, sizeof x) == 0);
    ++checked;
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(std::isinf(io::parse_double("-inf")));
  CHECK(std::isnan(io::parse_double("nan")));
  CHECK_THROWS_AS(io::parse_double("1.5x"), ParameterError);
  CHECK_THROWS_AS(io::parse_double(""), ParameterError);
  CHECK(io::number(INFINITY) == "inf");
  CHECK(io::number(NAN).is_null());
  CHECK(io::number_from(json("-inf")) == -INFINITY);
}

TEST_CASE("grid parsing") {
  CHECK(cli::parse_grid("1,2.5,-3", "g") == std::vector<double>{1, 2.5, -3});
  CHECK(cli::parse_grid("0:1:5", "g") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK_THROWS_AS(cli::parse_grid("", "g"), ParameterError);
  CHECK_THROWS_AS(cli::parse_grid("1,,2", "g"), ParameterError);
  CHECK_THROWS_AS(cli::parse_grid("0:1:0", "g"), ParameterError);
}

TEST_CASE("equilibria subcommand") {
  const auto dir = scratch("eq");
  auto r = run({"equilibria", "--a", "2", "--sigma", "0.5", "--gamma", "1", "--lambda", "1", "--limiter", "linear",
                "--mu", "1", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json rep = load(dir / "equilibria.json");
  REQUIRE(rep["equilibria"].size() == 3);
  CHECK(rep["equilibria"][0]["label"] == "Saddle");
  CHECK(rep["equilibria"][1]["label"] == "Saddle");
  const std::string third = rep["equilibria"][2]["label"];
  CHECK((third == "StableNode" || third == "StableFocus"));
  CHECK(json::parse(r.out) == rep);

  r = run({"equilibria", "--a", "1", "--sigma", "0.5", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(load(dir / "equilibria.json")["equilibria"].size() == 2);
}

TEST_CASE("configuration errors exit 2 and name the flag") {
  const auto dir = scratch("err");
  auto r = run({"equilibria", "--a", "2x", "--sigma", "0.5", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("--a") != std::string::npos);
  r = run({"equilibria", "--sigma", "0.5", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("--a") != std::string::npos);
  CHECK(run({"equilibria", "--a", "-1", "--sigma", "0.5", "--out", dir.string()}).code == 2);
  CHECK(run({"equilibria", "--a", "1", "--sigma", "0.5", "--limiter", "parabolic"}).code == 2);
  CHECK(run({"portrait", "--a", "0.5", "--sigma", "1", "--v-grid", "", "--w-grid", "1", "--out", dir.string()}).code == 2);
  CHECK(run({"portrait", "--a", "0.5", "--sigma", "1", "--v-grid", "1", "--w-grid", "0", "--out", dir.string()}).code == 2);
  // sigma = sigma* = |1 - a| v*
  r = run({"shoot", "--a", "0.5", "--sigma", "0.5", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("sigma*") != std::string::npos);
  CHECK(run({"shoot", "--a", "0.5", "--sigma", "1", "--v0", "0.5", "--out", dir.string()}).code == 2);
  CHECK(run({"nosuchcommand"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"equilibria", "--config", (dir / "missing.json").string()}).code == 2);
  std::ofstream(dir / "bad.json") << "{\"a\": 0.5, \"bogus\": 1}";
  CHECK(run({"equilibria", "--config", (dir / "bad.json").string(), "--sigma", "1"}).code == 2);
  std::ofstream(dir / "broken.json") << "{\"a\": ";
  CHECK(run({"equilibria", "--config", (dir / "broken.json").string()}).code == 2);
}

TEST_CASE("numerical failures exit 3") {
  const auto dir = scratch("num");
  const auto r = run({"profile", "--a", "0.5", "--sigma", "1", "--w0", "3", "--v0", "2", "--classify", "false",
                      "--rtol", "1e-300", "--atol", "1e-300", "--out", dir.string()});
  CHECK(r.code == 3);
}

TEST_CASE("config file with flag overrides") {
  const auto dir = scratch("cfg");
  std::ofstream(dir / "c.json") << R"({"a": 0.5, "sigma": 1, "v-grid": [1.5, 2], "w-grid": "4,8", "w0": 3})";
  REQUIRE(run({"portrait", "--config", (dir / "c.json").string(), "--out", dir.string()}).code == 0);
  const json base = load(dir / "index.json");
  CHECK(base["regime"] == "B");
  CHECK(base["seeds"].size() == 4);
  REQUIRE(run({"portrait", "--config", (dir / "c.json").string(), "--sigma", "0.25", "--out", dir.string()}).code == 0);
  const json over = load(dir / "index.json");
  CHECK(over["regime"] == "A");
  CHECK(over["params"]["sigma"] == 0.25);
}

TEST_CASE("portrait: case B seeds above the parabola decrease in v") {
  const auto dir = scratch("caseB");
  REQUIRE(run({"portrait", "--a", "0.5", "--sigma", "1.5", "--v-grid", "1.5:4:6", "--w-grid", "0.5,2,8,30",
               "--out", dir.string()})
              .code == 0);
  const json idx = load(dir / "index.json");
  CHECK(idx["regime"] == "B");
  REQUIRE(idx["seeds"].size() == 24);
  for (const auto& seed : idx["seeds"]) {
    std::ifstream f(dir / seed["file"].get<std::string>());
    const auto smp = io::read_trajectory_csv(f);
    REQUIRE(smp.size() > 2);
    for (std::size_t i = 1; i < smp.size(); ++i) {
      if (smp[i].w <= 1 - smp[i].v * smp[i].v) break;  // entered the parabola
      CHECK(smp[i].v < smp[i - 1].v);
    }
  }
}

TEST_CASE("portrait: case D low seeds stay bounded or converge") {
  const auto dir = scratch("caseD");
  REQUIRE(run({"portrait", "--a", "2", "--sigma", "0.5", "--v-grid", "-0.5,0,0.5", "--w-grid", "0.001,0.01",
               "--out", dir.string()})
              .code == 0);
  const json idx = load(dir / "index.json");
  CHECK(idx["regime"] == "D");
  for (const auto& seed : idx["seeds"]) {
    const std::string f = seed["fate"];
    CHECK((f == "Bounded" || f == "ConvergesTo"));
  }
}

TEST_CASE("portrait: saturated limiter falls back to graph coordinates") {
  const auto dir = scratch("graph");
  REQUIRE(run({"portrait", "--a", "1", "--sigma", "0.5", "--limiter", "relativistic", "--v-grid", "0.5",
               "--w-grid", "5", "--rtol", "1e-300", "--atol", "1e-300", "--out", dir.string()})
              .code == 0);
  const json idx = load(dir / "index.json");
  REQUIRE(idx["seeds"].size() == 1);
  CHECK(idx["seeds"][0]["method"] == "graph");
  std::ifstream f(dir / "seed_0000.csv");
  const auto smp = io::read_trajectory_csv(f);
  CHECK(smp.front().v == doctest::Approx(1.5));
  CHECK(smp.back().v == doctest::Approx(-0.5));
  // the linear limiter has no fallback
  CHECK(run({"portrait", "--a", "1", "--sigma", "0.5", "--v-grid", "0.5", "--w-grid", "5", "--rtol", "1e-300",
             "--atol", "1e-300", "--out", dir.string()})
            .code == 3);
}

TEST_CASE("shoot and profile outputs") {
  const auto dir = scratch("shoot");
  REQUIRE(run({"shoot", "--a", "0.5", "--sigma", "1", "--out", dir.string()}).code == 0);
  const json sh = load(dir / "shoot.json");
  CHECK(sh["threshold"]["method"] == "Both");
  CHECK(sh["threshold"]["w0_star"].get<double>() == doctest::Approx(5.19762).epsilon(1e-5));

  REQUIRE(run({"profile", "--a", "0.5", "--sigma", "1", "--w0-factor", "2", "--out", dir.string()}).code == 0);
  const json meta = load(dir / "profile.json");
  CHECK(meta["profile"]["u_type"] == "A1");
  CHECK(meta["profile"]["S_type"] == "A1");
  CHECK(meta["profile"]["endpoint_slopes"]["u_prime_at_s_minus"] == "+inf");

  REQUIRE(run({"profile", "--a", "0.5", "--sigma", "1", "--w0-factor", "1", "--out", dir.string()}).code == 0);
  CHECK(load(dir / "profile.json")["profile"]["s_plus"] == "inf");

  REQUIRE(run({"profile", "--a", "1", "--sigma", "0.5", "--limiter", "relativistic", "--v0", "0.5", "--w0", "5",
               "--branch", "above", "--out", dir.string()})
              .code == 0);
  const json fr = load(dir / "profile.json");
  CHECK(fr["profile"]["u_type"] == "SaturatedFrontConcave");
  CHECK(fr["profile"]["continuation_coefficients"].is_object());
  CHECK(run({"profile", "--a", "1", "--sigma", "0.5", "--limiter", "relativistic", "--v0", "0.5", "--w0", "0.1",
             "--branch", "below", "--out", dir.string()})
            .code == 3);
}

TEST_CASE("profile CSV reproduces the in-memory samples exactly") {
  const auto dir = scratch("roundtrip");
  REQUIRE(run({"profile", "--a", "2", "--sigma", "1.5", "--w0", "7", "--v0", "2", "--s0", "0.25", "--S0", "3",
               "--classify", "false", "--out", dir.string()})
              .code == 0);
  const ModelParams p(2, 1.5, 1, 1);
  const auto prof = linear_profile(p, 7, 2, 0.25, 3);
  std::ifstream f(dir / "profile.csv");
  const auto back = io::read_profile_csv(f);
  REQUIRE(back.size() == prof.samples.size());
  bool same = true;
  for (std::size_t i = 0; i < back.size(); ++i)
    same = same && back[i].s == prof.samples[i].s && back[i].u == prof.samples[i].u && back[i].S == prof.samples[i].S;
  CHECK(same);
  std::ifstream g(dir / "orbit.csv");
  const auto orbit = io::read_trajectory_csv(g);
  REQUIRE(orbit.size() == prof.orbit->samples.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    same = same && orbit[i].s == prof.orbit->samples[i].s && orbit[i].w == prof.orbit->samples[i].w &&
           orbit[i].v == prof.orbit->samples[i].v && orbit[i].I == prof.orbit->samples[i].I;
  }
  CHECK(same);
}

TEST_CASE("sweep covers the five regimes and is deterministic") {
  const auto d1 = scratch("sweep1"), d2 = scratch("sweep2");
  REQUIRE(run({"sweep", "--a-grid", "0.5,1,2", "--sigma-factors", "0.5,1.5", "--threads", "1", "--out", d1.string()})
              .code == 0);
  REQUIRE(run({"sweep", "--a-grid", "0.5,1,2", "--sigma-factors", "0.5,1.5", "--threads", "4", "--out", d2.string()})
              .code == 0);
  CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));
  std::set<std::string> regimes;
  for (const auto& row : load(d1 / "sweep.json")) regimes.insert(row["regime"].get<std::string>());
  CHECK(regimes == std::set<std::string>{"A", "B", "C", "D", "E"});

  REQUIRE(run({"sweep", "--random", "6", "--seed", "11", "--threads", "3", "--out", d1.string()}).code == 0);
  REQUIRE(run({"sweep", "--random", "6", "--seed", "11", "--threads", "2", "--out", d2.string()}).code == 0);
  CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));
  CHECK(slurp(d1 / "sweep.json") == slurp(d2 / "sweep.json"));
}

TEST_CASE("installed binary: exit codes and help") {
  const char* bin = std::getenv("KSTW_BIN");
  if (!bin) {
    MESSAGE("KSTW_BIN not set; skipping process-level checks");
    return;
  }
  const auto dir = scratch("bin");
  const std::string quiet = " >" + (dir / "o.txt").string() + " 2>" + (dir / "e.txt").string();
  auto status = [&](const std::string& args) {
    const int raw = std::system((std::string(bin) + " " + args + quiet).c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("--help") == 0);
  CHECK(status("equilibria --a 2 --sigma 0.5 --out " + dir.string()) == 0);
  CHECK(json::parse(slurp(dir / "o.txt"))["equilibria"].size() == 3);
  CHECK(status("equilibria --a abc --sigma 0.5") == 2);
  CHECK(slurp(dir / "e.txt").find("--a") != std::string::npos);
  CHECK(status("shoot --a 0.5 --sigma 0.5") == 2);
  CHECK(status("profile --a 0.5 --sigma 1 --w0 3 --v0 2 --classify false --rtol 1e-300 --atol 1e-300 --out " +
               dir.string()) == 3);
  // flags before and after the subcommand
  CHECK(status("--a 2 --sigma 0.5 equilibria --out " + dir.string()) == 0);
}
