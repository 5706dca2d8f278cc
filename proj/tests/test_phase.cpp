#include <cmath>

#include "doctest.h"
#include "kstw/errors.hpp"
#include "kstw/phase.hpp"

using namespace kstw;

namespace {

double rhs_norm(const ModelParams& p, const Equilibrium& e) {
  const Vec2 r = rhs(p, e.w, e.v);
  return std::hypot(r[0], r[1]);
}

const Equilibrium* find(const std::vector<Equilibrium>& eqs, double w, double v) {
  for (const auto& e : eqs)
    if (std::fabs(e.w - w) < 1e-12 && std::fabs(e.v - v) < 1e-12) return &e;
  return nullptr;
}

bool same_set(const std::array<std::complex<double>, 2>& got, double x1, double x2, double tol) {
  const double g0 = got[0].real(), g1 = got[1].real();
  return (std::fabs(g0 - x1) <= tol && std::fabs(g1 - x2) <= tol) ||
         (std::fabs(g0 - x2) <= tol && std::fabs(g1 - x1) <= tol);
}

}  // namespace

TEST_CASE("parameter validation and derived quantities") {
  CHECK_THROWS_AS(ModelParams(0.0, 1, 1, 1), ParameterError);
  CHECK_THROWS_AS(ModelParams(1, -1, 1, 1), ParameterError);
  CHECK_THROWS_AS(ModelParams(1, 1, 0, 1), ParameterError);
  CHECK_THROWS_AS(ModelParams(1, 1, 1, -0.1), ParameterError);
  CHECK_NOTHROW(ModelParams(1, 1, 1, 0));
  const ModelParams p(0.5, 1.0, 2.0, 8.0);
  CHECK(p.v_star() == 2.0);
  CHECK(p.sigma_star() == 1.0);
}

TEST_CASE("rhs reference values") {
  const ModelParams p(2, 0.5, 1, 1);
  const Vec2 r = rhs(p, 0.75, 0.5);
  CHECK(std::fabs(r[0]) < 1e-15);
  CHECK(std::fabs(r[1]) < 1e-15);
  const ModelParams q(0.7, 0.3, 1.5, 2.0);
  const Vec2 r1 = rhs(q, 0.0, q.v_star());
  CHECK(r1[0] == 0.0);
  CHECK(std::fabs(r1[1]) < 1e-15);
  const ModelParams rel(1, 0.5, 1, 1, FluxLimiter::relativistic(1, 1));
  const Vec2 r2 = rhs(rel, 1.0, 0.5);
  CHECK(r2[0] == doctest::Approx(-0.5));
  CHECK(r2[1] == doctest::Approx(-0.25));
  CHECK_THROWS_AS(rhs(rel, 1.0, 1.5), DomainError);
}

TEST_CASE("linear rhs reduces to w((a-1)v - sigma)") {
  const ModelParams p(1.7, 0.4, 0.6, 1.3);
  for (double v : {-3.0, -0.2, 0.0, 1.1, 5.0}) {
    const double w = 0.37;
    CHECK(rhs(p, w, v)[0] == doctest::Approx(w * ((p.a() - 1) * v - p.sigma())).epsilon(1e-14));
  }
}

TEST_CASE("nullclines") {
  const std::vector<double> grid{-1.0, 0.0, 0.5, 2.0};
  const auto n1 = nullclines(ModelParams(1, 1, 1, 1), grid);
  CHECK(n1.vertical_lines.empty());
  REQUIRE(n1.parabola.size() == 3);
  CHECK(n1.parabola[1].first == 0.0);
  CHECK(n1.parabola[1].second == 1.0);
  const auto n2 = nullclines(ModelParams(2, 0.5, 1, 1), grid);
  REQUIRE(n2.vertical_lines.size() == 1);
  CHECK(n2.vertical_lines[0] == 0.5);
  // saturated vertical lines satisfy g(av - sigma) = v
  const ModelParams sat(2, 0.1, 1, 4, FluxLimiter::relativistic(1, 1));
  const auto n3 = nullclines(sat, grid);
  REQUIRE_FALSE(n3.vertical_lines.empty());
  for (double v : n3.vertical_lines) CHECK(std::fabs(sat.g_of(v) - v) <= 1e-10);
  for (auto [v, w] : n3.parabola) CHECK(std::fabs(rhs(sat, w, v)[1]) <= 1e-10);
}

TEST_CASE("equilibria: reference instances") {
  SUBCASE("a < 1, sigma > sigma_star") {
    const ModelParams p(0.5, 1, 1, 1);
    const auto eqs = equilibria(p);
    REQUIRE(eqs.size() == 2);
    CHECK(find(eqs, 0, 1)->label == StabilityLabel::StableNode);
    CHECK(find(eqs, 0, -1)->label == StabilityLabel::Saddle);
  }
  SUBCASE("a > 1, sigma < sigma_star") {
    const ModelParams p(2, 0.5, 1, 1);
    const auto eqs = equilibria(p);
    REQUIRE(eqs.size() == 3);
    CHECK(find(eqs, 0, 1)->label == StabilityLabel::Saddle);
    CHECK(find(eqs, 0, -1)->label == StabilityLabel::Saddle);
    const auto* e3 = find(eqs, 0.75, 0.5);
    REQUIRE(e3 != nullptr);
    // discriminant sigma^2/(a-1)^2 - (a-1) w3/gamma = 0.25 - 0.75 < 0
    CHECK(e3->label == StabilityLabel::StableFocus);
  }
  SUBCASE("a < 1, sigma < sigma_star") {
    const ModelParams p(0.5, 0.25, 1, 1);
    const auto eqs = equilibria(p);
    REQUIRE(eqs.size() == 3);
    CHECK(find(eqs, 0, 1)->label == StabilityLabel::StableNode);
    CHECK(find(eqs, 0, -1)->label == StabilityLabel::UnstableNode);
    CHECK(find(eqs, 0.75, -0.5)->label == StabilityLabel::Saddle);
  }
  SUBCASE("focus vs node at (w3, v3) follows the closed-form discriminant") {
    const ModelParams node(2, 0.9, 1, 1);
    const double v3 = 0.9, w3 = 1 - 0.81;
    CHECK(0.81 - 1.0 * w3 > 0);
    CHECK(find(equilibria(node), w3, v3)->label == StabilityLabel::StableNode);
  }
}

TEST_CASE("eigenvalues against closed forms") {
  const ModelParams p(2, 0.5, 1, 1);
  const auto eqs = equilibria(p);
  const auto s1 = eigenstructure(p, *find(eqs, 0, 1));
  CHECK(same_set(s1.values, 0.5, -2.0, 1e-12));
  const auto s2 = eigenstructure(p, *find(eqs, 0, -1));
  REQUIRE(s2.vectors.has_value());
  // stable direction at (0, -v*) is (gamma((1+a)v* + sigma), 1)
  for (int i = 0; i < 2; ++i) {
    if (s2.values[i].real() < 0) {
      CHECK((*s2.vectors)[i][0] == doctest::Approx(3.5).epsilon(1e-12));
      CHECK((*s2.vectors)[i][1] == 1.0);
    }
  }
  const ModelParams q(2, 0.5, 1, 1);
  const auto e3 = *find(equilibria(q), 0.75, 0.5);
  const auto s3 = eigenstructure(q, e3);
  CHECK(s3.values[0].real() == doctest::Approx(-0.5));
  CHECK(std::fabs(s3.values[0].imag()) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("classification table over the (a, sigma) sweep") {
  const double gamma = 1.3, lambda = 0.9;
  const double vs = std::sqrt(lambda / gamma);
  for (double a : {0.25, 0.5, 1.0, 1.5, 2.0, 4.0}) {
    const double ss = std::fabs(1 - a) * vs;
    const std::vector<double> sigmas =
        ss > 0 ? std::vector<double>{0.5 * ss, 1.5 * ss} : std::vector<double>{0.5 * vs, 1.5 * vs};
    for (double sigma : sigmas) {
      CAPTURE(a);
      CAPTURE(sigma);
      const ModelParams p(a, sigma, gamma, lambda);
      const auto eqs = equilibria(p);
      for (const auto& e : eqs) CHECK(rhs_norm(p, e) <= 1e-12 * (1 + std::hypot(e.w, e.v)));
      const auto* e1 = find(eqs, 0, vs);
      const auto* e2 = find(eqs, 0, -vs);
      REQUIRE(e1);
      REQUIRE(e2);
      CHECK(same_set(e1->eigenvalues, (a - 1) * vs - sigma, -2 * vs, 1e-10));
      CHECK(same_set(e2->eigenvalues, -(a - 1) * vs - sigma, 2 * vs, 1e-10));
      const bool below = sigma < ss;
      if (a < 1 && !below) {
        CHECK(eqs.size() == 2);
        CHECK(e1->label == StabilityLabel::StableNode);
        CHECK(e2->label == StabilityLabel::Saddle);
      } else if (a < 1) {
        REQUIRE(eqs.size() == 3);
        CHECK(e1->label == StabilityLabel::StableNode);
        CHECK(e2->label == StabilityLabel::UnstableNode);
        CHECK(eqs[2].label == StabilityLabel::Saddle);
      } else if (a == 1) {
        CHECK(eqs.size() == 2);
        CHECK(e1->label == StabilityLabel::StableNode);
        CHECK(e2->label == StabilityLabel::Saddle);
      } else if (below) {
        REQUIRE(eqs.size() == 3);
        CHECK(e1->label == StabilityLabel::Saddle);
        CHECK(e2->label == StabilityLabel::Saddle);
        const bool stable = eqs[2].label == StabilityLabel::StableNode ||
                            eqs[2].label == StabilityLabel::StableFocus;
        CHECK(stable);
      } else {
        CHECK(eqs.size() == 2);
        CHECK(e1->label == StabilityLabel::StableNode);
        CHECK(e2->label == StabilityLabel::Saddle);
      }
    }
  }
}

TEST_CASE("parabola: v' = 0 and sign of w' follows (a-1)v - sigma") {
  for (double a : {0.5, 1.0, 2.0}) {
    const ModelParams p(a, 0.3, 1, 1);
    for (int i = 0; i <= 40; ++i) {
      const double v = -0.99 + i * (1.98 / 40);
      const double w = 1 - v * v;
      const Vec2 r = rhs(p, w, v);
      CHECK(std::fabs(r[1]) <= 1e-15);
      const double expect = (a - 1) * v - 0.3;
      if (std::fabs(expect) > 1e-12) CHECK((r[0] > 0) == (expect > 0));
    }
  }
}

TEST_CASE("degenerate boundary sigma = sigma_star") {
  SUBCASE("a < 1 merges (w3, v3) into (0, -v*)") {
    const ModelParams p(0.5, 0.5, 1, 1);
    CHECK(p.sigma_is_critical());
    CHECK(regime(p) == Regime::Critical);
    const double v3 = p.sigma() / (p.a() - 1), w3 = 1 - v3 * v3;
    CHECK(v3 == doctest::Approx(-1.0));
    CHECK(w3 == doctest::Approx(0.0));
    const auto eqs = equilibria(p);
    const auto* e2 = find(eqs, 0, -1);
    REQUIRE(e2);
    CHECK(e2->label == StabilityLabel::Degenerate);
    CHECK_THROWS_AS(eigenstructure(p, *e2), DegenerateError);
  }
  SUBCASE("a > 1 merges (w3, v3) into (0, v*)") {
    const ModelParams p(2, 1.0 * (1 + 1e-11), 1, 1);
    const auto eqs = equilibria(p);
    const auto* e1 = find(eqs, 0, 1);
    REQUIRE(e1);
    CHECK(e1->label == StabilityLabel::Degenerate);
    CHECK_THROWS_AS(eigenstructure(p, *e1), DegenerateError);
  }
}

TEST_CASE("regime labels") {
  CHECK(regime(ModelParams(0.5, 0.25, 1, 1)) == Regime::A);
  CHECK(regime(ModelParams(0.5, 1, 1, 1)) == Regime::B);
  CHECK(regime(ModelParams(1, 1, 1, 1)) == Regime::C);
  CHECK(regime(ModelParams(2, 0.5, 1, 1)) == Regime::D);
  CHECK(regime(ModelParams(2, 1.5, 1, 1)) == Regime::E);
}

TEST_CASE("saturated equilibria are zeros of the rhs") {
  const ModelParams p(2, 0.1, 1, 4, FluxLimiter::relativistic(1, 1));
  const auto eqs = equilibria(p);
  REQUIRE_FALSE(eqs.empty());
  for (const auto& e : eqs) {
    CHECK(p.slope_domain().contains(e.v));
    CHECK(rhs_norm(p, e) <= 1e-12 * (1 + std::hypot(e.w, e.v)));
  }
  // domain (-0.45, 0.55) excludes +-v* = +-2
  for (const auto& e : eqs) CHECK(e.w > 0);
  const ModelParams q(1, 0.5, 1, 1, FluxLimiter::larson(1, 1, 3));
  for (const auto& e : equilibria(q)) CHECK(rhs_norm(q, e) <= 1e-12 * (1 + std::hypot(e.w, e.v)));
}
