#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "pseudochart/errors.hpp"
#include "pseudochart/obstruct.hpp"

using namespace pseudochart;
using nlohmann::json;

namespace {

json load(const std::string& rel) {
  std::ifstream in(std::string(PSEUDOCHART_DATA_DIR) + "/" + rel);
  REQUIRE(in.good());
  return json::parse(in);
}

bool vanishes_at(const PlaneCurve& c, const std::vector<long>& pt) {
  std::vector<Scalar> x;
  for (long v : pt) x.push_back(Scalar::rational(v));
  const MultiPoly& F = c.form();
  for (const auto& f : {F, F.derivative(0), F.derivative(1), F.derivative(2)}) {
    if (!f.evaluate(x).is_zero()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("curve parsing") {
  const PlaneCurve c = PlaneCurve::parse("x^3+y^3+z^3");
  CHECK(c.degree() == 3);
  CHECK(PlaneCurve::from_json(c.to_json()).form() == c.form());
  CHECK_THROWS_AS(PlaneCurve::parse("x^2+y"), Error);
  CHECK_THROWS_AS(PlaneCurve::parse("0"), Error);
  CHECK_THROWS_AS(PlaneCurve::parse("x^2+w^2"), Error);
}

TEST_CASE("smoothness examples") {
  CHECK(curve_smoothness(PlaneCurve::parse("x^3+y^3+z^3")).smooth);
  CHECK(curve_smoothness(PlaneCurve::parse("x*z-y^2")).smooth);
  const SmoothnessReport cusp = curve_smoothness(PlaneCurve::parse("y^2*z-x^3"));
  CHECK_FALSE(cusp.smooth);
  CHECK_FALSE(cusp.inconclusive);
  CHECK(cusp.witness["chart"] == "z=1");
  CHECK(vanishes_at(PlaneCurve::parse("y^2*z-x^3"), {0, 0, 1}));
  CHECK(cusp.witness["mod_p"]["point"] == json::array({0, 0, 1}));
  // Singular only at [0:1:0], outside the z = 1 chart.
  const SmoothnessReport at_infinity = curve_smoothness(PlaneCurve::parse("x^2*z-y^3"));
  CHECK_FALSE(at_infinity.smooth);
  // Singular only at [1:0:0].
  const SmoothnessReport corner = curve_smoothness(PlaneCurve::parse("y^2*x-z^3"));
  CHECK_FALSE(corner.smooth);
  CHECK(corner.witness.contains("point"));
}

TEST_CASE("genus") {
  CHECK(plane_curve_genus(PlaneCurve::parse("x+y")) == 0);
  CHECK(plane_curve_genus(PlaneCurve::parse("x*z-y^2")) == 0);
  CHECK(plane_curve_genus(PlaneCurve::parse("x^3+y^3+z^3")) == 1);
  CHECK(plane_curve_genus(PlaneCurve::parse("x^4+y^4+z^4")) == 3);
  CHECK_THROWS_AS(plane_curve_genus(PlaneCurve::parse("y^2*z-x^3")), Error);
}

TEST_CASE("curve complement verdict examples") {
  const Verdict fermat = curve_complement_verdict(PlaneCurve::parse("x^3+y^3+z^3"));
  CHECK(fermat.outcome == Outcome::Obstructed);
  CHECK(fermat.reason == Reason::PositiveGenusAmpleCurve);
  CHECK(fermat.witness["genus"] == 1);
  const Verdict conic = curve_complement_verdict(PlaneCurve::parse("x*z-y^2"));
  CHECK(conic.outcome == Outcome::Inconclusive);
  const Verdict cusp = curve_complement_verdict(PlaneCurve::parse("y^2*z-x^3"));
  CHECK(cusp.outcome == Outcome::Inconclusive);
  CHECK(cusp.notes == std::vector<std::string>{"SINGULAR_HYPOTHESIS_UNMET"});
  const Verdict node = curve_complement_verdict(PlaneCurve::parse("y^2*z-x^3-x^2*z"));
  CHECK(node.outcome == Outcome::Inconclusive);
  CHECK(node.notes == std::vector<std::string>{"SINGULAR_HYPOTHESIS_UNMET"});
  CHECK(cusp.to_json()["outcome"] == "INCONCLUSIVE");
  CHECK_FALSE(cusp.to_json().contains("reason"));
}

TEST_CASE("curve corpus") {
  const json corpus = load("curves.json");
  CHECK(corpus.size() >= 30);
  for (const auto& entry : corpus) {
    const PlaneCurve c = PlaneCurve::parse(entry["curve"]);
    CHECK(c.degree() <= 4);
    const bool expected = entry["smooth"];
    const SmoothnessReport s = curve_smoothness(c);
    CHECK_MESSAGE(s.smooth == expected, entry["name"]);
    CHECK_FALSE(s.inconclusive);
    const Verdict v = curve_complement_verdict(c);
    CHECK_MESSAGE((v.outcome == Outcome::Obstructed) == (expected && c.degree() >= 3), entry["name"]);
    if (expected) {
      // No singular point over the small prime fields either.
      for (std::uint64_t p : kSmoothnessPrimes) CHECK_FALSE(singular_point_mod_p(c, p).has_value());
    }
  }
}

TEST_CASE("boundary verdict examples") {
  const Verdict one = boundary_verdict(SurfaceModel::from_json(load("surfaces/p1xp1_one_ruling.json")));
  CHECK(one.outcome == Outcome::Obstructed);
  CHECK(one.reason == Reason::TooFewComponents);
  const Verdict two = boundary_verdict(SurfaceModel::from_json(load("surfaces/p1xp1_two_rulings.json")));
  CHECK(two.outcome == Outcome::Inconclusive);
  const Verdict deficient = boundary_verdict(SurfaceModel::from_json(load("surfaces/p1xp1_rank_deficient.json")));
  CHECK(deficient.outcome == Outcome::Obstructed);
  CHECK(deficient.reason == Reason::ClassesDoNotGenerate);
  CHECK(deficient.witness["rank"] == 1);
  const Verdict elliptic = boundary_verdict(SurfaceModel::from_json(load("surfaces/p2_elliptic_boundary.json")));
  CHECK(elliptic.reason == Reason::NonRationalBoundary);

  SurfaceModel bad = SurfaceModel::from_json(load("surfaces/p1xp1_two_rulings.json"));
  bad.boundary[0].cls = std::vector<mpq_class>{1};
  CHECK_THROWS_AS(boundary_verdict(bad), Error);
  CHECK_THROWS_AS(SurfaceModel::from_json(json{{"rho", 1}}), Error);
}

TEST_CASE("surface model JSON round trip") {
  for (const auto& m : catalog()) {
    const SurfaceModel back = SurfaceModel::from_json(m.to_json());
    CHECK(back.to_json() == m.to_json());
  }
  const SurfaceModel frac = SurfaceModel::from_json(
      json::parse(R"({"rho": 1, "boundary": [{"name": "c", "class": ["3/6"]}]})"));
  CHECK(frac.boundary[0].cls->at(0) == mpq_class(1, 2));
}

TEST_CASE("catalog") {
  const auto cat = catalog();
  auto find = [&](const std::string& name) {
    for (const auto& m : cat) {
      if (m.name == name) return m;
    }
    FAIL("missing preset " << name);
    return cat[0];
  };
  CHECK(find("P2").rho == 1);
  CHECK(find("P1xP1").rho == 2);
  CHECK(find("F2").rho == 2);
  CHECK(find("Bl3P2").rho == 4);
  CHECK(find("Bl8P2").rho == 9);
  for (const auto& m : cat) {
    CHECK(m.basis.size() == static_cast<std::size_t>(m.rho));
    CHECK(boundary_verdict(m).outcome == Outcome::Inconclusive);
  }
}

TEST_CASE("rank over Q agrees with rank mod p") {
  std::mt19937_64 rng(17);
  std::vector<RationalMatrix> mats;
  for (const auto& m : catalog()) mats.push_back(class_matrix(m));
  // Products A B with inner dimension r have rank at most r.
  for (int t = 0; t < 40; ++t) {
    const std::size_t rows = 1 + rng() % 5, cols = 1 + rng() % 5, inner = 1 + rng() % 4;
    RationalMatrix a(rows, std::vector<mpq_class>(inner)), b(inner, std::vector<mpq_class>(cols));
    for (auto& r : a)
      for (auto& x : r) x = static_cast<long>(rng() % 11) - 5;
    for (auto& r : b)
      for (auto& x : r) x = mpq_class(static_cast<long>(rng() % 11) - 5, static_cast<long>(rng() % 3) + 1);
    RationalMatrix ab(rows, std::vector<mpq_class>(cols, 0));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t k = 0; k < inner; ++k) ab[i][j] += a[i][k] * b[k][j];
    CHECK(rank_q(ab) <= static_cast<long>(std::min({rows, cols, inner})));
    mats.push_back(ab);
  }
  for (const auto& m : mats) {
    const long r = rank_q(m);
    for (std::uint64_t p : {1000003ULL, 998244353ULL, 2147483647ULL}) CHECK(rank_mod_p(m, p) == r);
  }
  CHECK(rank_q({{1, 2}, {2, 4}}) == 1);
  CHECK(rank_mod_p({{1, 2}, {3, 1}}, 5) == 1);
  CHECK(rank_q({{1, 2}, {3, 1}}) == 2);
}

TEST_CASE("removing a rational boundary component never lifts an obstruction") {
  std::mt19937_64 rng(23);
  for (const auto& base : catalog()) {
    for (int t = 0; t < 10; ++t) {
      SurfaceModel m = base;
      // Perturb: duplicate a class to make some models rank-deficient.
      if (rng() % 2 == 0 && m.boundary.size() > 1) m.boundary[1].cls = m.boundary[0].cls;
      Verdict before = boundary_verdict(m);
      while (!m.boundary.empty()) {
        m.boundary.erase(m.boundary.begin() + static_cast<long>(rng() % m.boundary.size()));
        const Verdict after = boundary_verdict(m);
        if (before.outcome == Outcome::Obstructed) CHECK(after.outcome == Outcome::Obstructed);
        before = after;
      }
    }
  }
}
