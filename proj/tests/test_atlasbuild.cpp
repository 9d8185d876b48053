#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pseudochart/atlas.hpp"
#include "pseudochart/errors.hpp"
#include "test_support.hpp"

using namespace pseudochart;
using pseudochart::testing::random_scalar;

namespace {

const FieldPtr Q = Field::rationals();
Scalar q(long n, long d = 1) { return Scalar::rational(n, d); }

SpacePoint random_p1_pair(std::mt19937_64& rng, const Space& s) {
  std::vector<std::vector<Scalar>> blocks;
  for (int k = 0; k < 2; ++k) {
    Scalar a = random_scalar(rng, Q), b = random_scalar(rng, Q);
    if (a.is_zero() && b.is_zero()) b = q(1);
    blocks.push_back({a, b});
  }
  return SpacePoint(s, blocks);
}

}  // namespace

TEST_CASE("p1_double_cover formula and degree") {
  const PseudoChart h = p1_double_cover();
  CHECK(h.claimed_degree == 2);
  CHECK(h.map.source().to_string() == "A^1");
  CHECK(h.map.target().to_string() == "P^1");
  const auto& v = h.map.source().vars();
  CHECK(h.map.block(0)[0] == parse_poly("t^2+1", v));
  CHECK(h.map.block(0)[1] == parse_poly("t", v));
  CHECK(resultant(h.map.block(0)[0], h.map.block(0)[1], "t") == parse_poly("1", v));
}

TEST_CASE("fiber polynomial b t^2 - a t + b is never a nonzero constant") {
  const PseudoChart h = p1_double_cover();
  for (const FieldPtr& f : {Q, Field::finite(101), Field::finite(3, 2)}) {
    std::mt19937_64 rng(5);
    const MultiPoly f0 = h.map.block(0)[0].to_field(f), f1 = h.map.block(0)[1].to_field(f);
    for (int i = 0; i < 200; ++i) {
      Scalar a = random_scalar(rng, f), b = random_scalar(rng, f);
      if (i == 0) a = Scalar::one(f), b = Scalar::zero(f);
      if (a.is_zero() && b.is_zero()) continue;
      // Points [a:b] of the fiber: b f0 - a f1 = 0.
      const MultiPoly fiber = f0.scaled(b) - f1.scaled(a);
      CHECK_FALSE(fiber.is_constant());
      CHECK(fiber.total_degree() == (b.is_zero() ? 1 : 2));
    }
  }
}

TEST_CASE("extend_over_base") {
  const Construction h{p1_double_cover().map, p1_double_cover().provenance};
  const Construction e1 = extend_over_base(h, Space::affine(1, "s"));
  CHECK(e1.map.source().to_string() == "A^1 x A^1");
  CHECK(e1.map.target().to_string() == "P^1 x A^1");
  CHECK(e1.provenance.degree() == 2);
  const Construction e2 = extend_over_base(h, Space::projective(1, "u"));
  CHECK(e2.map.source().to_string() == "A^1 x P^1");
  CHECK(e2.map.target().to_string() == "P^1 x P^1");
  CHECK(e2.provenance.degree() == 2);
  const Construction e0 = extend_over_base(h, Space::point());
  CHECK(e0.provenance == h.provenance);
  const SpacePoint img = evaluate_map(e1.map, SpacePoint(e1.map.source(), {{q(3)}, {q(5)}}));
  CHECK(img.equals(SpacePoint(e1.map.target(), {{q(10), q(3)}, {q(5)}})));
}

TEST_CASE("cover_product_p1") {
  CHECK(cover_product_p1(1).provenance == p1_double_cover().provenance);
  for (int n = 1; n <= 4; ++n) {
    const PseudoChart c = cover_product_p1(n);
    CHECK(c.claimed_degree == (1L << n));
    CHECK(c.map.source().dim() == n);
    CHECK(c.map.target().num_factors() == static_cast<std::size_t>(n));
  }
  CHECK_THROWS_AS(cover_product_p1(0), Error);
  const PseudoChart c2 = cover_product_p1(2);
  const SpacePoint img = evaluate_map(c2.map, SpacePoint(c2.map.source(), {{q(0), q(0)}}));
  CHECK(img.equals(SpacePoint(c2.map.target(), {{q(1), q(0)}, {q(1), q(0)}})));
}

TEST_CASE("sym2_cover") {
  const Construction s = sym2_cover();
  CHECK(s.provenance.degree() == 2);
  CHECK(s.map.multidegree()[0] == std::vector<int>{1, 1});
  const SpacePoint x(s.map.source(), {{q(1), q(0)}, {q(1), q(0)}});
  CHECK(evaluate_map(s.map, x).equals(SpacePoint(s.map.target(), {{q(0), q(0), q(1)}})));
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const SpacePoint p = random_p1_pair(rng, s.map.source());
    const SpacePoint swapped(s.map.source(), {p.blocks()[1], p.blocks()[0]});
    CHECK(evaluate_map(s.map, p).equals(evaluate_map(s.map, swapped)));
  }
}

TEST_CASE("cover_p2 composition") {
  const PseudoChart c = cover_p2();
  CHECK(c.claimed_degree == 8);
  CHECK(c.map.target().to_string() == "P^2");
  const PolyMap direct = compose(cover_product_p1(2).map, sym2_cover().map);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const SpacePoint x(c.map.source(), {{random_scalar(rng, Q), random_scalar(rng, Q)}});
    CHECK(evaluate_map(c.map, x).equals(evaluate_map(direct, SpacePoint(direct.source(), x.blocks()))));
  }
}

TEST_CASE("segre") {
  CHECK_THROWS_AS(segre(0), Error);
  CHECK_THROWS_AS(segre(5), Error);
  const Construction s1 = segre(1);
  const SpacePoint p(s1.map.source(), {{q(2), q(3)}});
  CHECK(evaluate_map(s1.map, p).equals(SpacePoint(s1.map.target(), p.blocks())));
  const Construction s2 = segre(2);
  const auto& v = s2.map.source().vars();
  CHECK(s2.map.block(0)[0] == parse_poly("a0*a1", v));
  CHECK(s2.map.block(0)[1] == parse_poly("a0*b1", v));
  CHECK(s2.map.block(0)[2] == parse_poly("b0*a1", v));
  CHECK(s2.map.block(0)[3] == parse_poly("b0*b1", v));

  std::mt19937_64 rng(31);
  for (int n = 1; n <= 4; ++n) {
    const Construction s = segre(n);
    CHECK(s.map.target().dim() == (1 << n) - 1);
    for (int i = 0; i < 100; ++i) {
      std::vector<std::vector<Scalar>> a, b;
      for (int k = 0; k < n; ++k) {
        a.push_back({q(static_cast<long>(rng() % 5)), q(1 + static_cast<long>(rng() % 3))});
        b.push_back({q(static_cast<long>(rng() % 5)), q(1 + static_cast<long>(rng() % 3))});
      }
      const SpacePoint pa(s.map.source(), a), pb(s.map.source(), b);
      CHECK(pa.equals(pb) == evaluate_map(s.map, pa).equals(evaluate_map(s.map, pb)));
    }
  }
}

TEST_CASE("projection certification") {
  // Center contains segre([1:0],[1:0]) = e0: first column zero.
  const std::vector<std::vector<long>> bad{{0, 1, 2, 3}, {0, -1, 4, 1}, {0, 2, 0, -5}};
  try {
    linear_projection_from_matrix(2, bad);
    FAIL("expected CenterMeetsVariety");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CenterMeetsVariety);
    CHECK(e.witness()["point"] == nlohmann::json::parse("[[1,0],[1,0]]"));
  }
  // The quadric form z0 z3 - z1 z2 restricted to Segre vanishes: its "center" is everything.
  CHECK_THROWS_AS(linear_projection_from_matrix(2, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}}), Error);
  CHECK_NOTHROW(linear_projection_from_matrix(2, {{1, 0, 0, 0}, {0, 1, 1, 0}, {0, 0, 0, 1}}));

  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Construction p2 = random_linear_projection(2, seed);
    CHECK(p2.provenance.params["seed"] == seed);
    CHECK(p2.provenance.degree() == 2);
    CHECK(random_linear_projection(2, seed).provenance == p2.provenance);
  }
  const Construction p3 = random_linear_projection(3, 7);
  CHECK(p3.provenance.degree() == 6);
  CHECK(p3.map.source().to_string() == "P^7");
  CHECK(p3.map.target().to_string() == "P^3");
  const nlohmann::json ev = certify_projection(3, p3.provenance.params["matrix"].get<std::vector<std::vector<long>>>());
  CHECK(ev["charts"].size() == 8);
}

TEST_CASE("cover_pn") {
  const PseudoChart c2 = cover_pn(2, 5);
  CHECK(c2.claimed_degree == 8);
  CHECK(c2.map.target().to_string() == "P^2");
  const PseudoChart c3 = cover_pn(3, 7);
  CHECK(c3.claimed_degree == 48);
  CHECK(c3.provenance.children.back().params["seed"] == 7);
  CHECK_THROWS_AS(cover_pn(4, 1), Error);
}

TEST_CASE("claimed degree is multiplicative over the tree") {
  for (const PseudoChart& c : {p1_double_cover(), cover_product_p1(3), cover_p2(), cover_pn(2, 3)}) {
    long product = 1;
    std::vector<const Provenance*> stack{&c.provenance};
    while (!stack.empty()) {
      const Provenance* p = stack.back();
      stack.pop_back();
      if (p->children.empty()) product *= p->degree();
      for (const auto& ch : p->children) stack.push_back(&ch);
    }
    CHECK(c.claimed_degree == product);
  }
}

TEST_CASE("bundle atlas structure") {
  const BundleAtlas a = bundle_atlas(1, {0, 2});
  CHECK(a.charts.size() == 2);
  CHECK(a.transitions.size() == 2);
  for (const auto& c : a.charts) {
    CHECK(c.claimed_degree == 2);
    CHECK(c.map.source().to_string() == "A^2");
    CHECK(c.map.target().to_string() == "A^1 x P^1");
  }
  const Transition& t = a.transition(1, 0);
  CHECK(t.exponents == std::vector<std::vector<int>>{{0, 0}, {-2, 2}});

  const BundleAtlas b = bundle_atlas(2, {0, 0, 1});
  CHECK(b.charts.size() == 3);
  CHECK(b.charts[0].claimed_degree == 8);
  CHECK(b.transitions.size() == 6);
  for (const auto& tr : b.transitions) {
    int det_exponent_sum = 0;
    for (const auto& row : tr.exponents)
      for (int e : row) det_exponent_sum += e;
    CHECK(det_exponent_sum == 0);  // degree-0 monomial: a ratio of base coordinates
  }
  CHECK_THROWS_AS(bundle_atlas(0, {0, 1}), Error);
  CHECK_THROWS_AS(bundle_atlas(1, {0, 1, 2, 3}), Error);
}

TEST_CASE("chart and atlas JSON round trip") {
  for (const PseudoChart& c : {p1_double_cover(), cover_p2(), cover_pn(2, 11)}) {
    const nlohmann::json j = chart_to_json(c);
    const PseudoChart back = chart_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.map == c.map);
    CHECK(back.provenance == c.provenance);
    CHECK(back.claimed_degree == c.claimed_degree);
    CHECK(chart_to_json(back).dump() == j.dump());
    CHECK(canonical_chart_map(back.provenance) == c.map);
  }
  const BundleAtlas a = bundle_atlas(1, {0, 2});
  CHECK(atlas_to_json(atlas_from_json(atlas_to_json(a))).dump() == atlas_to_json(a).dump());
  CHECK_THROWS_AS(chart_from_json(nlohmann::json::parse(R"({"name":"x"})")), Error);
  CHECK_THROWS_AS(Provenance::from_json(nlohmann::json::parse(R"({"kind":"blowup"})")), Error);
}
