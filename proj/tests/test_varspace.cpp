#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pseudochart/errors.hpp"
#include "pseudochart/varspace.hpp"
#include "test_support.hpp"

using namespace pseudochart;
using pseudochart::testing::random_multihomogeneous;
using pseudochart::testing::random_scalar;

namespace {

const FieldPtr Q = Field::rationals();

Scalar q(long n, long d = 1) { return Scalar::rational(n, d); }

PolyMap double_cover() {
  const Space a1 = Space::affine(1, "t");
  const Space p1 = Space::projective(1, "y");
  return PolyMap(a1, p1, {{parse_poly("t^2+1", a1.vars()), parse_poly("t", a1.vars())}}, "double_cover");
}

PolyMap square_map() {
  const Space p1 = Space::projective({"a", "b"});
  const Space p2 = Space::projective(2, "z");
  const auto& v = p1.vars();
  return PolyMap(p1, p2, {{parse_poly("a^2", v), parse_poly("a*b", v), parse_poly("b^2", v)}}, "square");
}

SpacePoint random_point(std::mt19937_64& rng, const Space& s, const FieldPtr& f = Q) {
  std::vector<std::vector<Scalar>> blocks;
  for (const auto& fac : s.factors()) {
    std::vector<Scalar> b;
    for (std::size_t i = 0; i < fac.num_vars(); ++i) b.push_back(random_scalar(rng, f));
    if (fac.projective() && std::all_of(b.begin(), b.end(), [](const Scalar& c) { return c.is_zero(); })) {
      b[0] = Scalar::one(f);
    }
    blocks.push_back(std::move(b));
  }
  return SpacePoint(s, std::move(blocks));
}

// Random multihomogeneous map from `src` to `dst` with target-block degrees in {1,2}.
PolyMap random_map(std::mt19937_64& rng, const Space& src, const Space& dst) {
  std::vector<std::vector<std::size_t>> proj_blocks;
  for (std::size_t s = 0; s < src.num_factors(); ++s) {
    if (src.factor(s).projective()) proj_blocks.push_back(src.block(s));
  }
  std::vector<std::vector<MultiPoly>> comps;
  for (const auto& fac : dst.factors()) {
    std::vector<int> degs;
    for (std::size_t b = 0; b < proj_blocks.size(); ++b) degs.push_back(fac.projective() ? 1 + rng() % 2 : 0);
    std::vector<MultiPoly> block;
    for (std::size_t i = 0; i < fac.num_vars(); ++i) {
      block.push_back(random_multihomogeneous(rng, src.vars(), Q, proj_blocks, degs, 3, 2));
    }
    comps.push_back(std::move(block));
  }
  return PolyMap(src, dst, std::move(comps), "random");
}

}  // namespace

TEST_CASE("space validation") {
  CHECK(Space::projective(2).num_vars() == 3);
  CHECK(Space::affine(3).num_vars() == 3);
  CHECK_THROWS_AS(Space({Factor{FactorKind::Projective, 1, {"a"}}}), Error);
  CHECK_THROWS_AS(Space({Factor{FactorKind::Affine, 0, {}}}), Error);
  CHECK_THROWS_AS(Space({Factor{FactorKind::Affine, 1, {"a"}}, Factor{FactorKind::Affine, 1, {"a"}}}), Error);
  const Space prod = Space::product(Space::affine(1, "t"), Space::affine(1, "t"));
  CHECK(*prod.vars() == std::vector<std::string>{"t", "t_1"});
  CHECK(prod.to_string() == "A^1 x A^1");
}

TEST_CASE("canonical projective form") {
  const Space p2 = Space::projective(2);
  const SpacePoint x(p2, {{q(0), q(3), q(6)}});
  CHECK(x.blocks()[0][0].is_zero());
  CHECK(x.blocks()[0][1] == q(1));
  CHECK(x.blocks()[0][2] == q(2));
  CHECK_THROWS_AS(SpacePoint(p2, {{q(0), q(0), q(0)}}), Error);
  CHECK(SpacePoint(p2, {{q(2), q(4), q(-2)}}).equals(SpacePoint(p2, {{q(-1), q(-2), q(1)}})));
}

TEST_CASE("evaluate_map examples") {
  const PolyMap h = double_cover();
  const Space a1 = h.source();
  const SpacePoint at0 = evaluate_map(h, SpacePoint(a1, {{q(0)}}));
  CHECK(at0.equals(SpacePoint(h.target(), {{q(1), q(0)}})));
  const SpacePoint at1 = evaluate_map(h, SpacePoint(a1, {{q(1)}}));
  CHECK(at1.blocks()[0][0] == q(1));
  CHECK(at1.blocks()[0][1] == q(1, 2));

  std::mt19937_64 rng(3);
  const Space s = Space::product(Space::projective(1, "a"), Space::affine(2, "u"));
  for (int i = 0; i < 10; ++i) {
    const SpacePoint x = random_point(rng, s);
    CHECK(evaluate_map(identity_map(s), x).equals(x));
  }
}

TEST_CASE("evaluation at a base point reports it") {
  const Space a1 = Space::affine(1, "t");
  const PolyMap f(a1, Space::projective(1), {{parse_poly("t^2", a1.vars()), parse_poly("t", a1.vars())}});
  try {
    evaluate_map(f, SpacePoint(a1, {{q(0)}}));
    FAIL("expected a base point");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BasePointHit);
    CHECK(e.witness()["point"]["blocks"][0][0] == "0");
  }
}

TEST_CASE("compose examples") {
  const PolyMap h = double_cover();
  CHECK(compose(h, identity_map(h.target())) == h);

  const PolyMap sq = compose(h, square_map());
  const auto& v = h.source().vars();
  CHECK(sq.block(0)[0] == parse_poly("(t^2+1)^2", v));
  CHECK(sq.block(0)[1] == parse_poly("(t^2+1)*t", v));
  CHECK(sq.block(0)[2] == parse_poly("t^2", v));

  const SpacePoint x(h.source(), {{q(2)}});
  const SpacePoint direct = evaluate_map(sq, x);
  const SpacePoint chained = evaluate_map(square_map(), evaluate_map(h, x));
  const SpacePoint expected(sq.target(), {{q(25), q(10), q(4)}});
  CHECK(direct.equals(expected));
  CHECK(chained.equals(expected));

  CHECK_THROWS_AS(compose(square_map(), h), Error);
}

TEST_CASE("product_map examples") {
  const PolyMap h = double_cover();
  const PolyMap f = product_map(h, identity_map(Space::affine(1, "s")));
  CHECK(f.source().to_string() == "A^1 x A^1");
  CHECK(f.target().to_string() == "P^1 x A^1");
  const SpacePoint img = evaluate_map(f, SpacePoint(f.source(), {{q(3)}, {q(5)}}));
  CHECK(img.equals(SpacePoint(f.target(), {{q(10), q(3)}, {q(5)}})));

  const Space a2 = Space::affine(2, "u");
  const Space p1 = Space::projective(1, "a");
  const PolyMap ii = product_map(identity_map(a2), identity_map(p1));
  CHECK(ii == identity_map(Space::product(a2, p1)));

  const PolyMap hh = product_map(h, h);
  CHECK(*hh.source().vars() == std::vector<std::string>{"t", "t_1"});
}

TEST_CASE("multihomogeneity validation") {
  const Space p1 = Space::projective({"a", "b"});
  const Space p2 = Space::projective(2, "z");
  const auto& v = p1.vars();
  CHECK_NOTHROW(PolyMap(p1, p2, {{parse_poly("a^2", v), parse_poly("a*b", v), parse_poly("b^2", v)}}));
  // One component's degree perturbed.
  CHECK_THROWS_AS(PolyMap(p1, p2, {{parse_poly("a^2", v), parse_poly("a*b", v), parse_poly("b^3", v)}}), Error);
  CHECK_THROWS_AS(PolyMap(p1, p2, {{parse_poly("a^2", v), parse_poly("a*b+b", v), parse_poly("b^2", v)}}), Error);
  // Affine values depending on projective coordinates.
  CHECK_THROWS_AS(PolyMap(p1, Space::affine(1), {{parse_poly("a", v)}}), Error);
  CHECK_NOTHROW(PolyMap(p1, Space::affine(1), {{parse_poly("a", v)}}, "", true));
  CHECK_THROWS_AS(PolyMap(p1, p2, {{parse_poly("a^2", v), parse_poly("a*b", v)}}), Error);

  std::mt19937_64 rng(17);
  const Space src = Space::product(Space::projective(1, "a"), Space::projective(1, "b"));
  for (int i = 0; i < 20; ++i) {
    PolyMap good = random_map(rng, src, p2);
    auto comps = good.components();
    comps[0][rng() % 3] *= MultiPoly::variable(src.vars(), rng() % 4, Q);
    CHECK_THROWS_AS(PolyMap(src, p2, comps), Error);
  }
}

TEST_CASE("projective-representative independence") {
  std::mt19937_64 rng(2025);
  const Space src = Space::product(Space::projective(1, "a"), Space::affine(1, "s"));
  const Space src2 = Space::product(src, Space::projective(2, "c"));
  const Space dst = Space::product(Space::projective(2, "z"), Space::projective(1, "w"));
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const Space& s = (i % 2) ? src : src2;
    const PolyMap f = random_map(rng, s, dst);
    const SpacePoint x = random_point(rng, s);
    std::vector<std::vector<Scalar>> scaled = x.blocks();
    const std::size_t blk = (i % 2) ? 0 : (rng() % 2 ? 0 : 2);
    Scalar lambda = random_scalar(rng, Q);
    if (lambda.is_zero()) lambda = q(7, 3);
    for (auto& c : scaled[blk]) c *= lambda;
    // Bypass canonicalization of the input on purpose: evaluate raw coordinates.
    try {
      const SpacePoint a = evaluate_map(f, x);
      std::vector<Scalar> raw;
      for (const auto& b : scaled) raw.insert(raw.end(), b.begin(), b.end());
      std::vector<std::vector<Scalar>> img;
      for (std::size_t t = 0; t < f.target().num_factors(); ++t) {
        std::vector<Scalar> b;
        for (const auto& p : f.block(t)) b.push_back(p.evaluate(raw));
        img.push_back(std::move(b));
      }
      CHECK(a.equals(SpacePoint(f.target(), img)));
      ++checked;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BasePointHit);
    }
  }
  CHECK(checked > 150);
}

TEST_CASE("compose is associative") {
  std::mt19937_64 rng(4242);
  const Space a2 = Space::affine(2, "x");
  const Space p1 = Space::projective(1, "a");
  const Space p1p1 = Space::product(p1, Space::projective(1, "b"));
  const Space p2 = Space::projective(2, "z");
  for (int trial = 0; trial < 5; ++trial) {
    const PolyMap f = random_map(rng, a2, p1p1);
    const PolyMap g = random_map(rng, p1p1, p2);
    const PolyMap h = random_map(rng, p2, p1);
    const PolyMap left = compose(compose(f, g), h);
    const PolyMap right = compose(f, compose(g, h));
    CHECK(left == right);
    for (int k = 0; k < 20; ++k) {
      const SpacePoint x = random_point(rng, a2);
      try {
        const SpacePoint chained = evaluate_map(h, evaluate_map(g, evaluate_map(f, x)));
        CHECK(evaluate_map(left, x).equals(chained));
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BasePointHit);
      }
    }
  }
}

TEST_CASE("finite field and complex points") {
  const PolyMap h = double_cover();
  const FieldPtr f5 = Field::finite(5);
  const SpacePoint x(h.source(), {{Scalar::from_int(2, f5)}});
  const SpacePoint img = evaluate_map(h, x);
  CHECK(img.blocks()[0][0].is_zero());
  CHECK(img.blocks()[0][1].is_one());
  CHECK(img.field()->tag() == "F_5");

  const SpacePoint z(h.source(), {{Scalar::complex({0.0, 1.0})}});
  const SpacePoint zi = evaluate_map(h, z);
  CHECK(zi.equals(SpacePoint(h.target(), {{Scalar::complex({0.0, 0.0}), Scalar::complex({1.0, 0.0})}})));
  CHECK_FALSE(zi.equals(SpacePoint(h.target(), {{Scalar::complex({1e-6, 0.0}), Scalar::complex({1.0, 0.0})}})));
}

TEST_CASE("JSON round trips") {
  std::mt19937_64 rng(8);
  const Space src = Space::product(Space::projective(1, "a"), Space::affine(2, "s"));
  const Space dst = Space::product(Space::projective(2, "z"), Space::affine(1, "w"));
  const PolyMap f = random_map(rng, src, dst);
  const auto j = map_to_json(f);
  const PolyMap back = map_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back == f);
  CHECK(map_to_json(back).dump() == j.dump());
  CHECK(space_from_json(space_to_json(src)) == src);
  const SpacePoint x = random_point(rng, src);
  CHECK(point_from_json(point_to_json(x), src).equals(x));
  const SpacePoint y(src, {{Scalar::from_int(3, Field::finite(7)), Scalar::from_int(1, Field::finite(7))},
                           {Scalar::from_int(0, Field::finite(7)), Scalar::from_int(6, Field::finite(7))}});
  CHECK(point_from_json(point_to_json(y), src).equals(y));
  CHECK_THROWS_AS(map_from_json(nlohmann::json::parse(R"({"source":{"factors":[]}})")), Error);
}
