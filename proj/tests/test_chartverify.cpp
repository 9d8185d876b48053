#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <random>
#include <set>

#include "pseudochart/chartverify.hpp"
#include "pseudochart/errors.hpp"
#include "test_support.hpp"

using namespace pseudochart;

namespace {

const FieldPtr Q = Field::rationals();
Scalar q(long n, long d = 1) { return Scalar::rational(n, d); }

SpacePoint p1(const Space& s, Scalar a, Scalar b) { return SpacePoint(s, {{std::move(a), std::move(b)}}); }

SpacePoint random_source(const PseudoChart& c, std::mt19937_64& rng) {
  std::vector<Scalar> xs;
  for (std::size_t i = 0; i < c.map.source().num_vars(); ++i) {
    xs.push_back(q(static_cast<long>(rng() % 41) - 20, static_cast<long>(rng() % 9) + 1));
  }
  return SpacePoint(c.map.source(), {xs});
}

bool contains_exact(const FiberReport& f, const std::vector<Scalar>& x) {
  for (const auto& s : f.solutions) {
    if (s == x) return true;
  }
  return false;
}

bool contains_near(const FiberReport& f, const std::vector<Scalar>& x, double tol) {
  for (const auto& s : f.solutions) {
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(s[i].complex_value() - x[i].complex_value()));
    if (d <= tol) return true;
  }
  return false;
}

// (x, y) -> [x : 1], a map whose fibers are lines.
PseudoChart line_projection_control() {
  const Space src = Space::affine(std::vector<std::string>{"x", "y"});
  const Space dst = Space::projective(1, "y");
  const MultiPoly x = MultiPoly::variable(src.vars(), 0, Q);
  return PseudoChart{"line_projection", PolyMap(src, dst, {{x, MultiPoly::constant(src.vars(), q(1))}}), 0, {}};
}

// t -> [t : 1], which misses [1:0].
PseudoChart affine_line_control() {
  const Space src = Space::affine(1);
  const Space dst = Space::projective(1, "y");
  const MultiPoly t = MultiPoly::variable(src.vars(), 0, Q);
  return PseudoChart{"affine_line", PolyMap(src, dst, {{t, MultiPoly::constant(src.vars(), q(1))}}), 0, {}};
}

}  // namespace

TEST_CASE("double cover fibers") {
  const PseudoChart h = p1_double_cover();
  const Space& y = h.map.target();
  // 2t^2 - 5t + 2 = 0 has roots 2 and 1/2.
  FiberReport f = fiber(h, p1(y, q(5), q(2)));
  CHECK(f.backend == "structured_exact");
  CHECK(f.closure_cardinality == 2);
  CHECK(f.solutions.size() == 2);
  CHECK(contains_exact(f, {q(2)}));
  CHECK(contains_exact(f, {q(1, 2)}));
  // [1:0] has the single preimage t = 0.
  f = fiber(h, p1(y, q(1), q(0)));
  CHECK(f.closure_cardinality == 1);
  CHECK(contains_exact(f, {q(0)}));
  // Ramified: t^2 - 2t + 1.
  f = fiber(h, p1(y, q(2), q(1)));
  CHECK(f.closure_cardinality == 1);
  // No rational roots, two over the closure.
  f = fiber(h, p1(y, q(1), q(1)));
  CHECK(f.closure_cardinality == 2);
  CHECK(f.solutions.empty());
  // Numeric backend agrees, and reports the double root's multiplicity.
  f = fiber(h, p1(y, q(2), q(1)), {Backend::StructuredNumeric});
  CHECK(f.closure_cardinality == 1);
  CHECK(f.notes["multiplicities"] == nlohmann::json::array({2}));
  f = fiber(h, p1(y, q(1), q(1)), {Backend::StructuredNumeric});
  CHECK(f.closure_cardinality == 2);
}

TEST_CASE("cover_product_p1(2) fiber over the corner point") {
  const PseudoChart c = cover_product_p1(2);
  const SpacePoint y(c.map.target(), {{q(1), q(0)}, {q(1), q(0)}});
  for (Backend b : {Backend::StructuredExact, Backend::StructuredNumeric, Backend::Generic}) {
    const FiberReport f = fiber(c, y, {b});
    CHECK(f.closure_cardinality == 1);
    REQUIRE(f.solutions.size() == 1);
    CHECK(f.solutions[0][0].magnitude() == doctest::Approx(0));
    CHECK(f.solutions[0][1].magnitude() == doctest::Approx(0));
  }
}

TEST_CASE("cover_p2 fiber over a random rational target has 8 points") {
  const PseudoChart c = cover_p2();
  const SpacePoint y(c.map.target(), {{q(3, 7), q(-11, 5), q(13, 2)}});
  CHECK(fiber(c, y).closure_cardinality == 8);
  const FiberReport f = fiber(c, y, {Backend::StructuredNumeric});
  CHECK(f.closure_cardinality == 8);
  CHECK(f.solutions.size() == 8);
  // Independent route: elimination on the map alone.
  CHECK(generic_fiber(c.map, y).closure_cardinality == 8);
  // Every listed point maps back onto y.
  for (const auto& s : f.solutions) {
    const SpacePoint img = evaluate_map(c.map, SpacePoint(c.map.source(), {s}));
    const auto a = img.blocks()[0], b = convert_all(y.blocks()[0], Field::complex());
    const double scale = std::abs(a[0].complex_value()) + std::abs(a[1].complex_value()) + std::abs(a[2].complex_value());
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const auto cross = a[i].complex_value() * b[j].complex_value() - a[j].complex_value() * b[i].complex_value();
        CHECK(std::abs(cross) <= 1e-8 * scale * 20);
      }
    }
  }
}

TEST_CASE("brute backend on cover_product_p1(2) over F_11") {
  const PseudoChart c = cover_product_p1(2);
  const BruteIndex index(c.map, Field::finite(11));
  CHECK(index.enumerated() == 121);
  const FieldPtr f11 = Field::finite(11);
  std::set<std::size_t> sizes;
  std::size_t total = 0;
  const auto pts = all_points_p1(Space::projective(1), f11);
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      const SpacePoint y(c.map.target(), {a.blocks()[0], b.blocks()[0]});
      const std::size_t n = index.preimages(y).size();
      sizes.insert(n);
      total += n;
      FiberReport r = fiber(c, y, {Backend::BruteFiniteField, 11, 1});
      CHECK(r.closure_cardinality == static_cast<long>(n));
      CHECK(r.cardinality_is_lower_bound);
    }
  }
  CHECK(total == 121);
  for (auto s : sizes) CHECK((s == 0 || s == 1 || s == 2 || s == 4));
  CHECK(sizes.count(4) == 1);
}

TEST_CASE("brute and structured backends agree over F_{p^2}") {
  for (std::uint64_t p : {11, 13}) {
    const AgreementReport r = backend_agreement(cover_product_p1(2), p, 2);
    CHECK(r.exact_comparison);
    CHECK(r.targets == static_cast<int>((p + 1) * (p + 1)));
    CHECK(r.mismatches == 0);
  }
  const AgreementReport r = backend_agreement(p1_double_cover(), 101, 2);
  CHECK(r.pass());
}

TEST_CASE("exact base-field solutions over F_9 match brute enumeration") {
  const PseudoChart c = cover_product_p1(2);
  const FieldPtr f9 = Field::finite(3, 2);
  const BruteIndex index(c.map, f9);
  for (const auto& a : all_points_p1(Space::projective(1), f9)) {
    for (const auto& b : all_points_p1(Space::projective(1), f9)) {
      const SpacePoint y(c.map.target(), {a.blocks()[0], b.blocks()[0]});
      const FiberReport f = fiber(c, y);
      const auto& brute = index.preimages(y);
      CHECK(f.solutions.size() == brute.size());
      for (const auto& x : brute) CHECK(contains_exact(f, x));
      CHECK(f.closure_cardinality >= static_cast<long>(brute.size()));
    }
  }
}

TEST_CASE("fiber cardinality never exceeds the claimed degree") {
  std::vector<PseudoChart> charts{p1_double_cover(), cover_product_p1(2), cover_product_p1(3), cover_p2(),
                                  cover_pn(2, 1)};
  for (const auto& c : charts) {
    const DegreeReport r = generic_degree(c, 12, 7);
    for (long n : r.cardinalities) CHECK(n <= c.claimed_degree);
    CHECK(r.inferred == c.claimed_degree);
  }
}

TEST_CASE("generic degree examples") {
  CHECK(generic_degree(p1_double_cover(), 20, 1).inferred == 2);
  const DegreeReport p2 = generic_degree(cover_p2(), 25, 3);
  CHECK(p2.inferred == 8);
  CHECK_FALSE(p2.non_generic_sampling);
  const DegreeReport p3 = generic_degree(cover_pn(3, 1), 10, 5);
  CHECK(p3.inferred == 48);
  CHECK_FALSE(p3.non_generic_sampling);
  CHECK_THROWS_AS(generic_degree(p1_double_cover(), 5, 1), Error);
}

TEST_CASE("projected Segre fibers have n! points") {
  for (int n : {2, 3}) {
    const Construction proj = random_linear_projection(n, 11);
    const Construction seg = segre(n);
    const Provenance prov{"compose", nlohmann::json::object(), {seg.provenance, proj.provenance}};
    const Construction c{realize(prov), prov};
    const DegreeReport r = generic_degree(c, 10, 2);
    CHECK(r.inferred == (n == 2 ? 2 : 6));
  }
}

TEST_CASE("fiber contains the source point") {
  std::mt19937_64 rng(99);
  for (const auto& c : {p1_double_cover(), cover_product_p1(2), cover_p2()}) {
    for (int i = 0; i < 100; ++i) {
      const SpacePoint x = random_source(c, rng);
      SpacePoint y = x;
      try {
        y = evaluate_map(c.map, x);
      } catch (const Error&) {
        continue;
      }
      const FiberReport f = fiber(c, y, {Backend::StructuredExact});
      CHECK(contains_exact(f, x.coordinates()));
    }
  }
  for (const auto& c : {cover_p2(), cover_pn(2, 1), cover_pn(3, 1)}) {
    const int count = c.map.source().num_vars() == 3 ? 20 : 100;
    for (int i = 0; i < count; ++i) {
      const SpacePoint x = random_source(c, rng);
      const FiberReport f = fiber(c, evaluate_map(c.map, x), {Backend::StructuredNumeric});
      CHECK(contains_near(f, x.coordinates(), 1e-6));
    }
  }
}

TEST_CASE("exact and numeric backends agree on image points") {
  std::mt19937_64 rng(3);
  const PseudoChart c = cover_pn(2, 1);
  for (int i = 0; i < 30; ++i) {
    const SpacePoint y = evaluate_map(c.map, random_source(c, rng));
    long exact = -1;
    try {
      exact = fiber(c, y, {Backend::StructuredExact}).closure_cardinality;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Unsupported);
      continue;
    }
    CHECK(exact == fiber(c, y, {Backend::StructuredNumeric}).closure_cardinality);
  }
}

TEST_CASE("base-point certificates") {
  BasePointCertificate h = check_no_base_points(p1_double_cover());
  CHECK(h.certified);
  CHECK(h.to_json().dump().find("\"resultant\":\"1\"") != std::string::npos);

  const Space a1 = Space::affine(1);
  const MultiPoly t = MultiPoly::variable(a1.vars(), 0, Q);
  const PolyMap bad(a1, Space::projective(1, "y"), {{t * t, t}});
  const BasePointCertificate w = check_no_base_points(bad);
  CHECK_FALSE(w.certified);
  CHECK_FALSE(w.inconclusive);
  CHECK(w.witness["common_zeros"]["points"] == nlohmann::json::array({nlohmann::json::array({0.0})}));

  for (const auto& c : {cover_product_p1(2), cover_p2(), cover_pn(2, 1), cover_pn(3, 1)}) {
    const BasePointCertificate cert = check_no_base_points(c);
    CHECK_MESSAGE(cert.certified, c.name);
  }
  for (const auto& c : bundle_atlas(1, {0, 2}).charts) CHECK(check_no_base_points(c).certified);

  // A chart whose map no longer matches its provenance.
  PseudoChart corrupted = p1_double_cover();
  corrupted.map = bad;
  const BasePointCertificate cc = check_no_base_points(corrupted);
  CHECK_FALSE(cc.certified);
  CHECK_FALSE(cc.witness.is_null());
}

TEST_CASE("surjectivity scans") {
  const PseudoChart h = p1_double_cover();
  const SurjectivityCertificate all = surjectivity_scan(h, all_points_p1(h.map.target(), Field::finite(101)));
  CHECK(all.targets.size() == 102);
  CHECK(all.surjective_on_tested);

  const PseudoChart c = cover_p2();
  const auto strata = standard_strata(c.map.target(), 30, 30, 4);
  CHECK(strata.size() == 63);
  CHECK(surjectivity_scan(c, strata).surjective_on_tested);

  const PseudoChart line = affine_line_control();
  const SurjectivityCertificate miss =
      surjectivity_scan(line, {p1(line.map.target(), q(1), q(0)), p1(line.map.target(), q(3), q(1))});
  CHECK_FALSE(miss.surjective_on_tested);
  CHECK(miss.witness["eliminant"] == "1");
}

TEST_CASE("finite-fiber scans") {
  const FiniteFiberReport h = finite_fiber_scan(p1_double_cover(), 20, 1);
  CHECK(h.pass);
  CHECK(h.max_cardinality == 2);
  CHECK(finite_fiber_scan(cover_p2(), 10, 1).pass);
  const FiniteFiberReport line = finite_fiber_scan(line_projection_control(), 10, 1);
  CHECK_FALSE(line.pass);
  CHECK_FALSE(line.witness.is_null());
}

TEST_CASE("degree multiplicativity") {
  const MultiplicativityReport a = degree_multiplicativity_check(cover_product_p1(2), sym2_cover(), 10, 1);
  CHECK(a.inner_degree == 4);
  CHECK(a.outer_degree == 2);
  CHECK(a.composite_degree == 8);
  CHECK(a.agrees);

  const Space p1s = Space::projective(1, "y");
  const Construction id{identity_map(p1s), Provenance{"identity", {{"space", space_to_json(p1s)}}, {}}};
  const MultiplicativityReport b = degree_multiplicativity_check(p1_double_cover(), id, 10, 1);
  CHECK(b.composite_degree == 2);
  CHECK(b.agrees);

  const Construction proj = random_linear_projection(2, 1);
  const Provenance sp{"compose", nlohmann::json::object(), {segre(2).provenance, proj.provenance}};
  const MultiplicativityReport c = degree_multiplicativity_check(cover_product_p1(2), {realize(sp), sp}, 10, 1);
  CHECK(c.outer_degree == 2);
  CHECK(c.composite_degree == 8);
  CHECK(c.agrees);
}

TEST_CASE("bundle atlas coverage") {
  const BundleAtlas a = bundle_atlas(1, {0, 2});
  for (const auto& c : a.charts) CHECK(generic_degree(c, 10, 1).inferred == 2);
  const CoverageReport r = atlas_coverage(a, 200, 1);
  CHECK(r.pass());
  CHECK(atlas_coverage(bundle_atlas(1, {0, 0}), 200, 2).pass());
}

TEST_CASE("reports do not depend on the thread count") {
  auto run = [] {
    return generic_degree(cover_p2(), 12, 9).to_json().dump() +
           surjectivity_scan(cover_p2(), standard_strata(cover_p2().map.target(), 6, 6, 2)).to_json().dump();
  };
  setenv("PSEUDOCHART_THREADS", "1", 1);
  const std::string one = run();
  setenv("PSEUDOCHART_THREADS", "4", 1);
  const std::string four = run();
  unsetenv("PSEUDOCHART_THREADS");
  CHECK(one == four);
}

TEST_CASE("backend names and JSON") {
  for (Backend b : {Backend::Auto, Backend::StructuredExact, Backend::StructuredNumeric, Backend::BruteFiniteField,
                    Backend::Generic}) {
    CHECK(backend_from_name(backend_name(b)) == b);
  }
  CHECK_THROWS_AS(backend_from_name("magic"), Error);
  const auto j = fiber(p1_double_cover(), p1(Space::projective(1, "y"), q(5), q(2))).to_json();
  CHECK(j["closure_cardinality"] == 2);
  CHECK(j["solutions"].size() == 2);
}
