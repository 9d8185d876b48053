#include <gmpxx.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "pseudochart/chartctl.hpp"
#include "pseudochart/chartverify.hpp"
#include "pseudochart/obstruct.hpp"

using namespace pseudochart;
using nlohmann::json;

namespace {

const FieldPtr Q = Field::rationals();

struct Check {
  bool pass = true;
  std::ostringstream detail;
  std::set<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.insert(what).second) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<void(Check&)> body;
};

json load_data(const std::string& rel) {
  std::ifstream in(std::string(PSEUDOCHART_DATA_DIR) + "/" + rel);
  return json::parse(in);
}

long random_int(std::mt19937_64& rng, long range) { return static_cast<long>(rng() % (2 * range + 1)) - range; }

SpacePoint random_point(std::mt19937_64& rng, const Space& s) {
  std::vector<std::vector<Scalar>> blocks;
  for (const auto& f : s.factors()) {
    std::vector<Scalar> b;
    bool nonzero = false;
    for (std::size_t i = 0; i < f.num_vars(); ++i) {
      const long v = random_int(rng, 20);
      nonzero = nonzero || v != 0;
      b.push_back(Scalar::rational(v, static_cast<long>(rng() % 7) + 1));
    }
    if (f.projective() && !nonzero) b[0] = Scalar::rational(1);
    blocks.push_back(std::move(b));
  }
  return SpacePoint(s, std::move(blocks));
}

RunConfig verify_config(std::uint64_t seed, int samples) {
  RunConfig cfg;
  cfg.subcommand = "verify";
  cfg.seed = seed;
  cfg.samples = samples;
  return cfg;
}

RunConfig construct_config(const std::string& what, int n = 2, std::uint64_t seed = 1) {
  RunConfig cfg;
  cfg.subcommand = "construct";
  cfg.construction = what;
  cfg.n = n;
  cfg.seed = seed;
  return cfg;
}

// t -> [t : 1], which misses [1:0].
PseudoChart affine_line_control() {
  const Space src = Space::affine(1);
  const Space dst = Space::projective(1, "y");
  const MultiPoly t = MultiPoly::variable(src.vars(), 0, Q);
  return PseudoChart{"affine_line", PolyMap(src, dst, {{t, MultiPoly::constant(src.vars(), Scalar::rational(1))}}), 0, {}};
}

void criterion_p2_degree(Check& o) {
  const CommandResult built = cmd_construct(construct_config("p2"));
  const CommandResult v = cmd_verify(json::parse(built.document.dump()), verify_config(1, 25));
  const json& deg = v.document["suites"]["degree"];
  o.expect(v.exit_code == kExitOk, "verify exit code " + std::to_string(v.exit_code));
  o.expect(deg["targets"].size() >= 25, "fewer than 25 targets");
  o.expect(deg["measured"] == 8, "measured degree " + deg["measured"].dump());
  o.detail << "measured degree " << deg["measured"] << " at " << deg["targets"].size() << " targets";
}

void criterion_p1p1_degree(Check& o) {
  const PseudoChart c = cover_product_p1(2);
  const DegreeReport deg = generic_degree(c, 25, 1);
  o.expect(deg.inferred == 4, "measured degree " + std::to_string(deg.inferred));
  const AgreementReport ag = backend_agreement(c, 11, 2);
  o.expect(ag.pass(), std::to_string(ag.mismatches) + " backend mismatches");
  o.expect(ag.targets == 144, "expected 144 targets of P1xP1(F_11)");
  o.expect(ag.exact_comparison, "F_121 does not split the fibers");
  o.detail << "measured degree " << deg.inferred << "; brute over F_121 agrees on " << ag.targets - ag.mismatches
           << "/" << ag.targets << " targets";
}

void criterion_segre(Check& o) {
  for (int n : {2, 3}) {
    const long expected = n == 2 ? 2 : 6;
    int agreeing = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Construction proj = random_linear_projection(n, seed);
      const Provenance prov{"compose", json::object(), {segre(n).provenance, proj.provenance}};
      const Construction c{realize(prov), prov};
      const DegreeReport r = generic_degree(c, 10, seed);
      if (r.inferred == expected) ++agreeing;
    }
    o.expect(agreeing == 10, "n=" + std::to_string(n) + ": " + std::to_string(agreeing) + "/10 projections");
    o.detail << (n == 2 ? "" : "; ") << "n=" << n << ": fiber count " << expected << " for " << agreeing
             << "/10 certified projections";
  }
}

void criterion_pn(Check& o) {
  const long d2 = generic_degree(cover_pn(2, 1), 25, 1).inferred;
  const long d3 = generic_degree(cover_pn(3, 1), 25, 1).inferred;
  o.expect(d2 == 8, "n=2 measured " + std::to_string(d2));
  o.expect(d3 == 48, "n=3 measured " + std::to_string(d3));
  RunConfig cfg;
  cfg.subcommand = "erratum";
  cfg.n = 3;
  cfg.samples = 10;
  const json doc = cmd_erratum(cfg).document;
  for (const auto& row : doc["rows"]) {
    if (row["family"] != "projective_space") continue;
    if (row["n"] == 2) {
      o.expect(row["formula_value"] == 4 && row["measured"] == 8, "erratum n=2 row");
      o.expect(row["single_chart_statement"]["agrees_with_measured"] == true, "single-chart cross-check");
    }
    if (row["n"] == 3) o.expect(row["formula_value"] == 24 && row["measured"] == 48, "erratum n=3 row");
  }
  o.detail << "measured " << d2 << " and " << d3 << "; formula values 4 and 24 recorded alongside";
}

void criterion_surjectivity(Check& o) {
  const PseudoChart h = p1_double_cover();
  std::vector<SpacePoint> line = all_points_p1(h.map.target(), Field::finite(101));
  line.push_back(SpacePoint(h.map.target(), {{Scalar::rational(1), Scalar::rational(0)}}));
  const SurjectivityCertificate a = surjectivity_scan(h, line);
  o.expect(a.surjective_on_tested, "P1 cover missed a point");

  const PseudoChart c = cover_p2();
  const auto strata = standard_strata(c.map.target(), 30, 30, 1);
  o.expect(strata.size() == 63, "expected 63 strata points");
  const SurjectivityCertificate b = surjectivity_scan(c, strata);
  o.expect(b.surjective_on_tested, "P2 chart missed a point");

  const PseudoChart ctl = affine_line_control();
  const SurjectivityCertificate miss =
      surjectivity_scan(ctl, {SpacePoint(ctl.map.target(), {{Scalar::rational(1), Scalar::rational(0)}})});
  o.expect(!miss.surjective_on_tested && !miss.witness.is_null(), "control map not refuted");
  o.detail << line.size() << " P1 targets, " << strata.size() << " P2 strata points; control refuted with eliminant "
           << miss.witness.value("eliminant", json()).dump();
}

void criterion_base_points(Check& o) {
  const Space a1 = Space::affine(1);
  const MultiPoly t = MultiPoly::variable(a1.vars(), 0, Q);
  const MultiPoly res = resultant(t * t + MultiPoly::constant(a1.vars(), Scalar::rational(1)), t, 0);
  o.expect(res.is_constant() && res.constant_value() == Scalar::rational(1), "Res_t(t^2+1, t) = " + res.to_string());

  std::vector<PseudoChart> charts{p1_double_cover(), cover_product_p1(2), cover_product_p1(3), cover_p2(),
                                  cover_pn(2, 1), cover_pn(3, 1)};
  for (const auto& c : bundle_atlas(1, {0, 2}).charts) charts.push_back(c);
  for (const auto& c : bundle_atlas(2, {0, 1, 1}).charts) charts.push_back(c);
  int certified = 0;
  for (const auto& c : charts) {
    const BasePointCertificate cert = check_no_base_points(c);
    const bool ok = cert.certified && cert.method.find("chained") != std::string::npos;
    o.expect(ok, c.name + " not certified");
    certified += ok;
  }

  json doc = cmd_construct(construct_config("p1")).document;
  doc["chart"]["map"]["components"][0][1] = json{{"terms", json::array()}};
  const CommandResult v = cmd_verify(doc, verify_config(1, 25));
  o.expect(v.exit_code == kExitVerificationFailure, "corrupted chart exit code " + std::to_string(v.exit_code));
  o.expect(v.document.contains("witness"), "corrupted chart without witness");
  o.detail << "resultant " << res.to_string() << "; " << certified << "/" << charts.size()
           << " charts certified; corrupted chart exit " << v.exit_code;
}

void criterion_obstruction(Check& o) {
  const json corpus = load_data("curves.json");
  o.expect(corpus.size() >= 30, "corpus too small");
  int obstructed = 0;
  for (const auto& e : corpus) {
    const PlaneCurve c = PlaneCurve::parse(e["curve"]);
    const bool smooth = e["smooth"];
    const Verdict v = curve_complement_verdict(c);
    const bool want = smooth && c.degree() >= 3;
    o.expect(c.degree() <= 4, e["name"].get<std::string>() + " has degree above 4");
    o.expect((v.outcome == Outcome::Obstructed) == want, e["name"].get<std::string>());
    obstructed += v.outcome == Outcome::Obstructed;
  }
  const Verdict fermat = curve_complement_verdict(PlaneCurve::parse("x^3+y^3+z^3"));
  const Verdict nodal = curve_complement_verdict(PlaneCurve::parse("y^2*z-x^3-x^2*z"));
  const Verdict cusp = curve_complement_verdict(PlaneCurve::parse("y^2*z-x^3"));
  o.expect(fermat.outcome == Outcome::Obstructed, "Fermat cubic");
  o.expect(nodal.outcome == Outcome::Inconclusive, "nodal cubic");
  o.expect(cusp.outcome == Outcome::Inconclusive, "cuspidal cubic");
  o.detail << corpus.size() << " curves, " << obstructed << " obstructed; Fermat OBSTRUCTED, nodal and cuspidal "
           << "INCONCLUSIVE";
}

void criterion_boundary(Check& o) {
  const auto verdict = [](const std::string& file) {
    return boundary_verdict(SurfaceModel::from_json(load_data("surfaces/" + file)));
  };
  const Verdict one = verdict("p1xp1_one_ruling.json");
  const Verdict two = verdict("p1xp1_two_rulings.json");
  const Verdict def = verdict("p1xp1_rank_deficient.json");
  o.expect(one.outcome == Outcome::Obstructed && one.reason == Reason::TooFewComponents, "one ruling");
  o.expect(two.outcome == Outcome::Inconclusive, "two rulings");
  o.expect(def.outcome == Outcome::Obstructed && def.reason == Reason::ClassesDoNotGenerate, "rank deficient");

  gmp_randclass rng(gmp_randinit_default);
  rng.seed(2024);
  std::vector<std::uint64_t> primes;
  for (int i = 0; i < 3; ++i) {
    mpz_class p = rng.get_z_bits(30) + (mpz_class(1) << 30);
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    primes.push_back(p.get_ui());
  }
  int matrices = 0;
  for (const auto& m : catalog()) {
    const RationalMatrix cm = class_matrix(m);
    const long r = rank_q(cm);
    for (auto p : primes) o.expect(rank_mod_p(cm, p) == r, m.name + " rank mod " + std::to_string(p));
    ++matrices;
  }
  o.detail << "TOO_FEW_COMPONENTS, INCONCLUSIVE, CLASSES_DO_NOT_GENERATE; rank agrees on " << matrices
           << " catalog matrices at primes " << primes[0] << ", " << primes[1] << ", " << primes[2];
}

void criterion_properties(Check& o) {
  std::mt19937_64 rng(9);
  // Projective scaling: rescaling a representative never changes the image.
  const Construction proj2 = random_linear_projection(2, 1);
  const std::vector<PolyMap> projective_maps{segre(2).map, segre(3).map, sym2_cover().map, proj2.map};
  int scaled = 0;
  for (int i = 0; i < 200; ++i) {
    const PolyMap& f = projective_maps[static_cast<std::size_t>(i) % projective_maps.size()];
    const SpacePoint x = random_point(rng, f.source());
    std::vector<std::vector<Scalar>> blocks = x.blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (!f.source().factor(b).projective()) continue;
      long l = 0;
      while (l == 0) l = random_int(rng, 9);
      const Scalar lambda = Scalar::rational(l, static_cast<long>(rng() % 5) + 1);
      for (auto& c : blocks[b]) c *= lambda;
    }
    try {
      const SpacePoint a = evaluate_map(f, x);
      o.expect(a.equals(evaluate_map(f, SpacePoint(f.source(), blocks))), "scaling changed the image");
      ++scaled;
    } catch (const Error& e) {
      o.expect(e.code() == ErrorCode::BasePointHit, e.what());
      ++scaled;
    }
  }
  o.expect(scaled == 200, "scaling cases");

  // Composition commutes with evaluation.
  const PolyMap lines = cover_product_p1(2).map;
  const std::vector<std::pair<PolyMap, PolyMap>> pairs{
      {lines, segre(2).map}, {lines, sym2_cover().map}, {cover_product_p1(3).map, segre(3).map},
      {segre(2).map, random_linear_projection(2, 3).map}};
  int composed = 0;
  for (int i = 0; i < 200; ++i) {
    const auto& [f, g] = pairs[static_cast<std::size_t>(i) % pairs.size()];
    const PolyMap fg = compose(f, g);
    const SpacePoint x = random_point(rng, f.source());
    try {
      o.expect(evaluate_map(fg, x).equals(evaluate_map(g, evaluate_map(f, x))), "composition mismatch");
      ++composed;
    } catch (const Error& e) {
      o.expect(e.code() == ErrorCode::BasePointHit, e.what());
    }
  }

  // Fiber over the image of a source point contains that point.
  std::vector<PseudoChart> charts{p1_double_cover(), cover_product_p1(2), cover_p2(), cover_pn(2, 1), cover_pn(3, 1)};
  for (const auto& c : bundle_atlas(1, {0, 2}).charts) charts.push_back(c);
  int round_trips = 0;
  for (const auto& c : charts) {
    for (int i = 0; i < 100; ++i) {
      const SpacePoint x = random_point(rng, c.map.source());
      const FiberReport f = fiber(c, evaluate_map(c.map, x));
      bool found = false;
      for (const auto& s : f.solutions) {
        double d = 0;
        for (std::size_t k = 0; k < s.size(); ++k) {
          d = std::max(d, std::abs(s[k].complex_value() - x.coordinates()[k].complex_value()));
        }
        found = found || d <= 1e-6;
      }
      o.expect(found, c.name + " lost its source point");
      round_trips += found;
    }
  }

  // One thread versus several.
  const json doc = cmd_construct(construct_config("p2")).document;
  const json doc3 = cmd_construct(construct_config("pn", 3, 1)).document;
  setenv("PSEUDOCHART_THREADS", "1", 1);
  const std::string one = cmd_verify(doc, verify_config(3, 25)).document.dump() +
                          cmd_verify(doc3, verify_config(3, 10)).document.dump();
  setenv("PSEUDOCHART_THREADS", "8", 1);
  const std::string many = cmd_verify(doc, verify_config(3, 25)).document.dump() +
                           cmd_verify(doc3, verify_config(3, 10)).document.dump();
  unsetenv("PSEUDOCHART_THREADS");
  o.expect(one == many, "reports differ between 1 and 8 threads");
  o.detail << "scaling " << scaled << ", composition " << composed << ", round trips " << round_trips << " over "
           << charts.size() << " charts, thread determinism " << (one == many ? "identical" : "differs");
}

void criterion_bundle(Check& o) {
  const BundleAtlas atlas = bundle_atlas(1, {0, 2});
  o.expect(atlas.charts.size() == 2, "expected n+1 = 2 charts");
  const CommandResult v = verify_atlas(atlas, verify_config(1, 25));
  for (const auto& c : v.document["charts"]) {
    o.expect(c["suites"]["degree"]["measured"] == 2, c["chart"].get<std::string>() + " degree");
  }
  const json& cov = v.document["coverage"];
  o.expect(v.exit_code == kExitOk, "atlas verification exit " + std::to_string(v.exit_code));
  o.expect(cov["samples"] == 200 && cov["covered"] == 200, "coverage " + cov.dump());
  o.detail << atlas.charts.size() << " charts of degree 2; " << cov["covered"] << "/" << cov["samples"]
           << " bundle points covered";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "P2 chart degree", 30, criterion_p2_degree},
      {2, "P1xP1 chart degree and brute agreement", 60, criterion_p1p1_degree},
      {3, "projected Segre degree", 120, criterion_segre},
      {4, "Pn chart degrees and erratum", 300, criterion_pn},
      {5, "surjectivity certificates", 120, criterion_surjectivity},
      {6, "base-point certificates", 120, criterion_base_points},
      {7, "obstruction corpus", 60, criterion_obstruction},
      {8, "boundary-count and class-rank checks", 60, criterion_boundary},
      {9, "property suites", 300, criterion_properties},
      {10, "bundle atlas", 120, criterion_bundle},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Check o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.expect(secs <= c.limit_seconds, "runtime above " + std::to_string(static_cast<int>(c.limit_seconds)) + " s");
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << o.detail.str()
              << " [" << std::fixed << std::setprecision(2) << secs << " s]\n";
  }
  return failures == 0 ? 0 : 1;
}
