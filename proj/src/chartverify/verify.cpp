#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "pseudochart/chartverify.hpp"
#include "pseudochart/elimination.hpp"
#include "pseudochart/errors.hpp"
#include "solver.hpp"

namespace pseudochart {

using nlohmann::json;

unsigned worker_threads() {
  if (const char* env = std::getenv("PSEUDOCHART_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

Scalar random_rational(std::mt19937_64& rng) {
  const long num = static_cast<long>(rng() % 2001) - 1000;
  const long den = static_cast<long>(rng() % 1000) + 1;
  return Scalar::rational(num, den);
}

Scalar int_power(const Scalar& x, int e) {
  return e >= 0 ? x.pow(static_cast<std::uint64_t>(e)) : x.pow(static_cast<std::uint64_t>(-e)).inverse();
}

long random_small(std::mt19937_64& rng, long bound) {
  return static_cast<long>(rng() % static_cast<std::uint64_t>(2 * bound + 1)) - bound;
}

SpacePoint random_point(const Space& s, std::mt19937_64& rng) {
  std::vector<std::vector<Scalar>> blocks;
  for (const auto& f : s.factors()) {
    std::vector<Scalar> b;
    bool nonzero = false;
    while (!nonzero || b.empty()) {
      b.clear();
      for (std::size_t i = 0; i < f.num_vars(); ++i) {
        b.push_back(random_rational(rng));
        nonzero = nonzero || !b.back().is_zero();
      }
      if (!f.projective()) nonzero = true;
    }
    blocks.push_back(std::move(b));
  }
  return SpacePoint(s, std::move(blocks));
}

// Even indices: images of random source points; odd: independent random targets.
std::vector<SpacePoint> sample_targets(const PolyMap& map, int samples, std::uint64_t seed) {
  std::vector<SpacePoint> out;
  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    if (i % 2 == 1) {
      out.push_back(random_point(map.target(), rng));
      continue;
    }
    while (true) {
      try {
        out.push_back(evaluate_map(map, random_point(map.source(), rng)));
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BasePointHit) throw;
      }
    }
  }
  return out;
}

DegreeReport degree_over(const PolyMap& map, const std::function<FiberReport(const SpacePoint&)>& solve, int samples,
                         std::uint64_t seed, const FiberOptions& opt) {
  if (samples < 10) throw Error(ErrorCode::InvalidArgument, "generic degree needs at least 10 samples");
  if (opt.backend == Backend::BruteFiniteField) {
    throw Error(ErrorCode::Unsupported, "generic degree samples rational targets; use a structured or generic backend");
  }
  const auto targets = sample_targets(map, samples, seed);
  std::vector<FiberReport> reports(targets.size());
  parallel_for(targets.size(), [&](std::size_t i) { reports[i] = solve(targets[i]); });

  DegreeReport r;
  r.seed = seed;
  r.backend = backend_name(opt.backend);
  json used = json::array();
  for (const auto& f : reports) {
    r.targets.push_back(f.target);
    r.cardinalities.push_back(f.closure_cardinality);
    if (std::find(used.begin(), used.end(), f.backend) == used.end()) used.push_back(f.backend);
  }
  if (opt.backend == Backend::Auto && !used.empty()) r.backend = used.size() == 1 ? used[0].get<std::string>() : used.dump();
  r.inferred = *std::max_element(r.cardinalities.begin(), r.cardinalities.end());
  const auto hits = std::count(r.cardinalities.begin(), r.cardinalities.end(), r.inferred);
  r.attained_fraction = static_cast<double>(hits) / static_cast<double>(samples);
  r.non_generic_sampling = r.attained_fraction < 0.8;
  return r;
}

// Affine charts of a product of affine and projective factors.
struct AffinePiece {
  json label;
  VarSet vars;
  std::vector<MultiPoly> images;  // one per source variable
};

std::vector<AffinePiece> affine_pieces(const Space& s, const FieldPtr& field) {
  std::vector<std::size_t> proj;
  for (std::size_t i = 0; i < s.num_factors(); ++i) {
    if (s.factor(i).projective()) proj.push_back(i);
  }
  std::vector<std::size_t> choice(proj.size(), 0);
  std::vector<AffinePiece> out;
  while (true) {
    std::vector<std::string> names;
    std::vector<int> slot;  // -1: set to 1, else new variable index
    json label = json::array();
    std::size_t pi = 0;
    for (std::size_t f = 0; f < s.num_factors(); ++f) {
      const auto& fac = s.factor(f);
      const bool is_proj = fac.projective();
      for (std::size_t k = 0; k < fac.num_vars(); ++k) {
        if (is_proj && k == choice[pi]) {
          slot.push_back(-1);
        } else {
          slot.push_back(static_cast<int>(names.size()));
          names.push_back(fac.vars[k]);
        }
      }
      if (is_proj) label.push_back(fac.vars[choice[pi++]] + "=1");
    }
    AffinePiece piece{label, make_vars(names), {}};
    for (int sl : slot) {
      piece.images.push_back(sl < 0 ? MultiPoly::constant(piece.vars, Scalar::one(field))
                                    : MultiPoly::variable(piece.vars, static_cast<std::size_t>(sl), field));
    }
    out.push_back(std::move(piece));
    std::size_t k = proj.size();
    while (k > 0 && ++choice[k - 1] == s.factor(proj[k - 1]).num_vars()) choice[--k] = 0;
    if (k == 0) break;
  }
  return out;
}

void direct_elimination(const PolyMap& f, const EliminationBudget& budget, BasePointCertificate& cert) {
  bool any_projective = false;
  for (std::size_t b = 0; b < f.target().num_factors(); ++b) {
    if (!f.target().factor(b).projective()) continue;
    any_projective = true;
    for (const auto& piece : affine_pieces(f.source(), f.field())) {
      std::vector<MultiPoly> polys;
      for (const auto& c : f.block(b)) {
        MultiPoly p = c.substitute(piece.images, piece.vars);
        if (!p.is_zero()) polys.push_back(std::move(p));
      }
      const std::size_t nv = piece.vars->size();
      json ev{{"target_block", b}, {"chart", piece.label}};
      auto fail = [&](json zeros) {
        cert.certified = false;
        cert.witness = {{"target_block", b}, {"chart", piece.label}, {"common_zeros", std::move(zeros)}};
      };
      if (polys.empty()) {
        fail("every point");
        return;
      }
      if (nv == 0) {
        ev["method"] = "constant";
        cert.evidence.push_back(ev);
        continue;
      }
      if (nv <= 2) {
        const CommonZeroSet zs = nv == 1 ? common_zeros_1d(polys, 0) : common_zeros_2d(polys, 0, 1);
        const std::string first = (*piece.vars)[0];
        const std::string second = nv == 2 ? (*piece.vars)[1] : "";
        if (zs.kind != CommonZeroSet::Kind::Empty) {
          json z = zs.to_json(first, second);
          if (zs.kind == CommonZeroSet::Kind::Finite) {
            json approx = json::array();
            for (const auto& pt : numeric_points(zs)) {
              json v = json::array();
              for (const auto& x : pt) {
                if (std::abs(x.imag()) <= 1e-12 * (1 + std::abs(x.real()))) {
                  v.push_back(x.real() == 0 ? 0.0 : x.real());
                } else {
                  v.push_back({x.real(), x.imag()});
                }
              }
              approx.push_back(v);
            }
            z["points"] = approx;
          }
          fail(z);
          return;
        }
        ev["method"] = nv == 1 ? "univariate gcd" : "two-variable elimination";
        ev["eliminant"] = zs.eliminant.to_string(first);
        cert.evidence.push_back(ev);
        continue;
      }
      std::vector<std::size_t> order(nv);
      for (std::size_t i = 0; i < nv; ++i) order[i] = i;
      try {
        const EliminationCertificate ec = certify_no_common_zero(polys, order, budget);
        if (!ec.certified) {
          cert.inconclusive = true;
          ev["method"] = "iterated resultants";
          ev["status"] = "eliminant has roots";
          ev["eliminant"] = ec.eliminant.to_string((*piece.vars)[ec.variable]);
          cert.evidence.push_back(ev);
          continue;
        }
        ev["method"] = "iterated resultants";
        ev["eliminant"] = ec.eliminant.to_string((*piece.vars)[ec.variable]);
        cert.evidence.push_back(ev);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InconclusiveBudget) throw;
        cert.inconclusive = true;
        ev["method"] = "iterated resultants";
        ev["status"] = "budget exceeded";
        cert.evidence.push_back(ev);
      }
    }
  }
  if (!any_projective) throw Error(ErrorCode::InvalidArgument, "map has no projective target block");
  cert.certified = !cert.inconclusive;
}

// Per-leaf certificates along the provenance tree.
bool chained(const Provenance& p, const std::string& path, const Provenance* previous, json& evidence, json& witness) {
  json ev{{"node", path}, {"kind", p.kind}};
  if (p.kind == "double_cover") {
    const PolyMap m = realize(p);
    const MultiPoly res = resultant(m.block(0)[0], m.block(0)[1], 0);
    ev["method"] = "resultant";
    ev["resultant"] = res.to_string();
    evidence.push_back(ev);
    if (res.is_constant() && !res.is_zero()) return true;
    witness = ev;
    return false;
  }
  if (p.kind == "identity" || p.kind == "segre") {
    ev["method"] = p.kind == "identity" ? "identity" : "monomial map, each factor has a nonzero coordinate";
    evidence.push_back(ev);
    return true;
  }
  if (p.kind == "sym2") {
    BasePointCertificate c;
    direct_elimination(realize(p), {}, c);
    ev["method"] = "elimination on affine charts";
    ev["charts"] = c.evidence;
    evidence.push_back(ev);
    if (c.certified) return true;
    witness = c.witness.is_null() ? ev : c.witness;
    return false;
  }
  if (p.kind == "linear_projection") {
    const int n = p.params.at("n").get<int>();
    if (previous == nullptr || previous->kind != "segre" || previous->params.at("n").get<int>() != n) {
      ev["reason"] = "projection is not applied to the matching Segre variety";
      witness = ev;
      return false;
    }
    try {
      ev["method"] = "center disjoint from the Segre variety";
      ev["certificate"] = certify_projection(n, p.params.at("matrix").get<std::vector<std::vector<long>>>());
      evidence.push_back(ev);
      return true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CenterMeetsVariety) throw;
      ev["reason"] = e.what();
      ev["witness"] = e.witness();
      witness = ev;
      return false;
    }
  }
  const Provenance* prev = nullptr;
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    const std::string sub = path + "/" + p.kind + "[" + std::to_string(i) + "]";
    if (!chained(p.children[i], sub, p.kind == "compose" ? prev : nullptr, evidence, witness)) return false;
    prev = &p.children[i];
  }
  return true;
}

}  // namespace

json BasePointCertificate::to_json() const {
  json j{{"verdict", certified ? "CERTIFIED" : inconclusive ? "INCONCLUSIVE_BUDGET" : "BASE_POINT"},
         {"method", method},
         {"evidence", evidence}};
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

BasePointCertificate check_no_base_points(const PolyMap& f, const EliminationBudget& budget) {
  BasePointCertificate cert;
  cert.method = "direct elimination";
  direct_elimination(f, budget, cert);
  return cert;
}

BasePointCertificate check_no_base_points(const PseudoChart& c) {
  BasePointCertificate cert;
  if (c.map.source().num_vars() <= 2) {
    cert = check_no_base_points(c.map);
    if (!cert.certified) return cert;
  }
  if (c.provenance.kind.empty()) {
    if (c.map.source().num_vars() > 2) cert = check_no_base_points(c.map);
    return cert;
  }
  json chain = json::array();
  json witness;
  bool ok = true;
  if (!(canonical_chart_map(c.provenance) == c.map)) {
    ok = false;
    witness = {{"reason", "chart map differs from the map its provenance describes"}};
  } else {
    ok = chained(c.provenance, "", nullptr, chain, witness);
  }
  if (!ok) {
    BasePointCertificate bad;
    bad.method = "chained elimination";
    bad.evidence = chain;
    bad.witness = witness;
    // A mismatched map may still be a morphism; try the direct route when feasible.
    if (witness.contains("reason") && c.map.source().num_vars() > 2) {
      bad = check_no_base_points(c.map);
      bad.method = "direct elimination (provenance mismatch)";
      if (bad.certified) return bad;
      bad.witness = witness;
    }
    return bad;
  }
  if (cert.method.empty()) {
    cert.method = "chained elimination";
    cert.evidence = chain;
    cert.certified = true;
  } else {
    cert.method = "direct and chained elimination";
    cert.evidence = json{{"direct", cert.evidence}, {"chained", chain}};
  }
  return cert;
}

json DegreeReport::to_json() const {
  json cards = json::array();
  for (long c : cardinalities) cards.push_back(c);
  json j{{"seed", seed},
         {"backend", backend},
         {"samples", cardinalities.size()},
         {"cardinalities", cards},
         {"inferred_degree", inferred},
         {"attained_fraction", attained_fraction},
         {"targets", targets}};
  if (non_generic_sampling) j["flag"] = "NON_GENERIC_SAMPLING";
  return j;
}

DegreeReport generic_degree(const PseudoChart& c, int samples, std::uint64_t seed, const FiberOptions& opt) {
  return degree_over(c.map, [&](const SpacePoint& y) { return fiber(c, y, opt); }, samples, seed, opt);
}

DegreeReport generic_degree(const Construction& c, int samples, std::uint64_t seed, const FiberOptions& opt) {
  return degree_over(c.map, [&](const SpacePoint& y) { return fiber(c, y, opt); }, samples, seed, opt);
}

json SurjectivityCertificate::to_json() const {
  json j{{"verdict", surjective_on_tested ? "SURJECTIVE_ON_TESTED" : "NOT_SURJECTIVE"},
         {"tested", targets.size()},
         {"evidence", evidence}};
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

std::vector<SpacePoint> standard_strata(const Space& target, int hyperplane, int general, std::uint64_t seed) {
  std::vector<SpacePoint> out;
  const FieldPtr q = Field::rationals();
  auto unit_blocks = [&](const std::vector<std::size_t>& pick) {
    std::vector<std::vector<Scalar>> blocks;
    for (std::size_t f = 0; f < target.num_factors(); ++f) {
      std::vector<Scalar> b(target.factor(f).num_vars(), Scalar::zero(q));
      if (target.factor(f).projective()) b[pick[f]] = Scalar::one(q);
      blocks.push_back(std::move(b));
    }
    return SpacePoint(target, std::move(blocks));
  };
  // Coordinate points: every combination of unit vectors in the projective factors.
  std::vector<std::size_t> pick(target.num_factors(), 0);
  while (true) {
    out.push_back(unit_blocks(pick));
    std::size_t k = pick.size();
    while (k > 0 && (!target.factor(k - 1).projective() || ++pick[k - 1] == target.factor(k - 1).num_vars())) {
      pick[--k] = 0;
    }
    if (k == 0) break;
  }
  auto random_nonzero_block = [&](std::mt19937_64& rng, std::size_t size) {
    std::vector<Scalar> b;
    for (std::size_t i = 0; i < size; ++i) {
      long v = 0;
      while (v == 0) v = random_small(rng, 50);
      b.push_back(Scalar::rational(v));
    }
    return b;
  };
  std::vector<std::pair<std::size_t, std::size_t>> hyperplanes;
  for (std::size_t f = 0; f < target.num_factors(); ++f) {
    for (std::size_t k = 0; k < target.factor(f).num_vars(); ++k) {
      if (target.factor(f).projective()) hyperplanes.emplace_back(f, k);
    }
  }
  for (int h = 0; h < hyperplane && !hyperplanes.empty(); ++h) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(h)));
    const auto [fac, coord] = hyperplanes[static_cast<std::size_t>(h) % hyperplanes.size()];
    std::vector<std::vector<Scalar>> blocks;
    for (std::size_t f = 0; f < target.num_factors(); ++f) {
      auto b = random_nonzero_block(rng, target.factor(f).num_vars());
      if (f == fac) b[coord] = Scalar::zero(q);
      blocks.push_back(std::move(b));
    }
    out.emplace_back(target, std::move(blocks));
  }
  for (int g = 0; g < general; ++g) {
    std::mt19937_64 rng(mix_seed(seed ^ 0x5a5a5a5a5a5a5a5aULL, static_cast<std::uint64_t>(g)));
    out.push_back(random_point(target, rng));
  }
  return out;
}

std::vector<SpacePoint> all_points_p1(const Space& target, const FieldPtr& field) {
  if (target.num_factors() != 1 || !target.factor(0).projective() || target.factor(0).dim != 1) {
    throw Error(ErrorCode::InvalidArgument, "all_points_p1 needs a P^1 target");
  }
  std::vector<SpacePoint> out;
  for (const auto& x : enumerate_field(field)) out.emplace_back(target, std::vector<std::vector<Scalar>>{{x, Scalar::one(field)}});
  out.emplace_back(target, std::vector<std::vector<Scalar>>{{Scalar::one(field), Scalar::zero(field)}});
  return out;
}

SurjectivityCertificate surjectivity_scan(const PseudoChart& c, const std::vector<SpacePoint>& strata) {
  std::vector<json> evidence(strata.size());
  std::vector<bool> nonempty(strata.size(), false);
  const bool cross_check = c.map.source().num_vars() <= 2 && !c.provenance.kind.empty();
  parallel_for(strata.size(), [&](std::size_t i) {
    const FiberReport f = fiber(c, strata[i]);
    json ev{{"target", f.target}, {"backend", f.backend}, {"closure_cardinality", f.closure_cardinality}};
    bool ok = f.positive_dimensional || f.closure_cardinality > 0;
    if (!f.solutions.empty()) {
      json s = json::array();
      for (const auto& x : f.solutions.front()) s.push_back(x.to_string());
      ev["solution"] = s;
    }
    if (f.notes.contains("eliminant")) ev["eliminant"] = f.notes["eliminant"];
    if (cross_check) {
      const FiberReport g = generic_fiber(c.map, strata[i]);
      const bool g_ok = g.positive_dimensional || g.closure_cardinality > 0;
      ev["generic_cardinality"] = g.closure_cardinality;
      if (g.notes.contains("eliminant")) ev["eliminant"] = g.notes["eliminant"];
      if (g_ok != ok) ev["backend_disagreement"] = true;
      ok = ok && g_ok;
    }
    evidence[i] = std::move(ev);
    nonempty[i] = ok;
  });
  SurjectivityCertificate cert;
  cert.surjective_on_tested = true;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    cert.targets.push_back(point_to_json(strata[i]));
    cert.evidence.push_back(evidence[i]);
    if (!nonempty[i] && cert.surjective_on_tested) {
      cert.surjective_on_tested = false;
      cert.witness = evidence[i];
    }
  }
  return cert;
}

json FiniteFiberReport::to_json() const {
  json j{{"verdict", pass ? "PASS" : "FAIL"}, {"max_cardinality", max_cardinality}, {"samples", samples}, {"seed", seed}};
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

FiniteFiberReport finite_fiber_scan(const PseudoChart& c, int samples, std::uint64_t seed) {
  const auto targets = sample_targets(c.map, samples, seed);
  std::vector<FiberReport> reports(targets.size());
  parallel_for(targets.size(), [&](std::size_t i) { reports[i] = fiber(c, targets[i]); });
  FiniteFiberReport r;
  r.samples = samples;
  r.seed = seed;
  for (const auto& f : reports) {
    if (f.positive_dimensional) {
      if (r.pass) r.witness = {{"target", f.target}, {"reason", "positive-dimensional fiber"}};
      r.pass = false;
    } else {
      r.max_cardinality = std::max(r.max_cardinality, f.closure_cardinality);
    }
  }
  return r;
}

json MultiplicativityReport::to_json() const {
  return {{"inner_degree", inner_degree},
          {"outer_degree", outer_degree},
          {"composite_degree", composite_degree},
          {"product", inner_degree * outer_degree},
          {"verdict", agrees ? "AGREES" : "MISMATCH"}};
}

MultiplicativityReport degree_multiplicativity_check(const PseudoChart& f, const Construction& g, int samples,
                                                     std::uint64_t seed) {
  const PseudoChart composite =
      make_chart(f.name + "_then_composite", Provenance{"compose", json::object(), {f.provenance, g.provenance}});
  MultiplicativityReport r;
  r.inner_degree = generic_degree(f, samples, seed).inferred;
  r.outer_degree = generic_degree(g, samples, seed).inferred;
  r.composite_degree = generic_degree(composite, samples, seed).inferred;
  r.agrees = r.composite_degree == r.inner_degree * r.outer_degree;
  return r;
}

json AgreementReport::to_json() const {
  return {{"p", p},
          {"k", k},
          {"targets", targets},
          {"mismatches", mismatches},
          {"exact_comparison", exact_comparison},
          {"verdict", pass() ? "AGREE" : "DISAGREE"},
          {"details", details}};
}

AgreementReport backend_agreement(const PseudoChart& c, std::uint64_t p, int k) {
  const FieldPtr fp = Field::finite(p);
  const BruteIndex index(c.map, Field::finite(p, k));
  // Every F_p-point of the target.
  std::vector<std::vector<std::vector<Scalar>>> per_factor;
  const auto elems = enumerate_field(fp);
  for (const auto& fac : c.map.target().factors()) {
    std::vector<std::vector<Scalar>> pts;
    const std::size_t nv = fac.num_vars();
    const std::size_t lead_max = fac.projective() ? nv : 1;
    for (std::size_t lead = 0; lead < lead_max; ++lead) {
      const std::size_t free = fac.projective() ? nv - lead - 1 : nv;
      std::vector<std::size_t> idx(free, 0);
      while (true) {
        std::vector<Scalar> pt;
        if (fac.projective()) {
          pt.assign(lead, Scalar::zero(fp));
          pt.push_back(Scalar::one(fp));
        }
        for (auto i : idx) pt.push_back(elems[i]);
        pts.push_back(std::move(pt));
        std::size_t j = free;
        while (j > 0 && ++idx[j - 1] == elems.size()) idx[--j] = 0;
        if (j == 0) break;
      }
    }
    per_factor.push_back(std::move(pts));
  }
  std::vector<SpacePoint> targets;
  std::vector<std::size_t> idx(per_factor.size(), 0);
  while (true) {
    std::vector<std::vector<Scalar>> blocks;
    for (std::size_t i = 0; i < idx.size(); ++i) blocks.push_back(per_factor[i][idx[i]]);
    targets.emplace_back(c.map.target(), std::move(blocks));
    std::size_t j = idx.size();
    while (j > 0 && ++idx[j - 1] == per_factor[j - 1].size()) idx[--j] = 0;
    if (j == 0) break;
  }

  AgreementReport r;
  r.p = p;
  r.k = k;
  r.targets = static_cast<int>(targets.size());
  r.exact_comparison = k % c.provenance.splitting_degree() == 0;
  std::vector<long> exact(targets.size());
  parallel_for(targets.size(), [&](std::size_t i) {
    exact[i] = fiber(c, targets[i], {Backend::StructuredExact}).closure_cardinality;
  });
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const long brute = static_cast<long>(index.preimages(targets[i]).size());
    const bool bad = r.exact_comparison ? brute != exact[i] : brute > exact[i];
    if (bad) {
      ++r.mismatches;
      r.details.push_back({{"target", point_to_json(targets[i])}, {"brute", brute}, {"structured_exact", exact[i]}});
    }
  }
  return r;
}

json CoverageReport::to_json() const {
  return {{"samples", samples},
          {"covered", covered},
          {"covering_chart", covering_chart},
          {"verdict", pass() ? "COVERED" : "NOT_COVERED"},
          {"failures", failures}};
}

CoverageReport atlas_coverage(const BundleAtlas& atlas, int samples, std::uint64_t seed) {
  const int n = atlas.n;
  const int r = atlas.fiber_dim();
  const FieldPtr q = Field::rationals();
  CoverageReport rep;
  rep.samples = samples;
  rep.covering_chart.assign(static_cast<std::size_t>(samples), -1);
  std::vector<json> fail(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
    std::mt19937_64 rng(mix_seed(seed, s));
    auto draw = [&](int len) {
      std::vector<long> v;
      bool nonzero = false;
      while (!nonzero) {
        v.clear();
        for (int i = 0; i < len; ++i) {
          v.push_back(rng() % 3 == 0 ? 0 : random_small(rng, 20));
          nonzero = nonzero || v.back() != 0;
        }
      }
      return v;
    };
    const std::vector<long> x = draw(n + 1);
    const std::vector<long> w = draw(r + 1);
    std::size_t home = 0;
    while (x[home] == 0) ++home;
    json attempts = json::array();
    for (std::size_t j = 0; j <= static_cast<std::size_t>(n); ++j) {
      if (x[j] == 0) continue;
      std::vector<Scalar> base;
      for (std::size_t l = 0; l <= static_cast<std::size_t>(n); ++l) {
        if (l != j) base.push_back(Scalar::rational(x[l], 1) / Scalar::rational(x[j], 1));
      }
      std::vector<Scalar> fib;
      for (int k = 0; k <= r; ++k) {
        Scalar v = Scalar::rational(w[k], 1);
        if (j != home) {
          for (std::size_t l = 0; l <= static_cast<std::size_t>(n); ++l) {
            const int e = atlas.transition(home, j).exponents[k][l];
            if (e != 0) v *= int_power(Scalar::rational(x[l], 1), e);
          }
        }
        fib.push_back(v);
      }
      const SpacePoint y(atlas.charts[j].map.target(), {base, fib});
      const FiberReport f = fiber(atlas.charts[j], y);
      if (f.positive_dimensional || f.closure_cardinality > 0) {
        rep.covering_chart[s] = static_cast<int>(j);
        return;
      }
      attempts.push_back({{"chart", j}, {"target", f.target}, {"closure_cardinality", f.closure_cardinality}});
    }
    fail[s] = {{"base", x}, {"fiber", w}, {"attempts", attempts}};
  });
  for (int s = 0; s < samples; ++s) {
    if (rep.covering_chart[s] >= 0) {
      ++rep.covered;
    } else {
      rep.failures.push_back(fail[s]);
    }
  }
  return rep;
}

}  // namespace pseudochart
