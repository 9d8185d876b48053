#include "pseudochart/atlas.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "pseudochart/errors.hpp"

namespace pseudochart {

using nlohmann::json;

namespace {

const char* const kKinds[] = {"double_cover", "identity", "sym2", "segre", "linear_projection", "product", "compose"};

long factorial(int n) {
  long f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

std::vector<std::string> names(const std::string& prefix, std::size_t count, std::size_t start = 0) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(start + i));
  return out;
}

MultiPoly var(const Space& s, std::size_t i) { return MultiPoly::variable(s.vars(), i, Field::rationals()); }

PolyMap realize_double_cover() {
  const Space src = Space::affine(std::vector<std::string>{"t"});
  const Space dst = Space::projective(names("y", 2));
  const MultiPoly t = var(src, 0);
  return PolyMap(src, dst, {{t * t + MultiPoly::constant(src.vars(), Scalar::rational(1)), t}});
}

PolyMap realize_sym2() {
  const Space src = Space::product(Space::projective(names("a", 2)), Space::projective(names("b", 2)));
  const Space dst = Space::projective(names("z", 3));
  const MultiPoly a = var(src, 0), b = var(src, 1), c = var(src, 2), d = var(src, 3);
  return PolyMap(src, dst, {{b * d, a * d + b * c, a * c}});
}

Space segre_source(int n) {
  std::vector<Factor> factors;
  for (int k = 0; k < n; ++k) {
    factors.push_back(Factor{FactorKind::Projective, 1, {"a" + std::to_string(k), "b" + std::to_string(k)}});
  }
  return Space(std::move(factors));
}

PolyMap realize_segre(int n) {
  if (n < 1 || n > 4) throw Error(ErrorCode::InvalidArgument, "segre needs 1 <= n <= 4");
  const Space src = segre_source(n);
  const std::size_t count = std::size_t{1} << n;
  const Space dst = Space::projective(names("z", count));
  std::vector<MultiPoly> comps;
  for (std::size_t i = 0; i < count; ++i) {
    MultiPoly m = MultiPoly::constant(src.vars(), Scalar::rational(1));
    for (int k = 0; k < n; ++k) {
      const bool second = (i >> (n - 1 - k)) & 1U;
      m *= var(src, 2 * k + (second ? 1 : 0));
    }
    comps.push_back(std::move(m));
  }
  return PolyMap(src, dst, {comps});
}

std::vector<std::vector<long>> read_matrix(const json& params) {
  return params.at("matrix").get<std::vector<std::vector<long>>>();
}

PolyMap realize_projection(int n, const std::vector<std::vector<long>>& m) {
  const std::size_t cols = std::size_t{1} << n;
  if (m.size() != static_cast<std::size_t>(n + 1)) throw Error(ErrorCode::ArityMismatch, "projection needs n+1 rows");
  const Space src = Space::projective(names("z", cols));
  const Space dst = Space::projective(names("y", n + 1));
  std::vector<MultiPoly> comps;
  for (const auto& row : m) {
    if (row.size() != cols) throw Error(ErrorCode::ArityMismatch, "projection rows need 2^n entries");
    MultiPoly form(src.vars(), Field::rationals());
    for (std::size_t c = 0; c < cols; ++c) {
      if (row[c] != 0) form += var(src, c).scaled(Scalar::rational(row[c]));
    }
    comps.push_back(std::move(form));
  }
  return PolyMap(src, dst, {comps});
}

std::string expression(const Provenance& p) {
  if (p.children.empty()) {
    if (p.kind == "segre" || p.kind == "linear_projection") return p.kind + "(" + p.params.at("n").dump() + ")";
    return p.kind;
  }
  std::string out = p.kind + "(";
  for (std::size_t i = 0; i < p.children.size(); ++i) out += (i ? ", " : "") + expression(p.children[i]);
  return out + ")";
}

Provenance leaf(std::string kind, json params = json::object()) { return Provenance{std::move(kind), std::move(params), {}}; }

Provenance node(std::string kind, std::vector<Provenance> children) {
  return Provenance{std::move(kind), json::object(), std::move(children)};
}

Provenance product_of_double_covers(int n) {
  if (n == 1) return leaf("double_cover");
  return node("product", std::vector<Provenance>(n, leaf("double_cover")));
}

}  // namespace

long Provenance::degree() const {
  if (kind == "double_cover" || kind == "sym2") return 2;
  if (kind == "identity" || kind == "segre") return 1;
  if (kind == "linear_projection") return factorial(params.at("n").get<int>());
  long d = 1;
  for (const auto& c : children) d *= c.degree();
  return d;
}

int Provenance::splitting_degree() const {
  if (kind == "double_cover" || kind == "sym2") return 2;
  if (kind == "identity" || kind == "segre") return 1;
  if (kind == "linear_projection") return params.at("n").get<int>() == 2 ? 2 : 60;
  int d = 1;
  for (const auto& c : children) d = kind == "compose" ? d * c.splitting_degree() : std::lcm(d, c.splitting_degree());
  return d;
}

json Provenance::to_json() const {
  json j{{"kind", kind}};
  if (!params.empty()) j["params"] = params;
  if (!children.empty()) {
    json cs = json::array();
    for (const auto& c : children) cs.push_back(c.to_json());
    j["children"] = cs;
  }
  return j;
}

Provenance Provenance::from_json(const json& j) {
  try {
    Provenance p;
    p.kind = j.at("kind").get<std::string>();
    if (std::find(std::begin(kKinds), std::end(kKinds), p.kind) == std::end(kKinds)) {
      throw Error(ErrorCode::Parse, "unknown provenance node " + p.kind);
    }
    if (j.contains("params")) p.params = j.at("params");
    if (j.contains("children")) {
      for (const auto& c : j.at("children")) p.children.push_back(from_json(c));
    }
    const bool inner = p.kind == "product" || p.kind == "compose";
    if (inner == p.children.empty()) throw Error(ErrorCode::Parse, "provenance node " + p.kind + " has wrong arity");
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed provenance: ") + e.what());
  }
}

PolyMap realize(const Provenance& p) {
  PolyMap out = [&]() -> PolyMap {
    if (p.kind == "double_cover") return realize_double_cover();
    if (p.kind == "identity") return identity_map(space_from_json(p.params.at("space")));
    if (p.kind == "sym2") return realize_sym2();
    if (p.kind == "segre") return realize_segre(p.params.at("n").get<int>());
    if (p.kind == "linear_projection") return realize_projection(p.params.at("n").get<int>(), read_matrix(p.params));
    PolyMap acc = realize(p.children.at(0));
    for (std::size_t i = 1; i < p.children.size(); ++i) {
      acc = p.kind == "product" ? product_map(acc, realize(p.children[i])) : compose(acc, realize(p.children[i]));
    }
    return acc;
  }();
  return out.with_provenance(expression(p));
}

PolyMap canonical_chart_map(const Provenance& prov) {
  const PolyMap m = realize(prov);
  if (!m.source().is_affine()) throw Error(ErrorCode::InvalidArgument, "chart source must be affine");
  if (m.target().dim() != m.source().dim()) {
    throw Error(ErrorCode::InvalidArgument, "chart target dimension differs from the source dimension");
  }
  const std::size_t nsrc = m.source().num_vars();
  std::vector<std::string> src_names;
  for (std::size_t i = 1; i <= nsrc; ++i) src_names.push_back(nsrc == 1 ? "t" : "t" + std::to_string(i));
  std::vector<Factor> dst = m.target().factors();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    for (std::size_t k = 0; k < dst[i].vars.size(); ++k) {
      dst[i].vars[k] = dst.size() == 1 ? "y" + std::to_string(k) : "y" + std::to_string(i) + "_" + std::to_string(k);
    }
  }
  // Affine source factors merge into one A^n.
  const Space source = Space::affine(src_names);
  std::vector<MultiPoly> images;
  for (std::size_t v = 0; v < nsrc; ++v) images.push_back(MultiPoly::variable(source.vars(), v, m.field()));
  auto comps = m.components();
  for (auto& b : comps)
    for (auto& p : b) p = p.substitute(images, source.vars());
  return PolyMap(source, Space(std::move(dst)), std::move(comps), m.provenance());
}

PseudoChart make_chart(std::string name, const Provenance& prov) {
  return PseudoChart{std::move(name), canonical_chart_map(prov), prov.degree(), prov};
}

PseudoChart p1_double_cover() { return make_chart("p1_double_cover", leaf("double_cover")); }

Construction extend_over_base(const Construction& c, const Space& y) {
  if (y.num_factors() == 0) return c;
  Provenance prov = node("product", {c.provenance, leaf("identity", {{"space", space_to_json(y)}})});
  return Construction{realize(prov), prov};
}

PseudoChart cover_product_p1(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cover_product_p1 needs n >= 1");
  if (n == 1) return p1_double_cover();
  return make_chart("cover_product_p1_" + std::to_string(n), product_of_double_covers(n));
}

Construction sym2_cover() {
  Provenance p = leaf("sym2");
  return Construction{realize(p), p};
}

PseudoChart cover_p2() {
  return make_chart("cover_p2", node("compose", {product_of_double_covers(2), leaf("sym2")}));
}

Construction segre(int n) {
  if (n < 1 || n > 4) throw Error(ErrorCode::InvalidArgument, "segre needs 1 <= n <= 4");
  Provenance p = leaf("segre", {{"n", n}});
  return Construction{realize(p), p};
}

Construction linear_projection_from_matrix(int n, const std::vector<std::vector<long>>& matrix, std::uint64_t seed,
                                           int attempt) {
  certify_projection(n, matrix);
  Provenance p = leaf("linear_projection", {{"n", n}, {"matrix", matrix}, {"seed", seed}, {"attempt", attempt}});
  return Construction{realize(p), p};
}

Construction random_linear_projection(int n, std::uint64_t seed, int max_attempts) {
  if (n < 2 || n > 3) throw Error(ErrorCode::InvalidArgument, "random_linear_projection needs 2 <= n <= 3");
  std::mt19937_64 rng(seed);
  const std::size_t cols = std::size_t{1} << n;
  json rejected = json::array();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<std::vector<long>> m(n + 1, std::vector<long>(cols));
    for (auto& row : m)
      for (auto& x : row) x = static_cast<long>(rng() % 19) - 9;
    try {
      return linear_projection_from_matrix(n, m, seed, attempt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CenterMeetsVariety) throw;
      rejected.push_back({{"attempt", attempt}, {"matrix", m}, {"witness", e.witness()}});
    }
  }
  throw Error(ErrorCode::CenterMeetsVariety,
              "no certified projection after " + std::to_string(max_attempts) + " draws",
              {{"seed", seed}, {"rejected", rejected}});
}

PseudoChart cover_pn(int n, std::uint64_t seed) {
  if (n < 2 || n > 3) throw Error(ErrorCode::InvalidArgument, "cover_pn needs 2 <= n <= 3");
  const Construction proj = random_linear_projection(n, seed);
  return make_chart("cover_p" + std::to_string(n),
                    node("compose", {product_of_double_covers(n), leaf("segre", {{"n", n}}), proj.provenance}));
}

const Transition& BundleAtlas::transition(std::size_t from, std::size_t to) const {
  for (const auto& t : transitions) {
    if (t.from == from && t.to == to) return t;
  }
  throw Error(ErrorCode::InvalidArgument, "no transition between these charts");
}

BundleAtlas bundle_atlas(int n, const std::vector<int>& degrees, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "bundle base dimension must be at least 1");
  const int r = static_cast<int>(degrees.size()) - 1;
  if (r < 1 || r > 2) throw Error(ErrorCode::InvalidArgument, "bundle fiber dimension must be 1 or 2");
  const Provenance fiber = r == 1 ? leaf("double_cover") : cover_pn(2, seed).provenance;
  const Space base = Space::affine(names("x", n, 1));
  const Provenance prov = node("product", {leaf("identity", {{"space", space_to_json(base)}}), fiber});

  BundleAtlas atlas{n, degrees, seed, {}, {}};
  for (int i = 0; i <= n; ++i) {
    PseudoChart c = make_chart("bundle_chart_" + std::to_string(i), prov);
    atlas.charts.push_back(std::move(c));
  }
  for (int from = 0; from <= n; ++from) {
    for (int to = 0; to <= n; ++to) {
      if (from == to) continue;
      Transition t{static_cast<std::size_t>(from), static_cast<std::size_t>(to), {}};
      for (int a : degrees) {
        std::vector<int> e(n + 1, 0);
        e[from] += a;
        e[to] -= a;
        t.exponents.push_back(std::move(e));
      }
      atlas.transitions.push_back(std::move(t));
    }
  }
  return atlas;
}

json chart_to_json(const PseudoChart& c) {
  return {{"name", c.name},
          {"claimed_degree", c.claimed_degree},
          {"provenance", c.provenance.to_json()},
          {"map", map_to_json(c.map)}};
}

PseudoChart chart_from_json(const json& j) {
  try {
    return PseudoChart{j.at("name").get<std::string>(), map_from_json(j.at("map")), j.at("claimed_degree").get<long>(),
                       Provenance::from_json(j.at("provenance"))};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed chart: ") + e.what());
  }
}

json atlas_to_json(const BundleAtlas& a) {
  json charts = json::array();
  for (const auto& c : a.charts) charts.push_back(chart_to_json(c));
  json transitions = json::array();
  for (const auto& t : a.transitions) {
    transitions.push_back({{"from", t.from}, {"to", t.to}, {"exponents", t.exponents}});
  }
  return {{"n", a.n}, {"degrees", a.degrees}, {"seed", a.seed}, {"charts", charts}, {"transitions", transitions}};
}

BundleAtlas atlas_from_json(const json& j) {
  try {
    BundleAtlas a{j.at("n").get<int>(), j.at("degrees").get<std::vector<int>>(), j.value("seed", std::uint64_t{0}),
                  {}, {}};
    for (const auto& c : j.at("charts")) a.charts.push_back(chart_from_json(c));
    for (const auto& t : j.at("transitions")) {
      a.transitions.push_back(Transition{t.at("from").get<std::size_t>(), t.at("to").get<std::size_t>(),
                                         t.at("exponents").get<std::vector<std::vector<int>>>()});
    }
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed atlas: ") + e.what());
  }
}

}  // namespace pseudochart
