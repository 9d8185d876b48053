#include "pseudochart/obstruct.hpp"

#include "pseudochart/errors.hpp"

namespace pseudochart {

using nlohmann::json;

namespace {

const FieldPtr& Q() {
  static const FieldPtr q = Field::rationals();
  return q;
}

std::uint64_t mod_p(const mpz_class& v, std::uint64_t p) {
  mpz_class r = v % static_cast<unsigned long>(p);
  if (r < 0) r += static_cast<unsigned long>(p);
  return r.get_ui();
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  b %= p;
  while (e > 0) {
    if (e & 1U) r = static_cast<std::uint64_t>(static_cast<unsigned __int128>(r) * b % p);
    b = static_cast<std::uint64_t>(static_cast<unsigned __int128>(b) * b % p);
    e >>= 1;
  }
  return r;
}

std::uint64_t rational_mod_p(const mpq_class& q, std::uint64_t p) {
  const std::uint64_t den = mod_p(q.get_den(), p);
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "denominator vanishes modulo " + std::to_string(p));
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(mod_p(q.get_num(), p)) * pow_mod(den, p - 2, p) % p);
}

struct ModPoly {
  std::vector<std::pair<std::uint64_t, std::array<std::uint32_t, 3>>> terms;

  ModPoly(const MultiPoly& f, std::uint64_t p) {
    for (const auto& t : f.terms()) {
      const std::uint64_t c = rational_mod_p(t.coeff.rational_value(), p);
      if (c != 0) terms.push_back({c, {t.exponent[0], t.exponent[1], t.exponent[2]}});
    }
  }

  std::uint64_t eval(const std::array<std::uint64_t, 3>& x, std::uint64_t p) const {
    unsigned __int128 s = 0;
    for (const auto& [c, e] : terms) {
      unsigned __int128 v = c;
      for (int i = 0; i < 3; ++i) v = v * pow_mod(x[i], e[i], p) % p;
      s = (s + v) % p;
    }
    return static_cast<std::uint64_t>(s);
  }
};

std::vector<MultiPoly> jacobian_system(const PlaneCurve& c) {
  const MultiPoly& F = c.form();
  return {F, F.derivative(0), F.derivative(1), F.derivative(2)};
}

const char* kCitePositiveGenus =
    "the complement of an ample curve of positive genus admits no finite surjective morphism from A^2";
const char* kCiteRational = "a surface with a finite surjective chart from A^2 has boundary a union of rational curves";
const char* kCiteCount = "such a boundary has at least rho(S) components";
const char* kCiteGenerate = "such boundary components generate Pic(S) tensor Q";
const char* kInconclusive = "no obstruction applies; this is not evidence that a finite surjective chart exists";

mpq_class parse_rational(const json& v) {
  if (v.is_number_integer()) return mpq_class(v.get<long>());
  if (v.is_string()) {
    mpq_class q(v.get<std::string>());
    q.canonicalize();
    return q;
  }
  throw Error(ErrorCode::Parse, "class entries must be integers or rational strings");
}

}  // namespace

PlaneCurve::PlaneCurve(MultiPoly F) : F_(std::move(F)), degree_(0) {
  if (!same_vars(F_.vars(), variables())) F_ = F_.rebase(variables());
  if (!same_field(F_.field(), Q())) throw Error(ErrorCode::FieldMismatch, "plane curves are defined over Q");
  if (F_.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "plane curve form is zero");
  if (!F_.is_homogeneous()) throw Error(ErrorCode::InvalidArgument, "plane curve form must be homogeneous");
  degree_ = F_.total_degree();
  if (degree_ < 1) throw Error(ErrorCode::InvalidArgument, "plane curve needs degree at least 1");
}

const VarSet& PlaneCurve::variables() {
  static const VarSet v = make_vars({"x", "y", "z"});
  return v;
}

PlaneCurve PlaneCurve::parse(const std::string& text) { return PlaneCurve(parse_poly(text, variables())); }

json PlaneCurve::to_json() const { return {{"curve", F_.to_string()}, {"degree", degree_}}; }

PlaneCurve PlaneCurve::from_json(const json& j) {
  if (j.is_string()) return parse(j.get<std::string>());
  if (!j.is_object() || !j.contains("curve")) throw Error(ErrorCode::Parse, "curve JSON needs a \"curve\" field");
  return parse(j.at("curve").get<std::string>());
}

json SmoothnessReport::to_json() const {
  json j{{"verdict", inconclusive ? "INCONCLUSIVE_BUDGET" : smooth ? "SMOOTH" : "SINGULAR"}, {"evidence", evidence}};
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

std::optional<std::vector<std::uint64_t>> singular_point_mod_p(const PlaneCurve& c, std::uint64_t p) {
  std::vector<ModPoly> sys;
  for (const auto& f : jacobian_system(c)) sys.emplace_back(f, p);
  auto vanishes = [&](const std::array<std::uint64_t, 3>& x) {
    for (const auto& f : sys) {
      if (f.eval(x, p) != 0) return false;
    }
    return true;
  };
  for (std::uint64_t a = 0; a < p; ++a) {
    for (std::uint64_t b = 0; b < p; ++b) {
      if (vanishes({a, b, 1})) return std::vector<std::uint64_t>{a, b, 1};
    }
    if (vanishes({a, 1, 0})) return std::vector<std::uint64_t>{a, 1, 0};
  }
  if (vanishes({1, 0, 0})) return std::vector<std::uint64_t>{1, 0, 0};
  return std::nullopt;
}

SmoothnessReport curve_smoothness(const PlaneCurve& c) {
  SmoothnessReport r;
  json prefilter = json::array();
  json mod_p_witness;
  for (std::uint64_t p : kSmoothnessPrimes) {
    const auto pt = singular_point_mod_p(c, p);
    prefilter.push_back({{"prime", p}, {"singular_point", pt ? json(*pt) : json(nullptr)}});
    if (pt && mod_p_witness.is_null()) mod_p_witness = {{"prime", p}, {"point", *pt}};
  }
  r.evidence.push_back({{"method", "finite-field search"}, {"results", prefilter}});

  if (c.degree() > kExactSmoothnessDegree) {
    r.inconclusive = true;
    r.evidence.push_back({{"method", "exact elimination"}, {"status", "degree above the exact-path cap"}});
    if (!mod_p_witness.is_null()) r.witness = {{"mod_p", mod_p_witness}};
    return r;
  }
  const auto sys = jacobian_system(c);
  const FieldPtr& q = Q();
  // Charts: z = 1; z = 0, y = 1; the point [1:0:0].
  const VarSet xy = make_vars({"x", "y"});
  const VarSet xs = make_vars({"x"});
  const MultiPoly one2 = MultiPoly::constant(xy, Scalar::rational(1));
  const MultiPoly one1 = MultiPoly::constant(xs, Scalar::rational(1));
  const std::vector<MultiPoly> chart_z{MultiPoly::variable(xy, 0, q), MultiPoly::variable(xy, 1, q), one2};
  const std::vector<MultiPoly> chart_y{MultiPoly::variable(xs, 0, q), one1, MultiPoly(xs, q)};
  try {
    std::vector<MultiPoly> polys;
    for (const auto& f : sys) {
      MultiPoly g = f.substitute(chart_z, xy);
      if (!g.is_zero()) polys.push_back(std::move(g));
    }
    const CommonZeroSet zs = common_zeros_2d(polys, 0, 1);
    if (zs.kind != CommonZeroSet::Kind::Empty) {
      r.witness = {{"chart", "z=1"}, {"common_zeros", zs.to_json("x", "y")}};
      if (!mod_p_witness.is_null()) r.witness["mod_p"] = mod_p_witness;
      return r;
    }
    r.evidence.push_back({{"method", "exact elimination"}, {"chart", "z=1"}, {"eliminant", zs.eliminant.to_string("x")}});

    polys.clear();
    for (const auto& f : sys) {
      MultiPoly g = f.substitute(chart_y, xs);
      if (!g.is_zero()) polys.push_back(std::move(g));
    }
    if (!polys.empty()) {
      const CommonZeroSet zl = common_zeros_1d(polys, 0);
      if (zl.kind != CommonZeroSet::Kind::Empty) {
        r.witness = {{"chart", "z=0,y=1"}, {"common_zeros", zl.to_json("x")}};
        if (!mod_p_witness.is_null()) r.witness["mod_p"] = mod_p_witness;
        return r;
      }
      r.evidence.push_back({{"method", "univariate gcd"}, {"chart", "z=0,y=1"}, {"gcd", zl.eliminant.to_string("x")}});
    }

    const std::vector<Scalar> corner{Scalar::rational(1), Scalar::rational(0), Scalar::rational(0)};
    bool all_zero = true;
    for (const auto& f : sys) all_zero = all_zero && f.evaluate(corner).is_zero();
    if (all_zero) {
      r.witness = {{"point", json::array({"1", "0", "0"})}};
      return r;
    }
    r.evidence.push_back({{"method", "evaluation"}, {"point", json::array({"1", "0", "0"})}});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InconclusiveBudget) throw;
    r.inconclusive = true;
    r.evidence.push_back({{"method", "exact elimination"}, {"status", e.what()}});
    return r;
  }
  r.smooth = true;
  return r;
}

int plane_curve_genus(const PlaneCurve& c) {
  const SmoothnessReport s = curve_smoothness(c);
  if (!s.smooth) {
    throw Error(ErrorCode::InvalidArgument, "genus formula needs a smooth curve", s.to_json());
  }
  return (c.degree() - 1) * (c.degree() - 2) / 2;
}

std::string outcome_name(Outcome o) { return o == Outcome::Obstructed ? "OBSTRUCTED" : "INCONCLUSIVE"; }

std::string reason_name(Reason r) {
  switch (r) {
    case Reason::NonRationalBoundary:
      return "NON_RATIONAL_BOUNDARY";
    case Reason::TooFewComponents:
      return "TOO_FEW_COMPONENTS";
    case Reason::ClassesDoNotGenerate:
      return "CLASSES_DO_NOT_GENERATE";
    case Reason::PositiveGenusAmpleCurve:
      return "POSITIVE_GENUS_AMPLE_CURVE";
    case Reason::None:
      break;
  }
  return "NONE";
}

json Verdict::to_json() const {
  json j{{"outcome", outcome_name(outcome)}, {"citation", citation}, {"notes", notes}};
  if (reason != Reason::None) j["reason"] = reason_name(reason);
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

Verdict curve_complement_verdict(const PlaneCurve& c) {
  const SmoothnessReport s = curve_smoothness(c);
  Verdict v;
  v.citation = kInconclusive;
  if (s.inconclusive) {
    v.notes.push_back("INCONCLUSIVE_BUDGET");
    v.witness = {{"smoothness", s.to_json()}};
    return v;
  }
  if (!s.smooth) {
    v.notes.push_back("SINGULAR_HYPOTHESIS_UNMET");
    v.witness = {{"smoothness", s.to_json()}};
    return v;
  }
  const int g = (c.degree() - 1) * (c.degree() - 2) / 2;
  if (g == 0) {
    v.notes.push_back("GENUS_ZERO");
    v.witness = {{"degree", c.degree()}, {"genus", 0}};
    return v;
  }
  v.outcome = Outcome::Obstructed;
  v.reason = Reason::PositiveGenusAmpleCurve;
  v.citation = kCitePositiveGenus;
  v.witness = {{"curve", c.to_string()},
               {"degree", c.degree()},
               {"genus", g},
               {"ample", "positive degree on P^2"},
               {"smoothness", s.to_json()}};
  return v;
}

json SurfaceModel::to_json() const {
  json comps = json::array();
  for (const auto& b : boundary) {
    json c{{"name", b.name}, {"genus", b.genus}};
    if (b.cls) {
      json v = json::array();
      for (const auto& x : *b.cls) v.push_back(x.get_str());
      c["class"] = v;
    }
    comps.push_back(c);
  }
  return {{"name", name}, {"rho", rho}, {"basis", basis}, {"boundary", comps}};
}

SurfaceModel SurfaceModel::from_json(const json& j) {
  try {
    SurfaceModel m;
    m.name = j.value("name", "");
    m.rho = j.at("rho").get<int>();
    if (j.contains("basis")) m.basis = j.at("basis").get<std::vector<std::string>>();
    for (const auto& c : j.at("boundary")) {
      BoundaryComponent b;
      b.name = c.value("name", "");
      b.genus = c.value("genus", 0);
      if (c.contains("class")) {
        std::vector<mpq_class> v;
        for (const auto& x : c.at("class")) v.push_back(parse_rational(x));
        b.cls = std::move(v);
      }
      m.boundary.push_back(std::move(b));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed surface model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::Parse, std::string("malformed rational: ") + e.what());
  }
}

RationalMatrix class_matrix(const SurfaceModel& m) {
  RationalMatrix out;
  for (const auto& b : m.boundary) {
    if (b.cls) out.push_back(*b.cls);
  }
  return out;
}

Verdict boundary_verdict(const SurfaceModel& m) {
  if (m.rho < 1) throw Error(ErrorCode::InvalidArgument, "Picard number must be positive");
  bool all_classes = !m.boundary.empty();
  for (const auto& b : m.boundary) {
    if (b.genus < 0) throw Error(ErrorCode::InvalidArgument, "genus must be non-negative");
    if (b.cls && b.cls->size() != static_cast<std::size_t>(m.rho)) {
      throw Error(ErrorCode::InvalidArgument, "class vector of " + b.name + " has length " +
                                                  std::to_string(b.cls->size()) + ", expected rho = " +
                                                  std::to_string(m.rho));
    }
    all_classes = all_classes && b.cls.has_value();
  }
  Verdict v;
  for (const auto& b : m.boundary) {
    if (b.genus > 0) {
      v.outcome = Outcome::Obstructed;
      v.reason = Reason::NonRationalBoundary;
      v.citation = kCiteRational;
      v.witness = {{"component", b.name}, {"genus", b.genus}};
      return v;
    }
  }
  const long s = static_cast<long>(m.boundary.size());
  if (s < m.rho) {
    v.outcome = Outcome::Obstructed;
    v.reason = Reason::TooFewComponents;
    v.citation = kCiteCount;
    v.witness = {{"components", s}, {"rho", m.rho}};
    return v;
  }
  if (all_classes) {
    const long rank = rank_q(class_matrix(m));
    if (rank < m.rho) {
      v.outcome = Outcome::Obstructed;
      v.reason = Reason::ClassesDoNotGenerate;
      v.citation = kCiteGenerate;
      v.witness = {{"rank", rank}, {"rho", m.rho}};
      return v;
    }
    v.notes.push_back("classes span Pic tensor Q");
  } else {
    v.notes.push_back("some boundary classes are missing; generation not tested");
  }
  v.citation = kInconclusive;
  return v;
}

long rank_q(RationalMatrix m) {
  long rank = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && rank < static_cast<long>(m.size()); ++c) {
    std::size_t piv = static_cast<std::size_t>(rank);
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[static_cast<std::size_t>(rank)]);
    const auto& row = m[static_cast<std::size_t>(rank)];
    for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < m.size(); ++r) {
      if (m[r][c] == 0) continue;
      const mpq_class f = m[r][c] / row[c];
      for (std::size_t cc = c; cc < cols; ++cc) m[r][cc] -= f * row[cc];
    }
    ++rank;
  }
  return rank;
}

long rank_mod_p(const RationalMatrix& m, std::uint64_t p) {
  std::vector<std::vector<std::uint64_t>> a;
  for (const auto& row : m) {
    std::vector<std::uint64_t> r;
    for (const auto& x : row) r.push_back(rational_mod_p(x, p));
    a.push_back(std::move(r));
  }
  long rank = 0;
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  for (std::size_t c = 0; c < cols && rank < static_cast<long>(a.size()); ++c) {
    std::size_t piv = static_cast<std::size_t>(rank);
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[static_cast<std::size_t>(rank)]);
    const auto& row = a[static_cast<std::size_t>(rank)];
    const std::uint64_t inv = pow_mod(row[c], p - 2, p);
    for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < a.size(); ++r) {
      if (a[r][c] == 0) continue;
      const std::uint64_t f = static_cast<std::uint64_t>(static_cast<unsigned __int128>(a[r][c]) * inv % p);
      for (std::size_t cc = c; cc < cols; ++cc) {
        const std::uint64_t sub = static_cast<std::uint64_t>(static_cast<unsigned __int128>(f) * row[cc] % p);
        a[r][cc] = (a[r][cc] + p - sub) % p;
      }
    }
    ++rank;
  }
  return rank;
}

std::vector<SurfaceModel> catalog() {
  auto comp = [](std::string name, std::vector<long> cls) {
    std::vector<mpq_class> v(cls.begin(), cls.end());
    return BoundaryComponent{std::move(name), 0, std::move(v)};
  };
  std::vector<SurfaceModel> out;
  out.push_back({"P2", 1, {"H"}, {comp("line", {1})}});
  out.push_back({"P1xP1", 2, {"F1", "F2"}, {comp("first ruling", {1, 0}), comp("second ruling", {0, 1})}});
  for (int a = 1; a <= 3; ++a) {
    out.push_back({"F" + std::to_string(a), 2, {"f", "s"}, {comp("fiber", {1, 0}), comp("negative section", {0, 1})}});
  }
  for (int k = 1; k <= 8; ++k) {
    SurfaceModel m{"Bl" + std::to_string(k) + "P2", k + 1, {"H"}, {}};
    std::vector<long> h(static_cast<std::size_t>(k + 1), 0);
    h[0] = 1;
    m.boundary.push_back(comp("line", h));
    for (int i = 1; i <= k; ++i) {
      m.basis.push_back("E" + std::to_string(i));
      std::vector<long> e(static_cast<std::size_t>(k + 1), 0);
      e[static_cast<std::size_t>(i)] = 1;
      m.boundary.push_back(comp("exceptional curve " + std::to_string(i), e));
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace pseudochart
