#include "pseudochart/varspace.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "pseudochart/errors.hpp"
#include "pseudochart/polyjson.hpp"

namespace pseudochart {

using nlohmann::json;

namespace {

std::vector<std::string> numbered(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

const char* kind_name(FactorKind k) { return k == FactorKind::Affine ? "affine" : "projective"; }

}  // namespace

Space::Space(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::vector<std::string> all;
  for (const auto& f : factors_) {
    if (f.dim < 1) throw Error(ErrorCode::InvalidArgument, "factor dimension must be at least 1");
    const std::size_t want = f.projective() ? f.dim + 1 : f.dim;
    if (f.vars.size() != want) {
      throw Error(ErrorCode::ArityMismatch, std::string(kind_name(f.kind)) + " factor of dimension " +
                                                std::to_string(f.dim) + " needs " + std::to_string(want) +
                                                " variables");
    }
    offsets_.push_back(all.size());
    all.insert(all.end(), f.vars.begin(), f.vars.end());
  }
  vars_ = make_vars(std::move(all));
}

Space Space::affine(int dim, const std::string& prefix) {
  if (dim == 1) return affine(std::vector<std::string>{prefix});
  return affine(numbered(prefix, dim));
}

Space Space::projective(int dim, const std::string& prefix) { return projective(numbered(prefix, dim + 1)); }

Space Space::point() { return Space(std::vector<Factor>{}); }

Space Space::affine(std::vector<std::string> names) {
  const int d = static_cast<int>(names.size());
  return Space({Factor{FactorKind::Affine, d, std::move(names)}});
}

Space Space::projective(std::vector<std::string> names) {
  const int d = static_cast<int>(names.size()) - 1;
  return Space({Factor{FactorKind::Projective, d, std::move(names)}});
}

Space Space::product(const Space& a, const Space& b) {
  std::set<std::string> used(a.vars()->begin(), a.vars()->end());
  std::vector<Factor> factors = a.factors();
  std::vector<Factor> rest = b.factors();
  for (auto& f : rest) {
    for (auto& name : f.vars) {
      if (used.count(name)) {
        for (int k = 1;; ++k) {
          const std::string cand = name + "_" + std::to_string(k);
          if (!used.count(cand) && std::find(b.vars()->begin(), b.vars()->end(), cand) == b.vars()->end()) {
            name = cand;
            break;
          }
        }
      }
      used.insert(name);
    }
    factors.push_back(std::move(f));
  }
  return Space(std::move(factors));
}

std::vector<std::size_t> Space::block(std::size_t i) const {
  std::vector<std::size_t> out(factors_.at(i).num_vars());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = offsets_[i] + k;
  return out;
}

int Space::dim() const {
  int d = 0;
  for (const auto& f : factors_) d += f.dim;
  return d;
}

bool Space::has_projective() const {
  return std::any_of(factors_.begin(), factors_.end(), [](const Factor& f) { return f.projective(); });
}

std::string Space::to_string() const {
  if (factors_.empty()) return "pt";
  std::string out;
  for (const auto& f : factors_) {
    if (!out.empty()) out += " x ";
    out += (f.projective() ? "P^" : "A^") + std::to_string(f.dim);
  }
  return out;
}

bool Space::same_shape(const Space& o) const {
  if (factors_.size() != o.factors_.size()) return false;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].kind != o.factors_[i].kind || factors_[i].dim != o.factors_[i].dim) return false;
  }
  return true;
}

bool Space::operator==(const Space& o) const { return same_shape(o) && same_vars(vars_, o.vars_); }

std::vector<Scalar> normalize_projective(std::vector<Scalar> block) {
  std::size_t lead = block.size();
  if (!block.empty() && block[0].field()->kind() == FieldKind::Complex) {
    double mx = 0.0;
    for (const auto& c : block) mx = std::max(mx, c.magnitude());
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (mx > 0.0 && block[i].magnitude() > 1e-12 * mx) {
        lead = i;
        break;
      }
    }
  } else {
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (!block[i].is_zero()) {
        lead = i;
        break;
      }
    }
  }
  if (lead == block.size()) throw Error(ErrorCode::InvalidArgument, "projective coordinates are all zero");
  const Scalar inv = block[lead].inverse();
  for (auto& c : block) c *= inv;
  block[lead] = Scalar::one(block[lead].field());
  return block;
}

SpacePoint::SpacePoint(const Space& space, std::vector<std::vector<Scalar>> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.size() != space.num_factors()) throw Error(ErrorCode::ArityMismatch, "point has wrong number of blocks");
  FieldPtr field;
  for (const auto& b : blocks_) {
    for (const auto& c : b) field = field ? common_field(field, c.field()) : c.field();
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Factor& f = space.factor(i);
    if (blocks_[i].size() != f.num_vars()) {
      throw Error(ErrorCode::ArityMismatch, "block " + std::to_string(i) + " needs " + std::to_string(f.num_vars()) +
                                                " coordinates");
    }
    for (auto& c : blocks_[i]) c = convert(c, field);
    kinds_.push_back(f.kind);
    if (f.projective()) blocks_[i] = normalize_projective(std::move(blocks_[i]));
  }
}

std::vector<Scalar> SpacePoint::coordinates() const {
  std::vector<Scalar> out;
  for (const auto& b : blocks_) out.insert(out.end(), b.begin(), b.end());
  return out;
}

FieldPtr SpacePoint::field() const {
  for (const auto& b : blocks_) {
    if (!b.empty()) return b[0].field();
  }
  return Field::rationals();
}

bool SpacePoint::fits(const Space& space) const {
  if (blocks_.size() != space.num_factors()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (kinds_[i] != space.factor(i).kind || blocks_[i].size() != space.factor(i).num_vars()) return false;
  }
  return true;
}

bool SpacePoint::equals(const SpacePoint& o, double tol) const {
  if (kinds_ != o.kinds_ || blocks_.size() != o.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].size() != o.blocks_[i].size()) return false;
    for (std::size_t k = 0; k < blocks_[i].size(); ++k) {
      const Scalar& a = blocks_[i][k];
      const Scalar& b = o.blocks_[i][k];
      if (a.field()->kind() == FieldKind::Complex || b.field()->kind() == FieldKind::Complex) {
        const FieldPtr c = Field::complex();
        if (std::abs(convert(a, c).complex_value() - convert(b, c).complex_value()) > tol) return false;
      } else if (!(a == b)) {
        return false;
      }
    }
  }
  return true;
}

std::string SpacePoint::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) os << " x ";
    const bool proj = kinds_[i] == FactorKind::Projective;
    os << (proj ? "[" : "(");
    for (std::size_t k = 0; k < blocks_[i].size(); ++k) {
      if (k) os << (proj ? ":" : ",");
      os << blocks_[i][k].to_string();
    }
    os << (proj ? "]" : ")");
  }
  return os.str();
}

PolyMap::PolyMap(Space source, Space target, std::vector<std::vector<MultiPoly>> components, std::string provenance,
                 bool chart_local)
    : source_(std::move(source)),
      target_(std::move(target)),
      components_(std::move(components)),
      provenance_(std::move(provenance)),
      chart_local_(chart_local) {
  if (components_.size() != target_.num_factors()) {
    throw Error(ErrorCode::ArityMismatch, "map needs one component tuple per target factor");
  }
  for (std::size_t t = 0; t < components_.size(); ++t) {
    if (components_[t].size() != target_.factor(t).num_vars()) {
      throw Error(ErrorCode::ArityMismatch, "target factor " + std::to_string(t) + " needs " +
                                                std::to_string(target_.factor(t).num_vars()) + " components");
    }
    for (const auto& p : components_[t]) {
      if (!same_vars(p.vars(), source_.vars())) {
        throw Error(ErrorCode::VariableMismatch, "component is not over the source variables");
      }
      if (!field_) field_ = p.field();
      if (!same_field(field_, p.field())) throw Error(ErrorCode::FieldMismatch, "components over different fields");
    }
  }
  if (!field_) field_ = Field::rationals();

  multidegree_.assign(target_.num_factors(), std::vector<int>(source_.num_factors(), -1));
  for (std::size_t t = 0; t < components_.size(); ++t) {
    const bool proj_target = target_.factor(t).projective();
    for (std::size_t s = 0; s < source_.num_factors(); ++s) {
      if (!source_.factor(s).projective()) continue;
      const auto blk = source_.block(s);
      int deg = -1;
      for (const auto& p : components_[t]) {
        if (p.is_zero()) continue;
        if (!p.is_homogeneous_in_block(blk)) {
          throw Error(ErrorCode::InvalidArgument, "component " + p.to_string() + " is not homogeneous in source factor " +
                                                      std::to_string(s));
        }
        const int d = p.degree_in_block(blk);
        if (deg >= 0 && d != deg) {
          throw Error(ErrorCode::InvalidArgument, "components of target factor " + std::to_string(t) +
                                                      " have different degrees in source factor " +
                                                      std::to_string(s));
        }
        deg = d;
      }
      if (!proj_target && deg > 0 && !chart_local_) {
        throw Error(ErrorCode::InvalidArgument, "affine target component depends on projective source coordinates");
      }
      multidegree_[t][s] = std::max(deg, 0);
    }
  }
}

std::vector<MultiPoly> PolyMap::flat_components() const {
  std::vector<MultiPoly> out;
  for (const auto& b : components_) out.insert(out.end(), b.begin(), b.end());
  return out;
}

int PolyMap::block_degree(std::size_t t) const {
  int d = 0;
  for (const auto& p : components_.at(t)) d = std::max(d, p.total_degree());
  return d;
}

PolyMap PolyMap::with_provenance(std::string provenance) const {
  PolyMap out = *this;
  out.provenance_ = std::move(provenance);
  return out;
}

bool PolyMap::operator==(const PolyMap& o) const {
  if (!(source_ == o.source_) || !target_.same_shape(o.target_)) return false;
  return components_ == o.components_;
}

PolyMap identity_map(const Space& space) {
  std::vector<std::vector<MultiPoly>> comps;
  for (std::size_t i = 0; i < space.num_factors(); ++i) {
    std::vector<MultiPoly> b;
    for (std::size_t v : space.block(i)) b.push_back(MultiPoly::variable(space.vars(), v, Field::rationals()));
    comps.push_back(std::move(b));
  }
  return PolyMap(space, space, std::move(comps), "identity");
}

PolyMap relabel(const PolyMap& f, const Space& source, const Space& target) {
  if (!f.source().same_shape(source) || !f.target().same_shape(target)) {
    throw Error(ErrorCode::VariableMismatch, "relabel needs spaces of the same shape");
  }
  std::vector<MultiPoly> images;
  for (std::size_t v = 0; v < source.num_vars(); ++v) images.push_back(MultiPoly::variable(source.vars(), v, f.field()));
  auto comps = f.components();
  for (auto& b : comps)
    for (auto& p : b) p = p.substitute(images, source.vars());
  return PolyMap(source, target, std::move(comps), f.provenance(), f.chart_local());
}

SpacePoint evaluate_map(const PolyMap& f, const SpacePoint& x) {
  if (!x.fits(f.source())) throw Error(ErrorCode::ArityMismatch, "point does not lie in the source space");
  const auto coords = x.coordinates();
  std::vector<std::vector<Scalar>> out;
  for (std::size_t t = 0; t < f.target().num_factors(); ++t) {
    std::vector<Scalar> b;
    for (const auto& p : f.block(t)) b.push_back(p.evaluate(coords));
    if (f.target().factor(t).projective()) {
      const bool all_zero = std::all_of(b.begin(), b.end(), [](const Scalar& c) { return c.is_zero(); });
      if (all_zero) {
        throw Error(ErrorCode::BasePointHit, "all components of target factor " + std::to_string(t) + " vanish at " +
                                                 x.to_string(),
                    json{{"point", point_to_json(x)}, {"target_factor", t}});
      }
    }
    out.push_back(std::move(b));
  }
  return SpacePoint(f.target(), std::move(out));
}

PolyMap compose(const PolyMap& f, const PolyMap& g) {
  if (!f.target().same_shape(g.source())) {
    throw Error(ErrorCode::VariableMismatch,
                "cannot compose: " + f.target().to_string() + " is not " + g.source().to_string());
  }
  if (g.chart_local() && g.source().has_projective()) {
    throw Error(ErrorCode::InvalidArgument, "outer map is not multihomogeneous in its projective source blocks");
  }
  const auto images = f.flat_components();
  std::vector<std::vector<MultiPoly>> comps;
  for (const auto& b : g.components()) {
    std::vector<MultiPoly> nb;
    for (const auto& p : b) nb.push_back(p.to_field(common_field(p.field(), f.field())).substitute(images, f.source().vars()));
    comps.push_back(std::move(nb));
  }
  return PolyMap(f.source(), g.target(), std::move(comps), "compose(" + f.provenance() + ", " + g.provenance() + ")",
                 f.chart_local());
}

namespace {

std::vector<std::vector<MultiPoly>> moved_components(const PolyMap& f, const Space& joint, std::size_t offset) {
  std::vector<MultiPoly> images;
  for (std::size_t v = 0; v < f.source().num_vars(); ++v) {
    images.push_back(MultiPoly::variable(joint.vars(), offset + v, f.field()));
  }
  std::vector<std::vector<MultiPoly>> out;
  for (const auto& b : f.components()) {
    std::vector<MultiPoly> nb;
    for (const auto& p : b) nb.push_back(p.substitute(images, joint.vars()));
    out.push_back(std::move(nb));
  }
  return out;
}

}  // namespace

PolyMap product_map(const PolyMap& f, const PolyMap& g) {
  const FieldPtr field = common_field(f.field(), g.field());
  const PolyMap fx(f.source(), f.target(), [&] {
    auto c = f.components();
    for (auto& b : c)
      for (auto& p : b) p = p.to_field(field);
    return c;
  }(), f.provenance(), f.chart_local());
  const PolyMap gx(g.source(), g.target(), [&] {
    auto c = g.components();
    for (auto& b : c)
      for (auto& p : b) p = p.to_field(field);
    return c;
  }(), g.provenance(), g.chart_local());
  const Space source = Space::product(f.source(), g.source());
  const Space target = Space::product(f.target(), g.target());
  auto comps = moved_components(fx, source, 0);
  auto rest = moved_components(gx, source, f.source().num_vars());
  comps.insert(comps.end(), rest.begin(), rest.end());
  return PolyMap(source, target, std::move(comps), "product(" + f.provenance() + ", " + g.provenance() + ")",
                 f.chart_local() || g.chart_local());
}

json space_to_json(const Space& s) {
  json factors = json::array();
  for (const auto& f : s.factors()) {
    factors.push_back({{"kind", kind_name(f.kind)}, {"dim", f.dim}, {"vars", f.vars}});
  }
  return {{"factors", factors}};
}

Space space_from_json(const json& j) {
  try {
    std::vector<Factor> factors;
    for (const auto& f : j.at("factors")) {
      const std::string kind = f.at("kind").get<std::string>();
      if (kind != "affine" && kind != "projective") throw Error(ErrorCode::Parse, "unknown factor kind " + kind);
      factors.push_back(Factor{kind == "affine" ? FactorKind::Affine : FactorKind::Projective, f.at("dim").get<int>(),
                               f.at("vars").get<std::vector<std::string>>()});
    }
    return Space(std::move(factors));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed space: ") + e.what());
  }
}

json point_to_json(const SpacePoint& x) {
  json blocks = json::array();
  for (const auto& b : x.blocks()) {
    json arr = json::array();
    for (const auto& c : b) arr.push_back(scalar_to_json(c));
    blocks.push_back(arr);
  }
  json out{{"blocks", blocks}};
  if (x.field()->kind() != FieldKind::Rational) out["field"] = field_to_json(x.field());
  return out;
}

SpacePoint point_from_json(const json& j, const Space& space) {
  try {
    const FieldPtr field = j.contains("field") ? field_from_json(j.at("field")) : Field::rationals();
    std::vector<std::vector<Scalar>> blocks;
    for (const auto& b : j.at("blocks")) {
      std::vector<Scalar> nb;
      for (const auto& c : b) nb.push_back(scalar_from_json(c, field));
      blocks.push_back(std::move(nb));
    }
    return SpacePoint(space, std::move(blocks));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed point: ") + e.what());
  }
}

json map_to_json(const PolyMap& f) {
  json comps = json::array();
  for (const auto& b : f.components()) {
    json arr = json::array();
    for (const auto& p : b) {
      json pj = poly_to_json(p);
      pj.erase("vars");
      arr.push_back(pj);
    }
    comps.push_back(arr);
  }
  json out{{"source", space_to_json(f.source())},
           {"target", space_to_json(f.target())},
           {"components", comps},
           {"provenance", f.provenance()}};
  if (f.chart_local()) out["chart_local"] = true;
  return out;
}

PolyMap map_from_json(const json& j) {
  try {
    Space source = space_from_json(j.at("source"));
    Space target = space_from_json(j.at("target"));
    std::vector<std::vector<MultiPoly>> comps;
    for (const auto& b : j.at("components")) {
      std::vector<MultiPoly> nb;
      for (const auto& p : b) nb.push_back(poly_from_json(p, source.vars()));
      comps.push_back(std::move(nb));
    }
    return PolyMap(std::move(source), std::move(target), std::move(comps), j.value("provenance", std::string()),
                   j.value("chart_local", false));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed map: ") + e.what());
  }
}

}  // namespace pseudochart
