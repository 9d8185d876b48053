#include "pseudochart/chartverify.hpp"
#include "pseudochart/elimination.hpp"
#include "pseudochart/errors.hpp"
#include "solver.hpp"

namespace pseudochart {

using nlohmann::json;

namespace {

constexpr std::pair<Backend, const char*> kBackendNames[] = {
    {Backend::Auto, "auto"},
    {Backend::StructuredExact, "structured_exact"},
    {Backend::StructuredNumeric, "structured_numeric"},
    {Backend::BruteFiniteField, "brute_finite_field"},
    {Backend::Generic, "generic"},
};

std::vector<Scalar> flatten(const std::vector<std::vector<Scalar>>& blocks, const detail::Shape& shape) {
  std::vector<Scalar> out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto blk = shape.projective[b] ? normalize_projective(blocks[b]) : blocks[b];
    out.insert(out.end(), blk.begin(), blk.end());
  }
  return out;
}

FiberReport exact_fiber(const Provenance& prov, const SpacePoint& y) {
  FiberReport r;
  r.backend = backend_name(Backend::StructuredExact);
  const detail::ExactFiber f = detail::solve_exact(prov, y.blocks());
  const detail::Shape shape = detail::source_shape(prov);
  r.closure_cardinality = f.count;
  for (const auto& pt : f.rational) r.solutions.push_back(flatten(pt, shape));
  return r;
}

FiberReport numeric_fiber(const Provenance& prov, const SpacePoint& y) {
  if (y.field()->is_finite()) throw Error(ErrorCode::Unsupported, "numeric backend needs a target over Q or C");
  FiberReport r;
  r.backend = backend_name(Backend::StructuredNumeric);
  detail::CBlocks target;
  for (const auto& b : y.blocks()) {
    std::vector<std::complex<double>> v;
    for (const auto& x : b) v.push_back(x.complex_value());
    target.push_back(std::move(v));
  }
  const auto pts = detail::solve_numeric(prov, target);
  json mult = json::array();
  for (const auto& p : pts) {
    std::vector<Scalar> flat;
    for (const auto& b : p.blocks) {
      for (const auto& x : b) flat.push_back(Scalar::complex(x));
    }
    r.solutions.push_back(std::move(flat));
    mult.push_back(p.multiplicity);
  }
  r.closure_cardinality = static_cast<long>(pts.size());
  r.notes["multiplicities"] = mult;
  return r;
}

FiberReport brute_fiber(const PolyMap& map, int splitting_degree, const SpacePoint& y, const FiberOptions& opt) {
  const FieldPtr field = Field::finite(opt.p, opt.k);
  if (y.field()->is_finite() && y.field()->characteristic() != opt.p) {
    throw Error(ErrorCode::FieldMismatch, "target lives over a different characteristic");
  }
  const BruteIndex index(map, field);
  FiberReport r;
  r.backend = backend_name(Backend::BruteFiniteField);
  r.solutions = index.preimages(y);
  r.closure_cardinality = static_cast<long>(r.solutions.size());
  r.cardinality_is_lower_bound = splitting_degree <= 0 || opt.k % splitting_degree != 0;
  r.notes["field"] = field->tag();
  r.notes["enumerated"] = index.enumerated();
  return r;
}

FiberReport dispatch(const PolyMap& map, const Provenance& prov, const SpacePoint& y, const FiberOptions& opt) {
  if (!y.fits(map.target())) throw Error(ErrorCode::ArityMismatch, "target point does not fit the chart target");
  FiberReport r;
  try {
    switch (opt.backend) {
      case Backend::StructuredExact:
        r = exact_fiber(prov, y);
        break;
      case Backend::StructuredNumeric:
        r = numeric_fiber(prov, y);
        break;
      case Backend::BruteFiniteField:
        r = brute_fiber(map, prov.kind.empty() ? 0 : prov.splitting_degree(), y, opt);
        break;
      case Backend::Generic:
        r = generic_fiber(map, y);
        break;
      case Backend::Auto:
        if (prov.kind.empty()) {
          r = generic_fiber(map, y);
        } else if (!y.field()->is_exact()) {
          r = numeric_fiber(prov, y);
        } else {
          try {
            r = exact_fiber(prov, y);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::Unsupported || y.field()->is_finite()) throw;
            r = numeric_fiber(prov, y);
            r.notes["fallback"] = e.what();
          }
        }
        break;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PositiveDimensional) throw;
    r = FiberReport{};
    r.backend = backend_name(opt.backend);
    r.positive_dimensional = true;
    r.closure_cardinality = -1;
    r.notes["reason"] = e.what();
  }
  r.target = point_to_json(y);
  return r;
}

std::string scalar_key(const std::vector<Scalar>& xs) {
  std::string s;
  for (const auto& x : xs) s += x.to_string() + ",";
  return s;
}

}  // namespace

std::string backend_name(Backend b) {
  for (const auto& [k, n] : kBackendNames) {
    if (k == b) return n;
  }
  return "auto";
}

Backend backend_from_name(const std::string& name) {
  for (const auto& [k, n] : kBackendNames) {
    if (name == n) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown backend '" + name + "'");
}

json FiberReport::to_json() const {
  json sols = json::array();
  for (const auto& s : solutions) {
    json v = json::array();
    for (const auto& x : s) v.push_back(x.to_string());
    sols.push_back(v);
  }
  json j{{"target", target},
         {"backend", backend},
         {"solutions", sols},
         {"positive_dimensional", positive_dimensional},
         {"closure_cardinality", closure_cardinality}};
  if (cardinality_is_lower_bound) j["cardinality_is_lower_bound"] = true;
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

FiberReport fiber(const PseudoChart& c, const SpacePoint& y, const FiberOptions& opt) {
  return dispatch(c.map, c.provenance, y, opt);
}

FiberReport fiber(const Construction& c, const SpacePoint& y, const FiberOptions& opt) {
  return dispatch(c.map, c.provenance, y, opt);
}

FiberReport generic_fiber(const PolyMap& f, const SpacePoint& y) {
  if (!f.source().is_affine() || f.source().num_vars() == 0 || f.source().num_vars() > 2) {
    throw Error(ErrorCode::Unsupported, "generic backend handles affine sources with one or two variables");
  }
  const FieldPtr field = common_field(f.field(), y.field());
  std::vector<MultiPoly> eqs;
  for (std::size_t b = 0; b < f.target().num_factors(); ++b) {
    const auto yb = convert_all(y.blocks()[b], field);
    std::vector<MultiPoly> comps;
    for (const auto& c : f.block(b)) comps.push_back(c.to_field(field));
    if (f.target().factor(b).projective()) {
      std::size_t j = 0;
      while (yb[j].is_zero()) ++j;
      for (std::size_t k = 0; k < yb.size(); ++k) {
        if (k != j) eqs.push_back(comps[k].scaled(yb[j]) - comps[j].scaled(yb[k]));
      }
    } else {
      for (std::size_t k = 0; k < yb.size(); ++k) {
        eqs.push_back(comps[k] - MultiPoly::constant(f.source().vars(), yb[k]));
      }
    }
  }
  std::erase_if(eqs, [](const MultiPoly& p) { return p.is_zero(); });

  FiberReport r;
  r.backend = backend_name(Backend::Generic);
  r.target = point_to_json(y);
  if (eqs.empty()) {
    r.positive_dimensional = true;
    r.closure_cardinality = -1;
    return r;
  }
  const CommonZeroSet zs = f.source().num_vars() == 1 ? common_zeros_1d(eqs, 0) : common_zeros_2d(eqs, 0, 1);
  if (zs.kind == CommonZeroSet::Kind::PositiveDimensional) {
    r.positive_dimensional = true;
    r.closure_cardinality = -1;
    return r;
  }
  r.closure_cardinality = zs.point_count;
  if (zs.kind == CommonZeroSet::Kind::Finite && !field->is_finite()) {
    for (const auto& pt : numeric_points(zs)) {
      std::vector<Scalar> v;
      for (const auto& x : pt) v.push_back(Scalar::complex(x));
      r.solutions.push_back(std::move(v));
    }
  }
  r.notes["eliminant"] = zs.eliminant.to_string((*f.source().vars())[0]);
  return r;
}

BruteIndex::BruteIndex(const PolyMap& f, const FieldPtr& field) : field_(field) {
  const std::uint64_t q = field->order();
  std::vector<std::vector<std::vector<Scalar>>> per_factor;
  std::uint64_t total = 1;
  const auto elems = enumerate_field(field);
  for (const auto& fac : f.source().factors()) {
    std::vector<std::vector<Scalar>> pts;
    const std::size_t nv = fac.num_vars();
    if (!fac.projective()) {
      std::vector<std::size_t> idx(nv, 0);
      while (true) {
        std::vector<Scalar> p;
        for (auto i : idx) p.push_back(elems[i]);
        pts.push_back(std::move(p));
        std::size_t k = nv;
        while (k > 0 && ++idx[k - 1] == q) idx[--k] = 0;
        if (k == 0) break;
      }
    } else {
      // Normalized: first nonzero coordinate is 1.
      for (std::size_t lead = 0; lead < nv; ++lead) {
        const std::size_t rest = nv - lead - 1;
        std::vector<std::size_t> idx(rest, 0);
        while (true) {
          std::vector<Scalar> p(lead, Scalar::zero(field));
          p.push_back(Scalar::one(field));
          for (auto i : idx) p.push_back(elems[i]);
          pts.push_back(std::move(p));
          std::size_t k = rest;
          while (k > 0 && ++idx[k - 1] == q) idx[--k] = 0;
          if (k == 0) break;
        }
      }
    }
    total *= pts.size();
    if (total > kBruteCap) {
      throw Error(ErrorCode::InvalidArgument, "brute enumeration exceeds the cap of " + std::to_string(kBruteCap),
                  {{"field", field->tag()}, {"source", f.source().to_string()}});
    }
    per_factor.push_back(std::move(pts));
  }

  std::vector<std::size_t> idx(per_factor.size(), 0);
  while (true) {
    std::vector<std::vector<Scalar>> blocks;
    for (std::size_t i = 0; i < idx.size(); ++i) blocks.push_back(per_factor[i][idx[i]]);
    const SpacePoint x(f.source(), blocks);
    ++enumerated_;
    try {
      const SpacePoint img = evaluate_map(f, x);
      buckets_[scalar_key(img.coordinates())].push_back(x.coordinates());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BasePointHit) throw;
    }
    std::size_t k = idx.size();
    while (k > 0 && ++idx[k - 1] == per_factor[k - 1].size()) idx[--k] = 0;
    if (k == 0) break;
  }
}

const std::vector<std::vector<Scalar>>& BruteIndex::preimages(const SpacePoint& y) const {
  std::vector<std::vector<Scalar>> blocks;
  for (const auto& b : y.blocks()) blocks.push_back(convert_all(b, field_));
  std::vector<FactorKind> kinds = y.kinds();
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < blocks[i].size(); ++k) names.push_back("u" + std::to_string(i) + "_" + std::to_string(k));
    factors.push_back(Factor{kinds[i], static_cast<int>(kinds[i] == FactorKind::Projective ? names.size() - 1 : names.size()), names});
  }
  const SpacePoint yy(Space(std::move(factors)), std::move(blocks));
  const auto it = buckets_.find(scalar_key(yy.coordinates()));
  return it == buckets_.end() ? empty_ : it->second;
}

}  // namespace pseudochart
