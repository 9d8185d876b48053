#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudochart/multipoly.hpp"

namespace pseudochart {

enum class FactorKind { Affine, Projective };

struct Factor {
  FactorKind kind;
  int dim;
  std::vector<std::string> vars;  // dim names (affine) or dim+1 names (projective)

  bool projective() const { return kind == FactorKind::Projective; }
  std::size_t num_vars() const { return vars.size(); }
};

/// A product of affine and projective spaces with one global list of
/// variable names, factor by factor.
class Space {
 public:
  explicit Space(std::vector<Factor> factors);

  static Space affine(int dim, const std::string& prefix = "t");
  static Space projective(int dim, const std::string& prefix = "y");
  static Space point();
  static Space affine(std::vector<std::string> names);
  static Space projective(std::vector<std::string> names);
  /// Factors of `a` followed by those of `b`; colliding names of `b` get a "_<k>" suffix.
  static Space product(const Space& a, const Space& b);

  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(std::size_t i) const { return factors_.at(i); }
  std::size_t num_factors() const { return factors_.size(); }
  const VarSet& vars() const { return vars_; }
  std::size_t num_vars() const { return vars_->size(); }
  /// Indices into vars() of factor i.
  std::vector<std::size_t> block(std::size_t i) const;
  std::size_t block_offset(std::size_t i) const { return offsets_.at(i); }
  int dim() const;
  bool has_projective() const;
  bool is_affine() const { return !has_projective(); }
  std::string to_string() const;

  /// Same factor kinds and dimensions; names are ignored.
  bool same_shape(const Space& o) const;
  bool operator==(const Space& o) const;

 private:
  std::vector<Factor> factors_;
  std::vector<std::size_t> offsets_;
  VarSet vars_;
};

/// A point of a Space: one coordinate vector per factor, projective blocks in
/// canonical form (first nonzero coordinate equal to 1).
class SpacePoint {
 public:
  SpacePoint(const Space& space, std::vector<std::vector<Scalar>> blocks);

  const std::vector<std::vector<Scalar>>& blocks() const { return blocks_; }
  const std::vector<FactorKind>& kinds() const { return kinds_; }
  std::vector<Scalar> coordinates() const;
  FieldPtr field() const;
  bool fits(const Space& space) const;

  /// Exact equality over exact fields; 1e-7 per coordinate for complex points.
  bool equals(const SpacePoint& o, double tol = 1e-7) const;
  std::string to_string() const;

 private:
  std::vector<FactorKind> kinds_;
  std::vector<std::vector<Scalar>> blocks_;
};

/// Scales a projective block so its first nonzero entry is 1. Complex entries
/// below 1e-12 of the block maximum count as zero. Throws on the zero vector.
std::vector<Scalar> normalize_projective(std::vector<Scalar> block);

/// Polynomial map between spaces: for each target factor, the tuple of its
/// coordinate polynomials in the source variables.
class PolyMap {
 public:
  PolyMap(Space source, Space target, std::vector<std::vector<MultiPoly>> components, std::string provenance = "",
          bool chart_local = false);

  const Space& source() const { return source_; }
  const Space& target() const { return target_; }
  const std::vector<std::vector<MultiPoly>>& components() const { return components_; }
  const std::vector<MultiPoly>& block(std::size_t target_factor) const { return components_.at(target_factor); }
  std::vector<MultiPoly> flat_components() const;
  const FieldPtr& field() const { return field_; }
  const std::string& provenance() const { return provenance_; }
  bool chart_local() const { return chart_local_; }
  /// multidegree()[t][s]: degree of target block t in source projective factor s (-1 when not projective).
  const std::vector<std::vector<int>>& multidegree() const { return multidegree_; }
  /// Total degree of the components of target block t (max over components).
  int block_degree(std::size_t target_factor) const;

  PolyMap with_provenance(std::string provenance) const;
  bool operator==(const PolyMap& o) const;

 private:
  Space source_;
  Space target_;
  std::vector<std::vector<MultiPoly>> components_;
  FieldPtr field_;
  std::string provenance_;
  bool chart_local_;
  std::vector<std::vector<int>> multidegree_;
};

PolyMap identity_map(const Space& space);
/// Same map with variables renamed positionally (shapes must match).
PolyMap relabel(const PolyMap& f, const Space& source, const Space& target);
SpacePoint evaluate_map(const PolyMap& f, const SpacePoint& x);
/// g after f.
PolyMap compose(const PolyMap& f, const PolyMap& g);
PolyMap product_map(const PolyMap& f, const PolyMap& g);

nlohmann::json space_to_json(const Space& s);
Space space_from_json(const nlohmann::json& j);
nlohmann::json point_to_json(const SpacePoint& x);
SpacePoint point_from_json(const nlohmann::json& j, const Space& space);
nlohmann::json map_to_json(const PolyMap& f);
PolyMap map_from_json(const nlohmann::json& j);

}  // namespace pseudochart
