#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudochart/varspace.hpp"

namespace pseudochart {

/// Construction tree of a map. Node kinds:
///   double_cover        A^1 -> P^1, t |-> [t^2+1 : t]
///   identity            params.space
///   sym2                P^1 x P^1 -> P^2, ([a:b],[c:d]) |-> [bd : ad+bc : ac]
///   segre               params.n; (P^1)^n -> P^(2^n-1)
///   linear_projection   params.n, params.matrix (n+1 rows), params.seed; P^(2^n-1) -> P^n
///   product             children side by side
///   compose             children applied first to last
struct Provenance {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  std::vector<Provenance> children;

  /// Product of leaf degrees; a projection counts as n! (its degree on the Segre variety).
  long degree() const;
  /// Smallest k such that fibers over F_q-points are defined over F_{q^k}.
  int splitting_degree() const;
  nlohmann::json to_json() const;
  static Provenance from_json(const nlohmann::json& j);
  bool operator==(const Provenance& o) const { return to_json() == o.to_json(); }
};

/// Builds the map a provenance tree describes.
PolyMap realize(const Provenance& p);

struct Construction {
  PolyMap map;
  Provenance provenance;
};

struct PseudoChart {
  std::string name;
  PolyMap map;
  long claimed_degree;
  Provenance provenance;

  int source_dim() const { return map.source().dim(); }
};

/// Realizes `prov` with canonical variable names; the source must be affine of
/// the same dimension as the target.
PseudoChart make_chart(std::string name, const Provenance& prov);
/// The chart map rebuilt from provenance with the names make_chart uses.
PolyMap canonical_chart_map(const Provenance& prov);

PseudoChart p1_double_cover();
Construction extend_over_base(const Construction& c, const Space& y);
PseudoChart cover_product_p1(int n);
Construction sym2_cover();
PseudoChart cover_p2();
Construction segre(int n);

struct ProjectionDraw {
  std::vector<std::vector<long>> matrix;
  int attempt = 0;
};

/// Center-disjointness evidence for a linear projection restricted to the
/// Segre variety of (P^1)^n. Throws CenterMeetsVariety (with witness) when a
/// common zero is found or certification is inconclusive.
nlohmann::json certify_projection(int n, const std::vector<std::vector<long>>& matrix);
Construction linear_projection_from_matrix(int n, const std::vector<std::vector<long>>& matrix,
                                           std::uint64_t seed = 0, int attempt = 0);
Construction random_linear_projection(int n, std::uint64_t seed, int max_attempts = 16);
PseudoChart cover_pn(int n, std::uint64_t seed);

/// w^(to)_k = prod_m x_m^exponents[k][m] * w^(from)_k on the overlap of the base charts.
struct Transition {
  std::size_t from;
  std::size_t to;
  std::vector<std::vector<int>> exponents;
};

struct BundleAtlas {
  int n;
  std::vector<int> degrees;
  std::uint64_t seed = 0;
  std::vector<PseudoChart> charts;
  std::vector<Transition> transitions;

  int fiber_dim() const { return static_cast<int>(degrees.size()) - 1; }
  const Transition& transition(std::size_t from, std::size_t to) const;
};

BundleAtlas bundle_atlas(int n, const std::vector<int>& degrees, std::uint64_t seed = 1);

nlohmann::json chart_to_json(const PseudoChart& c);
PseudoChart chart_from_json(const nlohmann::json& j);
nlohmann::json atlas_to_json(const BundleAtlas& a);
BundleAtlas atlas_from_json(const nlohmann::json& j);

}  // namespace pseudochart
