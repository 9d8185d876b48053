#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudochart/atlas.hpp"
#include "pseudochart/elimination.hpp"

namespace pseudochart {

enum class Backend { Auto, StructuredExact, StructuredNumeric, BruteFiniteField, Generic };

std::string backend_name(Backend b);
Backend backend_from_name(const std::string& name);

struct FiberOptions {
  Backend backend = Backend::Auto;
  std::uint64_t p = 11;  // brute backend field F_{p^k}
  int k = 2;
};

/// Brute enumeration cap on |F_{p^k}|^n.
inline constexpr std::uint64_t kBruteCap = 1'000'000;

struct FiberReport {
  nlohmann::json target;
  std::string backend;
  /// Source points over the base field of the target (exact backends),
  /// over F_{p^k} (brute) or complex approximations (numeric).
  std::vector<std::vector<Scalar>> solutions;
  bool positive_dimensional = false;
  long closure_cardinality = 0;
  /// Brute backend only: the count is exact when k is a multiple of the splitting degree.
  bool cardinality_is_lower_bound = false;
  nlohmann::json notes = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// Fiber of a chart (or any construction) over a target point.
FiberReport fiber(const PseudoChart& c, const SpacePoint& y, const FiberOptions& opt = {});
FiberReport fiber(const Construction& c, const SpacePoint& y, const FiberOptions& opt = {});
/// Fiber computed from the map alone (at most two source variables).
FiberReport generic_fiber(const PolyMap& f, const SpacePoint& y);

/// All source points over F_{p^k}, bucketed by canonical image.
class BruteIndex {
 public:
  BruteIndex(const PolyMap& f, const FieldPtr& field);
  const FieldPtr& field() const { return field_; }
  std::uint64_t enumerated() const { return enumerated_; }
  const std::vector<std::vector<Scalar>>& preimages(const SpacePoint& y) const;

 private:
  FieldPtr field_;
  std::uint64_t enumerated_ = 0;
  std::map<std::string, std::vector<std::vector<Scalar>>> buckets_;
  std::vector<std::vector<Scalar>> empty_;
};

struct BasePointCertificate {
  bool certified = false;
  bool inconclusive = false;
  std::string method;
  nlohmann::json evidence = nlohmann::json::array();
  nlohmann::json witness;

  nlohmann::json to_json() const;
};

/// Direct elimination on the components of every projective target block.
BasePointCertificate check_no_base_points(const PolyMap& f, const EliminationBudget& budget = {});
/// Direct elimination when the source has at most two variables, plus the
/// chained per-layer certificate along the provenance tree.
BasePointCertificate check_no_base_points(const PseudoChart& c);

struct DegreeReport {
  std::uint64_t seed = 0;
  std::string backend;
  std::vector<nlohmann::json> targets;
  std::vector<long> cardinalities;
  long inferred = 0;
  double attained_fraction = 0.0;
  bool non_generic_sampling = false;

  nlohmann::json to_json() const;
};

DegreeReport generic_degree(const PseudoChart& c, int samples, std::uint64_t seed, const FiberOptions& opt = {});
DegreeReport generic_degree(const Construction& c, int samples, std::uint64_t seed, const FiberOptions& opt = {});

struct SurjectivityCertificate {
  std::vector<nlohmann::json> targets;
  std::vector<nlohmann::json> evidence;
  bool surjective_on_tested = false;
  nlohmann::json witness;

  nlohmann::json to_json() const;
};

/// Coordinate points, `hyperplane` random points on each coordinate hyperplane
/// and `general` random points of a single projective target.
std::vector<SpacePoint> standard_strata(const Space& target, int hyperplane, int general, std::uint64_t seed);
/// Every point of P^1 over a finite field.
std::vector<SpacePoint> all_points_p1(const Space& target, const FieldPtr& field);

SurjectivityCertificate surjectivity_scan(const PseudoChart& c, const std::vector<SpacePoint>& strata);

struct FiniteFiberReport {
  bool pass = true;
  long max_cardinality = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  nlohmann::json witness;

  nlohmann::json to_json() const;
};

FiniteFiberReport finite_fiber_scan(const PseudoChart& c, int samples, std::uint64_t seed);

struct MultiplicativityReport {
  long inner_degree = 0;
  long outer_degree = 0;
  long composite_degree = 0;
  bool agrees = false;

  nlohmann::json to_json() const;
};

MultiplicativityReport degree_multiplicativity_check(const PseudoChart& f, const Construction& g, int samples,
                                                     std::uint64_t seed);

struct AgreementReport {
  std::uint64_t p = 0;
  int k = 0;
  int targets = 0;
  int mismatches = 0;
  bool exact_comparison = false;  // k is a multiple of the splitting degree
  nlohmann::json details = nlohmann::json::array();

  bool pass() const { return mismatches == 0; }
  nlohmann::json to_json() const;
};

/// Compares brute enumeration over F_{p^k} with the structured exact count at
/// every F_p-point of the target.
AgreementReport backend_agreement(const PseudoChart& c, std::uint64_t p, int k);

struct CoverageReport {
  int samples = 0;
  int covered = 0;
  std::vector<int> covering_chart;
  nlohmann::json failures = nlohmann::json::array();

  bool pass() const { return covered == samples; }
  nlohmann::json to_json() const;
};

CoverageReport atlas_coverage(const BundleAtlas& atlas, int samples, std::uint64_t seed);

/// Thread count from PSEUDOCHART_THREADS (default: hardware concurrency).
unsigned worker_threads();
/// Runs fn(0..n-1) on worker threads; results keep index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// splitmix64 step, used to derive per-target seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace pseudochart
