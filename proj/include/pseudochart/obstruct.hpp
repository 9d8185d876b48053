#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "pseudochart/elimination.hpp"
#include "pseudochart/multipoly.hpp"

namespace pseudochart {

/// Homogeneous nonzero form F(x, y, z) over Q.
class PlaneCurve {
 public:
  explicit PlaneCurve(MultiPoly F);
  /// Accepts +, -, *, ^, integer coefficients and the variables x, y, z.
  static PlaneCurve parse(const std::string& text);
  static const VarSet& variables();

  const MultiPoly& form() const { return F_; }
  int degree() const { return degree_; }
  std::string to_string() const { return F_.to_string(); }
  nlohmann::json to_json() const;
  static PlaneCurve from_json(const nlohmann::json& j);

 private:
  MultiPoly F_;
  int degree_;
};

struct SmoothnessReport {
  bool smooth = false;
  bool inconclusive = false;
  nlohmann::json evidence = nlohmann::json::array();
  nlohmann::json witness;

  nlohmann::json to_json() const;
};

/// Primes used by the finite-field singular-point search.
inline constexpr std::uint64_t kSmoothnessPrimes[] = {101, 211};
/// Exact elimination is run up to this degree.
inline constexpr int kExactSmoothnessDegree = 4;

/// A point [x:y:z] of P^2(F_p) where F and its gradient vanish, if any.
std::optional<std::vector<std::uint64_t>> singular_point_mod_p(const PlaneCurve& c, std::uint64_t p);

/// Jacobian criterion: exact elimination on the three standard affine charts,
/// plus the finite-field search as recorded evidence.
SmoothnessReport curve_smoothness(const PlaneCurve& c);

/// (d-1)(d-2)/2; refuses singular curves.
int plane_curve_genus(const PlaneCurve& c);

enum class Outcome { Obstructed, Inconclusive };
enum class Reason { None, NonRationalBoundary, TooFewComponents, ClassesDoNotGenerate, PositiveGenusAmpleCurve };

std::string outcome_name(Outcome o);
std::string reason_name(Reason r);

struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  Reason reason = Reason::None;
  std::string citation;
  nlohmann::json witness;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

/// Verdict for P^2 minus the curve.
Verdict curve_complement_verdict(const PlaneCurve& c);

struct BoundaryComponent {
  std::string name;
  int genus = 0;  // 0 means rational
  std::optional<std::vector<mpq_class>> cls;
};

struct SurfaceModel {
  std::string name;
  int rho = 1;
  std::vector<std::string> basis;
  std::vector<BoundaryComponent> boundary;

  nlohmann::json to_json() const;
  static SurfaceModel from_json(const nlohmann::json& j);
};

Verdict boundary_verdict(const SurfaceModel& m);

using RationalMatrix = std::vector<std::vector<mpq_class>>;

long rank_q(RationalMatrix m);
/// Rank after reduction mod p; every denominator must be a unit mod p.
long rank_mod_p(const RationalMatrix& m, std::uint64_t p);
/// Class vectors of the components that carry one.
RationalMatrix class_matrix(const SurfaceModel& m);

/// P^2, P^1 x P^1, Hirzebruch F_1..F_3 and blow-ups of P^2 at 1..8 points.
std::vector<SurfaceModel> catalog();

}  // namespace pseudochart
