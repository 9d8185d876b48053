#pragma once

#include <complex>
#include <span>
#include <vector>

#include <json.hpp>

#include "pseudochart/multipoly.hpp"
#include "pseudochart/upoly.hpp"

namespace pseudochart {

/// One branch of a zero-dimensional description: the first coordinate is a
/// root of `modulus` (squarefree), and above each such root the second
/// coordinate runs over the roots of `fiber`, a monic polynomial whose
/// coefficients are residues modulo `modulus`.
struct ZeroBranch {
  UPoly modulus;
  std::vector<UPoly> fiber;  // coefficients in the second variable, low to high
  bool whole_line = false;   // every value of the second coordinate is a common zero
  int point_count = 0;       // distinct points over the closure; -1 when whole_line
};

/// Exact description of the common zero set of polynomials in one or two
/// variables over the algebraic closure of Q or F_p.
struct CommonZeroSet {
  enum class Kind { Empty, Finite, PositiveDimensional };
  Kind kind = Kind::Empty;
  UPoly eliminant;  // polynomial in the first variable vanishing on the projection
  std::vector<ZeroBranch> branches;
  int point_count = 0;

  explicit CommonZeroSet(FieldPtr f) : eliminant(std::move(f)) {}
  nlohmann::json to_json(const std::string& first, const std::string& second = "") const;
};

/// Common zeros of univariate polynomials in `var`.
CommonZeroSet common_zeros_1d(std::span<const MultiPoly> polys, std::size_t var);
/// Common zeros of polynomials in `x` and `y` (no other variable may occur).
CommonZeroSet common_zeros_2d(std::span<const MultiPoly> polys, std::size_t x, std::size_t y);

/// Numerical coordinates of the points of a finite zero set over Q.
std::vector<std::vector<std::complex<double>>> numeric_points(const CommonZeroSet& zs);

struct EliminationBudget {
  std::size_t max_polys = 32;
  int max_degree = 96;
};

/// Sound "no common zero" test: eliminates variables by pairwise resultants
/// (dropping identically-zero ones) until one variable remains, then takes
/// the gcd. `certified` means the input has no common zero over the closure;
/// otherwise the result is inconclusive and `eliminant` is the surviving
/// polynomial.
struct EliminationCertificate {
  bool certified = false;
  UPoly eliminant;
  std::size_t variable = 0;
  explicit EliminationCertificate(FieldPtr f) : eliminant(std::move(f)) {}
};

EliminationCertificate certify_no_common_zero(std::vector<MultiPoly> polys, std::vector<std::size_t> order,
                                              const EliminationBudget& budget = {});

}  // namespace pseudochart
