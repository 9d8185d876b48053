#pragma once

#include <complex>
#include <vector>

#include "pseudochart/field.hpp"
#include "pseudochart/multipoly.hpp"

namespace pseudochart {

/// Dense univariate polynomial, coefficients low to high, no trailing zeros.
class UPoly {
 public:
  explicit UPoly(FieldPtr field) : field_(std::move(field)) {}
  UPoly(FieldPtr field, std::vector<Scalar> coeffs);

  /// Reads `p` as a polynomial in `var`; every other variable must be absent.
  static UPoly from_multipoly(const MultiPoly& p, std::size_t var);
  static UPoly constant(const Scalar& c) { return UPoly(c.field(), {c}); }
  static UPoly x(const FieldPtr& f) { return UPoly(f, {Scalar::zero(f), Scalar::one(f)}); }

  MultiPoly to_multipoly(const VarSet& vars, std::size_t var) const;

  const FieldPtr& field() const { return field_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }
  const std::vector<Scalar>& coeffs() const { return coeffs_; }
  Scalar coeff(int i) const;
  const Scalar& lead() const { return coeffs_.back(); }

  UPoly& operator+=(const UPoly& o);
  UPoly& operator-=(const UPoly& o);
  UPoly& operator*=(const UPoly& o);
  friend UPoly operator+(UPoly a, const UPoly& b) { return a += b; }
  friend UPoly operator-(UPoly a, const UPoly& b) { return a -= b; }
  friend UPoly operator*(UPoly a, const UPoly& b) { return a *= b; }
  UPoly operator-() const;
  UPoly scaled(const Scalar& c) const;
  bool operator==(const UPoly& o) const;

  UPoly monic() const;
  UPoly derivative() const;
  Scalar evaluate(const Scalar& x) const;
  UPoly to_field(const FieldPtr& f) const;
  std::string to_string(const std::string& var = "t") const;

 private:
  void trim();
  FieldPtr field_;
  std::vector<Scalar> coeffs_;
};

/// Quotient and remainder of a by b (b nonzero).
std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b);
UPoly operator%(const UPoly& a, const UPoly& b);
/// Monic gcd; gcd(0, 0) = 0.
UPoly gcd(const UPoly& a, const UPoly& b);
/// Extended gcd: returns (g, s, t) with s*a + t*b = g, g monic.
struct ExtendedGcd {
  UPoly g, s, t;
};
ExtendedGcd extended_gcd(const UPoly& a, const UPoly& b);
/// Product of the distinct irreducible factors (monic). Needs deg < char when char > 0.
UPoly squarefree_part(const UPoly& a);
/// Number of distinct roots over the algebraic closure.
int distinct_root_count(const UPoly& a);

struct Root {
  Scalar value;
  int multiplicity = 1;
};

enum class RootBackend { FiniteFieldExhaustive, ComplexNumeric };

struct NumericRootOptions {
  double residual_tol = 1e-9;
  double cluster_sep = 1e-6;
  int max_iterations = 2000;
};

/// Roots of a univariate polynomial. The exhaustive backend scans `search_field`
/// (defaults to the coefficient field); the numeric backend returns all complex
/// roots with multiplicities from cluster merging.
std::vector<Root> univariate_roots(const UPoly& p, RootBackend backend, const FieldPtr& search_field = nullptr,
                                   const NumericRootOptions& opts = {});
std::vector<Root> univariate_roots(const MultiPoly& p, RootBackend backend, const FieldPtr& search_field = nullptr,
                                   const NumericRootOptions& opts = {});

/// Aberth-Ehrlich simultaneous iteration on complex coefficients (low to high).
std::vector<Root> complex_roots(std::vector<std::complex<double>> coeffs, const NumericRootOptions& opts = {});

}  // namespace pseudochart
