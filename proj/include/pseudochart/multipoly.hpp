#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pseudochart/field.hpp"

namespace pseudochart {

/// Shared, immutable list of variable names. Two sets are the same when
/// their names match in order.
using VarSet = std::shared_ptr<const std::vector<std::string>>;

VarSet make_vars(std::vector<std::string> names);
bool same_vars(const VarSet& a, const VarSet& b);

using Exponent = std::vector<std::uint32_t>;

struct Term {
  Exponent exponent;
  Scalar coeff;
};

/// Sparse multivariate polynomial in graded-lex order (largest term first),
/// with no zero coefficients and one coefficient field.
class MultiPoly {
 public:
  MultiPoly(VarSet vars, FieldPtr field);

  static MultiPoly constant(VarSet vars, const Scalar& c);
  static MultiPoly variable(VarSet vars, std::size_t index, const FieldPtr& field);
  static MultiPoly variable(VarSet vars, std::string_view name, const FieldPtr& field);
  static MultiPoly monomial(VarSet vars, Exponent e, const Scalar& c);
  /// Merges duplicate exponents and drops zeros.
  static MultiPoly from_terms(VarSet vars, FieldPtr field, std::vector<Term> terms);

  const VarSet& vars() const { return vars_; }
  const FieldPtr& field() const { return field_; }
  std::size_t num_vars() const { return vars_->size(); }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t var_index(std::string_view name) const;

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Scalar constant_value() const;
  /// -1 for the zero polynomial.
  int total_degree() const;
  int degree_in(std::size_t var) const;
  /// Degree in the sum of the given variables (-1 for zero).
  int degree_in_block(std::span<const std::size_t> block) const;
  bool is_homogeneous() const;
  bool is_homogeneous_in_block(std::span<const std::size_t> block) const;
  bool involves(std::size_t var) const { return degree_in(var) > 0; }
  const Term& leading_term() const;

  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(MultiPoly a, const MultiPoly& b) { return a *= b; }
  MultiPoly scaled(const Scalar& c) const;
  MultiPoly pow(unsigned e) const;
  bool operator==(const MultiPoly& o) const;

  /// Evaluates at a point whose field the coefficients embed into (Q -> C, Q -> F_q, F_p -> F_{p^k}).
  Scalar evaluate(std::span<const Scalar> point) const;
  /// Replaces variable i by images[i]; all images live over `target_vars`.
  MultiPoly substitute(std::span<const MultiPoly> images, const VarSet& target_vars) const;
  MultiPoly specialize(std::size_t var, const Scalar& value) const;
  MultiPoly derivative(std::size_t var) const;
  /// Coefficients as a polynomial in `var`; entry d is the coefficient of var^d.
  std::vector<MultiPoly> coefficients_in(std::size_t var) const;
  MultiPoly to_field(const FieldPtr& field) const;
  /// Re-expresses over a variable set containing every variable of this one (matched by name).
  MultiPoly rebase(const VarSet& vars) const;
  std::string to_string() const;

 private:
  void canonicalize();
  void require_compatible(const MultiPoly& o) const;

  VarSet vars_;
  FieldPtr field_;
  std::vector<Term> terms_;
};

bool grlex_greater(const Exponent& a, const Exponent& b);

MultiPoly partial_derivative(const MultiPoly& p, std::string_view var);

/// Exact quotient a / b; throws if b does not divide a.
MultiPoly exact_divide(const MultiPoly& a, const MultiPoly& b);

/// Determinant of a square matrix of polynomials by fraction-free Bareiss elimination.
MultiPoly bareiss_determinant(std::vector<std::vector<MultiPoly>> m);

/// Sylvester resultant with respect to `var`.
MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, std::size_t var);
MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, std::string_view var);

/// Parses "+ - * ^", integer/rational literals, parentheses and the given variable names.
MultiPoly parse_poly(std::string_view text, const VarSet& vars, const FieldPtr& field = Field::rationals());

}  // namespace pseudochart
