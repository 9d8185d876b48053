#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace pseudochart {

enum class FieldKind { Rational, Finite, Complex };

inline constexpr int kMaxExtensionDegree = 8;

class Field;
using FieldPtr = std::shared_ptr<const Field>;

/// Coefficient field descriptor. Instances are interned and immutable.
///
/// Finite fields F_{p^k} are realised as F_p[x]/(m) with m the
/// lexicographically least monic irreducible of degree k, where "least"
/// compares (c_{k-1}, ..., c_0) as base-p digits.
class Field {
 public:
  static FieldPtr rationals();
  static FieldPtr complex();
  static FieldPtr finite(std::uint64_t p, int k = 1);

  FieldKind kind() const { return kind_; }
  std::uint64_t characteristic() const { return p_; }
  int degree() const { return k_; }
  /// Monic modulus, coefficients low to high (size k+1). Empty for prime fields.
  const std::vector<std::uint64_t>& modulus() const { return modulus_; }
  /// p^k; throws if it does not fit in 64 bits.
  std::uint64_t order() const;
  bool is_exact() const { return kind_ != FieldKind::Complex; }
  bool is_finite() const { return kind_ == FieldKind::Finite; }
  std::string tag() const;

  bool operator==(const Field& other) const {
    return kind_ == other.kind_ && p_ == other.p_ && k_ == other.k_ &&
           modulus_ == other.modulus_;
  }

  Field(FieldKind kind, std::uint64_t p, int k, std::vector<std::uint64_t> modulus)
      : kind_(kind), p_(p), k_(k), modulus_(std::move(modulus)) {}

 private:
  FieldKind kind_;
  std::uint64_t p_ = 0;
  int k_ = 1;
  std::vector<std::uint64_t> modulus_;
};

bool same_field(const FieldPtr& a, const FieldPtr& b);
bool is_prime(std::uint64_t n);
/// Ben-Or irreducibility test over F_p; `poly` is low-to-high, any leading coefficient.
bool is_irreducible_mod_p(const std::vector<std::uint64_t>& poly, std::uint64_t p);

/// An element of Q, F_{p^k} or (numeric backend only) C.
class Scalar {
 public:
  using Residues = std::array<std::uint64_t, kMaxExtensionDegree>;

  Scalar();
  static Scalar rational(const mpq_class& q);
  static Scalar rational(long num, long den = 1);
  static Scalar from_int(long value, const FieldPtr& field);
  static Scalar from_mpz(const mpz_class& value, const FieldPtr& field);
  static Scalar from_residues(const FieldPtr& field, std::span<const std::uint64_t> residues);
  static Scalar complex(std::complex<double> z);
  static Scalar zero(const FieldPtr& field) { return from_int(0, field); }
  static Scalar one(const FieldPtr& field) { return from_int(1, field); }

  const FieldPtr& field() const { return field_; }
  bool is_zero() const;
  bool is_one() const;

  const mpq_class& rational_value() const;
  /// Defined for Q and C elements.
  std::complex<double> complex_value() const;
  std::span<const std::uint64_t> residues() const;

  Scalar inverse() const;
  Scalar pow(std::uint64_t e) const;
  /// |x| for Q and C; 0 or 1 for finite fields.
  double magnitude() const;
  std::string to_string() const;

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  /// Exact equality; elements of different fields compare unequal.
  bool operator==(const Scalar& o) const;
  /// Total order inside one field (used for canonical keys, not arithmetic meaning).
  bool less(const Scalar& o) const;

 private:
  Scalar(FieldPtr field, std::variant<mpq_class, Residues, std::complex<double>> v)
      : field_(std::move(field)), value_(std::move(v)) {}
  void require_same(const Scalar& o) const;

  FieldPtr field_;
  std::variant<mpq_class, Residues, std::complex<double>> value_;
};

/// Moves a scalar into another field: Q->C, Q->F_q (denominator must be a unit),
/// F_p->F_{p^k}, or the identity.
Scalar convert(const Scalar& x, const FieldPtr& to);
/// The smallest field among {a, b} that the other embeds into; throws when neither does.
FieldPtr common_field(const FieldPtr& a, const FieldPtr& b);
std::vector<Scalar> convert_all(std::span<const Scalar> xs, const FieldPtr& to);

/// Exact square root in Q or F_q (odd characteristic), if one exists in the field.
std::optional<Scalar> exact_sqrt(const Scalar& x);
bool is_square(const Scalar& x);

/// Every element of a finite field, in residue-index order.
std::vector<Scalar> enumerate_field(const FieldPtr& field);
/// The element whose residue digits are the base-p digits of `index`.
Scalar finite_element(const FieldPtr& field, std::uint64_t index);

}  // namespace pseudochart
