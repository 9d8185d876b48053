#include "pseudochart/field.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "pseudochart/errors.hpp"

namespace pseudochart {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::FieldMismatch: return "FIELD_MISMATCH";
    case ErrorCode::VariableMismatch: return "VARIABLE_MISMATCH";
    case ErrorCode::ArityMismatch: return "ARITY_MISMATCH";
    case ErrorCode::ZeroPolynomial: return "ZERO_POLYNOMIAL";
    case ErrorCode::NumericNonConvergence: return "NUMERIC_NON_CONVERGENCE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::BasePointHit: return "BASE_POINT_HIT";
    case ErrorCode::CenterMeetsVariety: return "CENTER_MEETS_VARIETY";
    case ErrorCode::InconclusiveBudget: return "INCONCLUSIVE_BUDGET";
    case ErrorCode::PositiveDimensional: return "POSITIVE_DIMENSIONAL";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::Parse: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

namespace {

using U64 = std::uint64_t;
using FpPoly = std::vector<U64>;  // low to high over F_p

U64 mulmod(U64 a, U64 b, U64 p) { return static_cast<U64>((static_cast<unsigned __int128>(a) * b) % p); }

U64 powmod(U64 a, U64 e, U64 p) {
  U64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

U64 invmod(U64 a, U64 p) {
  if (a % p == 0) throw Error(ErrorCode::InvalidArgument, "division by zero in F_p");
  return powmod(a, p - 2, p);
}

void trim(FpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

FpPoly fp_mod(FpPoly a, const FpPoly& m, U64 p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const U64 inv_lead = invmod(m.back(), p);
  while (a.size() >= m.size()) {
    const U64 factor = mulmod(a.back(), inv_lead, p);
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = (a[shift + i] + p - mulmod(factor, m[i], p)) % p;
    }
    trim(a);
  }
  return a;
}

FpPoly fp_mul(const FpPoly& a, const FpPoly& b, U64 p) {
  if (a.empty() || b.empty()) return {};
  FpPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  }
  trim(r);
  return r;
}

FpPoly fp_gcd(FpPoly a, FpPoly b, U64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    FpPoly r = fp_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

FpPoly fp_sub(FpPoly a, const FpPoly& b, U64 p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
  trim(a);
  return a;
}

// Inverse of a modulo irreducible m over F_p via extended Euclid.
FpPoly fp_inverse_mod(const FpPoly& a, const FpPoly& m, U64 p) {
  FpPoly r0 = m, r1 = fp_mod(a, m, p);
  FpPoly s0 = {}, s1 = {1};
  if (r1.empty()) throw Error(ErrorCode::InvalidArgument, "division by zero in F_q");
  while (r1.size() > 1) {
    // q = r0 / r1
    FpPoly q(r0.size() - r1.size() + 1, 0), rem = r0;
    const U64 inv_lead = invmod(r1.back(), p);
    while (rem.size() >= r1.size()) {
      const U64 factor = mulmod(rem.back(), inv_lead, p);
      const std::size_t shift = rem.size() - r1.size();
      q[shift] = factor;
      for (std::size_t i = 0; i < r1.size(); ++i) {
        rem[shift + i] = (rem[shift + i] + p - mulmod(factor, r1[i], p)) % p;
      }
      trim(rem);
    }
    trim(q);
    FpPoly s2 = fp_sub(s0, fp_mul(q, s1, p), p);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
    if (r1.empty()) throw Error(ErrorCode::InvalidArgument, "modulus is not irreducible");
  }
  const U64 c = invmod(r1[0], p);
  for (auto& x : s1) x = mulmod(x, c, p);
  return s1;
}

// x^e mod m over F_p.
FpPoly fp_pow_x(const mpz_class& e, const FpPoly& m, U64 p) {
  FpPoly result = fp_mod({1}, m, p);
  FpPoly base = fp_mod({0, 1}, m, p);
  const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    result = fp_mod(fp_mul(result, result, p), m, p);
    if (mpz_tstbit(e.get_mpz_t(), i)) result = fp_mod(fp_mul(result, base, p), m, p);
  }
  return result;
}

struct FieldKey {
  U64 p;
  int k;
  bool operator<(const FieldKey& o) const { return std::tie(p, k) < std::tie(o.p, o.k); }
};

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (U64 d : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % d == 0) return n == d;
  }
  U64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (U64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    U64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_irreducible_mod_p(const std::vector<std::uint64_t>& poly, std::uint64_t p) {
  FpPoly f = poly;
  for (auto& c : f) c %= p;
  trim(f);
  if (f.size() < 2) return false;
  const int k = static_cast<int>(f.size()) - 1;
  const U64 inv_lead = invmod(f.back(), p);
  for (auto& c : f) c = mulmod(c, inv_lead, p);
  mpz_class pi = 1;
  for (int i = 1; i <= k / 2; ++i) {
    pi *= static_cast<unsigned long>(p);
    FpPoly xpi = fp_pow_x(pi, f, p);
    FpPoly g = fp_gcd(f, fp_sub(xpi, {0, 1}, p), p);
    if (g.size() > 1) return false;
  }
  return true;
}

FieldPtr Field::rationals() {
  static const FieldPtr q = std::make_shared<const Field>(FieldKind::Rational, 0, 1, std::vector<U64>{});
  return q;
}

FieldPtr Field::complex() {
  static const FieldPtr c = std::make_shared<const Field>(FieldKind::Complex, 0, 1, std::vector<U64>{});
  return c;
}

FieldPtr Field::finite(std::uint64_t p, int k) {
  if (!is_prime(p) || p >= (1ULL << 32)) {
    throw Error(ErrorCode::InvalidArgument, "characteristic must be a prime below 2^32");
  }
  if (k < 1 || k > kMaxExtensionDegree) {
    throw Error(ErrorCode::InvalidArgument, "extension degree must be in [1, 8]");
  }
  static std::mutex mu;
  static std::map<FieldKey, FieldPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({p, k});
  if (it != cache.end()) return it->second;

  std::vector<U64> modulus;
  if (k > 1) {
    // Enumerate monic degree-k polynomials in lexicographic order of (c_{k-1}..c_0).
    std::vector<U64> digits(k, 0);
    for (;;) {
      std::vector<U64> cand(digits);
      cand.push_back(1);
      if (cand[0] != 0 && is_irreducible_mod_p(cand, p)) {
        modulus = std::move(cand);
        break;
      }
      int i = 0;
      while (i < k && ++digits[i] == p) digits[i++] = 0;
      if (i == k) throw Error(ErrorCode::InvalidArgument, "no irreducible modulus found");
    }
  }
  auto f = std::make_shared<const Field>(FieldKind::Finite, p, k, std::move(modulus));
  cache.emplace(FieldKey{p, k}, f);
  return f;
}

std::uint64_t Field::order() const {
  if (kind_ != FieldKind::Finite) throw Error(ErrorCode::InvalidArgument, "infinite field has no order");
  unsigned __int128 q = 1;
  for (int i = 0; i < k_; ++i) {
    q *= p_;
    if (q > static_cast<unsigned __int128>(UINT64_MAX)) {
      throw Error(ErrorCode::InvalidArgument, "field order overflows 64 bits");
    }
  }
  return static_cast<U64>(q);
}

std::string Field::tag() const {
  switch (kind_) {
    case FieldKind::Rational: return "Q";
    case FieldKind::Complex: return "C";
    case FieldKind::Finite:
      return k_ == 1 ? "F_" + std::to_string(p_) : "F_" + std::to_string(p_) + "^" + std::to_string(k_);
  }
  return "?";
}

bool same_field(const FieldPtr& a, const FieldPtr& b) { return a == b || (a && b && *a == *b); }

// ---------------------------------------------------------------------------
// Scalar

namespace {

Scalar::Residues fq_mul(const Scalar::Residues& a, const Scalar::Residues& b, const Field& f) {
  const U64 p = f.characteristic();
  const int k = f.degree();
  Scalar::Residues r{};
  if (k == 1) {
    r[0] = mulmod(a[0], b[0], p);
    return r;
  }
  std::array<U64, 2 * kMaxExtensionDegree> prod{};
  for (int i = 0; i < k; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + mulmod(a[i], b[j], p)) % p;
  }
  const auto& m = f.modulus();  // monic
  for (int d = 2 * k - 2; d >= k; --d) {
    const U64 c = prod[d];
    if (c == 0) continue;
    prod[d] = 0;
    for (int i = 0; i < k; ++i) {
      prod[d - k + i] = (prod[d - k + i] + p - mulmod(c, m[i], p)) % p;
    }
  }
  for (int i = 0; i < k; ++i) r[i] = prod[i];
  return r;
}

Scalar::Residues fq_inv(const Scalar::Residues& a, const Field& f) {
  const U64 p = f.characteristic();
  Scalar::Residues r{};
  if (f.degree() == 1) {
    r[0] = invmod(a[0], p);
    return r;
  }
  FpPoly av(a.begin(), a.begin() + f.degree());
  FpPoly inv = fp_inverse_mod(av, f.modulus(), p);
  for (std::size_t i = 0; i < inv.size(); ++i) r[i] = inv[i];
  return r;
}

U64 reduce_mpz(const mpz_class& v, U64 p) {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(p));
  return r.get_ui();
}

}  // namespace

Scalar::Scalar() : field_(Field::rationals()), value_(mpq_class(0)) {}

Scalar Scalar::rational(const mpq_class& q) {
  mpq_class c(q);
  c.canonicalize();
  return Scalar(Field::rationals(), std::move(c));
}

Scalar Scalar::rational(long num, long den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(Field::rationals(), std::move(q));
}

Scalar Scalar::from_mpz(const mpz_class& value, const FieldPtr& field) {
  switch (field->kind()) {
    case FieldKind::Rational: return Scalar(field, mpq_class(value));
    case FieldKind::Complex: return Scalar(field, std::complex<double>(value.get_d(), 0.0));
    case FieldKind::Finite: {
      Residues r{};
      r[0] = reduce_mpz(value, field->characteristic());
      return Scalar(field, r);
    }
  }
  return {};
}

Scalar Scalar::from_int(long value, const FieldPtr& field) { return from_mpz(mpz_class(value), field); }

Scalar Scalar::from_residues(const FieldPtr& field, std::span<const std::uint64_t> residues) {
  if (field->kind() != FieldKind::Finite || static_cast<int>(residues.size()) != field->degree()) {
    throw Error(ErrorCode::InvalidArgument, "residue vector does not match field " + field->tag());
  }
  Residues r{};
  for (std::size_t i = 0; i < residues.size(); ++i) r[i] = residues[i] % field->characteristic();
  return Scalar(field, r);
}

Scalar Scalar::complex(std::complex<double> z) { return Scalar(Field::complex(), z); }

bool Scalar::is_zero() const {
  switch (value_.index()) {
    case 0: return sgn(std::get<0>(value_)) == 0;
    case 1: {
      const auto& r = std::get<1>(value_);
      return std::all_of(r.begin(), r.end(), [](U64 x) { return x == 0; });
    }
    default: return std::get<2>(value_) == std::complex<double>(0.0, 0.0);
  }
}

bool Scalar::is_one() const { return *this == one(field_); }

const mpq_class& Scalar::rational_value() const {
  if (value_.index() != 0) throw Error(ErrorCode::FieldMismatch, "not a rational scalar");
  return std::get<0>(value_);
}

std::complex<double> Scalar::complex_value() const {
  if (value_.index() == 0) return {std::get<0>(value_).get_d(), 0.0};
  if (value_.index() == 2) return std::get<2>(value_);
  throw Error(ErrorCode::FieldMismatch, "finite-field scalar has no complex value");
}

std::span<const std::uint64_t> Scalar::residues() const {
  if (value_.index() != 1) throw Error(ErrorCode::FieldMismatch, "not a finite-field scalar");
  return {std::get<1>(value_).data(), static_cast<std::size_t>(field_->degree())};
}

void Scalar::require_same(const Scalar& o) const {
  if (!same_field(field_, o.field_)) {
    throw Error(ErrorCode::FieldMismatch,
                "arithmetic across fields " + field_->tag() + " and " + o.field_->tag());
  }
}

Scalar Scalar::operator-() const {
  switch (value_.index()) {
    case 0: return Scalar(field_, mpq_class(-std::get<0>(value_)));
    case 1: {
      Residues r = std::get<1>(value_);
      const U64 p = field_->characteristic();
      for (auto& x : r) x = x == 0 ? 0 : p - x;
      return Scalar(field_, r);
    }
    default: return Scalar(field_, -std::get<2>(value_));
  }
}

Scalar& Scalar::operator+=(const Scalar& o) {
  require_same(o);
  switch (value_.index()) {
    case 0: std::get<0>(value_) += std::get<0>(o.value_); break;
    case 1: {
      auto& r = std::get<1>(value_);
      const auto& s = std::get<1>(o.value_);
      const U64 p = field_->characteristic();
      for (int i = 0; i < field_->degree(); ++i) r[i] = (r[i] + s[i]) % p;
      break;
    }
    default: std::get<2>(value_) += std::get<2>(o.value_);
  }
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar& Scalar::operator*=(const Scalar& o) {
  require_same(o);
  switch (value_.index()) {
    case 0: std::get<0>(value_) *= std::get<0>(o.value_); break;
    case 1: value_ = fq_mul(std::get<1>(value_), std::get<1>(o.value_), *field_); break;
    default: std::get<2>(value_) *= std::get<2>(o.value_);
  }
  return *this;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw Error(ErrorCode::InvalidArgument, "division by zero");
  switch (value_.index()) {
    case 0: return Scalar(field_, mpq_class(1 / std::get<0>(value_)));
    case 1: return Scalar(field_, fq_inv(std::get<1>(value_), *field_));
    default: return Scalar(field_, 1.0 / std::get<2>(value_));
  }
}

Scalar& Scalar::operator/=(const Scalar& o) {
  require_same(o);
  return *this *= o.inverse();
}

Scalar Scalar::pow(std::uint64_t e) const {
  Scalar result = one(field_), base = *this;
  while (e) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

namespace {
Scalar pow_mpz(const Scalar& x, const mpz_class& e) {
  Scalar result = Scalar::one(x.field());
  const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    result *= result;
    if (mpz_tstbit(e.get_mpz_t(), i)) result *= x;
  }
  return result;
}

mpz_class field_order_mpz(const Field& f) {
  mpz_class q = 1;
  for (int i = 0; i < f.degree(); ++i) q *= static_cast<unsigned long>(f.characteristic());
  return q;
}
}  // namespace

double Scalar::magnitude() const {
  switch (value_.index()) {
    case 0: return std::abs(std::get<0>(value_).get_d());
    case 1: return is_zero() ? 0.0 : 1.0;
    default: return std::abs(std::get<2>(value_));
  }
}

std::string Scalar::to_string() const {
  switch (value_.index()) {
    case 0: return std::get<0>(value_).get_str();
    case 1: {
      if (field_->degree() == 1) return std::to_string(std::get<1>(value_)[0]);
      std::string s = "[";
      for (int i = 0; i < field_->degree(); ++i) {
        if (i) s += ",";
        s += std::to_string(std::get<1>(value_)[i]);
      }
      return s + "]";
    }
    default: {
      std::ostringstream os;
      os.precision(12);
      os << "(" << std::get<2>(value_).real() << "," << std::get<2>(value_).imag() << ")";
      return os.str();
    }
  }
}

bool Scalar::operator==(const Scalar& o) const {
  if (!same_field(field_, o.field_)) return false;
  switch (value_.index()) {
    case 0: return std::get<0>(value_) == std::get<0>(o.value_);
    case 1: return std::get<1>(value_) == std::get<1>(o.value_);
    default: return std::get<2>(value_) == std::get<2>(o.value_);
  }
}

bool Scalar::less(const Scalar& o) const {
  require_same(o);
  switch (value_.index()) {
    case 0: return std::get<0>(value_) < std::get<0>(o.value_);
    case 1: return std::get<1>(value_) < std::get<1>(o.value_);
    default: {
      const auto a = std::get<2>(value_), b = std::get<2>(o.value_);
      return std::make_pair(a.real(), a.imag()) < std::make_pair(b.real(), b.imag());
    }
  }
}

Scalar convert(const Scalar& x, const FieldPtr& to) {
  const FieldPtr& from = x.field();
  if (same_field(from, to)) return x;
  if (from->kind() == FieldKind::Rational) {
    if (to->kind() == FieldKind::Complex) return Scalar::complex(x.complex_value());
    if (to->kind() == FieldKind::Finite) {
      const mpq_class& q = x.rational_value();
      if (reduce_mpz(q.get_den(), to->characteristic()) == 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "denominator of " + q.get_str() + " vanishes in " + to->tag());
      }
      return Scalar::from_mpz(q.get_num(), to) / Scalar::from_mpz(q.get_den(), to);
    }
  }
  if (from->kind() == FieldKind::Finite && to->kind() == FieldKind::Finite &&
      from->characteristic() == to->characteristic() && from->degree() == 1) {
    return Scalar::from_int(static_cast<long>(x.residues()[0]), to);
  }
  throw Error(ErrorCode::FieldMismatch, "no embedding from " + from->tag() + " into " + to->tag());
}

FieldPtr common_field(const FieldPtr& a, const FieldPtr& b) {
  if (same_field(a, b)) return a;
  auto embeds = [](const FieldPtr& from, const FieldPtr& to) {
    if (from->kind() == FieldKind::Rational) return to->kind() != FieldKind::Rational;
    return from->kind() == FieldKind::Finite && to->kind() == FieldKind::Finite &&
           from->characteristic() == to->characteristic() && from->degree() == 1;
  };
  if (embeds(a, b)) return b;
  if (embeds(b, a)) return a;
  throw Error(ErrorCode::FieldMismatch, "no common field for " + a->tag() + " and " + b->tag());
}

std::vector<Scalar> convert_all(std::span<const Scalar> xs, const FieldPtr& to) {
  std::vector<Scalar> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(convert(x, to));
  return out;
}

bool is_square(const Scalar& x) { return exact_sqrt(x).has_value(); }

std::optional<Scalar> exact_sqrt(const Scalar& x) {
  const FieldPtr& f = x.field();
  if (x.is_zero()) return x;
  if (f->kind() == FieldKind::Rational) {
    const mpq_class& q = x.rational_value();
    if (sgn(q) < 0) return std::nullopt;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) {
      return std::nullopt;
    }
    return Scalar::rational(mpq_class(sqrt(q.get_num()), sqrt(q.get_den())));
  }
  if (f->kind() != FieldKind::Finite || f->characteristic() == 2) {
    throw Error(ErrorCode::Unsupported, "exact square root needs Q or odd-characteristic F_q");
  }
  // Tonelli-Shanks in F_q.
  const mpz_class q = field_order_mpz(*f);
  const mpz_class half = (q - 1) / 2;
  if (!pow_mpz(x, half).is_one()) return std::nullopt;
  mpz_class m = q - 1;
  int s = 0;
  while (mpz_even_p(m.get_mpz_t())) {
    m /= 2;
    ++s;
  }
  Scalar z;
  for (std::uint64_t idx = 2;; ++idx) {
    z = finite_element(f, idx);
    if (!z.is_zero() && !pow_mpz(z, half).is_one()) break;
  }
  Scalar c = pow_mpz(z, m);
  Scalar t = pow_mpz(x, m);
  Scalar r = pow_mpz(x, (m + 1) / 2);
  int ms = s;
  while (!t.is_one()) {
    int i = 0;
    Scalar t2 = t;
    while (!t2.is_one()) {
      t2 *= t2;
      ++i;
    }
    Scalar b = c;
    for (int j = 0; j < ms - i - 1; ++j) b *= b;
    ms = i;
    c = b * b;
    t *= c;
    r *= b;
  }
  return r;
}

Scalar finite_element(const FieldPtr& field, std::uint64_t index) {
  if (field->kind() != FieldKind::Finite) throw Error(ErrorCode::InvalidArgument, "not a finite field");
  std::vector<U64> digits(field->degree(), 0);
  for (int i = 0; i < field->degree(); ++i) {
    digits[i] = index % field->characteristic();
    index /= field->characteristic();
  }
  return Scalar::from_residues(field, digits);
}

std::vector<Scalar> enumerate_field(const FieldPtr& field) {
  const U64 q = field->order();
  if (q > (1ULL << 24)) throw Error(ErrorCode::InconclusiveBudget, "field too large to enumerate");
  std::vector<Scalar> out;
  out.reserve(q);
  for (U64 i = 0; i < q; ++i) out.push_back(finite_element(field, i));
  return out;
}

}  // namespace pseudochart
