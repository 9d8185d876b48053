#include "pseudochart/upoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pseudochart/errors.hpp"

namespace pseudochart {

UPoly::UPoly(FieldPtr field, std::vector<Scalar> coeffs) : field_(std::move(field)), coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) {
    if (!same_field(c.field(), field_)) c = convert(c, field_);
  }
  trim();
}

void UPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

UPoly UPoly::from_multipoly(const MultiPoly& p, std::size_t var) {
  std::vector<Scalar> c(std::max(p.degree_in(var) + 1, 0), Scalar::zero(p.field()));
  for (const auto& t : p.terms()) {
    for (std::size_t v = 0; v < t.exponent.size(); ++v) {
      if (v != var && t.exponent[v] != 0) {
        throw Error(ErrorCode::VariableMismatch, "polynomial is not univariate in " + (*p.vars())[var]);
      }
    }
    c[t.exponent[var]] = t.coeff;
  }
  return UPoly(p.field(), std::move(c));
}

MultiPoly UPoly::to_multipoly(const VarSet& vars, std::size_t var) const {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    Exponent e(vars->size(), 0);
    e[var] = static_cast<std::uint32_t>(i);
    terms.push_back({std::move(e), coeffs_[i]});
  }
  return MultiPoly::from_terms(vars, field_, std::move(terms));
}

Scalar UPoly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return Scalar::zero(field_);
  return coeffs_[i];
}

UPoly& UPoly::operator+=(const UPoly& o) {
  if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Scalar::zero(field_));
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

UPoly& UPoly::operator-=(const UPoly& o) { return *this += -o; }

UPoly& UPoly::operator*=(const UPoly& o) {
  if (is_zero() || o.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<Scalar> r(coeffs_.size() + o.coeffs_.size() - 1, Scalar::zero(field_));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i].is_zero()) continue;
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
  }
  coeffs_ = std::move(r);
  trim();
  return *this;
}

UPoly UPoly::operator-() const {
  UPoly r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

UPoly UPoly::scaled(const Scalar& c) const {
  UPoly r = *this;
  for (auto& x : r.coeffs_) x *= c;
  r.trim();
  return r;
}

bool UPoly::operator==(const UPoly& o) const {
  if (coeffs_.size() != o.coeffs_.size()) return false;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!(coeffs_[i] == o.coeffs_[i])) return false;
  }
  return true;
}

UPoly UPoly::monic() const { return is_zero() ? *this : scaled(lead().inverse()); }

UPoly UPoly::derivative() const {
  std::vector<Scalar> d;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d.push_back(coeffs_[i] * Scalar::from_int(static_cast<long>(i), field_));
  return UPoly(field_, std::move(d));
}

Scalar UPoly::evaluate(const Scalar& x) const {
  const FieldPtr f = common_field(field_, x.field());
  const Scalar xv = same_field(x.field(), f) ? x : convert(x, f);
  Scalar acc = Scalar::zero(f);
  for (std::size_t i = coeffs_.size(); i-- > 0;) {
    acc *= xv;
    acc += same_field(coeffs_[i].field(), f) ? coeffs_[i] : convert(coeffs_[i], f);
  }
  return acc;
}

UPoly UPoly::to_field(const FieldPtr& f) const {
  if (same_field(f, field_)) return *this;
  return UPoly(f, convert_all(coeffs_, f));
}

std::string UPoly::to_string(const std::string& var) const {
  auto vars = make_vars({var});
  return to_multipoly(vars, 0).to_string();
}

std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
  if (b.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "division by zero polynomial");
  const FieldPtr& f = a.field();
  if (a.degree() < b.degree()) return {UPoly(f), a};
  std::vector<Scalar> rem = a.coeffs();
  std::vector<Scalar> quo(a.degree() - b.degree() + 1, Scalar::zero(f));
  const Scalar inv = b.lead().inverse();
  const int db = b.degree();
  for (int i = a.degree(); i >= db; --i) {
    const Scalar c = rem[i] * inv;
    quo[i - db] = c;
    if (c.is_zero()) continue;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= c * b.coeffs()[j];
  }
  rem.resize(db);
  return {UPoly(f, std::move(quo)), UPoly(f, std::move(rem))};
}

UPoly operator%(const UPoly& a, const UPoly& b) { return divmod(a, b).second; }

UPoly gcd(const UPoly& a, const UPoly& b) {
  UPoly x = a, y = b;
  while (!y.is_zero()) {
    UPoly r = x % y;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

ExtendedGcd extended_gcd(const UPoly& a, const UPoly& b) {
  const FieldPtr& f = a.field();
  UPoly r0 = a, r1 = b;
  UPoly s0 = UPoly::constant(Scalar::one(f)), s1(f);
  UPoly t0(f), t1 = UPoly::constant(Scalar::one(f));
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    UPoly s2 = s0 - q * s1;
    UPoly t2 = t0 - q * t1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  const Scalar inv = r0.lead().inverse();
  return {r0.scaled(inv), s0.scaled(inv), t0.scaled(inv)};
}

UPoly squarefree_part(const UPoly& a) {
  if (a.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "squarefree part of zero");
  if (a.is_constant()) return UPoly::constant(Scalar::one(a.field()));
  const auto p = a.field()->characteristic();
  if (p != 0 && static_cast<std::uint64_t>(a.degree()) >= p) {
    throw Error(ErrorCode::Unsupported, "squarefree part needs degree below the characteristic");
  }
  return divmod(a, gcd(a, a.derivative())).first.monic();
}

int distinct_root_count(const UPoly& a) { return squarefree_part(a).degree(); }

// ---------------------------------------------------------------------------
// Roots

namespace {

using cd = std::complex<double>;

std::vector<Root> exhaustive_roots(const UPoly& p, const FieldPtr& field) {
  if (field->kind() != FieldKind::Finite) throw Error(ErrorCode::InvalidArgument, "exhaustive search needs a finite field");
  const UPoly q = p.to_field(field);
  std::vector<Root> out;
  for (const auto& x : enumerate_field(field)) {
    if (!q.evaluate(x).is_zero()) continue;
    const UPoly lin(field, {-x, Scalar::one(field)});
    UPoly rest = q;
    int mult = 0;
    for (;;) {
      auto [quo, rem] = divmod(rest, lin);
      if (!rem.is_zero()) break;
      ++mult;
      rest = std::move(quo);
    }
    out.push_back({x, mult});
  }
  return out;
}

std::pair<cd, cd> horner_with_derivative(const std::vector<cd>& a, cd z) {
  cd p = a.back(), dp = 0.0;
  for (std::size_t i = a.size() - 1; i-- > 0;) {
    dp = dp * z + p;
    p = p * z + a[i];
  }
  return {p, dp};
}

double residual_scale(const std::vector<cd>& a, cd z) {
  double s = 0.0, zp = 1.0;
  for (const auto& c : a) {
    s += std::abs(c) * zp;
    zp *= std::abs(z);
  }
  return s;
}

}  // namespace

std::vector<Root> complex_roots(std::vector<cd> a, const NumericRootOptions& opts) {
  while (!a.empty() && a.back() == cd(0.0, 0.0)) a.pop_back();
  if (a.empty()) throw Error(ErrorCode::ZeroPolynomial, "roots of the zero polynomial");
  std::vector<Root> out;
  std::size_t zeros = 0;
  while (zeros < a.size() && a[zeros] == cd(0.0, 0.0)) ++zeros;
  if (zeros > 0) {
    out.push_back({Scalar::complex(0.0), static_cast<int>(zeros)});
    a.erase(a.begin(), a.begin() + zeros);
  }
  const int n = static_cast<int>(a.size()) - 1;
  if (n <= 0) return out;
  const cd lead = a.back();
  for (auto& c : a) c /= lead;

  double radius = 0.0;
  for (int k = 1; k <= n; ++k) radius = std::max(radius, std::pow(std::abs(a[n - k]), 1.0 / k));
  radius = std::max(radius, 1e-3);
  std::vector<cd> z(n);
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n + 0.4;
    z[k] = std::polar(radius, angle);
  }
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    double max_step = 0.0;
    for (int k = 0; k < n; ++k) {
      auto [p, dp] = horner_with_derivative(a, z[k]);
      if (p == cd(0.0, 0.0)) continue;
      const cd ratio = p / dp;
      cd sum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      }
      const cd w = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
      z[k] -= w;
      max_step = std::max(max_step, std::abs(w) / (1.0 + std::abs(z[k])));
    }
    if (max_step < 1e-15) break;
  }
  // Merge clusters of nearby approximations into multiple roots.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double scale = std::max(1.0, std::max(std::abs(z[i]), std::abs(z[j])));
      if (std::abs(z[i] - z[j]) < opts.cluster_sep * scale) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<int>> clusters(n);
  for (int i = 0; i < n; ++i) clusters[find(i)].push_back(i);
  std::vector<std::pair<cd, int>> merged;
  for (const auto& c : clusters) {
    if (c.empty()) continue;
    cd centre = 0.0;
    for (int i : c) centre += z[i];
    centre /= static_cast<double>(c.size());
    if (c.size() == 1) {
      for (int step = 0; step < 3; ++step) {
        auto [p, dp] = horner_with_derivative(a, centre);
        if (dp == cd(0.0, 0.0)) break;
        centre -= p / dp;
      }
    }
    const auto [p, dp] = horner_with_derivative(a, centre);
    (void)dp;
    if (std::abs(p) > opts.residual_tol * residual_scale(a, centre)) {
      throw Error(ErrorCode::NumericNonConvergence, "root finder did not converge (residual " + std::to_string(std::abs(p)) + ")");
    }
    merged.emplace_back(centre, static_cast<int>(c.size()));
  }
  std::sort(merged.begin(), merged.end(), [](const auto& x, const auto& y) {
    if (x.first.real() != y.first.real()) return x.first.real() < y.first.real();
    return x.first.imag() < y.first.imag();
  });
  for (const auto& [r, m] : merged) out.push_back({Scalar::complex(r), m});
  return out;
}

std::vector<Root> univariate_roots(const UPoly& p, RootBackend backend, const FieldPtr& search_field,
                                   const NumericRootOptions& opts) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "root set of the zero polynomial is the whole line");
  if (backend == RootBackend::FiniteFieldExhaustive) return exhaustive_roots(p, search_field ? search_field : p.field());
  auto numeric = [&](const UPoly& f) {
    std::vector<cd> c;
    for (const auto& x : f.coeffs()) c.push_back(x.complex_value());
    return complex_roots(std::move(c), opts);
  };
  if (p.field()->kind() != FieldKind::Rational || p.degree() < 2) return numeric(p);
  // Yun's squarefree decomposition keeps the numeric step on simple roots.
  std::vector<Root> out;
  UPoly g = gcd(p, p.derivative());
  UPoly w = divmod(p, g).first;
  for (int mult = 1; w.degree() > 0; ++mult) {
    const UPoly y = gcd(w, g);
    const UPoly z = divmod(w, y).first;
    if (z.degree() > 0) {
      for (auto r : numeric(z)) out.push_back({r.value, r.multiplicity * mult});
    }
    w = y;
    g = divmod(g, y).first;
  }
  std::sort(out.begin(), out.end(), [](const Root& x, const Root& y) {
    const cd a = x.value.complex_value(), b = y.value.complex_value();
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

std::vector<Root> univariate_roots(const MultiPoly& p, RootBackend backend, const FieldPtr& search_field,
                                   const NumericRootOptions& opts) {
  std::size_t var = 0;
  for (std::size_t v = 0; v < p.num_vars(); ++v) {
    if (p.involves(v)) var = v;
  }
  if (p.num_vars() == 0) throw Error(ErrorCode::InvalidArgument, "polynomial has no variables");
  return univariate_roots(UPoly::from_multipoly(p, var), backend, search_field, opts);
}

}  // namespace pseudochart
