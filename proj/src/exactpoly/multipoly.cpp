#include "pseudochart/multipoly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "pseudochart/errors.hpp"

namespace pseudochart {

namespace {

struct GrlexGreater {
  bool operator()(const Exponent& a, const Exponent& b) const { return grlex_greater(a, b); }
};

using TermMap = std::map<Exponent, Scalar, GrlexGreater>;

std::uint64_t degree_sum(const Exponent& e) { return std::accumulate(e.begin(), e.end(), std::uint64_t{0}); }

void accumulate(TermMap& acc, const Exponent& e, const Scalar& c) {
  auto [it, inserted] = acc.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) acc.erase(it);
  } else if (c.is_zero()) {
    acc.erase(it);
  }
}

std::vector<Term> to_terms(TermMap&& acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [e, c] : acc) out.push_back({e, c});
  return out;
}

Scalar coerce(const Scalar& c, const FieldPtr& to) { return same_field(c.field(), to) ? c : convert(c, to); }

}  // namespace

bool grlex_greater(const Exponent& a, const Exponent& b) {
  const auto da = degree_sum(a), db = degree_sum(b);
  if (da != db) return da > db;
  return b < a;
}

VarSet make_vars(std::vector<std::string> names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) throw Error(ErrorCode::InvalidArgument, "duplicate variable name " + names[i]);
    }
  }
  return std::make_shared<const std::vector<std::string>>(std::move(names));
}

bool same_vars(const VarSet& a, const VarSet& b) { return a == b || (a && b && *a == *b); }

MultiPoly::MultiPoly(VarSet vars, FieldPtr field) : vars_(std::move(vars)), field_(std::move(field)) {}

MultiPoly MultiPoly::constant(VarSet vars, const Scalar& c) {
  MultiPoly p(vars, c.field());
  if (!c.is_zero()) p.terms_.push_back({Exponent(vars->size(), 0), c});
  return p;
}

MultiPoly MultiPoly::variable(VarSet vars, std::size_t index, const FieldPtr& field) {
  if (index >= vars->size()) throw Error(ErrorCode::VariableMismatch, "variable index out of range");
  Exponent e(vars->size(), 0);
  e[index] = 1;
  return monomial(std::move(vars), std::move(e), Scalar::one(field));
}

MultiPoly MultiPoly::variable(VarSet vars, std::string_view name, const FieldPtr& field) {
  MultiPoly probe(vars, field);
  return variable(vars, probe.var_index(name), field);
}

MultiPoly MultiPoly::monomial(VarSet vars, Exponent e, const Scalar& c) {
  if (e.size() != vars->size()) throw Error(ErrorCode::ArityMismatch, "exponent length mismatch");
  MultiPoly p(std::move(vars), c.field());
  if (!c.is_zero()) p.terms_.push_back({std::move(e), c});
  return p;
}

MultiPoly MultiPoly::from_terms(VarSet vars, FieldPtr field, std::vector<Term> terms) {
  MultiPoly p(std::move(vars), std::move(field));
  for (const auto& t : terms) {
    if (t.exponent.size() != p.num_vars()) throw Error(ErrorCode::ArityMismatch, "exponent length mismatch");
    if (!same_field(t.coeff.field(), p.field_)) throw Error(ErrorCode::FieldMismatch, "term field mismatch");
  }
  p.terms_ = std::move(terms);
  p.canonicalize();
  return p;
}

void MultiPoly::canonicalize() {
  TermMap acc;
  for (auto& t : terms_) accumulate(acc, t.exponent, t.coeff);
  terms_ = to_terms(std::move(acc));
}

std::size_t MultiPoly::var_index(std::string_view name) const {
  for (std::size_t i = 0; i < vars_->size(); ++i) {
    if ((*vars_)[i] == name) return i;
  }
  throw Error(ErrorCode::VariableMismatch, "unknown variable " + std::string(name));
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && degree_sum(terms_[0].exponent) == 0);
}

Scalar MultiPoly::constant_value() const {
  if (!is_constant()) throw Error(ErrorCode::InvalidArgument, "polynomial is not constant");
  return terms_.empty() ? Scalar::zero(field_) : terms_[0].coeff;
}

int MultiPoly::total_degree() const {
  return terms_.empty() ? -1 : static_cast<int>(degree_sum(terms_.front().exponent));
}

int MultiPoly::degree_in(std::size_t var) const {
  if (var >= num_vars()) throw Error(ErrorCode::VariableMismatch, "variable index out of range");
  int d = terms_.empty() ? -1 : 0;
  for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.exponent[var]));
  return d;
}

int MultiPoly::degree_in_block(std::span<const std::size_t> block) const {
  int d = -1;
  for (const auto& t : terms_) {
    int s = 0;
    for (auto v : block) s += static_cast<int>(t.exponent.at(v));
    d = std::max(d, s);
  }
  return d;
}

bool MultiPoly::is_homogeneous_in_block(std::span<const std::size_t> block) const {
  int d = -1;
  for (const auto& t : terms_) {
    int s = 0;
    for (auto v : block) s += static_cast<int>(t.exponent.at(v));
    if (d >= 0 && s != d) return false;
    d = s;
  }
  return true;
}

bool MultiPoly::is_homogeneous() const {
  std::vector<std::size_t> all(num_vars());
  std::iota(all.begin(), all.end(), 0);
  return is_homogeneous_in_block(all);
}

const Term& MultiPoly::leading_term() const {
  if (terms_.empty()) throw Error(ErrorCode::ZeroPolynomial, "zero polynomial has no leading term");
  return terms_.front();
}

void MultiPoly::require_compatible(const MultiPoly& o) const {
  if (!same_vars(vars_, o.vars_)) throw Error(ErrorCode::VariableMismatch, "polynomials over different variable sets");
  if (!same_field(field_, o.field_)) {
    throw Error(ErrorCode::FieldMismatch, "polynomials over " + field_->tag() + " and " + o.field_->tag());
  }
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  require_compatible(o);
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && grlex_greater(terms_[i].exponent, o.terms_[j].exponent))) {
      merged.push_back(std::move(terms_[i++]));
    } else if (i == terms_.size() || grlex_greater(o.terms_[j].exponent, terms_[i].exponent)) {
      merged.push_back(o.terms_[j++]);
    } else {
      Scalar c = terms_[i].coeff + o.terms_[j].coeff;
      if (!c.is_zero()) merged.push_back({std::move(terms_[i].exponent), std::move(c)});
      ++i;
      ++j;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) { return *this += -o; }

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) {
  require_compatible(o);
  TermMap acc;
  Exponent e(num_vars());
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = a.exponent[k] + b.exponent[k];
      accumulate(acc, e, a.coeff * b.coeff);
    }
  }
  terms_ = to_terms(std::move(acc));
  return *this;
}

MultiPoly MultiPoly::scaled(const Scalar& c) const {
  if (c.is_zero()) return MultiPoly(vars_, field_);
  MultiPoly r = *this;
  for (auto& t : r.terms_) t.coeff *= c;
  return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
  MultiPoly result = constant(vars_, Scalar::one(field_));
  MultiPoly base = *this;
  while (e) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
  if (!same_vars(vars_, o.vars_) || terms_.size() != o.terms_.size()) return false;
  if (!terms_.empty() && !same_field(field_, o.field_)) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].exponent != o.terms_[i].exponent || !(terms_[i].coeff == o.terms_[i].coeff)) return false;
  }
  return true;
}

Scalar MultiPoly::evaluate(std::span<const Scalar> point) const {
  if (point.size() != num_vars()) {
    throw Error(ErrorCode::ArityMismatch, "point has " + std::to_string(point.size()) + " coordinates, polynomial has " +
                                              std::to_string(num_vars()) + " variables");
  }
  FieldPtr target = field_;
  if (!point.empty()) {
    for (const auto& x : point) {
      if (!same_field(x.field(), point[0].field())) {
        throw Error(ErrorCode::FieldMismatch, "point coordinates in different fields");
      }
    }
    target = common_field(field_, point[0].field());
  }
  std::vector<std::vector<Scalar>> powers(num_vars());
  for (std::size_t v = 0; v < num_vars(); ++v) {
    const int d = degree_in(v);
    powers[v].push_back(Scalar::one(target));
    const Scalar x = coerce(point[v], target);
    for (int k = 1; k <= d; ++k) powers[v].push_back(powers[v].back() * x);
  }
  Scalar sum = Scalar::zero(target);
  for (const auto& t : terms_) {
    Scalar m = coerce(t.coeff, target);
    for (std::size_t v = 0; v < num_vars(); ++v) {
      if (t.exponent[v]) m *= powers[v][t.exponent[v]];
    }
    sum += m;
  }
  return sum;
}

MultiPoly MultiPoly::substitute(std::span<const MultiPoly> images, const VarSet& target_vars) const {
  if (images.size() != num_vars()) throw Error(ErrorCode::VariableMismatch, "substitution must cover every variable");
  FieldPtr target_field = field_;
  for (const auto& im : images) {
    if (!same_vars(im.vars(), target_vars)) throw Error(ErrorCode::VariableMismatch, "substitution images disagree on variables");
    if (!im.is_zero()) target_field = common_field(target_field, im.field());
  }
  std::vector<std::vector<MultiPoly>> powers(num_vars());
  MultiPoly one = constant(target_vars, Scalar::one(target_field));
  for (std::size_t v = 0; v < num_vars(); ++v) {
    const int d = degree_in(v);
    powers[v].push_back(one);
    const MultiPoly im = images[v].is_zero() ? MultiPoly(target_vars, target_field) : images[v].to_field(target_field);
    for (int k = 1; k <= d; ++k) powers[v].push_back(powers[v].back() * im);
  }
  MultiPoly result(target_vars, target_field);
  for (const auto& t : terms_) {
    MultiPoly m = constant(target_vars, coerce(t.coeff, target_field));
    for (std::size_t v = 0; v < num_vars(); ++v) {
      if (t.exponent[v]) m *= powers[v][t.exponent[v]];
    }
    result += m;
  }
  return result;
}

MultiPoly MultiPoly::specialize(std::size_t var, const Scalar& value) const {
  if (var >= num_vars()) throw Error(ErrorCode::VariableMismatch, "variable index out of range");
  const FieldPtr f = common_field(field_, value.field());
  const Scalar val = coerce(value, f);
  TermMap acc;
  std::vector<Scalar> powers{Scalar::one(f)};
  for (const auto& t : terms_) {
    while (powers.size() <= t.exponent[var]) powers.push_back(powers.back() * val);
    Exponent e = t.exponent;
    const auto k = e[var];
    e[var] = 0;
    accumulate(acc, e, coerce(t.coeff, f) * powers[k]);
  }
  MultiPoly r(vars_, f);
  r.terms_ = to_terms(std::move(acc));
  return r;
}

MultiPoly MultiPoly::derivative(std::size_t var) const {
  if (var >= num_vars()) throw Error(ErrorCode::VariableMismatch, "variable index out of range");
  TermMap acc;
  for (const auto& t : terms_) {
    if (t.exponent[var] == 0) continue;
    Exponent e = t.exponent;
    const long k = e[var];
    e[var] -= 1;
    accumulate(acc, e, t.coeff * Scalar::from_int(k, field_));
  }
  MultiPoly r(vars_, field_);
  r.terms_ = to_terms(std::move(acc));
  return r;
}

std::vector<MultiPoly> MultiPoly::coefficients_in(std::size_t var) const {
  const int d = degree_in(var);
  std::vector<TermMap> accs(std::max(d + 1, 0));
  for (const auto& t : terms_) {
    Exponent e = t.exponent;
    const auto k = e[var];
    e[var] = 0;
    accumulate(accs[k], e, t.coeff);
  }
  std::vector<MultiPoly> out;
  for (auto& acc : accs) {
    MultiPoly c(vars_, field_);
    c.terms_ = to_terms(std::move(acc));
    out.push_back(std::move(c));
  }
  return out;
}

MultiPoly MultiPoly::to_field(const FieldPtr& field) const {
  if (same_field(field, field_)) return *this;
  MultiPoly r(vars_, field);
  for (const auto& t : terms_) {
    Scalar c = convert(t.coeff, field);
    if (!c.is_zero()) r.terms_.push_back({t.exponent, std::move(c)});
  }
  r.canonicalize();
  return r;
}

MultiPoly MultiPoly::rebase(const VarSet& vars) const {
  if (same_vars(vars, vars_)) return *this;
  MultiPoly probe(vars, field_);
  std::vector<std::size_t> where(num_vars());
  for (std::size_t i = 0; i < num_vars(); ++i) where[i] = probe.var_index((*vars_)[i]);
  MultiPoly r(vars, field_);
  for (const auto& t : terms_) {
    Exponent e(vars->size(), 0);
    for (std::size_t i = 0; i < num_vars(); ++i) e[where[i]] = t.exponent[i];
    r.terms_.push_back({std::move(e), t.coeff});
  }
  r.canonicalize();
  return r;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  const bool ordered = field_->kind() == FieldKind::Rational;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    std::string coeff = t.coeff.to_string();
    bool negative = false;
    if (ordered && sgn(t.coeff.rational_value()) < 0) {
      negative = true;
      coeff = (-t.coeff).to_string();
    }
    if (i == 0) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    std::string mono;
    for (std::size_t v = 0; v < num_vars(); ++v) {
      if (t.exponent[v] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += (*vars_)[v];
      if (t.exponent[v] > 1) mono += "^" + std::to_string(t.exponent[v]);
    }
    if (mono.empty()) {
      out += coeff;
    } else if (coeff == "1") {
      out += mono;
    } else {
      out += coeff + "*" + mono;
    }
  }
  return out;
}

MultiPoly partial_derivative(const MultiPoly& p, std::string_view var) { return p.derivative(p.var_index(var)); }

MultiPoly exact_divide(const MultiPoly& a, const MultiPoly& b) {
  if (b.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "division by the zero polynomial");
  if (!same_vars(a.vars(), b.vars())) throw Error(ErrorCode::VariableMismatch, "division across variable sets");
  if (b.is_constant()) return a.scaled(b.constant_value().inverse());
  const Term& lead = b.leading_term();
  const Scalar lead_inv = lead.coeff.inverse();
  TermMap rem;
  for (const auto& t : a.terms()) rem.emplace(t.exponent, t.coeff);
  std::vector<Term> quotient;
  while (!rem.empty()) {
    auto it = rem.begin();
    Exponent e = it->first;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] < lead.exponent[v]) throw Error(ErrorCode::InvalidArgument, "polynomial division is not exact");
      e[v] -= lead.exponent[v];
    }
    const Scalar c = it->second * lead_inv;
    for (const auto& bt : b.terms()) {
      Exponent f = bt.exponent;
      for (std::size_t v = 0; v < f.size(); ++v) f[v] += e[v];
      accumulate(rem, f, -(c * bt.coeff));
    }
    quotient.push_back({std::move(e), c});
  }
  return MultiPoly::from_terms(a.vars(), a.field(), std::move(quotient));
}

MultiPoly bareiss_determinant(std::vector<std::vector<MultiPoly>> m) {
  const std::size_t n = m.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty matrix");
  const VarSet vars = m[0][0].vars();
  const FieldPtr field = m[0][0].field();
  MultiPoly prev = MultiPoly::constant(vars, Scalar::one(field));
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t pivot = k + 1;
      while (pivot < n && m[pivot][k].is_zero()) ++pivot;
      if (pivot == n) return MultiPoly(vars, field);
      std::swap(m[k], m[pivot]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        MultiPoly num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        m[i][j] = exact_divide(num, prev);
      }
      m[i][k] = MultiPoly(vars, field);
    }
    prev = m[k][k];
  }
  return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, std::size_t var) {
  if (p.is_zero() || q.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "resultant of a zero polynomial");
  if (!same_vars(p.vars(), q.vars())) throw Error(ErrorCode::VariableMismatch, "resultant across variable sets");
  if (!same_field(p.field(), q.field())) throw Error(ErrorCode::FieldMismatch, "resultant across fields");
  const int m = p.degree_in(var), l = q.degree_in(var);
  if (m == 0 && l == 0) throw Error(ErrorCode::InvalidArgument, "resultant variable occurs in neither polynomial");
  if (m == 0) return p.pow(static_cast<unsigned>(l));
  if (l == 0) return q.pow(static_cast<unsigned>(m));
  const auto pc = p.coefficients_in(var);
  const auto qc = q.coefficients_in(var);
  const std::size_t n = static_cast<std::size_t>(m + l);
  std::vector<std::vector<MultiPoly>> s(n, std::vector<MultiPoly>(n, MultiPoly(p.vars(), p.field())));
  for (int r = 0; r < l; ++r) {
    for (int i = 0; i <= m; ++i) s[r][r + i] = pc[m - i];
  }
  for (int r = 0; r < m; ++r) {
    for (int i = 0; i <= l; ++i) s[l + r][r + i] = qc[l - i];
  }
  return bareiss_determinant(std::move(s));
}

MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, std::string_view var) {
  return resultant(p, q, p.var_index(var));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const VarSet& vars, const FieldPtr& field) : s_(text), vars_(vars), field_(field) {}

  MultiPoly parse() {
    MultiPoly r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw Error(ErrorCode::Parse, msg + " at position " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  MultiPoly expr() {
    MultiPoly r = term();
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        r += term();
      } else if (c == '-') {
        ++pos_;
        r -= term();
      } else {
        return r;
      }
    }
  }
  bool starts_factor(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '(' || c == '_'; }
  MultiPoly term() {
    MultiPoly r = power();
    for (;;) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        r *= power();
      } else if (starts_factor(c)) {
        r *= power();
      } else {
        return r;
      }
    }
  }
  MultiPoly power() {
    if (peek() == '-') {
      ++pos_;
      return -power();
    }
    MultiPoly base = primary();
    if (peek() == '^') {
      ++pos_;
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      return base.pow(static_cast<unsigned>(std::stoul(std::string(s_.substr(start, pos_ - start)))));
    }
    return base;
  }
  std::string digits() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }
  MultiPoly primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      MultiPoly r = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpz_class num(digits());
      if (peek() == '/') {
        ++pos_;
        skip();
        const std::string den = digits();
        if (den.empty()) fail("expected denominator");
        const Scalar v = Scalar::rational(mpq_class(num, mpz_class(den)));
        return MultiPoly::constant(vars_, convert(v, field_));
      }
      return MultiPoly::constant(vars_, Scalar::from_mpz(num, field_));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      for (std::size_t i = 0; i < vars_->size(); ++i) {
        if ((*vars_)[i] == name) return MultiPoly::variable(vars_, i, field_);
      }
      pos_ = start;
      fail("unknown variable '" + name + "'");
    }
    fail("expected a term");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  VarSet vars_;
  FieldPtr field_;
};

}  // namespace

MultiPoly parse_poly(std::string_view text, const VarSet& vars, const FieldPtr& field) {
  return Parser(text, vars, field).parse();
}

}  // namespace pseudochart
