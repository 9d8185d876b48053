#include <algorithm>
#include <optional>

#include "pseudochart/errors.hpp"
#include "solver.hpp"

namespace pseudochart::detail {

namespace {

// a + b*sqrt(D); b stays zero until the context is extended.
struct Ext {
  Scalar a, b;
};

using EBlocks = std::vector<std::vector<Ext>>;

class ExactSolver {
 public:
  ExactSolver(FieldPtr field, bool base_field_only) : F_(std::move(field)), base_only_(base_field_only) {
    if (F_->is_finite() && F_->characteristic() == 2) {
      throw Error(ErrorCode::Unsupported, "exact fiber solver needs odd characteristic");
    }
  }

  Ext lift(const Scalar& x) const { return {x, Scalar::zero(F_)}; }
  Ext zero() const { return lift(Scalar::zero(F_)); }
  Ext one() const { return lift(Scalar::one(F_)); }
  static bool is_zero(const Ext& x) { return x.a.is_zero() && x.b.is_zero(); }
  static Ext add(const Ext& x, const Ext& y) { return {x.a + y.a, x.b + y.b}; }
  static Ext sub(const Ext& x, const Ext& y) { return {x.a - y.a, x.b - y.b}; }
  static Ext neg(const Ext& x) { return {-x.a, -x.b}; }

  Ext mul(const Ext& x, const Ext& y) const {
    Scalar a = x.a * y.a;
    if (D_) a += x.b * y.b * *D_;
    return {a, x.a * y.b + x.b * y.a};
  }

  Ext inv(const Ext& x) const {
    if (x.b.is_zero()) return lift(x.a.inverse());
    const Scalar n = (x.a * x.a - x.b * x.b * *D_).inverse();
    return {x.a * n, -x.b * n};
  }

  Ext div(const Ext& x, const Ext& y) const { return mul(x, inv(y)); }

  // nullopt only in base-field mode; otherwise failure throws.
  std::optional<Ext> sqrt(const Ext& x) {
    if (is_zero(x)) return zero();
    if (x.b.is_zero()) {
      if (auto s = exact_sqrt(x.a)) return lift(*s);
      if (D_) {
        if (auto s = exact_sqrt(x.a / *D_)) return Ext{Scalar::zero(F_), *s};
      }
      if (base_only_) return std::nullopt;
      if (D_) throw Error(ErrorCode::Unsupported, "fiber needs more than one quadratic extension");
      D_ = x.a;
      return Ext{Scalar::zero(F_), Scalar::one(F_)};
    }
    // x = (u + v sqrt D)^2 with u^2 = (a +- sqrt(a^2 - b^2 D)) / 2.
    const Scalar two = Scalar::from_int(2, F_);
    if (auto n = exact_sqrt(x.a * x.a - x.b * x.b * *D_)) {
      for (const Scalar& r : {x.a + *n, x.a - *n}) {
        const Scalar u2 = r / two;
        if (u2.is_zero()) continue;
        if (auto u = exact_sqrt(u2)) return Ext{*u, x.b / (two * *u)};
      }
    }
    throw Error(ErrorCode::Unsupported, "fiber needs a quartic extension");
  }

  // Roots of A s^2 + B s + C with A != 0, distinct.
  std::vector<Ext> quadratic(const Ext& A, const Ext& B, const Ext& C) {
    const Ext four = lift(Scalar::from_int(4, F_));
    const Ext disc = sub(mul(B, B), mul(four, mul(A, C)));
    const Ext twoA = add(A, A);
    if (is_zero(disc)) return {div(neg(B), twoA)};
    const auto s = sqrt(disc);
    if (!s) return {};
    return {div(sub(*s, B), twoA), div(neg(add(*s, B)), twoA)};
  }

  long count(const Provenance& p, const EBlocks& y) {
    if (p.kind == "double_cover") {
      const Ext& a = y[0][0];
      const Ext& b = y[0][1];
      if (is_zero(b)) return 1;
      return is_zero(sub(mul(a, a), mul(lift(Scalar::from_int(4, F_)), mul(b, b)))) ? 1 : 2;
    }
    if (p.kind == "identity") return 1;
    if (p.kind == "sym2") {
      const Ext d = sub(mul(y[0][1], y[0][1]), mul(lift(Scalar::from_int(4, F_)), mul(y[0][0], y[0][2])));
      return is_zero(d) ? 1 : 2;
    }
    if (p.kind == "segre") return segre_preimage(p.params.at("n").get<int>(), y[0]) ? 1 : 0;
    if (p.kind == "linear_projection") {
      throw Error(ErrorCode::PositiveDimensional, "a linear projection alone has positive-dimensional fibers");
    }
    if (p.kind == "product") {
      long total = 1;
      std::size_t at = 0;
      for (const auto& c : p.children) {
        const std::size_t nb = target_shape(c).sizes.size();
        total *= count(c, EBlocks(y.begin() + at, y.begin() + at + nb));
        at += nb;
      }
      return total;
    }
    if (p.kind == "compose") {
      if (is_pair(p)) return static_cast<long>(projected_segre(p, y).size());
      if (p.children.size() == 1) return count(p.children[0], y);
      const ComposeSplit s = split_compose(p);
      long total = 0;
      for (const auto& pt : expand(s.outer, y)) total += count(s.inner, pt);
      return total;
    }
    throw Error(ErrorCode::Unsupported, "exact solver has no rule for " + p.kind);
  }

  std::vector<EBlocks> expand(const Provenance& p, const EBlocks& y) {
    if (p.kind == "double_cover") {
      const Ext& a = y[0][0];
      const Ext& b = y[0][1];
      if (is_zero(b)) return {EBlocks{{zero()}}};
      std::vector<EBlocks> out;
      for (const Ext& t : quadratic(b, neg(a), b)) out.push_back(EBlocks{{t}});
      return out;
    }
    if (p.kind == "identity") return {y};
    if (p.kind == "sym2") {
      std::vector<std::vector<Ext>> roots;
      const Ext& y0 = y[0][0];
      const Ext& y1 = y[0][1];
      const Ext& y2 = y[0][2];
      if (!is_zero(y0)) {
        for (const Ext& s : quadratic(y0, neg(y1), y2)) roots.push_back({s, one()});
      } else {
        roots.push_back({one(), zero()});
        if (!is_zero(y1)) roots.push_back({y2, y1});
      }
      if (roots.empty()) return {};
      if (roots.size() == 1) return {EBlocks{roots[0], roots[0]}};
      return {EBlocks{roots[0], roots[1]}, EBlocks{roots[1], roots[0]}};
    }
    if (p.kind == "segre") {
      if (auto f = segre_preimage(p.params.at("n").get<int>(), y[0])) return {*f};
      return {};
    }
    if (p.kind == "linear_projection") {
      throw Error(ErrorCode::PositiveDimensional, "a linear projection alone has positive-dimensional fibers");
    }
    if (p.kind == "product") {
      std::vector<EBlocks> acc{EBlocks{}};
      std::size_t at = 0;
      for (const auto& c : p.children) {
        const std::size_t nb = target_shape(c).sizes.size();
        const auto part = expand(c, EBlocks(y.begin() + at, y.begin() + at + nb));
        at += nb;
        std::vector<EBlocks> next;
        for (const auto& head : acc) {
          for (const auto& tail : part) {
            EBlocks b = head;
            b.insert(b.end(), tail.begin(), tail.end());
            next.push_back(std::move(b));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    if (p.kind == "compose") {
      if (is_pair(p)) return projected_segre(p, y);
      if (p.children.size() == 1) return expand(p.children[0], y);
      const ComposeSplit s = split_compose(p);
      std::vector<EBlocks> out;
      for (const auto& pt : expand(s.outer, y)) {
        for (auto& q : expand(s.inner, pt)) out.push_back(std::move(q));
      }
      return out;
    }
    throw Error(ErrorCode::Unsupported, "exact solver has no rule for " + p.kind);
  }

  bool has_extension() const { return D_.has_value(); }

 private:
  static bool is_pair(const Provenance& p) {
    return p.children.size() == 2 && p.children[0].kind == "segre" && p.children[1].kind == "linear_projection" &&
           p.children[0].params.at("n") == p.children[1].params.at("n");
  }

  std::optional<EBlocks> segre_preimage(int n, const std::vector<Ext>& z) const {
    std::size_t m = 0;
    while (m < z.size() && is_zero(z[m])) ++m;
    if (m == z.size()) return std::nullopt;
    EBlocks f;
    for (int k = 0; k < n; ++k) {
      const std::size_t bit = std::size_t{1} << (n - 1 - k);
      f.push_back({z[m & ~bit], z[m | bit]});
    }
    const auto s = segre_coords<Ext>(f, one(), [this](const Ext& x, const Ext& y) { return mul(x, y); });
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!is_zero(sub(mul(z[i], s[m]), mul(s[i], z[m])))) return std::nullopt;
    }
    return f;
  }

  // Preimages of y under projection from a line L z = y restricted to the
  // Segre quadric z0 z3 = z1 z2.
  std::vector<EBlocks> projected_segre(const Provenance& p, const EBlocks& y) {
    const int n = p.children[0].params.at("n").get<int>();
    if (n != 2) throw Error(ErrorCode::Unsupported, "exact solver handles projected Segre only for n = 2");
    const auto& mj = p.children[1].params.at("matrix");
    std::vector<std::vector<Ext>> rows(3, std::vector<Ext>(5, zero()));
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) rows[r][c] = lift(Scalar::from_int(mj[r][c].get<long>(), F_));
      rows[r][4] = y[0][r];
    }
    std::vector<int> pivot_col;
    int r = 0;
    for (int c = 0; c < 4 && r < 3; ++c) {
      int piv = r;
      while (piv < 3 && is_zero(rows[piv][c])) ++piv;
      if (piv == 3) continue;
      std::swap(rows[r], rows[piv]);
      const Ext iv = inv(rows[r][c]);
      for (auto& e : rows[r]) e = mul(e, iv);
      for (int o = 0; o < 3; ++o) {
        if (o == r || is_zero(rows[o][c])) continue;
        const Ext f = rows[o][c];
        for (int cc = 0; cc < 5; ++cc) rows[o][cc] = sub(rows[o][cc], mul(f, rows[r][cc]));
      }
      pivot_col.push_back(c);
      ++r;
    }
    if (r != 3) throw Error(ErrorCode::Unsupported, "projection matrix is not of full rank");
    int free_col = 0;
    while (std::find(pivot_col.begin(), pivot_col.end(), free_col) != pivot_col.end()) ++free_col;
    std::vector<Ext> k(4, zero()), q(4, zero());
    k[free_col] = one();
    for (int i = 0; i < 3; ++i) {
      k[pivot_col[i]] = neg(rows[i][free_col]);
      q[pivot_col[i]] = rows[i][4];
    }
    auto form = [this](const std::vector<Ext>& u, const std::vector<Ext>& v) {
      return sub(mul(u[0], v[3]), mul(u[1], v[2]));
    };
    const Ext A = form(k, k);
    const Ext B = add(form(k, q), form(q, k));
    const Ext C = form(q, q);
    if (is_zero(A)) throw Error(ErrorCode::CenterMeetsVariety, "projection center lies on the Segre quadric");
    std::vector<EBlocks> out;
    for (const Ext& s : quadratic(A, B, C)) {
      std::vector<Ext> z(4);
      for (int i = 0; i < 4; ++i) z[i] = add(mul(s, k[i]), q[i]);
      if (auto f = segre_preimage(2, z)) out.push_back(*f);
    }
    return out;
  }

  FieldPtr F_;
  bool base_only_;
  std::optional<Scalar> D_;
};

EBlocks lift_blocks(const ExactSolver& s, const Blocks& y) {
  EBlocks out;
  for (const auto& b : y) {
    std::vector<Ext> e;
    for (const auto& x : b) e.push_back(s.lift(x));
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

ExactFiber solve_exact(const Provenance& p, const Blocks& target) {
  FieldPtr field;
  for (const auto& b : target) {
    for (const auto& x : b) field = field ? common_field(field, x.field()) : x.field();
  }
  if (!field || !field->is_exact()) throw Error(ErrorCode::Unsupported, "exact solver needs a target over Q or F_q");
  Blocks y;
  for (const auto& b : target) y.push_back(convert_all(b, field));

  ExactFiber out;
  {
    ExactSolver full(field, false);
    out.count = full.count(p, lift_blocks(full, y));
  }
  ExactSolver base(field, true);
  for (const auto& pt : base.expand(p, lift_blocks(base, y))) {
    Blocks b;
    for (const auto& blk : pt) {
      std::vector<Scalar> v;
      for (const auto& e : blk) v.push_back(e.a);
      b.push_back(std::move(v));
    }
    out.rational.push_back(std::move(b));
  }
  return out;
}

}  // namespace pseudochart::detail
