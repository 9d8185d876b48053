#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "pseudochart/errors.hpp"
#include "pseudochart/upoly.hpp"
#include "solver.hpp"

namespace pseudochart::detail {

namespace {

using C = std::complex<double>;
using CVec = std::vector<C>;

constexpr double kZeroTol = 1e-13;
constexpr double kSameTol = 1e-6;

double max_abs(const CVec& v) {
  double m = 0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

bool negligible(const C& x, double scale) { return std::abs(x) <= kZeroTol * std::max(scale, 1e-300); }

// Both roots of A s^2 + B s + C (A != 0), repeated when double.
std::array<C, 2> quadratic(C A, C B, C Cc) {
  const C d = std::sqrt(B * B - 4.0 * A * Cc);
  const C q = -0.5 * (std::real(std::conj(B) * d) >= 0 ? B + d : B - d);
  if (std::abs(q) == 0) return {C(0), C(0)};
  return {q / A, Cc / q};
}

bool same_block(const CVec& u, const CVec& v, bool projective) {
  if (!projective) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (std::abs(u[i] - v[i]) > kSameTol * (1 + std::abs(u[i]))) return false;
    }
    return true;
  }
  const double s = max_abs(u) * max_abs(v);
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      if (std::abs(u[i] * v[j] - u[j] * v[i]) > kSameTol * s) return false;
    }
  }
  return true;
}

std::vector<NumericPoint> dedupe(const std::vector<CBlocks>& pts, const Shape& shape) {
  std::vector<NumericPoint> out;
  for (const auto& p : pts) {
    auto it = std::find_if(out.begin(), out.end(), [&](const NumericPoint& q) {
      for (std::size_t b = 0; b < p.size(); ++b) {
        if (!same_block(p[b], q.blocks[b], shape.projective[b])) return false;
      }
      return true;
    });
    if (it == out.end()) {
      out.push_back(NumericPoint{p, 1});
    } else {
      ++it->multiplicity;
    }
  }
  return out;
}

std::vector<std::vector<long>> matrix_of(const Provenance& proj) {
  return proj.params.at("matrix").get<std::vector<std::vector<long>>>();
}

std::optional<CBlocks> segre_preimage(int n, const CVec& z) {
  std::size_t m = 0;
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (std::abs(z[i]) > std::abs(z[m])) m = i;
  }
  if (std::abs(z[m]) == 0) return std::nullopt;
  CBlocks f;
  for (int k = 0; k < n; ++k) {
    const std::size_t bit = std::size_t{1} << (n - 1 - k);
    f.push_back({z[m & ~bit], z[m | bit]});
  }
  const CVec s = segre_coords<C>(f, C(1), [](C a, C b) { return a * b; });
  const double scale = max_abs(z) * max_abs(s);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (std::abs(z[i] * s[m] - s[i] * z[m]) > 1e-8 * scale) return std::nullopt;
  }
  return f;
}

// Multilinear polynomial in x1, x2, x3: coefficient index bit k is the power of x_{k+1}.
using Multilinear = std::array<C, 8>;

C eval(const Multilinear& e, const std::array<C, 3>& x) {
  C s = 0;
  for (unsigned m = 0; m < 8; ++m) {
    C t = e[m];
    for (int k = 0; k < 3; ++k) {
      if ((m >> k) & 1U) t *= x[k];
    }
    s += t;
  }
  return s;
}

C partial(const Multilinear& e, const std::array<C, 3>& x, int var) {
  C s = 0;
  for (unsigned m = 0; m < 8; ++m) {
    if (!((m >> var) & 1U)) continue;
    C t = e[m];
    for (int k = 0; k < 3; ++k) {
      if (k != var && ((m >> k) & 1U)) t *= x[k];
    }
    s += t;
  }
  return s;
}

double magnitude_scale(const Multilinear& e, const std::array<C, 3>& x) {
  double s = 0;
  for (unsigned m = 0; m < 8; ++m) {
    double t = std::abs(e[m]);
    for (int k = 0; k < 3; ++k) {
      if ((m >> k) & 1U) t *= std::abs(x[k]);
    }
    s += t;
  }
  return s;
}

C det4(std::array<std::array<C, 4>, 4> a) {
  C d = 1;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) == 0) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (int r = c + 1; r < 4; ++r) {
      const C f = a[r][c] / a[c][c];
      for (int cc = c; cc < 4; ++cc) a[r][cc] -= f * a[c][cc];
    }
  }
  return d;
}

// Pulled-back equations of the projected Segre threefold on one affine chart.
class ProjectedSegre3 {
 public:
  ProjectedSegre3(const std::vector<std::vector<long>>& L, const CVec& y, std::uint64_t chart_seed) {
    std::mt19937_64 rng(chart_seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& m : mobius_) {
      for (auto& row : m)
        for (auto& e : row) e = C(u(rng), u(rng));
    }
    // Factor k: [a_k : b_k] = M_k (x_k, 1).
    std::array<Multilinear, 8> seg{};
    for (unsigned i = 0; i < 8; ++i) {
      Multilinear acc{};
      acc[0] = 1;
      for (int k = 0; k < 3; ++k) {
        const auto& row = mobius_[k][(i >> (2 - k)) & 1U];
        Multilinear next{};
        for (unsigned m = 0; m < 8; ++m) {
          if ((m >> k) & 1U) continue;
          next[m] += acc[m] * row[1];
          next[m | (1U << k)] += acc[m] * row[0];
        }
        acc = next;
      }
      seg[i] = acc;
    }
    std::array<Multilinear, 4> F{};
    for (int r = 0; r < 4; ++r) {
      for (unsigned i = 0; i < 8; ++i) {
        for (unsigned m = 0; m < 8; ++m) F[r][m] += static_cast<double>(L[r][i]) * seg[i][m];
      }
    }
    int j = 0;
    for (int r = 1; r < 4; ++r) {
      if (std::abs(y[r]) > std::abs(y[j])) j = r;
    }
    int at = 0;
    for (int r = 0; r < 4; ++r) {
      if (r == j) continue;
      for (unsigned m = 0; m < 8; ++m) eq_[at][m] = y[j] * F[r][m] - y[r] * F[j][m];
      ++at;
    }
  }

  std::vector<CBlocks> solve() const {
    const auto r12 = eliminate_x3(0, 1);
    const auto r13 = eliminate_x3(0, 2);
    constexpr int kN = 9;
    CVec vals(kN);
    for (int s = 0; s < kN; ++s) {
      const C w = std::polar(1.0, 2 * std::numbers::pi * s / kN);
      vals[s] = resultant_x2(r12, r13, w);
    }
    CVec coeffs(kN);
    for (int m = 0; m < kN; ++m) {
      for (int s = 0; s < kN; ++s) coeffs[m] += vals[s] * std::polar(1.0, -2 * std::numbers::pi * s * m / kN);
      coeffs[m] /= static_cast<double>(kN);
    }
    const double cmax = max_abs(coeffs);
    if (cmax == 0) throw Error(ErrorCode::NumericNonConvergence, "degenerate eliminant on this chart");
    while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-10 * cmax) coeffs.pop_back();
    std::vector<CBlocks> out;
    if (coeffs.size() < 2) return out;
    NumericRootOptions opts;
    opts.residual_tol = 1e-4;
    for (const auto& root : complex_roots(coeffs, opts)) {
      const C x1 = root.value.complex_value();
      const auto q = at_x1(r12, x1);
      std::vector<C> x2s;
      if (std::abs(q[2]) > 1e-10 * max_abs(CVec(q.begin(), q.end()))) {
        const auto rr = quadratic(q[2], q[1], q[0]);
        x2s.assign(rr.begin(), rr.end());
      } else if (std::abs(q[1]) > 0) {
        x2s.push_back(-q[0] / q[1]);
      }
      for (const C& x2 : x2s) {
        if (auto p = finish(x1, x2)) out.push_back(*p);
      }
    }
    return out;
  }

 private:
  using Biquad = std::array<std::array<C, 3>, 3>;  // [deg x1][deg x2]

  // alpha_i beta_l - alpha_l beta_i with E = alpha x3 + beta.
  Biquad eliminate_x3(int i, int l) const {
    auto part = [&](int e, bool with_x3) {
      std::array<C, 4> v{};
      for (unsigned m = 0; m < 4; ++m) v[m] = eq_[e][m | (with_x3 ? 4U : 0U)];
      return v;
    };
    const auto ai = part(i, true), bi = part(i, false), al = part(l, true), bl = part(l, false);
    Biquad r{};
    for (unsigned m = 0; m < 4; ++m) {
      for (unsigned n = 0; n < 4; ++n) {
        const int d1 = static_cast<int>((m & 1U) + (n & 1U));
        const int d2 = static_cast<int>(((m >> 1) & 1U) + ((n >> 1) & 1U));
        r[d1][d2] += ai[m] * bl[n] - al[m] * bi[n];
      }
    }
    return r;
  }

  static std::array<C, 3> at_x1(const Biquad& r, C x1) {
    std::array<C, 3> q{};
    for (int d2 = 0; d2 < 3; ++d2) q[d2] = r[0][d2] + x1 * (r[1][d2] + x1 * r[2][d2]);
    return q;
  }

  static C resultant_x2(const Biquad& a, const Biquad& b, C x1) {
    const auto p = at_x1(a, x1), q = at_x1(b, x1);
    std::array<std::array<C, 4>, 4> s{};
    s[0] = {p[2], p[1], p[0], 0};
    s[1] = {0, p[2], p[1], p[0]};
    s[2] = {q[2], q[1], q[0], 0};
    s[3] = {0, q[2], q[1], q[0]};
    return det4(s);
  }

  std::optional<CBlocks> finish(C x1, C x2) const {
    int best = 0;
    std::array<C, 3> alpha{}, beta{};
    for (int e = 0; e < 3; ++e) {
      alpha[e] = partial(eq_[e], {x1, x2, C(0)}, 2);
      beta[e] = eval(eq_[e], {x1, x2, C(0)});
      if (std::abs(alpha[e]) > std::abs(alpha[best])) best = e;
    }
    if (std::abs(alpha[best]) == 0) return std::nullopt;
    std::array<C, 3> x{x1, x2, -beta[best] / alpha[best]};
    for (int it = 0; it < 12; ++it) {
      std::array<std::array<C, 4>, 3> J{};
      for (int e = 0; e < 3; ++e) {
        for (int k = 0; k < 3; ++k) J[e][k] = partial(eq_[e], x, k);
        J[e][3] = -eval(eq_[e], x);
      }
      if (!solve3(J)) break;
      double step = 0;
      for (int k = 0; k < 3; ++k) {
        x[k] += J[k][3];
        step = std::max(step, std::abs(J[k][3]) / (1 + std::abs(x[k])));
      }
      if (step < 1e-15) break;
    }
    for (int e = 0; e < 3; ++e) {
      if (std::abs(eval(eq_[e], x)) > 1e-9 * magnitude_scale(eq_[e], x)) return std::nullopt;
    }
    for (const auto& xk : x) {
      if (!std::isfinite(std::abs(xk)) || std::abs(xk) > 1e8) return std::nullopt;
    }
    CBlocks out;
    for (int k = 0; k < 3; ++k) {
      out.push_back({mobius_[k][0][0] * x[k] + mobius_[k][0][1], mobius_[k][1][0] * x[k] + mobius_[k][1][1]});
    }
    return out;
  }

  // In-place Gaussian elimination; solution lands in column 3.
  static bool solve3(std::array<std::array<C, 4>, 3>& a) {
    for (int c = 0; c < 3; ++c) {
      int piv = c;
      for (int r = c + 1; r < 3; ++r) {
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      }
      if (std::abs(a[piv][c]) == 0) return false;
      std::swap(a[piv], a[c]);
      for (int r = 0; r < 3; ++r) {
        if (r == c) continue;
        const C f = a[r][c] / a[c][c];
        for (int cc = c; cc < 4; ++cc) a[r][cc] -= f * a[c][cc];
      }
    }
    for (int r = 0; r < 3; ++r) a[r][3] /= a[r][r];
    return true;
  }

  std::array<std::array<std::array<C, 2>, 2>, 3> mobius_{};
  std::array<Multilinear, 3> eq_{};
};

std::vector<CBlocks> projected_segre2(const std::vector<std::vector<long>>& L, const CVec& y) {
  std::array<std::array<C, 5>, 3> rows{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) rows[r][c] = static_cast<double>(L[r][c]);
    rows[r][4] = y[r];
  }
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < 4 && r < 3; ++c) {
    int piv = r;
    for (int o = r + 1; o < 3; ++o) {
      if (std::abs(rows[o][c]) > std::abs(rows[piv][c])) piv = o;
    }
    if (std::abs(rows[piv][c]) < 1e-12) continue;
    std::swap(rows[r], rows[piv]);
    const C iv = 1.0 / rows[r][c];
    for (auto& e : rows[r]) e *= iv;
    for (int o = 0; o < 3; ++o) {
      if (o == r) continue;
      const C f = rows[o][c];
      for (int cc = 0; cc < 5; ++cc) rows[o][cc] -= f * rows[r][cc];
    }
    pivots.push_back(c);
    ++r;
  }
  if (r != 3) throw Error(ErrorCode::Unsupported, "projection matrix is not of full rank");
  int free_col = 0;
  while (std::find(pivots.begin(), pivots.end(), free_col) != pivots.end()) ++free_col;
  CVec k(4), q(4);
  k[free_col] = 1;
  for (int i = 0; i < 3; ++i) {
    k[pivots[i]] = -rows[i][free_col];
    q[pivots[i]] = rows[i][4];
  }
  auto form = [](const CVec& u, const CVec& v) { return u[0] * v[3] - u[1] * v[2]; };
  const C A = form(k, k);
  if (std::abs(A) < 1e-12) throw Error(ErrorCode::CenterMeetsVariety, "projection center lies on the Segre quadric");
  std::vector<CBlocks> out;
  for (const C& s : quadratic(A, form(k, q) + form(q, k), form(q, q))) {
    CVec z(4);
    for (int i = 0; i < 4; ++i) z[i] = s * k[i] + q[i];
    if (auto f = segre_preimage(2, z)) out.push_back(*f);
  }
  return out;
}

std::vector<CBlocks> projected_segre3(const std::vector<std::vector<long>>& L, const CVec& y) {
  std::vector<CBlocks> all;
  int solved = 0;
  for (std::uint64_t chart : {0x9e3779b97f4a7c15ULL, 0xbf58476d1ce4e5b9ULL}) {
    try {
      for (auto& p : ProjectedSegre3(L, y, chart).solve()) all.push_back(std::move(p));
      ++solved;
    } catch (const Error&) {
    }
  }
  if (solved == 0) throw Error(ErrorCode::NumericNonConvergence, "projected Segre solve failed on every chart");
  std::vector<CBlocks> out;
  const Shape shape{{true, true, true}, {2, 2, 2}};
  for (const auto& p : dedupe(all, shape)) out.push_back(p.blocks);
  return out;
}

bool is_pair(const Provenance& p) {
  return p.children.size() == 2 && p.children[0].kind == "segre" && p.children[1].kind == "linear_projection" &&
         p.children[0].params.at("n") == p.children[1].params.at("n");
}

std::vector<CBlocks> expand(const Provenance& p, const CBlocks& y) {
  if (p.kind == "double_cover") {
    const C a = y[0][0], b = y[0][1];
    if (negligible(b, std::abs(a))) return {CBlocks{{C(0)}}};
    const auto r = quadratic(b, -a, b);
    return {CBlocks{{r[0]}}, CBlocks{{r[1]}}};
  }
  if (p.kind == "identity") return {y};
  if (p.kind == "sym2") {
    const C y0 = y[0][0], y1 = y[0][1], y2 = y[0][2];
    const double s = max_abs(y[0]);
    CVec r1, r2;
    if (!negligible(y0, s)) {
      const auto r = quadratic(y0, -y1, y2);
      r1 = {r[0], 1};
      r2 = {r[1], 1};
    } else {
      r1 = {1, 0};
      r2 = negligible(y1, s) ? CVec{1, 0} : CVec{y2, y1};
    }
    return {CBlocks{r1, r2}, CBlocks{r2, r1}};
  }
  if (p.kind == "segre") {
    if (auto f = segre_preimage(p.params.at("n").get<int>(), y[0])) return {*f};
    return {};
  }
  if (p.kind == "linear_projection") {
    throw Error(ErrorCode::PositiveDimensional, "a linear projection alone has positive-dimensional fibers");
  }
  if (p.kind == "product") {
    std::vector<CBlocks> acc{CBlocks{}};
    std::size_t at = 0;
    for (const auto& c : p.children) {
      const std::size_t nb = target_shape(c).sizes.size();
      const auto part = expand(c, CBlocks(y.begin() + at, y.begin() + at + nb));
      at += nb;
      std::vector<CBlocks> next;
      for (const auto& head : acc) {
        for (const auto& tail : part) {
          CBlocks b = head;
          b.insert(b.end(), tail.begin(), tail.end());
          next.push_back(std::move(b));
        }
      }
      acc = std::move(next);
    }
    return acc;
  }
  if (p.kind == "compose") {
    if (is_pair(p)) {
      const int n = p.children[0].params.at("n").get<int>();
      const auto L = matrix_of(p.children[1]);
      if (n == 2) return projected_segre2(L, y[0]);
      if (n == 3) return projected_segre3(L, y[0]);
      throw Error(ErrorCode::Unsupported, "numeric solver handles projected Segre for n = 2, 3");
    }
    if (p.children.size() == 1) return expand(p.children[0], y);
    const ComposeSplit s = split_compose(p);
    std::vector<CBlocks> out;
    for (const auto& pt : expand(s.outer, y)) {
      for (auto& q : expand(s.inner, pt)) out.push_back(std::move(q));
    }
    return out;
  }
  throw Error(ErrorCode::Unsupported, "numeric solver has no rule for " + p.kind);
}

}  // namespace

std::vector<NumericPoint> solve_numeric(const Provenance& p, const CBlocks& target) {
  return dedupe(expand(p, target), source_shape(p));
}

}  // namespace pseudochart::detail
