#include "pseudochart/elimination.hpp"

#include <algorithm>
#include <variant>

#include "pseudochart/errors.hpp"

namespace pseudochart {

namespace {

using PolyY = std::vector<UPoly>;  // coefficients (mod R) in the second variable

struct Split {
  UPoly first, second;
};

void trim(PolyY& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

PolyY reduce(const PolyY& p, const UPoly& r) {
  PolyY out;
  out.reserve(p.size());
  for (const auto& c : p) out.push_back(c % r);
  trim(out);
  return out;
}

PolyY to_poly_y(const MultiPoly& p, std::size_t x, std::size_t y) {
  const auto coeffs = p.coefficients_in(y);
  PolyY out;
  for (const auto& c : coeffs) out.push_back(UPoly::from_multipoly(c, x));
  trim(out);
  return out;
}

// Either an inverse of c modulo r, or a nontrivial factorisation of r.
std::variant<UPoly, Split> invert_or_split(const UPoly& c, const UPoly& r) {
  const ExtendedGcd eg = extended_gcd(c, r);
  if (eg.g.degree() == 0) return eg.s % r;
  return Split{eg.g, divmod(r, eg.g).first.monic()};
}

// gcd of a and b over K[x]/(r), or a split of r discovered on the way.
std::variant<PolyY, Split> gcd_mod(PolyY a, PolyY b, const UPoly& r) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    auto inv = invert_or_split(b.back(), r);
    if (auto* s = std::get_if<Split>(&inv)) return *s;
    const UPoly& lead_inv = std::get<UPoly>(inv);
    while (!a.empty() && a.size() >= b.size()) {
      const UPoly c = (a.back() * lead_inv) % r;
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = (a[shift + i] - c * b[i]) % r;
      trim(a);
    }
    std::swap(a, b);
  }
  return a;
}

std::variant<PolyY, Split> make_monic(PolyY a, const UPoly& r) {
  if (a.empty()) return a;
  auto inv = invert_or_split(a.back(), r);
  if (auto* s = std::get_if<Split>(&inv)) return *s;
  for (auto& c : a) c = (c * std::get<UPoly>(inv)) % r;
  return a;
}

PolyY derivative_y(const PolyY& p, const UPoly& r) {
  PolyY d;
  const FieldPtr& f = r.field();
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i].scaled(Scalar::from_int(static_cast<long>(i), f)) % r);
  trim(d);
  return d;
}

struct BranchResult {
  UPoly modulus;
  PolyY fiber;
};

// gcd of all polys over every branch of r, splitting r as zero divisors appear.
std::vector<BranchResult> gcd_all(const UPoly& r, const std::vector<PolyY>& polys) {
  struct Task {
    UPoly r;
    PolyY acc;
    std::size_t next;
  };
  std::vector<BranchResult> out;
  std::vector<Task> stack;
  stack.push_back({r, polys.empty() ? PolyY{} : reduce(polys[0], r), 1});
  while (!stack.empty()) {
    Task t = std::move(stack.back());
    stack.pop_back();
    if (t.next >= polys.size()) {
      auto m = make_monic(t.acc, t.r);
      if (auto* s = std::get_if<Split>(&m)) {
        stack.push_back({s->first, reduce(t.acc, s->first), t.next});
        stack.push_back({s->second, reduce(t.acc, s->second), t.next});
      } else {
        out.push_back({t.r, std::get<PolyY>(m)});
      }
      continue;
    }
    auto g = gcd_mod(t.acc, reduce(polys[t.next], t.r), t.r);
    if (auto* s = std::get_if<Split>(&g)) {
      stack.push_back({s->first, reduce(t.acc, s->first), t.next});
      stack.push_back({s->second, reduce(t.acc, s->second), t.next});
    } else {
      stack.push_back({t.r, std::get<PolyY>(g), t.next + 1});
    }
  }
  std::sort(out.begin(), out.end(), [](const BranchResult& a, const BranchResult& b) {
    return a.modulus.degree() < b.modulus.degree();
  });
  return out;
}

// Number of distinct roots of the monic fiber over each root of the branch modulus.
int branch_point_count(const UPoly& r, const PolyY& fiber) {
  const int d = static_cast<int>(fiber.size()) - 1;
  if (d <= 0) return 0;
  const auto parts = gcd_all(r, {fiber, derivative_y(fiber, r)});
  int count = 0;
  for (const auto& part : parts) {
    const int common = static_cast<int>(part.fiber.size()) - 1;
    count += part.modulus.degree() * (d - std::max(common, 0));
  }
  return count;
}

std::string poly_y_string(const PolyY& p, const std::string& x, const std::string& y) {
  std::string out;
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i].is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += "(" + p[i].to_string(x) + ")";
    if (i > 0) out += "*" + y + (i > 1 ? "^" + std::to_string(i) : "");
  }
  return out.empty() ? "0" : out;
}

}  // namespace

nlohmann::json CommonZeroSet::to_json(const std::string& first, const std::string& second) const {
  nlohmann::json j;
  j["kind"] = kind == Kind::Empty ? "empty" : kind == Kind::Finite ? "finite" : "positive_dimensional";
  j["eliminant"] = eliminant.to_string(first);
  if (kind == Kind::Finite) j["point_count"] = point_count;
  nlohmann::json bs = nlohmann::json::array();
  for (const auto& b : branches) {
    nlohmann::json bj;
    bj[first + "_root_of"] = b.modulus.to_string(first);
    if (!second.empty()) {
      if (b.whole_line) {
        bj[second] = "any";
      } else {
        bj[second + "_root_of"] = poly_y_string(b.fiber, first, second);
      }
    }
    bj["points"] = b.point_count;
    bs.push_back(std::move(bj));
  }
  j["branches"] = std::move(bs);
  return j;
}

CommonZeroSet common_zeros_1d(std::span<const MultiPoly> polys, std::size_t var) {
  if (polys.empty()) throw Error(ErrorCode::InvalidArgument, "no polynomials");
  const FieldPtr f = polys[0].field();
  UPoly g(f);
  for (const auto& p : polys) g = gcd(g, UPoly::from_multipoly(p, var));
  CommonZeroSet zs(f);
  zs.eliminant = g;
  if (g.is_zero()) {
    zs.kind = CommonZeroSet::Kind::PositiveDimensional;
  } else if (g.degree() == 0) {
    zs.kind = CommonZeroSet::Kind::Empty;
  } else {
    zs.kind = CommonZeroSet::Kind::Finite;
    const UPoly sf = squarefree_part(g);
    zs.point_count = sf.degree();
    zs.branches.push_back({sf, {}, false, sf.degree()});
  }
  return zs;
}

CommonZeroSet common_zeros_2d(std::span<const MultiPoly> polys, std::size_t x, std::size_t y) {
  if (polys.empty()) throw Error(ErrorCode::InvalidArgument, "no polynomials");
  const FieldPtr f = polys[0].field();
  CommonZeroSet zs(f);
  std::vector<MultiPoly> with_y;
  UPoly r(f);  // gcd of constraints on x; zero means unconstrained
  bool any_nonzero = false;
  for (const auto& p : polys) {
    if (p.is_zero()) continue;
    any_nonzero = true;
    if (p.involves(y)) {
      with_y.push_back(p);
    } else {
      r = gcd(r, UPoly::from_multipoly(p, x));
    }
  }
  if (!any_nonzero) {
    zs.kind = CommonZeroSet::Kind::PositiveDimensional;
    return zs;
  }
  for (std::size_t i = 0; i < with_y.size(); ++i) {
    for (std::size_t j = i + 1; j < with_y.size(); ++j) {
      const MultiPoly res = resultant(with_y[i], with_y[j], y);
      if (!res.is_zero()) r = gcd(r, UPoly::from_multipoly(res, x));
    }
  }
  zs.eliminant = r;
  if (!r.is_zero() && r.degree() == 0) {
    zs.kind = CommonZeroSet::Kind::Empty;
    return zs;
  }
  if (r.is_zero()) {
    // No constraint on x survived: either a single curve or polynomials sharing a factor.
    if (with_y.size() <= 1) {
      zs.kind = CommonZeroSet::Kind::PositiveDimensional;
      return zs;
    }
    // Pair the first polynomial with combinations of the others; an identically
    // vanishing resultant for every combination forces a common factor.
    for (long trial = 0; trial < 4 && r.is_zero(); ++trial) {
      MultiPoly combo = with_y[1];
      for (std::size_t i = 2; i < with_y.size(); ++i) {
        combo = combo + with_y[i].scaled(Scalar::from_int(static_cast<long>(i * (trial + 3) + trial * trial + 1), f));
      }
      const MultiPoly res = resultant(with_y[0], combo, y);
      if (!res.is_zero()) r = UPoly::from_multipoly(res, x);
      if (with_y.size() == 2) break;
    }
    if (r.is_zero()) {
      zs.kind = CommonZeroSet::Kind::PositiveDimensional;
      return zs;
    }
  }
  const UPoly sf = squarefree_part(r);
  std::vector<PolyY> ys;
  for (const auto& p : with_y) ys.push_back(to_poly_y(p, x, y));
  bool positive = false;
  for (auto& br : gcd_all(sf, ys)) {
    ZeroBranch b{br.modulus, br.fiber, false, 0};
    if (br.fiber.empty()) {
      b.whole_line = true;
      b.point_count = -1;
      positive = true;
    } else if (br.fiber.size() == 1) {
      continue;  // unit gcd: no common zero above these roots
    } else {
      b.point_count = branch_point_count(br.modulus, br.fiber);
      zs.point_count += b.point_count;
    }
    zs.branches.push_back(std::move(b));
  }
  if (positive) {
    zs.kind = CommonZeroSet::Kind::PositiveDimensional;
  } else {
    zs.kind = zs.branches.empty() ? CommonZeroSet::Kind::Empty : CommonZeroSet::Kind::Finite;
  }
  return zs;
}

std::vector<std::vector<std::complex<double>>> numeric_points(const CommonZeroSet& zs) {
  std::vector<std::vector<std::complex<double>>> out;
  for (const auto& b : zs.branches) {
    for (const auto& xr : univariate_roots(b.modulus, RootBackend::ComplexNumeric)) {
      const auto xv = xr.value.complex_value();
      if (b.fiber.empty() && !b.whole_line) {
        out.push_back({xv});
        continue;
      }
      if (b.whole_line) {
        out.push_back({xv, 0.0});
        continue;
      }
      std::vector<std::complex<double>> c;
      for (const auto& coeff : b.fiber) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = coeff.coeffs().size(); i-- > 0;) acc = acc * xv + coeff.coeffs()[i].complex_value();
        c.push_back(acc);
      }
      for (const auto& yr : complex_roots(c)) out.push_back({xv, yr.value.complex_value()});
    }
  }
  return out;
}

EliminationCertificate certify_no_common_zero(std::vector<MultiPoly> polys, std::vector<std::size_t> order,
                                              const EliminationBudget& budget) {
  if (polys.empty() || order.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to eliminate");
  const FieldPtr f = polys[0].field();
  EliminationCertificate cert(f);
  cert.variable = order.back();
  auto prune = [&](std::vector<MultiPoly>& ps) {
    std::erase_if(ps, [](const MultiPoly& p) { return p.is_zero(); });
    std::erase_if(ps, [&](const MultiPoly& p) { return p.total_degree() > budget.max_degree; });
    if (ps.size() > budget.max_polys) ps.erase(ps.begin() + static_cast<std::ptrdiff_t>(budget.max_polys), ps.end());
  };
  prune(polys);
  for (std::size_t step = 0; step + 1 < order.size(); ++step) {
    const std::size_t v = order[step];
    for (const auto& p : polys) {
      if (p.is_constant()) {
        cert.certified = true;
        cert.eliminant = UPoly::constant(p.constant_value());
        return cert;
      }
    }
    std::vector<MultiPoly> with_v, next;
    for (auto& p : polys) (p.involves(v) ? with_v : next).push_back(std::move(p));
    for (std::size_t i = 0; i < with_v.size() && next.size() < budget.max_polys; ++i) {
      for (std::size_t j = i + 1; j < with_v.size() && next.size() < budget.max_polys; ++j) {
        next.push_back(resultant(with_v[i], with_v[j], v));
      }
    }
    polys = std::move(next);
    prune(polys);
    if (polys.empty()) return cert;
  }
  UPoly g(f);
  for (const auto& p : polys) g = gcd(g, UPoly::from_multipoly(p, cert.variable));
  cert.eliminant = g;
  cert.certified = !g.is_zero() && g.degree() == 0;
  return cert;
}

}  // namespace pseudochart
