#include <cstdint>
#include <optional>

#include "pseudochart/atlas.hpp"
#include "pseudochart/elimination.hpp"
#include "pseudochart/errors.hpp"

namespace pseudochart {

using nlohmann::json;

namespace {

constexpr std::uint64_t kPrefilterPrimes[] = {101, 103, 107};

void check_shape(int n, const std::vector<std::vector<long>>& m) {
  if (n < 2 || n > 3) throw Error(ErrorCode::InvalidArgument, "projection certification needs 2 <= n <= 3");
  const std::size_t cols = std::size_t{1} << n;
  if (m.size() != static_cast<std::size_t>(n + 1)) throw Error(ErrorCode::ArityMismatch, "projection needs n+1 rows");
  for (const auto& row : m) {
    if (row.size() != cols) throw Error(ErrorCode::ArityMismatch, "projection rows need 2^n entries");
  }
}

// Searches (P^1(F_p))^n for a common zero of the pulled-back forms.
std::optional<std::vector<std::uint64_t>> prefilter(int n, const std::vector<std::vector<long>>& m, std::uint64_t p) {
  const std::size_t cols = std::size_t{1} << n;
  std::vector<std::vector<std::uint64_t>> mm(m.size(), std::vector<std::uint64_t>(cols));
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const long v = m[r][c] % static_cast<long>(p);
      mm[r][c] = static_cast<std::uint64_t>(v < 0 ? v + static_cast<long>(p) : v);
    }
  }
  // Point index i < p is [i : 1]; i = p is [1 : 0].
  std::vector<std::uint64_t> idx(n, 0);
  std::vector<std::uint64_t> z(cols);
  while (true) {
    for (std::size_t i = 0; i < cols; ++i) {
      std::uint64_t v = 1;
      for (int k = 0; k < n; ++k) {
        const bool second = (i >> (n - 1 - k)) & 1U;
        const std::uint64_t a = idx[k] < p ? idx[k] : 1;
        const std::uint64_t b = idx[k] < p ? 1 : 0;
        v = v * (second ? b : a) % p;
      }
      z[i] = v;
    }
    bool all_zero = true;
    for (const auto& row : mm) {
      std::uint64_t s = 0;
      for (std::size_t c = 0; c < cols; ++c) s = (s + row[c] * z[c]) % p;
      if (s != 0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) return idx;
    int k = n - 1;
    while (k >= 0 && ++idx[k] > p) idx[k--] = 0;
    if (k < 0) return std::nullopt;
  }
}

// Pulled-back forms on the affine chart of (P^1)^n selected by `mask`:
// bit k set means factor k is [1 : x_k], otherwise [x_k : 1].
std::vector<MultiPoly> chart_forms(int n, const std::vector<std::vector<long>>& m, unsigned mask, const VarSet& vars) {
  const FieldPtr q = Field::rationals();
  const std::size_t cols = std::size_t{1} << n;
  const MultiPoly one = MultiPoly::constant(vars, Scalar::rational(1));
  std::vector<MultiPoly> z;
  for (std::size_t i = 0; i < cols; ++i) {
    MultiPoly v = one;
    for (int k = 0; k < n; ++k) {
      const bool second = (i >> (n - 1 - k)) & 1U;
      const bool swapped = (mask >> k) & 1U;
      const MultiPoly x = MultiPoly::variable(vars, k, q);
      v *= (second != swapped) ? one : x;
    }
    z.push_back(std::move(v));
  }
  std::vector<MultiPoly> out;
  for (const auto& row : m) {
    MultiPoly f(vars, q);
    for (std::size_t c = 0; c < cols; ++c) {
      if (row[c] != 0) f += z[c].scaled(Scalar::rational(row[c]));
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

json certify_projection(int n, const std::vector<std::vector<long>>& m) {
  check_shape(n, m);
  json evidence{{"n", n}, {"prefilter_primes", json::array()}, {"charts", json::array()}};
  for (std::uint64_t p : kPrefilterPrimes) {
    if (auto pt = prefilter(n, m, p)) {
      json point = json::array();
      for (auto i : *pt) point.push_back(i < p ? json::array({i, 1}) : json::array({1, 0}));
      throw Error(ErrorCode::CenterMeetsVariety, "projection center meets the Segre variety modulo " + std::to_string(p),
                  {{"prime", p}, {"point", point}, {"matrix", m}});
    }
    evidence["prefilter_primes"].push_back(p);
  }
  std::vector<std::string> names;
  for (int k = 0; k < n; ++k) names.push_back("x" + std::to_string(k + 1));
  const VarSet vars = make_vars(names);
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    const auto forms = chart_forms(n, m, mask, vars);
    if (n == 2) {
      const CommonZeroSet zs = common_zeros_2d(forms, 0, 1);
      if (zs.kind != CommonZeroSet::Kind::Empty) {
        throw Error(ErrorCode::CenterMeetsVariety, "projection center meets the Segre variety",
                    {{"chart", mask}, {"zeros", zs.to_json("x1", "x2")}, {"matrix", m}});
      }
      evidence["charts"].push_back({{"chart", mask}, {"method", "two-variable elimination"}, {"eliminant", zs.eliminant.to_string("x1")}});
    } else {
      const EliminationCertificate cert = certify_no_common_zero(forms, {0, 1, 2});
      if (!cert.certified) {
        throw Error(ErrorCode::CenterMeetsVariety, "center disjointness not certified",
                    {{"chart", mask}, {"eliminant", cert.eliminant.to_string(names[cert.variable])}, {"matrix", m}});
      }
      evidence["charts"].push_back({{"chart", mask}, {"method", "iterated resultants"}, {"eliminant", cert.eliminant.to_string(names[cert.variable])}});
    }
  }
  return evidence;
}

}  // namespace pseudochart
