#pragma once

#include <complex>
#include <vector>

#include "pseudochart/atlas.hpp"

namespace pseudochart::detail {

struct Shape {
  std::vector<bool> projective;
  std::vector<std::size_t> sizes;

  void append(const Shape& o);
  std::size_t num_coords() const;
};

Shape source_shape(const Provenance& p);
Shape target_shape(const Provenance& p);

template <class T>
std::vector<std::vector<T>> split_blocks(const std::vector<T>& flat, const Shape& s) {
  std::vector<std::vector<T>> out;
  std::size_t at = 0;
  for (std::size_t n : s.sizes) {
    out.emplace_back(flat.begin() + at, flat.begin() + at + n);
    at += n;
  }
  return out;
}

/// Outermost layer of a compose node: the last child, or the (segre, projection) pair.
struct ComposeSplit {
  Provenance outer;
  Provenance inner;  // empty kind when nothing is left
};
ComposeSplit split_compose(const Provenance& p);

using Blocks = std::vector<std::vector<Scalar>>;

struct ExactFiber {
  long count = 0;
  std::vector<Blocks> rational;  // source points over the target's field
};

/// Closure count and base-field solutions by layer-wise closed forms; works in
/// one quadratic extension of the target field. Throws Unsupported otherwise
/// and PositiveDimensional for fibers that are not finite.
ExactFiber solve_exact(const Provenance& p, const Blocks& target);

using CBlocks = std::vector<std::vector<std::complex<double>>>;

struct NumericPoint {
  CBlocks blocks;
  int multiplicity = 1;
};

std::vector<NumericPoint> solve_numeric(const Provenance& p, const CBlocks& target);

/// Segre coordinates index bits: bit (n-1-k) of the index selects b_k over a_k.
template <class T, class Mul>
std::vector<T> segre_coords(const std::vector<std::vector<T>>& factors, T one, Mul mul) {
  const int n = static_cast<int>(factors.size());
  std::vector<T> z;
  for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) {
    T v = one;
    for (int k = 0; k < n; ++k) v = mul(v, factors[k][(i >> (n - 1 - k)) & 1U]);
    z.push_back(v);
  }
  return z;
}

}  // namespace pseudochart::detail
