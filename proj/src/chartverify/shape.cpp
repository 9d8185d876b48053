#include "pseudochart/errors.hpp"
#include "solver.hpp"

namespace pseudochart::detail {

void Shape::append(const Shape& o) {
  projective.insert(projective.end(), o.projective.begin(), o.projective.end());
  sizes.insert(sizes.end(), o.sizes.begin(), o.sizes.end());
}

std::size_t Shape::num_coords() const {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  return n;
}

namespace {

Shape single(bool proj, std::size_t size) { return Shape{{proj}, {size}}; }

Shape from_space(const Space& s) {
  Shape out;
  for (const auto& f : s.factors()) {
    out.projective.push_back(f.projective());
    out.sizes.push_back(f.num_vars());
  }
  return out;
}

int param_n(const Provenance& p) { return p.params.at("n").get<int>(); }

}  // namespace

Shape source_shape(const Provenance& p) {
  if (p.kind == "double_cover") return single(false, 1);
  if (p.kind == "identity") return from_space(space_from_json(p.params.at("space")));
  if (p.kind == "sym2") return Shape{{true, true}, {2, 2}};
  if (p.kind == "segre") return Shape{std::vector<bool>(param_n(p), true), std::vector<std::size_t>(param_n(p), 2)};
  if (p.kind == "linear_projection") return single(true, std::size_t{1} << param_n(p));
  if (p.kind == "compose") return source_shape(p.children.at(0));
  if (p.kind == "product") {
    Shape out;
    for (const auto& c : p.children) out.append(source_shape(c));
    return out;
  }
  throw Error(ErrorCode::Unsupported, "no shape for provenance node " + p.kind);
}

Shape target_shape(const Provenance& p) {
  if (p.kind == "double_cover") return single(true, 2);
  if (p.kind == "identity") return from_space(space_from_json(p.params.at("space")));
  if (p.kind == "sym2") return single(true, 3);
  if (p.kind == "segre") return single(true, std::size_t{1} << param_n(p));
  if (p.kind == "linear_projection") return single(true, param_n(p) + 1);
  if (p.kind == "compose") return target_shape(p.children.back());
  if (p.kind == "product") {
    Shape out;
    for (const auto& c : p.children) out.append(target_shape(c));
    return out;
  }
  throw Error(ErrorCode::Unsupported, "no shape for provenance node " + p.kind);
}

ComposeSplit split_compose(const Provenance& p) {
  const auto& ch = p.children;
  std::size_t cut = ch.size() - 1;
  Provenance outer = ch.back();
  if (ch.size() >= 2 && ch.back().kind == "linear_projection" && ch[ch.size() - 2].kind == "segre" &&
      ch.back().params.at("n") == ch[ch.size() - 2].params.at("n")) {
    cut = ch.size() - 2;
    outer = Provenance{"compose", nlohmann::json::object(), {ch[cut], ch.back()}};
  }
  Provenance inner;
  if (cut == 1) {
    inner = ch[0];
  } else if (cut > 1) {
    inner = Provenance{"compose", nlohmann::json::object(), {ch.begin(), ch.begin() + cut}};
  }
  return ComposeSplit{std::move(outer), std::move(inner)};
}

}  // namespace pseudochart::detail
