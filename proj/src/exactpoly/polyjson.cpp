#include "pseudochart/polyjson.hpp"

#include "pseudochart/errors.hpp"

namespace pseudochart {

using nlohmann::json;

json field_to_json(const FieldPtr& f) {
  switch (f->kind()) {
    case FieldKind::Rational: return "Q";
    case FieldKind::Complex: return "C";
    case FieldKind::Finite: return json{{"p", f->characteristic()}, {"k", f->degree()}};
  }
  return nullptr;
}

FieldPtr field_from_json(const json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "Q")) return Field::rationals();
  if (j.is_string() && j.get<std::string>() == "C") return Field::complex();
  if (j.is_object() && j.contains("p")) return Field::finite(j.at("p").get<std::uint64_t>(), j.value("k", 1));
  throw Error(ErrorCode::Parse, "unrecognised field descriptor " + j.dump());
}

json scalar_to_json(const Scalar& s) {
  switch (s.field()->kind()) {
    case FieldKind::Rational: return s.rational_value().get_str();
    case FieldKind::Finite: {
      json arr = json::array();
      for (auto r : s.residues()) arr.push_back(r);
      return arr;
    }
    case FieldKind::Complex: {
      const auto z = s.complex_value();
      return json::array({z.real(), z.imag()});
    }
  }
  return nullptr;
}

Scalar scalar_from_json(const json& j, const FieldPtr& field) {
  try {
    switch (field->kind()) {
      case FieldKind::Rational: {
        if (j.is_number_integer()) return Scalar::rational(mpq_class(j.get<long>()));
        mpq_class q(j.get<std::string>());
        if (q.get_den() == 0) throw Error(ErrorCode::Parse, "zero denominator");
        q.canonicalize();
        return Scalar::rational(q);
      }
      case FieldKind::Finite: {
        if (j.is_number_integer()) return Scalar::from_int(j.get<long>(), field);
        const auto r = j.get<std::vector<std::uint64_t>>();
        return Scalar::from_residues(field, r);
      }
      case FieldKind::Complex: {
        const auto v = j.get<std::vector<double>>();
        if (v.size() != 2) throw Error(ErrorCode::Parse, "complex scalar needs [re, im]");
        return Scalar::complex({v[0], v[1]});
      }
    }
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::Parse, "malformed scalar " + j.dump());
  } catch (const json::exception&) {
    throw Error(ErrorCode::Parse, "malformed scalar " + j.dump());
  }
  return {};
}

json poly_to_json(const MultiPoly& p) {
  json j;
  j["vars"] = *p.vars();
  if (p.field()->kind() != FieldKind::Rational) j["field"] = field_to_json(p.field());
  json terms = json::array();
  for (const auto& t : p.terms()) terms.push_back({{"e", t.exponent}, {"c", scalar_to_json(t.coeff)}});
  j["terms"] = std::move(terms);
  return j;
}

MultiPoly poly_from_json(const json& j, const VarSet& vars) {
  try {
    if (j.contains("vars") && j.at("vars").get<std::vector<std::string>>() != *vars) {
      throw Error(ErrorCode::VariableMismatch, "polynomial variables do not match");
    }
    const FieldPtr field = field_from_json(j.contains("field") ? j.at("field") : json());
    std::vector<Term> terms;
    for (const auto& t : j.at("terms")) {
      auto e = t.at("e").get<Exponent>();
      if (e.size() != vars->size()) throw Error(ErrorCode::Parse, "exponent length mismatch");
      terms.push_back({std::move(e), scalar_from_json(t.at("c"), field)});
    }
    return MultiPoly::from_terms(vars, field, std::move(terms));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed polynomial: ") + e.what());
  }
}

MultiPoly poly_from_json(const json& j) {
  try {
    return poly_from_json(j, make_vars(j.at("vars").get<std::vector<std::string>>()));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed polynomial: ") + e.what());
  }
}

}  // namespace pseudochart
