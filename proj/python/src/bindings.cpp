#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pseudochart/chartctl.hpp"
#include "pseudochart/chartverify.hpp"
#include "pseudochart/obstruct.hpp"

namespace py = pybind11;
using namespace pseudochart;
using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

py::tuple result(const CommandResult& r) { return py::make_tuple(r.document.dump(), r.exit_code); }

RunConfig make_config(const std::string& sub, std::uint64_t seed) {
  RunConfig cfg;
  cfg.subcommand = sub;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_pseudochart, m) {
  m.doc() = "Pseudo-chart construction, verification and obstruction checks";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&] { return py::object(py::exception<Error>(m, "Error")); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::tuple args = py::make_tuple(e.what(), error_code_name(e.code()), e.witness().dump());
      PyErr_SetObject(error_type.get_stored().ptr(), args.ptr());
    }
  });

  m.def("version", &version);
  m.def("backends", [] {
    std::vector<std::string> out;
    for (auto b : {Backend::Auto, Backend::StructuredExact, Backend::StructuredNumeric, Backend::BruteFiniteField,
                   Backend::Generic}) {
      out.push_back(backend_name(b));
    }
    return out;
  });

  m.def(
      "construct",
      [](const std::string& construction, int n, std::vector<int> degrees, std::uint64_t seed) {
        RunConfig cfg = make_config("construct", seed);
        cfg.construction = construction;
        cfg.n = n;
        cfg.degrees = std::move(degrees);
        return result(cmd_construct(cfg));
      },
      py::arg("construction"), py::arg("n") = 2, py::arg("degrees") = std::vector<int>{0, 2}, py::arg("seed") = 1);

  m.def(
      "verify",
      [](const std::string& doc, std::uint64_t seed, int samples, const std::string& backend, std::uint64_t p, int k) {
        RunConfig cfg = make_config("verify", seed);
        cfg.samples = samples;
        cfg.backend = backend;
        cfg.p = p;
        cfg.k = k;
        const json parsed = parse(doc);
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = cmd_verify(parsed, cfg);
        }
        return result(r);
      },
      py::arg("document"), py::arg("seed") = 1, py::arg("samples") = 25, py::arg("backend") = "auto",
      py::arg("p") = 11, py::arg("k") = 2);

  m.def(
      "obstruct",
      [](const std::string& curve, const std::string& surface) {
        RunConfig cfg = make_config("obstruct", 1);
        cfg.curve = curve;
        cfg.surface = surface;
        return result(cmd_obstruct(cfg));
      },
      py::arg("curve") = "", py::arg("surface") = "");

  m.def(
      "erratum",
      [](int n, int samples, std::uint64_t seed) {
        RunConfig cfg = make_config("erratum", seed);
        cfg.n = n;
        cfg.samples = samples;
        return result(cmd_erratum(cfg));
      },
      py::arg("n") = 3, py::arg("samples") = 25, py::arg("seed") = 1);

  m.def("curve_smoothness", [](const std::string& curve) { return curve_smoothness(PlaneCurve::parse(curve)).to_json().dump(); });
  m.def("plane_curve_genus", [](const std::string& curve) { return plane_curve_genus(PlaneCurve::parse(curve)); });
  m.def("curve_complement_verdict", [](const std::string& curve) { return curve_complement_verdict(PlaneCurve::parse(curve)).to_json().dump(); });
  m.def("boundary_verdict", [](const std::string& model) { return boundary_verdict(SurfaceModel::from_json(parse(model))).to_json().dump(); });
  m.def("catalog", [] {
    json out = json::array();
    for (const auto& s : catalog()) out.push_back(s.to_json());
    return out.dump();
  });
  m.def("rank_q", [](const std::vector<std::vector<std::string>>& rows) {
    RationalMatrix mat;
    for (const auto& r : rows) {
      std::vector<mpq_class> row;
      for (const auto& x : r) {
        mpq_class q;
        if (q.set_str(x, 10) != 0) throw Error(ErrorCode::Parse, "not a rational: " + x);
        q.canonicalize();
        row.push_back(q);
      }
      mat.push_back(std::move(row));
    }
    return rank_q(mat);
  });
}
