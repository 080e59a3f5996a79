// Python bindings for the dsqg core. Arrays are (N-1, N-1) float64, indexed [i-1, j-1] for
// nodes (x_i, y_j) and [m-1, n-1] for modes (m, n).

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "dsqg/config.hpp"
#include "dsqg/diagnostics.hpp"
#include "dsqg/errors.hpp"
#include "dsqg/heat_kernel.hpp"
#include "dsqg/inequalities.hpp"
#include "dsqg/io.hpp"
#include "dsqg/operators.hpp"
#include "dsqg/run.hpp"
#include "dsqg/suite.hpp"

namespace py = pybind11;
using namespace dsqg;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
// pybind11 holders cannot be shared_ptr<const T>; geometries are immutable after construction
using Handle = std::shared_ptr<Geometry>;

Handle hold(const GeometryPtr& g) { return std::const_pointer_cast<Geometry>(g); }

Array to_array(const Geometry& g, const std::vector<double>& v) {
  const auto k = static_cast<py::ssize_t>(g.modes());
  Array out({k, k});
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

std::vector<double> from_array(const Geometry& g, const Array& a) {
  const auto k = static_cast<py::ssize_t>(g.modes());
  if (a.ndim() != 2 || a.shape(0) != k || a.shape(1) != k)
    throw ShapeError("expected an array of shape (" + std::to_string(k) + ", " + std::to_string(k) + ")");
  return {a.data(), a.data() + a.size()};
}

py::dict record_dict(const DiagnosticsRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["sup_norm"] = r.sup_norm;
  d["energy"] = r.energy;
  d["half_norm"] = r.half_norm;
  d["lipschitz"] = r.lipschitz;
  d["b1_lp"] = r.b1_lp;
  d["weighted_norm"] = r.weighted_norm;
  d["holder"] = r.holder;
  d["holder_skipped"] = r.holder_skipped;
  d["u_sup"] = r.u_sup;
  d["normal_rate"] = r.normal_rate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Critical dissipative SQG on a square with the Dirichlet square-root Laplacian.";

  static py::exception<PreconditionError> precondition(m, "PreconditionError", PyExc_ValueError);
  static py::exception<NumericError> numeric(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const PreconditionError& e) {
      py::set_error(precondition, e.what());
    } catch (const NumericError& e) {
      py::set_error(numeric, e.what());
    } catch (const DomainError& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  py::class_<Geometry, Handle>(m, "Geometry")
      .def_property_readonly("n", &Geometry::grid_size)
      .def_property_readonly("side_length", &Geometry::side_length)
      .def_property_readonly("spacing", &Geometry::spacing)
      .def_property_readonly("corner_radius", &Geometry::corner_radius)
      .def_property_readonly("lambda1", &Geometry::lambda1)
      .def("eigenvalue", &Geometry::eigenvalue, py::arg("m"), py::arg("n"))
      .def("nodes", [](const Geometry& g) {
        std::vector<double> x;
        for (int i = 1; i < g.grid_size(); ++i) x.push_back(g.node(i));
        return x;
      })
      .def("ground_state", [](const Geometry& g) { return to_array(g, g.ground_state()); })
      .def("distance", [](const Geometry& g) { return to_array(g, g.distance()); })
      .def("refined", [](const Geometry& g, int factor) { return hold(g.refined(factor)); }, py::arg("factor"))
      .def("__repr__", [](const Geometry& g) {
        return "Geometry(n=" + std::to_string(g.grid_size()) + ", side_length=" + format_double(g.side_length()) + ")";
      });

  m.def(
      "square_geometry",
      [](int n, double side, std::optional<double> radius) { return hold(build_square_geometry(n, side, radius)); },
      py::arg("n"), py::arg("side_length") = std::numbers::pi, py::arg("corner_radius") = py::none());

  py::class_<SpectralField>(m, "SpectralField")
      .def(py::init([](const Handle& g, const Array& coeffs) { return SpectralField(g, from_array(*g, coeffs)); }),
           py::arg("geometry"), py::arg("coefficients"))
      .def_static("zeros", [](const Handle& g) { return SpectralField(g); }, py::arg("geometry"))
      .def_static(
          "mode", [](const Handle& g, int mm, int n, double a) { return SpectralField::mode(g, mm, n, a); },
          py::arg("geometry"), py::arg("m"), py::arg("n"), py::arg("amplitude") = 1.0)
      .def_static("from_values",
                  [](const Handle& g, const Array& values) { return forward(GridField(g, from_array(*g, values))); },
                  py::arg("geometry"), py::arg("values"))
      .def_property_readonly("geometry", [](const SpectralField& f) { return hold(f.geometry_ptr()); })
      .def_property_readonly("coefficients",
                             [](const SpectralField& f) { return to_array(f.geometry(), f.coefficients()); })
      .def("values", [](const SpectralField& f) { return to_array(f.geometry(), inverse(f).values()); })
      .def("evaluate", [](const SpectralField& f, double x, double y) { return f.evaluate({x, y}); }, py::arg("x"),
           py::arg("y"))
      .def("l2_norm", &SpectralField::l2_norm)
      .def("__add__", [](const SpectralField& a, const SpectralField& b) { return a + b; })
      .def("__sub__", [](const SpectralField& a, const SpectralField& b) { return a - b; })
      .def("__mul__", [](const SpectralField& a, double s) { return s * a; })
      .def("__rmul__", [](const SpectralField& a, double s) { return s * a; })
      .def("__neg__", [](const SpectralField& a) { return -1.0 * a; });

  m.def("lambda_power", &apply_lambda_power, py::arg("field"), py::arg("s"));
  m.def("heat", &heat_semigroup, py::arg("field"), py::arg("t"));
  m.def(
      "velocity",
      [](const SpectralField& theta, int sign) {
        const VelocityField u = riesz_velocity(theta, sign);
        return py::make_tuple(to_array(theta.geometry(), u.ux.values()), to_array(theta.geometry(), u.uy.values()));
      },
      py::arg("theta"), py::arg("rotation_sign") = 1, "Grid samples (ux, uy) of u = J grad Lambda^{-1} theta.");
  m.def(
      "heat_kernel",
      [](const Handle& g, double x1, double x2, double y1, double y2, double t) {
        return heat_kernel(*g, {x1, x2}, {y1, y2}, t).value;
      },
      py::arg("geometry"), py::arg("x1"), py::arg("x2"), py::arg("y1"), py::arg("y2"), py::arg("t"));
  m.def("lambda_of_unity", [](const Handle& g, double x, double y) { return lambda_of_unity(*g, {x, y}); },
        py::arg("geometry"), py::arg("x"), py::arg("y"));

  m.def("boundary_ratio", [](const SpectralField& f) { return to_array(f.geometry(), boundary_ratio(f).values()); });
  m.def("b1_norm", &b1_norm, py::arg("theta"), py::arg("p"));
  m.def("weighted_norm", &weighted_norm, py::arg("theta"), py::arg("m"));
  m.def("interior_lipschitz", &interior_lipschitz, py::arg("theta"));
  m.def(
      "holder_seminorm", [](const SpectralField& f, double alpha) { return holder_seminorm(f, alpha).value; },
      py::arg("theta"), py::arg("alpha"));
  m.def(
      "random_family",
      [](const Handle& g, int count, int max_mode, std::uint64_t seed) { return random_family(g, count, max_mode, seed); },
      py::arg("geometry"), py::arg("count"), py::arg("max_mode"), py::arg("seed"));
  m.def("truncated_constant", [](const Handle& g) { return truncated_constant(g); }, py::arg("geometry"));

  m.def(
      "run",
      [](const SpectralField& theta0, double t_end, double dt, double output_interval,
         std::optional<SpectralField> drift_stream) {
        SolverConfig c;
        c.t_end = t_end;
        c.dt = dt;
        c.output_interval = output_interval;
        if (drift_stream) {
          c.mode = DriftMode::kPrescribed;
          c.drift_stream = std::move(drift_stream);
        }
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(Solver(c), theta0, DiagnosticsParams{});
        }
        py::list records, fields;
        for (const auto& rec : r.records) records.append(record_dict(rec));
        for (const auto& s : r.snapshots) fields.append(s.theta);
        py::dict out;
        out["records"] = records;
        out["fields"] = fields;
        out["ledger_residual"] = r.ledger_residual;
        out["max_overshoot"] = r.max_overshoot;
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("theta0"), py::arg("t_end") = 1.0, py::arg("dt") = 0.0025, py::arg("output_interval") = 0.1,
      py::arg("drift_stream") = py::none(),
      "Integrates SQG (or drift-diffusion when drift_stream is given) and returns records and fields.");

  py::class_<InequalityReport>(m, "InequalityReport")
      .def_readonly("name", &InequalityReport::name)
      .def_readonly("passed", &InequalityReport::pass)
      .def_readonly("min_margin", &InequalityReport::min_margin)
      .def_readonly("samples", &InequalityReport::samples)
      .def_readonly("tolerance", &InequalityReport::tolerance)
      .def_readonly("fitted_constants", &InequalityReport::fitted_constants)
      .def_readonly("notes", &InequalityReport::notes)
      .def_property_readonly("margins",
                             [](const InequalityReport& r) {
                               std::vector<std::pair<std::string, double>> out;
                               for (const auto& s : r.margins) out.emplace_back(s.label, s.value);
                               return out;
                             })
      .def("to_json", &report_json)
      .def("__repr__", [](const InequalityReport& r) {
        return "InequalityReport(" + r.name + ", passed=" + (r.pass ? "True" : "False") +
               ", min_margin=" + format_double(r.min_margin) + ")";
      });

  m.def("check_names", &check_names);
  m.def(
      "run_check", [](const std::string& name, const std::string& config_text) {
        const RunConfig config = parse_config(config_text);
        py::gil_scoped_release release;
        return run_named_check(name, config);
      },
      py::arg("name"), py::arg("config_text") = "", "Runs a named check on an INI config given as text.");
  m.def(
      "verify_cordoba",
      [](const Handle& g, const std::vector<SpectralField>& family, const std::string& phi) {
        return verify_cordoba(g, family, named_phi(phi));
      },
      py::arg("geometry"), py::arg("family"), py::arg("phi") = "half_square");
  m.def("verify_weight_norm_bridge", &verify_weight_norm_bridge, py::arg("theta"), py::arg("m"), py::arg("p"),
        py::arg("tolerance") = 1e-6);
  m.def(
      "verify_velocity_log_bound",
      [](const SpectralField& theta, bool vanishing) {
        VelocityLogCheck check;
        check.trace = vanishing ? BoundaryTrace::kVanishing : BoundaryTrace::kNonvanishing;
        return verify_velocity_log_bound(theta, check);
      },
      py::arg("theta"), py::arg("vanishing_trace") = false);
  m.def(
      "verify_kernel_bounds",
      [](const Handle& g, int samples, std::uint64_t seed) {
        KernelSamplePlan plan;
        plan.samples = samples;
        plan.seed = seed;
        return verify_kernel_bounds(g, plan);
      },
      py::arg("geometry"), py::arg("samples") = 500, py::arg("seed") = 7);

  m.def(
      "write_checkpoint",
      [](const std::string& path, const SpectralField& theta, double t, std::uint64_t config_hash) {
        SolverState s{t, theta};
        write_checkpoint(path, make_checkpoint(s, config_hash));
      },
      py::arg("path"), py::arg("theta"), py::arg("t") = 0.0, py::arg("config_hash") = 0);
  m.def(
      "read_checkpoint",
      [](const std::string& path) {
        const Checkpoint cp = read_checkpoint(path);
        return py::make_tuple(checkpoint_field(cp), cp.t, cp.step, cp.config_hash);
      },
      py::arg("path"), "Returns (field, t, step, config_hash).");
}
