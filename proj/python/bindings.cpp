#include <cstring>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eikinetic/energy.hpp"
#include "eikinetic/error.hpp"
#include "eikinetic/field_ops.hpp"
#include "eikinetic/generators.hpp"
#include "eikinetic/geometry.hpp"
#include "eikinetic/kinetic.hpp"
#include "eikinetic/sphere_quad.hpp"
#include "eikinetic/vfld.hpp"

namespace py = pybind11;
using namespace eikinetic;

namespace {

Vec to_vec(const std::vector<double>& v) { return make_vec(std::span<const double>(v)); }

std::vector<double> from_vec(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<py::ssize_t> field_shape(const GridSpec& g) {
  std::vector<py::ssize_t> s;
  for (int a = 0; a < g.dim(); ++a) s.push_back(g.shape(a));
  return s;
}

py::array_t<double> copy_array(std::span<const double> data, std::vector<py::ssize_t> shape) {
  py::array_t<double> out(shape);
  std::memcpy(out.mutable_data(), data.data(), data.size() * sizeof(double));
  return out;
}

py::array_t<bool> mask_array(const Mask& mask, const GridSpec& g) {
  py::array_t<bool> out(field_shape(g));
  bool* p = out.mutable_data();
  for (std::size_t i = 0; i < mask.size(); ++i) p[i] = mask[i] != 0;
  return out;
}

Mask to_mask(const std::optional<py::array_t<bool, py::array::c_style | py::array::forcecast>>& m, std::size_t n) {
  if (!m) return {};
  if (static_cast<std::size_t>(m->size()) != n) throw Error(ErrorKind::Precondition, "mask size must match the grid");
  Mask out(n);
  const bool* p = m->data();
  for (std::size_t i = 0; i < n; ++i) out[i] = p[i] ? 1 : 0;
  return out;
}

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using BoolArray = std::optional<py::array_t<bool, py::array::c_style | py::array::forcecast>>;

ScalarField make_scalar(const GridSpec& g, const DoubleArray& values, const BoolArray& mask) {
  if (static_cast<std::size_t>(values.size()) != g.size()) {
    throw Error(ErrorKind::Precondition, "value count must match the grid");
  }
  return ScalarField(g, std::vector<double>(values.data(), values.data() + values.size()), to_mask(mask, g.size()));
}

VectorField make_vector(const GridSpec& g, const DoubleArray& values, const BoolArray& mask) {
  const std::size_t n = g.size();
  if (static_cast<std::size_t>(values.size()) != n * g.dim()) {
    throw Error(ErrorKind::Precondition, "expected dim x grid values");
  }
  std::vector<std::vector<double>> comps;
  for (int k = 0; k < g.dim(); ++k) comps.emplace_back(values.data() + k * n, values.data() + (k + 1) * n);
  return VectorField(g, std::move(comps), to_mask(mask, n));
}

}  // namespace

PYBIND11_MODULE(_eikinetic, m) {
  m.doc() = "Unit-norm gradient fields on Cartesian grids and their kinetic formulation.";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<std::vector<std::int64_t>, std::vector<double>, std::vector<double>>(), py::arg("shape"),
           py::arg("spacing"), py::arg("origin"))
      .def_static("cube", &GridSpec::cube, py::arg("dim"), py::arg("n"), py::arg("lo"), py::arg("hi"))
      .def_property_readonly("dim", &GridSpec::dim)
      .def_property_readonly("shape", &GridSpec::shape_vector)
      .def_property_readonly("spacing", &GridSpec::spacing_vector)
      .def_property_readonly("origin", &GridSpec::origin_vector)
      .def_property_readonly("size", &GridSpec::size)
      .def("node", [](const GridSpec& g, std::size_t i) { return from_vec(g.node(i)); })
      .def("__eq__", &GridSpec::operator==)
      .def("__repr__", [](const GridSpec& g) {
        std::string s = "GridSpec(shape=[";
        for (int a = 0; a < g.dim(); ++a) s += (a ? ", " : "") + std::to_string(g.shape(a));
        return s + "])";
      });

  py::class_<ScalarField>(m, "ScalarField")
      .def(py::init(&make_scalar), py::arg("grid"), py::arg("values"), py::arg("mask") = py::none())
      .def_property_readonly("grid", &ScalarField::grid)
      .def_property_readonly("values",
                             [](const ScalarField& f) { return copy_array(f.values(), field_shape(f.grid())); })
      .def_property_readonly("mask", [](const ScalarField& f) { return mask_array(f.mask(), f.grid()); })
      .def_property_readonly("valid_count", &ScalarField::valid_count);

  py::class_<VectorField>(m, "VectorField")
      .def(py::init(&make_vector), py::arg("grid"), py::arg("components"), py::arg("mask") = py::none())
      .def_property_readonly("grid", &VectorField::grid)
      .def_property_readonly("dim", &VectorField::dim)
      .def_property_readonly("components",
                             [](const VectorField& u) {
                               std::vector<double> all;
                               for (int k = 0; k < u.dim(); ++k) {
                                 all.insert(all.end(), u.component(k).begin(), u.component(k).end());
                               }
                               std::vector<py::ssize_t> shape{u.dim()};
                               for (auto s : field_shape(u.grid())) shape.push_back(s);
                               return copy_array(all, shape);
                             })
      .def_property_readonly("mask", [](const VectorField& u) { return mask_array(u.mask(), u.grid()); })
      .def_property_readonly("valid_count", &VectorField::valid_count)
      .def("unit_norm_defect", &VectorField::unit_norm_defect);

  py::enum_<DirectionScheme>(m, "DirectionScheme")
      .value("UniformAngle", DirectionScheme::UniformAngle)
      .value("Fibonacci", DirectionScheme::Fibonacci)
      .value("MonteCarlo", DirectionScheme::MonteCarlo)
      .value("Explicit", DirectionScheme::Explicit);

  py::class_<DirectionSet>(m, "DirectionSet")
      .def_property_readonly("dim", &DirectionSet::dim)
      .def_property_readonly("scheme", &DirectionSet::scheme)
      .def_property_readonly("seed", &DirectionSet::seed)
      .def("__len__", &DirectionSet::size)
      .def("node", [](const DirectionSet& ds, std::size_t i) { return from_vec(ds.node(i)); })
      .def_property_readonly("weights", [](const DirectionSet& ds) {
        return std::vector<double>(ds.weights().begin(), ds.weights().end());
      });

  m.def("build_directions", &build_directions, py::arg("dim"), py::arg("count"), py::arg("scheme"),
        py::arg("seed") = 0);
  m.def(
      "explicit_directions",
      [](const std::vector<std::vector<double>>& dirs) {
        std::vector<Vec> v;
        for (const auto& d : dirs) v.push_back(to_vec(d));
        return explicit_directions(v);
      },
      py::arg("directions"));

  py::class_<TestFunction>(m, "TestFunction")
      .def(py::init([](const std::vector<double>& c, double r) { return TestFunction(to_vec(c), r); }),
           py::arg("center"), py::arg("radius"))
      .def_property_readonly("center", [](const TestFunction& t) { return from_vec(t.center()); })
      .def_property_readonly("radius", &TestFunction::radius);

  m.def(
      "halton_test_functions",
      [](const GridSpec& g, const BoolArray& mask, std::size_t count, double radius, std::size_t skip) {
        return halton_test_functions(g, to_mask(mask, g.size()), count, radius, skip);
      },
      py::arg("grid"), py::arg("mask") = py::none(), py::arg("count") = 8, py::arg("radius") = 0.25,
      py::arg("skip") = 0);

  m.def("gen_vortex",
        [](const GridSpec& g, const std::vector<double>& c, int sign) { return gen_vortex(g, to_vec(c), sign); },
        py::arg("grid"), py::arg("center"), py::arg("sign") = 1);
  m.def("gen_constant", [](const GridSpec& g, const std::vector<double>& w) { return gen_constant(g, to_vec(w)); },
        py::arg("grid"), py::arg("direction"));
  m.def("gen_rotational_2d",
        [](const GridSpec& g, const std::vector<double>& c) { return gen_rotational_2d(g, to_vec(c)); },
        py::arg("grid"), py::arg("center"));
  m.def("gen_reflected_vortex_2d",
        [](const GridSpec& g, const std::vector<double>& c) { return gen_reflected_vortex_2d(g, to_vec(c)); },
        py::arg("grid"), py::arg("center"));
  m.def(
      "gen_vortex_line",
      [](const GridSpec& g, const std::vector<double>& p, bool restrict) {
        return gen_vortex_line(g, to_vec(p), VortexLineOptions{restrict});
      },
      py::arg("grid"), py::arg("axis_point"), py::arg("restrict_x2_gt_1") = false);
  m.def("regularized_vortex_2d",
        [](const GridSpec& g, const std::vector<double>& c, double eps) {
          return regularized_vortex_2d(g, to_vec(c), eps);
        },
        py::arg("grid"), py::arg("center"), py::arg("eps"));
  m.def(
      "fast_marching",
      [](const GridSpec& g, const std::vector<std::vector<double>>& seeds, double band, std::uint64_t shuffle) {
        std::vector<Vec> pts;
        for (const auto& s : seeds) pts.push_back(to_vec(s));
        FastMarchingOptions o;
        o.seed_band = band;
        o.shuffle_seed = shuffle;
        return fast_marching(g, pts, o);
      },
      py::arg("grid"), py::arg("seeds"), py::arg("seed_band") = 0.0, py::arg("shuffle_seed") = 0);
  m.def(
      "godunov_residual",
      [](const ScalarField& psi, const BoolArray& fixed) {
        return godunov_residual(psi, to_mask(fixed, psi.grid().size()));
      },
      py::arg("psi"), py::arg("fixed") = py::none());
  m.def("gradient", &gradient, py::arg("psi"));
  m.def("curl_residual", [](const VectorField& u) { return curl_residual(u).max_abs; }, py::arg("u"));

  py::enum_<Verdict>(m, "Verdict")
      .value("Pass", Verdict::Pass)
      .value("Fail", Verdict::Fail)
      .value("Indeterminate", Verdict::Indeterminate);

  py::class_<ResidualReport>(m, "ResidualReport")
      .def_readonly("max_abs", &ResidualReport::max_abs)
      .def_readonly("tolerance", &ResidualReport::tolerance)
      .def_readonly("verdict", &ResidualReport::verdict)
      .def_property_readonly("entry_count", [](const ResidualReport& r) { return r.entries.size(); })
      .def_property_readonly("worst_xi", [](const ResidualReport& r) {
        return r.entries.empty() ? std::vector<double>{} : from_vec(r.entries[r.worst].xi);
      });

  m.def(
      "kinetic_residual",
      [](const VectorField& u, const DirectionSet& ds, int tangents, const std::vector<TestFunction>& phis,
         double tol) { return kinetic_residual(u, ds, tangents, phis, tol); },
      py::arg("u"), py::arg("directions"), py::arg("tangents_per_xi"),
        py::arg("phis"), py::arg("tolerance"));
  m.def(
      "kinetic_residual_2d",
      [](const VectorField& u, const DirectionSet& ds, const std::vector<TestFunction>& phis, double tol) {
        return kinetic_residual_2d(u, ds, phis, tol);
      },
      py::arg("u"), py::arg("directions"), py::arg("phis"),
        py::arg("tolerance"));
  m.def(
      "weak_kinetic_residual",
      [](const VectorField& u, const DirectionSet& ds, const std::vector<TestFunction>& phis, double tol) {
        return weak_kinetic_residual(u, ds, phis, tol);
      },
      py::arg("u"), py::arg("equator"), py::arg("phis"),
        py::arg("tolerance"));
  m.def(
      "calibrate_residual",
      [](const GridSpec& g, const DirectionSet& ds, int tangents, double radius, std::size_t count) {
        return calibrate_residual(g, ds, tangents, radius, count).tolerance;
      },
      py::arg("grid"), py::arg("directions"), py::arg("tangents_per_xi"), py::arg("phi_radius"),
      py::arg("phi_count"));
  m.def(
      "averaging_reconstruct",
      [](const VectorField& u, const DirectionSet& ds) {
        Reconstruction r = averaging_reconstruct(u, ds);
        return py::make_tuple(std::move(r.field), r.max_error);
      },
      py::arg("u"), py::arg("directions"));

  py::class_<FieldClass> fc(m, "FieldClass");
  py::enum_<FieldClass::Tag>(fc, "Tag")
      .value("Constant", FieldClass::Tag::Constant)
      .value("Vortex", FieldClass::Tag::Vortex)
      .value("Other", FieldClass::Tag::Other);
  fc.def_readonly("tag", &FieldClass::tag)
      .def_readonly("sign", &FieldClass::sign)
      .def_readonly("samples", &FieldClass::samples)
      .def_property_readonly("direction", [](const FieldClass& c) { return from_vec(c.direction); })
      .def_property_readonly("center", [](const FieldClass& c) { return from_vec(c.center); });

  m.def("classify_field", &classify_field, py::arg("u"), py::arg("sample_count") = 64, py::arg("seed") = 1,
        py::arg("tol") = 1e-3);
  m.def(
      "jacobian_degree",
      [](const VectorField& u, const std::vector<double>& c, double r) {
        return jacobian_degree(u, to_vec(c), r).degree;
      },
      py::arg("u"), py::arg("center"), py::arg("radius"));
  m.def(
      "gl_energy",
      [](const VectorField& u, double eps) {
        const EnergyBreakdown e = gl_energy(u, eps);
        py::dict d;
        d["eps"] = e.eps;
        d["dirichlet"] = e.dirichlet;
        d["penalty"] = e.penalty;
        d["curl_term"] = e.curl_term;
        d["total"] = e.total;
        return d;
      },
      py::arg("u"), py::arg("eps"));

  m.def("read_vfld", [](const std::string& path) { return vector_field(read_vfld(path)); }, py::arg("path"));
  m.def("write_vfld", [](const std::string& path, const VectorField& u) { write_vfld(path, to_vfld(u)); },
        py::arg("path"), py::arg("u"));
}
