#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "conilay/asymptotics.hpp"
#include "conilay/eigensolve.hpp"
#include "conilay/experiments.hpp"
#include "conilay/geometry.hpp"
#include "conilay/potential1d.hpp"
#include "conilay/specfun.hpp"
#include "conilay/version.hpp"

namespace py = pybind11;

using namespace conilay;

namespace {

constexpr double kPi = 3.14159265358979323846;

py::dict solve_meridian_py(double theta_deg, int m, double truncation, int k,
                           double h_near, double ratio, double tol) {
  auto s = experiments::solve_meridian(theta_deg * kPi / 180.0, m, truncation,
                                       {h_near, ratio, 8000000}, k, tol, 0.0);
  py::dict out;
  out["values"] = s.eig.values;
  out["residuals"] = s.eig.residuals;
  out["dofs"] = s.reduced.K.n;
  out["nodes"] = s.mesh.num_nodes();
  out["triangles"] = s.mesh.num_triangles();
  return out;
}

py::dict solve_scaled_py(const std::string& shape, double h, double truncation,
                         int k, double h_near, double ratio, double tol) {
  geometry::Shape sh = shape == "triangle" ? geometry::Shape::ScaledTriangle
                                           : geometry::Shape::ScaledGuide;
  auto s = experiments::solve_scaled(sh, h, truncation,
                                     {h_near, ratio, 8000000}, k, tol, 0.0);
  py::dict out;
  out["values"] = s.eig.values;
  out["residuals"] = s.eig.residuals;
  out["dofs"] = s.reduced.K.n;
  return out;
}

py::dict effective_potential_py(double x) {
  auto s = potential1d::effective_potential(x);
  py::dict out;
  out["x"] = s.x;
  out["v"] = s.v;
  out["residual"] = s.residual;
  return out;
}

std::vector<double> solve_bo_py(double h, int k, double b, int grid_n) {
  potential1d::Model1DProblem p;
  p.a = -kPi * std::sqrt(2.0) + 1e-6;
  p.b = b;
  p.potential.kind = potential1d::PotentialDescriptor::Kind::BornOppenheimer;
  p.h = h;
  p.grid_n = grid_n;
  return potential1d::solve_1d(p, k);
}

int count_below_1d_py(double c, double E, double b, int grid_n) {
  potential1d::Model1DProblem p;
  p.a = 1.0;
  p.b = b;
  p.potential = {potential1d::PotentialDescriptor::Kind::InverseSquare, c, 0.0,
                 potential1d::Smoothstep::Quintic};
  p.grid_n = grid_n;
  return potential1d::count_below(p, E);
}

asymptotics::TwoTermVariant parse_variant(const std::string& v) {
  if (v == "aperture") return asymptotics::TwoTermVariant::Aperture;
  if (v == "cone_rescaled") return asymptotics::TwoTermVariant::ConeRescaled;
  throw std::invalid_argument("variant must be 'aperture' or 'cone_rescaled'");
}

}  // namespace

PYBIND11_MODULE(_conilay, mod) {
  mod.doc() = "Spectral laboratory for the Dirichlet Laplacian on conical "
              "layers: weighted finite elements on the meridian domain, "
              "Bessel/Airy special functions and asymptotic diagnostics.";
  mod.attr("__version__") = kVersion;

  // special functions
  mod.def("j0", &specfun::eval_j0, py::arg("x"));
  mod.def("j1", &specfun::eval_j1, py::arg("x"));
  mod.def("y0", &specfun::eval_y0, py::arg("x"));
  mod.def("y1", &specfun::eval_y1, py::arg("x"));
  mod.def("airy", &specfun::eval_airy, py::arg("x"));
  mod.def("j0_zero", &specfun::j0_zero, py::arg("n"),
          "n-th positive zero of J0");
  mod.def("airy_zero", &specfun::airy_zero, py::arg("n"),
          "n-th positive root z of Ai(-z)");

  // effective potential and 1D solvers
  mod.def("effective_potential", &effective_potential_py, py::arg("x"));
  mod.def("potential_log_asymptote", &potential1d::potential_log_asymptote,
          py::arg("x"));
  mod.def("v0", &potential1d::v0);
  mod.def("x1_grid_verified", &potential1d::x1_grid_verified);
  mod.def("solve_bo", &solve_bo_py, py::arg("h"), py::arg("k") = 1,
          py::arg("b") = 12.0, py::arg("grid_n") = 3000,
          "lowest Born-Oppenheimer eigenvalues");
  mod.def("count_below_1d", &count_below_1d_py, py::arg("c"), py::arg("E"),
          py::arg("b"), py::arg("grid_n"),
          "eigenvalue count below -E for the inverse-square model");

  // asymptotic laws
  mod.def("counting_asymptote", &asymptotics::counting_asymptote,
          py::arg("theta"), py::arg("E"));
  mod.def(
      "mu_two_term",
      [](int n, double theta, const std::string& variant) {
        return asymptotics::mu_two_term(n, theta, parse_variant(variant));
      },
      py::arg("n"), py::arg("theta"), py::arg("variant") = "cone_rescaled");
  mod.def(
      "scale_mu_lambda",
      [](double value, double theta, bool to_lambda) {
        return asymptotics::scale_mu_lambda(
            value, theta,
            to_lambda ? asymptotics::ScaleDirection::MuToLambda
                      : asymptotics::ScaleDirection::LambdaToMu);
      },
      py::arg("value"), py::arg("theta"), py::arg("to_lambda") = true);
  mod.def("lambda_delta_expansion", &asymptotics::lambda_delta_expansion,
          py::arg("n"), py::arg("h"));
  mod.def("staircase", &asymptotics::staircase, py::arg("mu_values"),
          py::arg("E_grid"));

  // eigenvalue solves on the meridian domains
  mod.def("solve_meridian", &solve_meridian_py, py::arg("theta_deg"),
          py::arg("m") = 0, py::arg("truncation") = 20.0, py::arg("k") = 4,
          py::arg("h_near") = 0.15, py::arg("ratio") = 1.2,
          py::arg("tol") = 1e-10,
          "lowest eigenvalues of the axisymmetric fiber on the rotated "
          "meridian domain");
  mod.def("solve_scaled", &solve_scaled_py, py::arg("shape"), py::arg("h"),
          py::arg("truncation") = 3.0, py::arg("k") = 3,
          py::arg("h_near") = 0.05, py::arg("ratio") = 1.2,
          py::arg("tol") = 1e-10,
          "semiclassical guide/triangle eigenvalues in scaled coordinates");
}
