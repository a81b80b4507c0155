#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "conilay/geometry.hpp"

namespace conilay::assembly {

enum class CoordinateSystem { RotatedSU, ScaledXY };

struct FiberProblem {
  int m = 0;                  // angular fiber index (RotatedSU only)
  double theta = 0.78539816339744830962;
  CoordinateSystem coords = CoordinateSystem::RotatedSU;
  double h = 0.0;             // semiclassical parameter, required in ScaledXY
  int degree = 2;             // Lagrange degree, 1 or 2
  std::array<double, 2> grad_coeff{1.0, 1.0};  // anisotropic gradient factors
  int quadrature_refine = 0;  // 0: 7-point degree-5 rule, 1: composite on 4 children
};

/// Symmetric sparse matrix, lower triangle stored.
struct SparseSymmetricMatrix {
  int n = 0;
  Eigen::SparseMatrix<double> lower;

  Eigen::SparseMatrix<double> full() const;
  void dump_coo(std::ostream& os) const;  // "i j value", lower triangle
};

struct Assembled {
  SparseSymmetricMatrix K, M;
  std::vector<geometry::Vec2> dof_coords;
  std::vector<std::array<int, 6>> elem_dofs;  // first 3 used when degree == 1
  std::vector<bool> on_wall;  // DirichletWall or Truncation dof
  std::vector<bool> on_axis;  // Axis dof
  int degree = 2;
  int n_dofs = 0;
  FiberProblem problem;
};

struct Reduced {
  SparseSymmetricMatrix K, M;
  std::vector<int> free_dofs;     // reduced index -> full dof index
  std::vector<int> full_to_free;  // -1 when eliminated
};

/// Weighted stiffness/mass pair of the fiber form on the mesh. The weight
/// is s sin(theta) + u cos(theta) in rotated coordinates and y in scaled
/// coordinates; ScaledXY multiplies the longitudinal gradient by h^2.
Assembled assemble(const geometry::Mesh& mesh, const FiberProblem& problem);

/// Eliminate wall and truncation dofs; axis dofs are eliminated iff m != 0.
Reduced apply_dirichlet(const Assembled& a, int m);

/// Scatter a reduced coefficient vector back to the full dof set.
Eigen::VectorXd expand(const Reduced& r, int n_full, const Eigen::VectorXd& x);

/// Quadrature-point visitor for eigenfunction diagnostics. `wdet` is the
/// quadrature weight including the metric weight and Jacobian, so that
/// integral f = sum f(pt) * wdet.
struct QuadSample {
  geometry::Vec2 pos;
  double wdet;
  double value;
  std::array<double, 2> grad;
};
void for_each_quad_sample(const geometry::Mesh& mesh, const Assembled& a,
                          const Eigen::VectorXd& full_coeffs,
                          const std::function<void(const QuadSample&)>& fn);

}  // namespace conilay::assembly
