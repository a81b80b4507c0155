#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "conilay/assembly.hpp"
#include "conilay/eigensolve.hpp"
#include "conilay/geometry.hpp"

using namespace conilay;
using assembly::SparseSymmetricMatrix;
using eigensolve::dense_oracle;
using eigensolve::smallest_eigenpairs;

namespace {
constexpr double kPi = 3.14159265358979323846;

SparseSymmetricMatrix from_dense_lower(const Eigen::MatrixXd& a) {
  SparseSymmetricMatrix s;
  s.n = static_cast<int>(a.rows());
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j <= i; ++j)
      if (a(i, j) != 0.0) t.emplace_back(i, j, a(i, j));
  s.lower.resize(s.n, s.n);
  s.lower.setFromTriplets(t.begin(), t.end());
  return s;
}

SparseSymmetricMatrix identity(int n) {
  return from_dense_lower(Eigen::MatrixXd::Identity(n, n));
}

// 2nd-order finite differences for -u'' on (0,pi) with Dirichlet ends.
SparseSymmetricMatrix fd_laplacian_1d(int n) {
  double h = kPi / (n + 1);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = 2.0 / (h * h);
    if (i > 0) K(i, i - 1) = -1.0 / (h * h);
  }
  return from_dense_lower(K);
}

std::pair<SparseSymmetricMatrix, SparseSymmetricMatrix> meridian_pencil(
    double theta, double h_near) {
  auto spec = geometry::build_domain(theta, 6.0, geometry::Shape::MeridianGuide);
  auto mesh = geometry::generate_mesh(spec, {h_near, 1.3, 2000000});
  assembly::FiberProblem p;
  p.theta = theta;
  auto a = assembly::assemble(mesh, p);
  auto r = assembly::apply_dirichlet(a, 0);
  return {r.K, r.M};
}
}  // namespace

TEST_CASE("identity pencil") {
  auto I = identity(10);
  auto res = smallest_eigenpairs(I, I, 1);
  CHECK(std::abs(res.values[0] - 1.0) <= 1e-13);
  CHECK(res.residuals[0] <= 1e-12);
}

TEST_CASE("dense oracle on diagonal pencils") {
  auto K = from_dense_lower(Eigen::Vector2d(2, 3).asDiagonal());
  auto vals = dense_oracle(K, identity(2));
  CHECK(vals[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(vals[1] == doctest::Approx(3.0).epsilon(1e-14));

  auto K1 = from_dense_lower(Eigen::MatrixXd::Constant(1, 1, 2.0));
  auto M1 = from_dense_lower(Eigen::MatrixXd::Constant(1, 1, 4.0));
  CHECK(dense_oracle(K1, M1)[0] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(dense_oracle(identity(2001), identity(2001)),
                  std::invalid_argument);
}

TEST_CASE("fd laplacian transverse modes") {
  // grid chosen so the 2nd-order error of the third mode stays below 1e-3
  auto K = fd_laplacian_1d(300);
  auto M = identity(300);
  auto res = smallest_eigenpairs(K, M, 3, 1e-11);
  CHECK(std::abs(res.values[0] - 1.0) <= 1e-3);
  CHECK(std::abs(res.values[1] - 4.0) <= 1e-3);
  CHECK(std::abs(res.values[2] - 9.0) <= 1e-3);
}

TEST_CASE("random pencil matches the dense oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  int n = 50;
  Eigen::MatrixXd R(n, n), S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      R(i, j) = g(rng);
      S(i, j) = g(rng);
    }
  Eigen::MatrixXd A = R + R.transpose();
  Eigen::MatrixXd B = S * S.transpose() + double(n) * Eigen::MatrixXd::Identity(n, n);
  auto K = from_dense_lower(Eigen::MatrixXd(A.triangularView<Eigen::Lower>()));
  auto M = from_dense_lower(Eigen::MatrixXd(B.triangularView<Eigen::Lower>()));

  auto dense = dense_oracle(K, M);
  double shift = dense[0] - 0.5;  // strictly below the lowest target
  auto res = smallest_eigenpairs(K, M, 5, 1e-12, shift);
  for (int j = 0; j < 5; ++j)
    CHECK(std::abs(res.values[j] - dense[j]) <= 1e-10);
}

TEST_CASE("meridian pencil: iterative matches dense, rayleigh consistency") {
  auto [K, M] = meridian_pencil(0.5, 0.55);
  REQUIRE(K.n <= 2000);
  auto dense = dense_oracle(K, M);
  auto res = smallest_eigenpairs(K, M, 4, 1e-12);
  Eigen::SparseMatrix<double> Kf = K.full(), Mf = M.full();
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(res.values[j] - dense[j]) <= 1e-9);
    Eigen::VectorXd x = res.vectors.col(j);
    double rq = x.dot(Kf * x) / x.dot(Mf * x);
    CHECK(std::abs(rq - res.values[j]) <= 1e-11 * std::max(1.0, rq));
  }
  // M-orthonormality
  Eigen::MatrixXd G = res.vectors.transpose() * Mf * res.vectors;
  CHECK((G - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("shift invariance below the lowest eigenvalue") {
  auto [K, M] = meridian_pencil(0.6, 0.6);
  auto r0 = smallest_eigenpairs(K, M, 3, 1e-12, 0.0);
  for (double sh : {0.2, 0.5, 0.8}) {
    double shift = sh * r0.values[0];
    auto r = smallest_eigenpairs(K, M, 3, 1e-12, shift);
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(r.values[j] - r0.values[j]) <= 1e-9);
  }
}

TEST_CASE("galerkin monotonicity under uniform refinement") {
  auto spec = geometry::build_domain(0.5, 5.0, geometry::Shape::MeridianGuide);
  auto mesh = geometry::generate_mesh(spec, {0.6, 1.3, 2000000});
  assembly::FiberProblem p;
  p.theta = 0.5;
  auto coarse = assembly::apply_dirichlet(assembly::assemble(mesh, p), 0);
  auto fine = assembly::apply_dirichlet(
      assembly::assemble(geometry::uniform_refine(mesh), p), 0);
  auto rc = smallest_eigenpairs(coarse.K, coarse.M, 4, 1e-12);
  auto rf = smallest_eigenpairs(fine.K, fine.M, 4, 1e-12);
  for (int j = 0; j < 4; ++j)
    CHECK(rf.values[j] <= rc.values[j] + 1e-9);
}

TEST_CASE("inertia counts agree with the dense spectrum") {
  auto [K, M] = meridian_pencil(0.7, 0.7);
  auto dense = dense_oracle(K, M);
  eigensolve::InertiaProber prober(K, M);
  for (double sigma : {0.3, 0.9, 1.1, 2.0, 5.0}) {
    int expected = 0;
    for (double v : dense) expected += v < sigma ? 1 : 0;
    CHECK(prober.count_below(sigma) == expected);
  }
}

TEST_CASE("eigenvalues by inertia bisection") {
  auto [K, M] = meridian_pencil(0.7, 0.7);
  auto dense = dense_oracle(K, M);
  auto vals = eigensolve::eigenvalues_in_interval(K, M, 0.0, dense[3] + 1e-6,
                                                  1e-10);
  REQUIRE(vals.size() >= 4);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(vals[j] - dense[j]) <= 1e-9);
}

TEST_CASE("non-convergence carries partial results") {
  auto [K, M] = meridian_pencil(0.5, 0.5);
  eigensolve::SolveOptions opts;
  opts.max_iter = 2;
  bool threw = false;
  try {
    smallest_eigenpairs(K, M, 6, 1e-14, 0.0, opts);
  } catch (const eigensolve::ConvergenceError& e) {
    threw = true;
    CHECK(e.partial.values.size() >= 1);
  }
  CHECK(threw);
}
