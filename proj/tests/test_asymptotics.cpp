#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "conilay/asymptotics.hpp"
#include "conilay/eigensolve.hpp"
#include "conilay/potential1d.hpp"
#include "conilay/specfun.hpp"

using namespace conilay;
using namespace conilay::asymptotics;

namespace {
constexpr double kPi = 3.14159265358979323846;

struct ScaledGroundState {
  geometry::Mesh mesh;
  assembly::Assembled assembled;
  Eigen::VectorXd coeffs;  // full dof vector, M-normalized
  double lambda;
};

ScaledGroundState scaled_ground_state(double h, double trunc, double h_near) {
  auto spec = geometry::build_domain(0.5, trunc, geometry::Shape::ScaledGuide);
  ScaledGroundState g{geometry::generate_mesh(spec, {h_near, 1.3, 2000000}),
                      {}, {}, 0.0};
  assembly::FiberProblem p;
  p.coords = assembly::CoordinateSystem::ScaledXY;
  p.h = h;
  g.assembled = assembly::assemble(g.mesh, p);
  auto red = assembly::apply_dirichlet(g.assembled, 0);
  auto res = eigensolve::smallest_eigenpairs(red.K, red.M, 1, 1e-10);
  g.coeffs = assembly::expand(red, g.assembled.n_dofs, res.vectors.col(0));
  g.lambda = res.values[0];
  return g;
}
}  // namespace

TEST_CASE("counting asymptote formula") {
  CHECK(std::abs(counting_asymptote(kPi / 4, std::exp(-1.0)) -
                 1.0 / (4.0 * kPi)) <= 1e-15);
  double th = 5.0 * kPi / 180.0;
  CHECK(std::abs(counting_asymptote(th, 1e-3) -
                 std::log(1000.0) / (4.0 * kPi * std::tan(th))) <= 1e-13);
  // linear in |ln E|
  double a = counting_asymptote(0.7, 1e-2);
  double b = counting_asymptote(0.7, 1e-4);
  CHECK(std::abs(b - 2.0 * a) <= 1e-12);
}

TEST_CASE("staircase counting") {
  // N(E) = #{mu_j < 1-E} (counting function below the shifted threshold)
  std::vector<double> mu{0.5, 0.9};
  CHECK(staircase(mu, {0.05}) == std::vector<int>{2});
  CHECK(staircase(mu, {0.2}) == std::vector<int>{1});
  CHECK(staircase(mu, {0.4}) == std::vector<int>{1});
  CHECK(staircase(mu, {0.6}) == std::vector<int>{0});
  CHECK(staircase({}, {0.1, 0.5}) == std::vector<int>({0, 0}));
  CHECK_THROWS_AS(staircase({0.5, 1.0}, {0.1}), std::invalid_argument);
  auto jumps = staircase_jumps(mu);
  CHECK(jumps[0] == doctest::Approx(0.5));
  CHECK(jumps[1] == doctest::Approx(0.1));
}

TEST_CASE("two-term expansion variants") {
  double j = specfun::j0_zero(1);
  CHECK(std::abs(mu_two_term(1, 0.0, TwoTermVariant::Aperture) -
                 j * j / (kPi * kPi)) <= 1e-15);
  CHECK(std::abs(mu_two_term(1, 0.0, TwoTermVariant::ConeRescaled) -
                 j * j / (kPi * kPi)) <= 1e-15);
  for (int n : {1, 2, 5}) {
    double r = two_term_beta2(n, TwoTermVariant::ConeRescaled) /
               two_term_beta2(n, TwoTermVariant::Aperture);
    CHECK(std::abs(r - std::cbrt(j * j)) <= 1e-13);
  }
  // the paper's computed mu_1(2.5 deg) lies between the two variants
  double th = 2.5 * kPi / 180.0;
  double lo = mu_two_term(1, th, TwoTermVariant::Aperture);
  double hi = mu_two_term(1, th, TwoTermVariant::ConeRescaled);
  CHECK(lo < 0.709909);
  CHECK(0.709909 < hi);
}

TEST_CASE("mu/lambda scaling") {
  CHECK(std::abs(scale_mu_lambda(0.7, kPi / 4, ScaleDirection::MuToLambda) -
                 0.7) <= 1e-15);
  double v = 0.83;
  double w = scale_mu_lambda(
      scale_mu_lambda(v, 0.3, ScaleDirection::MuToLambda), 0.3,
      ScaleDirection::LambdaToMu);
  CHECK(std::abs(w - v) <= 1e-15);
  double c = std::cos(0.4);
  CHECK(std::abs(scale_mu_lambda(1.0, 0.4, ScaleDirection::MuToLambda) -
                 1.0 / (2.0 * c * c)) <= 1e-15);
}

TEST_CASE("triangle expansion basics") {
  double j = specfun::j0_zero(1);
  CHECK(std::abs(lambda_delta_expansion(1, 1e-15) - j * j / (2 * kPi * kPi)) <=
        1e-9);
  for (double h : {0.3, 0.1}) {
    CHECK(lambda_delta_expansion(1, h) < lambda_delta_expansion(2, h));
    CHECK(lambda_delta_expansion(2, h) < lambda_delta_expansion(3, h));
  }
}

TEST_CASE("triangle eigenvalues match the expansion within C*h") {
  // remainder of the two-term cone expansion, sampled over an h-sweep;
  // C is estimated from the data rather than assumed
  std::vector<double> hs{0.2, 0.1, 0.05};
  std::vector<double> diff_over_h;
  for (double h : hs) {
    double hn = std::max(0.03, std::cbrt(h * h) / 4.0);
    auto spec = geometry::build_domain(0.5, 0.0, geometry::Shape::ScaledTriangle);
    auto mesh = geometry::generate_mesh(spec, {hn, 1.2, 4000000});
    assembly::FiberProblem p;
    p.coords = assembly::CoordinateSystem::ScaledXY;
    p.h = h;
    auto red = assembly::apply_dirichlet(assembly::assemble(mesh, p), 0);
    auto eig = eigensolve::smallest_eigenpairs(red.K, red.M, 1, 1e-10);
    double d = eig.values[0] - lambda_delta_expansion(1, h);
    diff_over_h.push_back(std::abs(d) / h);
  }
  double cmax = *std::max_element(diff_over_h.begin(), diff_over_h.end());
  double cmin = *std::min_element(diff_over_h.begin(), diff_over_h.end());
  CHECK(cmax < 1.0);            // bounded constant
  CHECK(cmax / cmin < 3.0);     // genuinely O(h) at these scales
  CHECK(diff_over_h.back() <= diff_over_h.front());  // shrinking with h
}

TEST_CASE("agmon weight shape") {
  AgmonWeightParams p;
  p.x1 = 0.3;
  CHECK(agmon_weight(0.0, p) == 0.0);
  CHECK(std::abs(agmon_weight(-1.0, p) - p.eta0) <= 1e-15);
  // continuity at 0 and x1
  CHECK(std::abs(agmon_weight(1e-12, p)) <= 1e-6);
  double before = agmon_weight(p.x1 - 1e-9, p);
  double after = agmon_weight(p.x1 + 1e-9, p);
  CHECK(std::abs(before - after) <= 1e-7);
  // closed form of the middle branch against numerical quadrature
  double x = 0.2;
  int n = 200000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = x * (i + 0.5) / n;
    acc += 1.0 / std::sqrt(-std::log(t));
  }
  acc *= x / n;
  CHECK(std::abs(agmon_weight(x, p) - p.eta1 * acc) <= 1e-6);
}

TEST_CASE("agmon ratio on a computed ground state") {
  auto g = scaled_ground_state(0.25, 2.0, 0.08);
  AgmonWeightParams zero{0.0, 0.0, 0.0, 0.3};
  auto r0 = agmon_ratio(g.mesh, g.assembled, g.coeffs, 0.25, zero);
  CHECK_FALSE(r0.clamped);
  CHECK(r0.ratio >= 1.0);  // 1 + ||h dx psi||^2 / ||psi||^2

  AgmonWeightParams p1{0.05, 0.05, 0.05, 0.3};
  AgmonWeightParams p2{0.1, 0.05, 0.05, 0.3};
  auto r1 = agmon_ratio(g.mesh, g.assembled, g.coeffs, 0.25, p1);
  auto r2 = agmon_ratio(g.mesh, g.assembled, g.coeffs, 0.25, p2);
  CHECK(r2.ratio >= r1.ratio);  // monotone in eta0
}

TEST_CASE("mass fractions at the domain ends") {
  auto g = scaled_ground_state(0.3, 2.0, 0.1);
  CHECK(std::abs(mass_fraction_beyond(g.mesh, g.assembled, g.coeffs,
                                      -kPi * 1.4142135623730951) -
                 1.0) <= 1e-12);
  CHECK(mass_fraction_beyond(g.mesh, g.assembled, g.coeffs, 2.0) == 0.0);
  double f0 = mass_fraction_beyond(g.mesh, g.assembled, g.coeffs, 0.0);
  CHECK(f0 > 0.0);
  CHECK(f0 < 1.0);
  double x_leak = leakage_abscissa(g.mesh, g.assembled, g.coeffs, 1e-2, 2.0);
  CHECK(x_leak > 0.0);
  CHECK(x_leak < 2.0);
}

TEST_CASE("line fit and staircase slope") {
  auto f = fit_line({1, 2, 3, 4}, {2.1, 3.9, 6.1, 7.9});
  CHECK(std::abs(f.slope - 2.0) <= 0.1);
  CHECK(f.correlation > 0.99);

  // exact geometric jumps E_j = e^{-j/s} regress to slope s
  double s = 0.91;
  std::vector<double> jumps;
  for (int j = 1; j <= 12; ++j) jumps.push_back(std::exp(-double(j) / s));
  auto fit = staircase_slope(jumps);
  CHECK(std::abs(fit.slope - s) <= 1e-10);
  CHECK(fit.correlation > 0.999);
}
