#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conilay/assembly.hpp"
#include "conilay/geometry.hpp"

namespace conilay::asymptotics {

/// cot(theta)/(4 pi) * |ln E|, the near-threshold counting law.
double counting_asymptote(double theta, double E);

/// N(E) = #{ mu_j < 1 - E } for each grid value. Inputs sorted ascending;
/// throws if any mu >= 1 (essential-spectrum contamination must be
/// filtered upstream).
std::vector<int> staircase(const std::vector<double>& mu_values,
                           const std::vector<double>& E_grid);

/// Jump locations E_j = 1 - mu_j, descending in E.
std::vector<double> staircase_jumps(const std::vector<double>& mu_values);

/// Two candidate second-order coefficients of the small-aperture expansion:
/// Aperture uses (2 j01)^{2/3}, ConeRescaled carries (2 j01^2)^{2/3} over
/// from the semiclassical cone expansion through mu = 2 cos^2(theta) lambda.
enum class TwoTermVariant { Aperture, ConeRescaled };

double two_term_beta0();                            // j01^2/pi^2
double two_term_beta2(int n, TwoTermVariant v);
double mu_two_term(int n, double theta, TwoTermVariant v);

enum class ScaleDirection { MuToLambda, LambdaToMu };
double scale_mu_lambda(double value, double theta, ScaleDirection d);

/// j01^2/(2 pi^2) + (2 j01^2)^{2/3}/(2 pi^2) z_A(n) h^{2/3}, the two-term
/// semiclassical expansion of the cone (triangle) eigenvalues.
double lambda_delta_expansion(int n, double h);

struct AgmonWeightParams {
  double eta0 = 0.1;
  double eta1 = 0.1;
  double eta2 = 0.1;
  double x1 = 0.3;  // crossover abscissa
  // Quadrature points with |psi| below this fraction of max|psi| are
  // excluded from the weighted integral. Zero keeps the plain quadrature;
  // the boundedness probe sets ~1e-8 so that eigenvector noise (~1e-14 of
  // the peak) multiplied by e^{2 Phi/h} cannot masquerade as tail mass.
  double amplitude_floor = 0.0;
};

/// Piecewise Agmon weight: eta0 |x|^{3/2} for x < 0,
/// eta1 * int_0^x dt/sqrt(|ln t|) on (0, x1), affine continuation beyond.
double agmon_weight(double x, const AgmonWeightParams& p);

struct AgmonResult {
  double ratio = 0.0;
  bool clamped = false;
};

/// Quadrature evaluation of
///   int e^{2 Phi/h} (|psi|^2 + |h dx psi|^2) w dx dy / ||psi||^2.
/// Exponents above the overflow guard are clamped and flagged.
AgmonResult agmon_ratio(const geometry::Mesh& mesh, const assembly::Assembled& a,
                        const Eigen::VectorXd& full_coeffs, double h,
                        const AgmonWeightParams& params);

/// ||psi||^2-fraction of the region { x > x0 }.
double mass_fraction_beyond(const geometry::Mesh& mesh,
                            const assembly::Assembled& a,
                            const Eigen::VectorXd& full_coeffs, double x0);

/// Generic region fraction for diagnostics in other coordinates.
double mass_fraction_where(const geometry::Mesh& mesh,
                           const assembly::Assembled& a,
                           const Eigen::VectorXd& full_coeffs,
                           const std::function<bool(geometry::Vec2)>& region);

/// Abscissa where mass_fraction_beyond crosses the given level (linear
/// interpolation on a scan grid).
double leakage_abscissa(const geometry::Mesh& mesh, const assembly::Assembled& a,
                        const Eigen::VectorXd& full_coeffs, double level,
                        double x_max);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
};
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

/// Least-squares slope of N against |ln E| sampled at jump midpoints.
LineFit staircase_slope(const std::vector<double>& jumps_E);

}  // namespace conilay::asymptotics
