#include "conilay/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conilay/specfun.hpp"

namespace conilay::asymptotics {

namespace {
constexpr double kPi = 3.14159265358979323846;

double pow23(double t) { return std::cbrt(t * t); }
}  // namespace

double counting_asymptote(double theta, double E) {
  if (!(theta > 0.0) || !(theta < kPi / 2.0))
    throw std::domain_error("counting_asymptote: theta outside (0, pi/2)");
  if (!(E > 0.0) || !(E < 1.0))
    throw std::domain_error("counting_asymptote: E outside (0, 1)");
  return std::abs(std::log(E)) / (4.0 * kPi * std::tan(theta));
}

std::vector<int> staircase(const std::vector<double>& mu_values,
                           const std::vector<double>& E_grid) {
  for (double mu : mu_values)
    if (mu >= 1.0)
      throw std::invalid_argument(
          "staircase: value at or above the essential threshold");
  std::vector<int> out;
  out.reserve(E_grid.size());
  for (double E : E_grid) {
    int n = 0;
    for (double mu : mu_values) n += (mu < 1.0 - E) ? 1 : 0;
    out.push_back(n);
  }
  return out;
}

std::vector<double> staircase_jumps(const std::vector<double>& mu_values) {
  std::vector<double> jumps;
  jumps.reserve(mu_values.size());
  for (double mu : mu_values) jumps.push_back(1.0 - mu);
  std::sort(jumps.rbegin(), jumps.rend());
  return jumps;
}

double two_term_beta0() {
  double j = specfun::j0_zero(1);
  return j * j / (kPi * kPi);
}

double two_term_beta2(int n, TwoTermVariant v) {
  double j = specfun::j0_zero(1);
  double za = specfun::airy_zero(n);
  double base = v == TwoTermVariant::Aperture ? 2.0 * j : 2.0 * j * j;
  return pow23(base) * za / (kPi * kPi);
}

double mu_two_term(int n, double theta, TwoTermVariant v) {
  if (n < 1) throw std::invalid_argument("mu_two_term: n >= 1 required");
  return two_term_beta0() + two_term_beta2(n, v) * pow23(theta);
}

double scale_mu_lambda(double value, double theta, ScaleDirection d) {
  if (!(theta > 0.0) || !(theta < kPi / 2.0))
    throw std::domain_error("scale_mu_lambda: theta outside (0, pi/2)");
  double c = std::cos(theta);
  double f = 2.0 * c * c;
  return d == ScaleDirection::MuToLambda ? value / f : value * f;
}

double lambda_delta_expansion(int n, double h) {
  if (n < 1) throw std::invalid_argument("lambda_delta_expansion: n >= 1");
  if (!(h > 0.0)) throw std::invalid_argument("lambda_delta_expansion: h > 0");
  double j = specfun::j0_zero(1);
  double za = specfun::airy_zero(n);
  return j * j / (2.0 * kPi * kPi) +
         pow23(2.0 * j * j) / (2.0 * kPi * kPi) * za * pow23(h);
}

double agmon_weight(double x, const AgmonWeightParams& p) {
  if (x <= 0.0) return p.eta0 * std::pow(-x, 1.5);
  // int_0^x dt/sqrt(|ln t|) = sqrt(pi) erfc(sqrt(-ln x)) for x in (0,1)
  auto phi1 = [&p](double t) {
    return p.eta1 * std::sqrt(kPi) * std::erfc(std::sqrt(-std::log(t)));
  };
  if (x < p.x1) return phi1(x);
  return p.eta2 * (x - p.x1) + phi1(p.x1);
}

AgmonResult agmon_ratio(const geometry::Mesh& mesh, const assembly::Assembled& a,
                        const Eigen::VectorXd& full_coeffs, double h,
                        const AgmonWeightParams& params) {
  const double kMaxExponent = 700.0;
  const double floor =
      params.amplitude_floor * full_coeffs.cwiseAbs().maxCoeff();
  double weighted = 0.0, norm = 0.0;
  bool clamped = false;
  assembly::for_each_quad_sample(
      mesh, a, full_coeffs, [&](const assembly::QuadSample& s) {
        norm += s.value * s.value * s.wdet;
        if (std::abs(s.value) < floor) return;
        double expo = 2.0 * agmon_weight(s.pos.x, params) / h;
        if (expo > kMaxExponent) {
          expo = kMaxExponent;
          clamped = true;
        }
        double dx = h * s.grad[0];
        weighted += std::exp(expo) * (s.value * s.value + dx * dx) * s.wdet;
      });
  return {weighted / norm, clamped};
}

double mass_fraction_where(const geometry::Mesh& mesh,
                           const assembly::Assembled& a,
                           const Eigen::VectorXd& full_coeffs,
                           const std::function<bool(geometry::Vec2)>& region) {
  double inside = 0.0, total = 0.0;
  assembly::for_each_quad_sample(mesh, a, full_coeffs,
                                 [&](const assembly::QuadSample& s) {
                                   double m = s.value * s.value * s.wdet;
                                   total += m;
                                   if (region(s.pos)) inside += m;
                                 });
  return inside / total;
}

double mass_fraction_beyond(const geometry::Mesh& mesh,
                            const assembly::Assembled& a,
                            const Eigen::VectorXd& full_coeffs, double x0) {
  return mass_fraction_where(mesh, a, full_coeffs,
                             [x0](geometry::Vec2 p) { return p.x > x0; });
}

double leakage_abscissa(const geometry::Mesh& mesh, const assembly::Assembled& a,
                        const Eigen::VectorXd& full_coeffs, double level,
                        double x_max) {
  const int n = 240;
  double prev_x = 0.0;
  double prev_f = mass_fraction_beyond(mesh, a, full_coeffs, 0.0);
  if (prev_f <= level) return 0.0;
  for (int i = 1; i <= n; ++i) {
    double x = x_max * i / n;
    double f = mass_fraction_beyond(mesh, a, full_coeffs, x);
    if (f <= level) {
      double t = (prev_f - level) / std::max(prev_f - f, 1e-300);
      return prev_x + t * (x - prev_x);
    }
    prev_x = x;
    prev_f = f;
  }
  return x_max;
}

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  if (n < 2 || ys.size() != n)
    throw std::invalid_argument("fit_line: need two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  double dn = double(n);
  double vx = sxx - sx * sx / dn;
  double vy = syy - sy * sy / dn;
  double cxy = sxy - sx * sy / dn;
  LineFit f;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / dn;
  f.correlation = vy > 0.0 ? cxy / std::sqrt(vx * vy) : 1.0;
  return f;
}

LineFit staircase_slope(const std::vector<double>& jumps_E) {
  if (jumps_E.size() < 3)
    throw std::invalid_argument("staircase_slope: need at least 3 jumps");
  // between jump j and j+1 the count equals j+1; sample at midpoints
  std::vector<double> xs, ys;
  for (size_t j = 0; j + 1 < jumps_E.size(); ++j) {
    double t = 0.5 * (std::abs(std::log(jumps_E[j])) +
                      std::abs(std::log(jumps_E[j + 1])));
    xs.push_back(t);
    ys.push_back(double(j + 1));
  }
  return fit_line(xs, ys);
}

}  // namespace conilay::asymptotics
