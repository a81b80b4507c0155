#pragma once

// Independent reference evaluations used only by the test suites. These
// deliberately use different algorithms than the library: integral
// representations summed by trapezoid/tanh-sinh rules and Taylor marching
// of the Airy ODE, so an error in the library series cannot cancel here.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// J0(x) = (1/pi) int_0^pi cos(x sin t) dt. The trapezoid rule on a smooth
// periodic integrand converges geometrically; N = 400 is overkill for
// |x| <= 60.
inline double j0(double x) {
  const int n = 400;
  double sum = 0.5 * (std::cos(0.0) + std::cos(x * std::sin(kPi)));
  double comp = 0.0;
  for (int k = 1; k < n; ++k) {
    double term = std::cos(x * std::sin(kPi * k / n));
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / n;
}

// Fixed-level tanh-sinh quadrature on (a, b); handles the log endpoint
// singularity of the Y0 integrand.
inline double tanh_sinh(const std::function<double(double)>& f, double a,
                        double b) {
  const double h = 1.0 / 64.0;
  const double c = 0.5 * (a + b), sc = 0.5 * (b - a);
  double sum = 0.0;
  for (int k = -300; k <= 300; ++k) {
    double u = h * k;
    double sh = std::sinh(u);
    double w = (kPi / 2.0) * std::cosh(u) / std::pow(std::cosh(kPi / 2.0 * sh), 2);
    double x = c + sc * std::tanh(kPi / 2.0 * sh);
    if (x <= a || x >= b) continue;
    sum += w * f(x);
  }
  return sum * sc * h;
}

// Y0(x) = (4/pi^2) int_0^{pi/2} cos(x cos t) (gamma + ln(2 x sin^2 t)) dt.
inline double y0(double x) {
  auto f = [x](double t) {
    double s = std::sin(t);
    return std::cos(x * std::cos(t)) *
           (kEulerGamma + std::log(2.0 * x * s * s));
  };
  return (4.0 / (kPi * kPi)) * tanh_sinh(f, 0.0, kPi / 2.0);
}

// Ai(x) by Taylor marching of y'' = x y from the exact values at 0.
inline double airy(double x) {
  double x0 = 0.0;
  double y = 0.35502805388781723926;    // Ai(0)
  double yp = -0.25881940379280679841;  // Ai'(0)
  const int order = 40;
  while (std::abs(x - x0) > 1e-300) {
    double h = x - x0;
    if (h > 0.25) h = 0.25;
    if (h < -0.25) h = -0.25;
    std::vector<double> c(order + 1, 0.0);
    c[0] = y;
    c[1] = yp;
    for (int k = 0; k + 2 <= order; ++k) {
      double prev = (k >= 1) ? c[k - 1] : 0.0;
      c[k + 2] = (x0 * c[k] + prev) / ((k + 1.0) * (k + 2.0));
    }
    double v = c[order];
    for (int k = order - 1; k >= 0; --k) v = v * h + c[k];
    double dvh = order * c[order];
    for (int k = order - 1; k >= 1; --k) dvh = dvh * h + k * c[k];
    y = v;
    yp = dvh;
    x0 += h;
    if (std::abs(x - x0) < 1e-14) {
      x0 = x;
      break;
    }
  }
  return y;
}

// Bracketed bisection on a test oracle.
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double tol = 1e-13) {
  double flo = f(lo);
  if (flo * f(hi) > 0.0) throw std::runtime_error("oracle::bisect: no sign change");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (flo * fm <= 0.0)
      hi = mid;
    else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
