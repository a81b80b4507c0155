#include "conilay/specfun.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "conilay/dd.hpp"

namespace conilay::specfun {

namespace {

using detail::add;
using detail::dd;
using detail::div;
using detail::mul;

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

// Crossover between ascending series and Hankel expansion. At x = 18 the
// optimally truncated asymptotic tail is below 1e-15 while the dd series
// still has ~20 guard digits.
constexpr double kBesselCrossover = 18.0;

dd q_of(double x) {
  dd q = detail::two_prod(x, x);
  return div(q, 4.0);
}

double j0_series(double x) {
  dd q = q_of(x);
  dd term{1.0};
  dd sum{1.0};
  for (int k = 1; k < 400; ++k) {
    term = detail::neg(div(mul(term, q), double(k) * double(k)));
    sum = add(sum, term);
    if (std::abs(term.hi) < 1e-40 * (std::abs(sum.hi) + 1e-300)) break;
  }
  return sum.value();
}

double j1_series(double x) {
  dd q = q_of(x);
  dd term{x / 2.0, std::fma(x, 0.5, -x / 2.0)};
  dd sum = term;
  for (int k = 1; k < 400; ++k) {
    term = detail::neg(div(mul(term, q), double(k) * double(k + 1)));
    sum = add(sum, term);
    if (std::abs(term.hi) < 1e-40 * (std::abs(sum.hi) + 1e-300)) break;
  }
  return sum.value();
}

// Sum of (-1)^{k+1} H_k q^k / (k!)^2, the regular part of the Y0 series.
double y0_series_tail(double x) {
  dd q = q_of(x);
  dd term{1.0};  // q^k/(k!)^2 at k=0
  dd h{0.0};     // harmonic number H_k
  dd sum{0.0};
  double sign = 1.0;
  for (int k = 1; k < 400; ++k) {
    term = div(mul(term, q), double(k) * double(k));
    h = add(h, div(dd{1.0}, double(k)));
    sum = add(sum, mul(mul(term, h), sign));
    if (std::abs(term.hi) * h.hi < 1e-40 * (std::abs(sum.hi) + 1e-300)) break;
    sign = -sign;
  }
  return sum.value();
}

// Sum of (-1)^k (H_k + H_{k+1}) (x/2)^{2k+1} / (k!(k+1)!) for Y1.
double y1_series_tail(double x) {
  dd q = q_of(x);
  dd term{x / 2.0, std::fma(x, 0.5, -x / 2.0)};
  dd hk{0.0};
  dd hk1{1.0};
  dd sum = mul(term, add(hk, hk1));
  double sign = -1.0;
  for (int k = 1; k < 400; ++k) {
    term = div(mul(term, q), double(k) * double(k + 1));
    hk = add(hk, div(dd{1.0}, double(k)));
    hk1 = add(hk1, div(dd{1.0}, double(k + 1)));
    dd piece = mul(mul(term, add(hk, hk1)), sign);
    sum = add(sum, piece);
    if (std::abs(piece.hi) < 1e-40 * (std::abs(sum.hi) + 1e-300)) break;
    sign = -sign;
  }
  return sum.value();
}

struct ModulusPhase {
  double p;  // P(nu, x)
  double q;  // Q(nu, x)
};

// Hankel asymptotic sums. a_m = prod_{j<=m} (4nu^2-(2j-1)^2) / (m! 8^m),
// t_m = a_m / x^m, truncated at the smallest term.
ModulusPhase hankel_pq(int nu, double x) {
  double p = 0.0, q = 0.0;
  double t = 1.0;  // t_0
  double fournu2 = 4.0 * nu * nu;
  double sign_p = 1.0, sign_q = 1.0;
  double prev = HUGE_VAL;
  for (int m = 0; m < 60; ++m) {
    if (m > 0) {
      double odd = 2.0 * m - 1.0;
      t *= (fournu2 - odd * odd) / (8.0 * m * x);
    }
    if (std::abs(t) > prev) break;  // past the optimal truncation point
    prev = std::abs(t);
    if (m % 2 == 0) {
      p += sign_p * t;
      sign_p = -sign_p;
    } else {
      q += sign_q * t;
      sign_q = -sign_q;
    }
    if (std::abs(t) < 1e-19) break;
  }
  return {p, q};
}

struct CosSin {
  double c;
  double s;
};

// cos/sin of x - (2nu+1)pi/4 without forming the difference.
CosSin phase(int nu, double x) {
  double cx = std::cos(x), sx = std::sin(x);
  const double r = 0.70710678118654752440;  // cos(pi/4)
  if (nu == 0) return {r * (cx + sx), r * (sx - cx)};
  return {r * (sx - cx), -r * (cx + sx)};  // chi = x - 3pi/4
}

double bessel_asymptotic(int nu, double x, bool second_kind) {
  ModulusPhase mp = hankel_pq(nu, x);
  CosSin cs = phase(nu, x);
  double amp = std::sqrt(2.0 / (kPi * x));
  if (second_kind) return amp * (mp.p * cs.s + mp.q * cs.c);
  return amp * (mp.p * cs.c - mp.q * cs.s);
}

// Airy Maclaurin constants: Ai(0) and -Ai'(0).
constexpr double kAiryC1 = 0.35502805388781723926;
constexpr double kAiryC2 = 0.25881940379280679841;

double airy_series(double x) {
  dd z3;
  {
    dd z2 = detail::two_prod(x, x);
    z3 = mul(z2, x);
  }
  dd f{1.0}, tf{1.0};
  dd g{x}, tg{x};
  for (int k = 0; k < 300; ++k) {
    tf = div(mul(tf, z3), double(3 * k + 2) * double(3 * k + 3));
    tg = div(mul(tg, z3), double(3 * k + 3) * double(3 * k + 4));
    f = add(f, tf);
    g = add(g, tg);
    if (std::abs(tf.hi) + std::abs(tg.hi) <
        1e-40 * (std::abs(f.hi) + std::abs(g.hi) + 1e-300))
      break;
  }
  dd ai = add(mul(f, kAiryC1), mul(g, -kAiryC2));
  return ai.value();
}

// u_k coefficients of the Airy asymptotic expansions.
double airy_asymptotic_negative(double x) {
  double z = -x;
  double zeta = (2.0 / 3.0) * z * std::sqrt(z);
  double p = 0.0, q = 0.0;
  double u = 1.0;
  double sp = 1.0, sq = 1.0;
  double prev = HUGE_VAL;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
           (216.0 * k * (2.0 * k - 1.0));
      u /= zeta;  // accumulate u_k / zeta^k
    }
    if (std::abs(u) > prev) break;
    prev = std::abs(u);
    if (k % 2 == 0) {
      p += sp * u;
      sp = -sp;
    } else {
      q += sq * u;
      sq = -sq;
    }
    if (std::abs(u) < 1e-19) break;
  }
  double c = std::cos(zeta - kPi / 4.0), s = std::sin(zeta - kPi / 4.0);
  return (c * p + s * q) / (std::sqrt(kPi) * std::pow(z, 0.25));
}

double airy_asymptotic_positive(double x) {
  double zeta = (2.0 / 3.0) * x * std::sqrt(x);
  double sum = 0.0;
  double u = 1.0;
  double sign = 1.0;
  double prev = HUGE_VAL;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
           (216.0 * k * (2.0 * k - 1.0));
      u /= zeta;
    }
    if (std::abs(u) > prev) break;
    prev = std::abs(u);
    sum += sign * u;
    sign = -sign;
    if (std::abs(u) < 1e-19) break;
  }
  return std::exp(-zeta) * sum / (2.0 * std::sqrt(kPi) * std::pow(x, 0.25));
}

double require_positive(double x, const char* who) {
  if (!(x > 0.0))
    throw std::domain_error(std::string(who) + ": argument must be positive");
  return x;
}

// Bracketed bisection to ~1e-6, then Newton polish. The derivative only
// steers the iteration; the fixed point is a root of f itself.
template <class F, class DF>
double refine_zero(F f, DF df, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 40 && flo * f(hi) > 0.0; ++it) {
    lo -= 0.1;
    hi += 0.1;
    flo = f(lo);
  }
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (flo * fm <= 0.0)
      hi = mid;
    else {
      lo = mid;
      flo = fm;
    }
    if (hi - lo < 1e-6) break;
  }
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    double fz = f(z);
    double d = df(z);
    if (d == 0.0) break;
    double step = fz / d;
    z -= step;
    if (std::abs(step) < 1e-15 * std::abs(z)) break;
  }
  return z;
}

std::vector<double> build_j0_zeros() {
  std::vector<double> zeros;
  zeros.reserve(kZeroTableCapacity);
  for (int n = 1; n <= kZeroTableCapacity; ++n) {
    double beta = (n - 0.25) * kPi;
    double guess = beta + 1.0 / (8.0 * beta);
    double z = refine_zero([](double t) { return eval_j0(t); },
                           [](double t) { return -eval_j1(t); }, guess - 0.4,
                           guess + 0.4);
    zeros.push_back(z);
  }
  return zeros;
}

std::vector<double> build_airy_zeros() {
  std::vector<double> zeros;
  zeros.reserve(kZeroTableCapacity);
  for (int n = 1; n <= kZeroTableCapacity; ++n) {
    double t = 3.0 * kPi * (4.0 * n - 1.0) / 8.0;
    double guess = std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / (48.0 * t * t));
    auto f = [](double z) { return eval_airy(-z); };
    auto df = [&f](double z) {
      const double h = 1e-6;
      return (f(z + h) - f(z - h)) / (2.0 * h);
    };
    zeros.push_back(refine_zero(f, df, guess - 0.3, guess + 0.3));
  }
  return zeros;
}

}  // namespace

double eval_j0(double x) {
  x = std::abs(x);
  if (x < kBesselCrossover) return j0_series(x);
  return bessel_asymptotic(0, x, false);
}

double eval_j1(double x) {
  double sign = x < 0.0 ? -1.0 : 1.0;
  x = std::abs(x);
  if (x < kBesselCrossover) return sign * j1_series(x);
  return sign * bessel_asymptotic(1, x, false);
}

double eval_y0(double x) {
  require_positive(x, "eval_y0");
  if (x < kBesselCrossover) {
    double lg = std::log(0.5 * x) + kEulerGamma;
    return (2.0 / kPi) * (lg * j0_series(x) + y0_series_tail(x));
  }
  return bessel_asymptotic(0, x, true);
}

double eval_y1(double x) {
  require_positive(x, "eval_y1");
  if (x < kBesselCrossover) {
    double lg = std::log(0.5 * x) + kEulerGamma;
    return (2.0 / kPi) * lg * j1_series(x) - 2.0 / (kPi * x) -
           y1_series_tail(x) / kPi;
  }
  return bessel_asymptotic(1, x, true);
}

double eval_j0_prime(double x) { return -eval_j1(x); }

double eval_y0_prime(double x) {
  require_positive(x, "eval_y0_prime");
  return -eval_y1(x);
}

double eval_airy(double x) {
  if (x < -9.0) return airy_asymptotic_negative(x);
  if (x > 3.5) return airy_asymptotic_positive(x);
  return airy_series(x);
}

const std::vector<double>& j0_zero_table() {
  static const std::vector<double> table = build_j0_zeros();
  return table;
}

const std::vector<double>& airy_zero_table() {
  static const std::vector<double> table = build_airy_zeros();
  return table;
}

double j0_zero(int n) {
  if (n < 1) throw std::out_of_range("j0_zero: index must be >= 1");
  if (n > kZeroTableCapacity)
    throw std::out_of_range("j0_zero: beyond table capacity " +
                            std::to_string(kZeroTableCapacity));
  return j0_zero_table()[n - 1];
}

double airy_zero(int n) {
  if (n < 1) throw std::out_of_range("airy_zero: index must be >= 1");
  if (n > kZeroTableCapacity)
    throw std::out_of_range("airy_zero: beyond table capacity " +
                            std::to_string(kZeroTableCapacity));
  return airy_zero_table()[n - 1];
}

}  // namespace conilay::specfun
