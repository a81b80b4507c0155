#include "conilay/potential1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "conilay/specfun.hpp"

namespace conilay::potential1d {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

double j01() { return specfun::j0_zero(1); }

// Cross-product F(v) = J0(a)Y0(b) - J0(b)Y0(a) with a = sqrt(v) x,
// b = sqrt(v)(x + pi sqrt(2)); v(x) is its first root.
struct CrossProduct {
  double x;
  double operator()(double v) const {
    double sv = std::sqrt(v);
    double a = sv * x, b = sv * (x + kPi * kSqrt2);
    return specfun::eval_j0(a) * specfun::eval_y0(b) -
           specfun::eval_j0(b) * specfun::eval_y0(a);
  }
  double derivative(double v) const {
    double sv = std::sqrt(v);
    double a = sv * x, b = sv * (x + kPi * kSqrt2);
    double da = a / (2.0 * v), db = b / (2.0 * v);
    return -specfun::eval_j1(a) * da * specfun::eval_y0(b) -
           specfun::eval_j0(a) * specfun::eval_y1(b) * db +
           specfun::eval_j1(b) * db * specfun::eval_y0(a) +
           specfun::eval_j0(b) * specfun::eval_y1(a) * da;
  }
};

struct Tridiag {
  std::vector<double> d;  // diagonal
  double e = 0.0;         // constant off-diagonal
};

Tridiag build_tridiag(const Model1DProblem& p, int n) {
  if (n < 100) throw std::invalid_argument("grid_n must be >= 100");
  Tridiag t;
  double dx = (p.b - p.a) / n;
  double kin = p.h * p.h / (dx * dx);
  t.e = -kin;
  t.d.resize(n - 1);
  for (int i = 1; i < n; ++i)
    t.d[i - 1] = 2.0 * kin + potential_value(p.potential, p.a + i * dx);
  return t;
}

// Sturm/LDLT count of eigenvalues strictly below lambda.
int sturm_count(const Tridiag& t, double lambda) {
  const double e2 = t.e * t.e;
  const double pivmin = std::max(e2, 1.0) * 1e-292;
  int cnt = 0;
  double q = 1.0;
  for (size_t i = 0; i < t.d.size(); ++i) {
    q = (t.d[i] - lambda) - (i > 0 ? e2 / q : 0.0);
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++cnt;
  }
  return cnt;
}

// idx-th (1-based) eigenvalue by Sturm bisection.
double eigenvalue_by_index(const Tridiag& t, int idx) {
  double lo = t.d[0], hi = t.d[0];
  for (double di : t.d) {
    lo = std::min(lo, di);
    hi = std::max(hi, di);
  }
  lo -= 2.0 * std::abs(t.e);
  hi += 2.0 * std::abs(t.e);
  double scale = std::max(std::abs(lo), std::abs(hi));
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sturm_count(t, mid) >= idx)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-15 * scale) break;
  }
  return 0.5 * (lo + hi);
}

double count_threshold(const Model1DProblem& p, double E) {
  return p.potential.kind == PotentialDescriptor::Kind::BornOppenheimer
             ? bo_threshold() - E
             : -E;
}

void check_resolution(const Model1DProblem& p, double E) {
  if (!(E > 0.0)) throw std::invalid_argument("E must be positive");
  double len = p.b - p.a;
  if (len < 10.0 / std::sqrt(E)) {
    double floor = 100.0 / (len * len);
    throw std::invalid_argument(
        "count_below: E below the resolvable floor " + std::to_string(floor) +
        " for truncation length " + std::to_string(len));
  }
}

}  // namespace

double v0() {
  double j = j01();
  return j * j / (2.0 * kPi * kPi);
}

double bo_threshold() { return 0.5; }

double log_asymptote_constant() {
  double j = j01();
  return (j / (2.0 * kPi)) * std::abs(specfun::eval_y0(j)) /
         std::abs(specfun::eval_j0_prime(j));
}

double bo_lower_constant() { return 0.5 * log_asymptote_constant(); }

PotentialSample effective_potential(double x) {
  const double shift = kPi * kSqrt2;
  if (!(x > -shift))
    throw std::domain_error("effective_potential: x must exceed -pi*sqrt(2)");
  if (x <= 0.0) {
    double j = j01();
    return {x, j * j / ((x + shift) * (x + shift)), 0.0};
  }

  CrossProduct f{x};
  double lo = v0() * (1.0 - 1e-12);
  double hi = 0.5 + 1e-12;
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {x, lo, 0.0};
  if (flo * fhi > 0.0)
    throw std::runtime_error(
        "effective_potential: bracketing failed at x = " + std::to_string(x) +
        " (F(lo)=" + std::to_string(flo) + ", F(hi)=" + std::to_string(fhi) +
        ")");
  // bisection to 1e-6, then Newton on the cross-product
  for (int it = 0; it < 80 && hi - lo > 1e-6; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (flo * fm <= 0.0)
      hi = mid;
    else {
      lo = mid;
      flo = fm;
    }
  }
  double v = 0.5 * (lo + hi);
  for (int it = 0; it < 30; ++it) {
    double fv = f(v);
    if (flo * fv <= 0.0)
      hi = v;
    else {
      lo = v;
      flo = fv;
    }
    double dv = f.derivative(v);
    double next = dv != 0.0 ? v - fv / dv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    bool done = std::abs(next - v) <= 1e-13 * std::max(v, 1e-30);
    v = next;
    if (done) break;
  }
  return {x, v, f(v)};
}

double potential_log_asymptote(double x) {
  if (!(x > 0.0) || !(x < 1.0))
    throw std::invalid_argument("potential_log_asymptote: x must be in (0,1)");
  return v0() + log_asymptote_constant() / std::abs(std::log(x));
}

double x1_grid_verified() {
  static const double cached = [] {
    const double c0 = bo_lower_constant();
    const double base = v0();
    const int n = 1500;
    double x1 = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = std::exp(std::log(1e-6) +
                          (std::log(0.995) - std::log(1e-6)) * i / (n - 1));
      double bound = base + c0 / std::abs(std::log(x));
      if (effective_potential(x).v < bound) break;
      x1 = x;
    }
    return x1;
  }();
  return cached;
}

double partition_w(double s, Smoothstep kind) {
  double t = s - 1.0;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double S, dS;
  if (kind == Smoothstep::Quintic) {
    S = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    dS = 30.0 * t * t * (1.0 - t) * (1.0 - t);
  } else {
    S = t * t * (3.0 - 2.0 * t);
    dS = 6.0 * t * (1.0 - t);
  }
  // |chi0'|^2 + |chi1'|^2 with chi0 = 1 - S reduces to S'^2 / (S(2-S))
  return dS * dS / (S * (2.0 - S));
}

double potential_value(const PotentialDescriptor& p, double x) {
  using Kind = PotentialDescriptor::Kind;
  switch (p.kind) {
    case Kind::BornOppenheimer:
      return effective_potential(x).v;
    case Kind::InverseSquare:
      return -p.c / (x * x);
    case Kind::HatQ: {
      double s = std::sin(p.theta);
      return -1.0 / (4.0 * x * x * s * s);
    }
    case Kind::CheckQ: {
      double s = std::sin(p.theta);
      return -1.0 / (4.0 * x * x * s * s) - partition_w(x, p.smoothstep);
    }
  }
  return 0.0;
}

std::vector<double> solve_1d(const Model1DProblem& problem, int k) {
  if (k < 1) throw std::invalid_argument("solve_1d: k must be >= 1");
  Tridiag coarse = build_tridiag(problem, problem.grid_n);
  Tridiag fine = build_tridiag(problem, 2 * problem.grid_n);
  std::vector<double> out(k);
  for (int j = 1; j <= k; ++j) {
    double lc = eigenvalue_by_index(coarse, j);
    double lf = eigenvalue_by_index(fine, j);
    out[j - 1] = (4.0 * lf - lc) / 3.0;
  }
  return out;
}

int count_below(const Model1DProblem& problem, double E) {
  check_resolution(problem, E);
  Tridiag t = build_tridiag(problem, problem.grid_n);
  return sturm_count(t, count_threshold(problem, E));
}

std::vector<double> negative_eigenvalues(const Model1DProblem& problem,
                                         double E_floor) {
  check_resolution(problem, E_floor);
  Tridiag t = build_tridiag(problem, problem.grid_n);
  double thr = count_threshold(problem, E_floor);
  int m = sturm_count(t, thr);
  std::vector<double> out(m);
  for (int j = 1; j <= m; ++j) out[j - 1] = eigenvalue_by_index(t, j);
  return out;
}

}  // namespace conilay::potential1d
