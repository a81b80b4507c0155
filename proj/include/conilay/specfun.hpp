#pragma once

#include <vector>

namespace conilay::specfun {

/// Capacity of the precomputed zero tables.
inline constexpr int kZeroTableCapacity = 64;

/// Bessel function of the first kind, order 0. Ascending double-double
/// series below the crossover, Hankel asymptotic expansion above.
double eval_j0(double x);

/// Bessel function of the first kind, order 1.
double eval_j1(double x);

/// Bessel function of the second kind, order 0. Throws std::domain_error
/// for x <= 0.
double eval_y0(double x);

/// Bessel function of the second kind, order 1. Throws std::domain_error
/// for x <= 0.
double eval_y1(double x);

/// J0'(x) = -J1(x).
double eval_j0_prime(double x);

/// Y0'(x) = -Y1(x). Throws for x <= 0.
double eval_y0_prime(double x);

/// Airy function Ai(x). Maclaurin series on [-9, 3.5], asymptotic
/// expansions outside (absolute accuracy ~1e-13 on the oscillatory side,
/// relative ~e^{-2 zeta} on the decaying side).
double eval_airy(double x);

/// n-th positive zero of J0 (n >= 1). Throws std::out_of_range beyond
/// the table capacity.
double j0_zero(int n);

/// n-th positive root z of Ai(-z) (n >= 1). Throws std::out_of_range
/// beyond the table capacity.
double airy_zero(int n);

/// Full tables, built once on first use and immutable afterwards.
const std::vector<double>& j0_zero_table();
const std::vector<double>& airy_zero_table();

}  // namespace conilay::specfun
