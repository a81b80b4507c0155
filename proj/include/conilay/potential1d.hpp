#pragma once

#include <vector>

namespace conilay::potential1d {

struct PotentialSample {
  double x = 0.0;
  double v = 0.0;
  double residual = 0.0;  // cross-product defect; zero on the explicit branch
};

/// Lowest transverse eigenvalue of the weighted radial operator on the
/// annulus slice at abscissa x. Explicit for x <= 0; for x > 0 the first
/// root of the Bessel cross-product equation, bracketed from below and
/// polished by Newton to |dv| <= 1e-12.
PotentialSample effective_potential(double x);

/// v(0) + (1/|ln x|) * (j01/2pi) |Y0(j01)|/|J0'(j01)| on (0,1).
double potential_log_asymptote(double x);

double log_asymptote_constant();  // (j01/2pi) |Y0(j01)|/|J0'(j01)|
double bo_lower_constant();       // half of the above
double v0();                      // j01^2 / (2 pi^2), the minimum of v
double bo_threshold();            // 1/2, the limit of v at +infinity

/// Largest grid-verified abscissa x1 with v(x) >= v0 + c0/|ln x| on (0, x1];
/// computed once on a log-spaced grid and cached.
double x1_grid_verified();

enum class Smoothstep { Quintic, Cubic };

/// |chi0'|^2 + |chi1'|^2 for the partition chi0^2 + chi1^2 = 1 with chi0
/// falling from 1 to 0 across [1,2].
double partition_w(double s, Smoothstep kind);

struct PotentialDescriptor {
  enum class Kind { BornOppenheimer, InverseSquare, HatQ, CheckQ } kind =
      Kind::InverseSquare;
  double c = 0.0;      // InverseSquare strength (-c/x^2), c >= 0
  double theta = 0.0;  // HatQ / CheckQ aperture
  Smoothstep smoothstep = Smoothstep::Quintic;
};

struct Model1DProblem {
  double a = 1.0;
  double b = 100.0;  // Dirichlet at both grid ends
  PotentialDescriptor potential;
  double h = 1.0;     // semiclassical parameter in -h^2 d''
  int grid_n = 4000;  // subintervals of the base grid
};

double potential_value(const PotentialDescriptor& p, double x);

/// k lowest Dirichlet eigenvalues of -h^2 u'' + V u on (a,b), second-order
/// finite differences, Richardson-extrapolated over the n and 2n grids.
std::vector<double> solve_1d(const Model1DProblem& problem, int k);

/// Number of discretized eigenvalues below -E (model potentials) or below
/// bo_threshold() - E (Born-Oppenheimer). Requires b - a >= 10/sqrt(E).
int count_below(const Model1DProblem& problem, double E);

/// All eigenvalues below -E_floor (or threshold - E_floor for BO),
/// ascending, by Sturm bisection on the base grid.
std::vector<double> negative_eigenvalues(const Model1DProblem& problem,
                                         double E_floor);

}  // namespace conilay::potential1d
