#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conilay/assembly.hpp"
#include "conilay/asymptotics.hpp"
#include "conilay/eigensolve.hpp"
#include "conilay/geometry.hpp"

namespace conilay::experiments {

struct MeshConfig {
  double h_near = 0.1;
  double ratio = 1.2;
  int max_cells = 4000000;
};

struct SolverConfig {
  int k = 6;
  double tol = 1e-10;
  double shift = 0.0;
};

struct Config {
  std::string experiment = "verify";
  std::vector<double> theta_deg{5,  10, 15, 20, 25, 30, 35, 40, 45,
                                50, 55, 60, 65, 70, 75, 80, 85};
  std::vector<double> h_list{0.2, 0.1, 0.05};
  double theta_single_deg = 2.5;
  double truncation = 60.0;
  MeshConfig mesh;
  SolverConfig solver;
  int count_k = 12;
  std::string out_dir = "out";
  int workers = 2;
  std::string canonical;  // serialized form used for the output hash
};

Config default_config(const std::string& experiment);
/// Merge a JSON file over the experiment defaults. Angles are accepted in
/// degrees here and converted at this boundary only.
Config load_config(const std::string& experiment, const std::string& path);
std::string config_hash(const Config& cfg);

/// Run one experiment end to end (CSV/report files under cfg.out_dir).
/// Returns the process exit status: 0 ok, 2 verification failure, 1 error.
int run_experiment(const Config& cfg);

// ---- building blocks shared with the verification suite ----

struct PencilSolve {
  geometry::Mesh mesh;
  assembly::Assembled assembled;
  assembly::Reduced reduced;
  eigensolve::EigenResult eig;
};

PencilSolve solve_meridian(double theta, int m, double truncation,
                           const MeshConfig& mc, int k, double tol,
                           double shift);

PencilSolve solve_scaled(geometry::Shape shape, double h, double truncation,
                         const MeshConfig& mc, int k, double tol, double shift);

/// Eigenvalue sweep over theta on one shared reference mesh of
/// Omega(pi/4), mapped per angle; the transported discrete spaces make the
/// computed columns exactly non-decreasing in theta.
std::vector<std::vector<double>> sweep_reference(
    const std::vector<double>& theta_rad, double ref_truncation,
    const MeshConfig& mc, int k, double tol, int workers);

struct CountingResult {
  std::vector<double> jumps_E;  // descending
  std::vector<double> mu;       // ascending, the located eigenvalues
  asymptotics::LineFit fit;     // N vs |ln E| at jump midpoints
  int dofs = 0;
  int factorizations = 0;
};

/// Near-threshold jump locations by LDLT inertia bisection in log E.
CountingResult counting_jumps(double theta, double truncation,
                              const MeshConfig& mc, int max_jumps,
                              double E_floor);

void parallel_for(int n, int workers, const std::function<void(int)>& body);

}  // namespace conilay::experiments
