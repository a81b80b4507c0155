#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <stdexcept>
#include <vector>

#include "conilay/assembly.hpp"

namespace conilay::eigensolve {

struct EigenResult {
  std::vector<double> values;     // ascending
  Eigen::MatrixXd vectors;        // columns, M-orthonormal
  std::vector<double> residuals;  // ||K x - lambda M x|| / ||x||_M
  struct Meta {
    int iterations = 0;
    double shift = 0.0;
    unsigned long long seed = 0;
  } meta;
};

struct SolveOptions {
  int block = 4;
  int max_subspace = 0;  // 0: automatic
  int max_iter = 400;    // block steps
  unsigned long long seed = 0x9E3779B97F4A7C15ULL;
};

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& msg, EigenResult partial_result)
      : std::runtime_error(msg), partial(std::move(partial_result)) {}
  EigenResult partial;
};

/// k algebraically smallest eigenpairs of K x = lambda M x by shift-invert
/// block Lanczos (full M-reorthogonalization, thick restart) on a sparse
/// LDLT factorization of K - shift*M. Deterministic for a fixed seed.
EigenResult smallest_eigenpairs(const assembly::SparseSymmetricMatrix& K,
                                const assembly::SparseSymmetricMatrix& M,
                                int k, double tol = 1e-10, double shift = 0.0,
                                const SolveOptions& opts = {});

/// Full spectrum through dense reduction; dimension capped at 2000.
/// Test/oracle path only.
std::vector<double> dense_oracle(const assembly::SparseSymmetricMatrix& K,
                                 const assembly::SparseSymmetricMatrix& M);

/// Repeated-factorization inertia counts: number of pencil eigenvalues
/// strictly below sigma, via the sign pattern of D in LDL^T of K - sigma M.
/// The symbolic analysis is shared across shifts.
class InertiaProber {
 public:
  InertiaProber(const assembly::SparseSymmetricMatrix& K,
                const assembly::SparseSymmetricMatrix& M);
  ~InertiaProber();
  InertiaProber(InertiaProber&&) noexcept;

  int count_below(double sigma);
  int factorization_count() const { return n_factorizations_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_factorizations_ = 0;
};

int inertia_below(const assembly::SparseSymmetricMatrix& K,
                  const assembly::SparseSymmetricMatrix& M, double sigma);

/// All pencil eigenvalues in (lo, hi] located by inertia bisection to the
/// requested absolute tolerance. Values only, no vectors.
std::vector<double> eigenvalues_in_interval(
    const assembly::SparseSymmetricMatrix& K,
    const assembly::SparseSymmetricMatrix& M, double lo, double hi,
    double tol_abs = 1e-10);

}  // namespace conilay::eigensolve
