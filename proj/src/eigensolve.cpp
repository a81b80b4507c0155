#include "conilay/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

namespace conilay::eigensolve {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Deterministic standard normals: Box-Muller over mt19937_64 uniforms, so
// results do not depend on the standard library's distribution internals.
class NormalSource {
 public:
  explicit NormalSource(unsigned long long seed) : rng_(seed) {}
  double operator()() {
    if (have_) {
      have_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.28318530717958647692 * u2;
    cached_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform() {
    return (rng_() >> 11) * (1.0 / 9007199254740992.0);
  }
  std::mt19937_64 rng_;
  bool have_ = false;
  double cached_ = 0.0;
};

// B-orthonormalize the columns of W against V (classical Gram-Schmidt,
// applied twice) and internally; rank-deficient directions are replaced
// with fresh random vectors.
void b_orthonormalize(const SpMat& B, const Eigen::MatrixXd& V,
                      const Eigen::MatrixXd& BV, Eigen::MatrixXd& W,
                      NormalSource& noise) {
  const int n = static_cast<int>(W.rows());
  for (int pass = 0; pass < 2; ++pass) {
    if (V.cols() > 0) W.noalias() -= V * (BV.transpose() * W);
  }
  for (int c = 0; c < W.cols(); ++c) {
    for (int attempt = 0; attempt < 5; ++attempt) {
      // orthogonalize against earlier columns of W
      for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < c; ++j) {
          Eigen::VectorXd Bwj = B * W.col(j);
          W.col(c) -= Bwj.dot(W.col(c)) * W.col(j);
        }
        if (V.cols() > 0)
          W.col(c) -= V * (BV.transpose() * W.col(c));
      }
      double nrm = std::sqrt(W.col(c).dot(B * W.col(c)));
      if (nrm > 1e-8) {
        W.col(c) /= nrm;
        break;
      }
      for (int i = 0; i < n; ++i) W(i, c) = noise();
    }
  }
}

}  // namespace

EigenResult smallest_eigenpairs(const assembly::SparseSymmetricMatrix& K,
                                const assembly::SparseSymmetricMatrix& M,
                                int k, double tol, double shift,
                                const SolveOptions& opts) {
  const int n = K.n;
  if (k < 1 || k > n)
    throw std::invalid_argument("smallest_eigenpairs: need 1 <= k <= n");

  SpMat A = K.full();
  SpMat B = M.full();

  Eigen::SimplicialLDLT<SpMat> ldlt;
  double sigma = shift;
  bool ok = false;
  for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
    SpMat C = A - sigma * B;
    ldlt.compute(C);
    ok = ldlt.info() == Eigen::Success;
    bool finite = ok;
    if (ok) {
      for (int i = 0; i < n && finite; ++i)
        if (!std::isfinite(ldlt.vectorD()[i]) || ldlt.vectorD()[i] == 0.0)
          finite = false;
      ok = finite;
    }
    if (!ok) sigma -= std::max(0.01, 0.02 * std::abs(sigma));
  }
  if (!ok)
    throw std::runtime_error(
        "smallest_eigenpairs: factorization failed near shift " +
        std::to_string(shift));

  const int b = std::max(1, std::min(opts.block, n));
  const int max_m =
      std::min(n, opts.max_subspace > 0 ? opts.max_subspace
                                        : std::max(10 * k + 40, 80));
  const int keep_on_restart = std::min(std::max(3 * k + 8, 2 * k + b), max_m - 2 * b);

  NormalSource noise(opts.seed);
  Eigen::MatrixXd V(n, 0), AV(n, 0), BV(n, 0);
  Eigen::MatrixXd W(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) W(i, j) = noise();

  const double normA = A.coeffs().abs().sum() / n;
  const double normB = B.coeffs().abs().sum() / n;

  EigenResult result;
  result.meta.shift = sigma;
  result.meta.seed = opts.seed;

  Eigen::VectorXd ritz_vals;
  Eigen::MatrixXd ritz_vecs;

  auto append_block = [&](Eigen::MatrixXd& Wblk) {
    b_orthonormalize(B, V, BV, Wblk, noise);
    const int m0 = static_cast<int>(V.cols());
    const int nb = static_cast<int>(Wblk.cols());
    V.conservativeResize(Eigen::NoChange, m0 + nb);
    AV.conservativeResize(Eigen::NoChange, m0 + nb);
    BV.conservativeResize(Eigen::NoChange, m0 + nb);
    V.rightCols(nb) = Wblk;
    AV.rightCols(nb) = A * Wblk;
    BV.rightCols(nb) = B * Wblk;
  };

  append_block(W);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    result.meta.iterations = iter + 1;

    // Rayleigh-Ritz on the current basis
    const int m = static_cast<int>(V.cols());
    Eigen::MatrixXd Kp = V.transpose() * AV;
    Kp = 0.5 * (Kp + Kp.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kp);
    ritz_vals = es.eigenvalues();
    ritz_vecs = es.eigenvectors();

    // residuals of the k smallest Ritz pairs
    int kk = std::min(k, m);
    bool converged = (kk == k);
    std::vector<double> res(kk);
    for (int j = 0; j < kk; ++j) {
      Eigen::VectorXd y = ritz_vecs.col(j);
      Eigen::VectorXd r = AV * y - ritz_vals[j] * (BV * y);
      res[j] = r.norm();
      double scale = normA + std::abs(ritz_vals[j]) * normB;
      if (res[j] > tol * scale) converged = false;
    }
    if (converged) {
      result.values.assign(ritz_vals.data(), ritz_vals.data() + k);
      result.vectors = V * ritz_vecs.leftCols(k);
      result.residuals = res;
      return result;
    }

    if (iter + 1 >= opts.max_iter) break;

    // thick restart when the basis is full
    if (m + b > max_m) {
      Eigen::MatrixXd Y = ritz_vecs.leftCols(keep_on_restart);
      V = (V * Y).eval();
      AV = (AV * Y).eval();
      BV = (BV * Y).eval();
    }

    // next block: shift-invert image of the current best Ritz directions
    int mb = static_cast<int>(V.cols());
    Eigen::MatrixXd src = V.rightCols(std::min(b, mb));
    Eigen::MatrixXd Wnext = ldlt.solve(B * src);
    append_block(Wnext);
  }

  // non-convergence: return partial results in the error
  int kk = std::min<int>(k, ritz_vals.size());
  EigenResult partial = result;
  partial.values.assign(ritz_vals.data(), ritz_vals.data() + kk);
  partial.vectors = V * ritz_vecs.leftCols(kk);
  partial.residuals.assign(kk, HUGE_VAL);
  throw ConvergenceError("smallest_eigenpairs: no convergence within " +
                             std::to_string(opts.max_iter) + " block steps",
                         std::move(partial));
}

std::vector<double> dense_oracle(const assembly::SparseSymmetricMatrix& K,
                                 const assembly::SparseSymmetricMatrix& M) {
  if (K.n > 2000)
    throw std::invalid_argument("dense_oracle: dimension cap 2000 exceeded");
  Eigen::MatrixXd A = Eigen::MatrixXd(K.full());
  Eigen::MatrixXd B = Eigen::MatrixXd(M.full());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      A, B, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  std::vector<double> vals(es.eigenvalues().data(),
                           es.eigenvalues().data() + K.n);
  return vals;
}

struct InertiaProber::Impl {
  SpMat A, B;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;
};

InertiaProber::InertiaProber(const assembly::SparseSymmetricMatrix& K,
                             const assembly::SparseSymmetricMatrix& M)
    : impl_(new Impl) {
  impl_->A = K.full();
  impl_->B = M.full();
}

InertiaProber::~InertiaProber() = default;
InertiaProber::InertiaProber(InertiaProber&&) noexcept = default;

int InertiaProber::count_below(double sigma) {
  SpMat C = impl_->A - sigma * impl_->B;
  for (int attempt = 0;; ++attempt) {
    if (!impl_->analyzed) {
      impl_->ldlt.analyzePattern(C);
      impl_->analyzed = true;
    }
    impl_->ldlt.factorize(C);
    ++n_factorizations_;
    if (impl_->ldlt.info() == Eigen::Success) {
      bool clean = true;
      int neg = 0;
      const auto& D = impl_->ldlt.vectorD();
      for (int i = 0; i < D.size(); ++i) {
        if (!std::isfinite(D[i]) || D[i] == 0.0) {
          clean = false;
          break;
        }
        if (D[i] < 0.0) ++neg;
      }
      if (clean) return neg;
    }
    if (attempt >= 3)
      throw std::runtime_error("InertiaProber: factorization failed at " +
                               std::to_string(sigma));
    // nudge off an exact eigenvalue hit
    sigma += (attempt % 2 == 0 ? 1.0 : -1.0) * (1e-11 + 1e-9 * std::abs(sigma));
    C = impl_->A - sigma * impl_->B;
  }
}

int inertia_below(const assembly::SparseSymmetricMatrix& K,
                  const assembly::SparseSymmetricMatrix& M, double sigma) {
  InertiaProber prober(K, M);
  return prober.count_below(sigma);
}

std::vector<double> eigenvalues_in_interval(
    const assembly::SparseSymmetricMatrix& K,
    const assembly::SparseSymmetricMatrix& M, double lo, double hi,
    double tol_abs) {
  InertiaProber prober(K, M);
  std::vector<double> out;
  std::function<void(double, double, int, int)> rec = [&](double a, double b,
                                                          int ca, int cb) {
    if (cb == ca) return;
    if (b - a <= tol_abs) {
      double mid = 0.5 * (a + b);
      for (int i = ca; i < cb; ++i) out.push_back(mid);
      return;
    }
    double mid = 0.5 * (a + b);
    int cm = prober.count_below(mid);
    rec(a, mid, ca, cm);
    rec(mid, b, cm, cb);
  };
  int ca = prober.count_below(lo);
  int cb = prober.count_below(hi);
  rec(lo, hi, ca, cb);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace conilay::eigensolve
