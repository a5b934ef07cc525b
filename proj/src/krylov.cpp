#include "hemofem/linalg.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>

namespace hemofem::la {

namespace {

struct Preconditioner {
  virtual ~Preconditioner() = default;
  virtual Vec apply(const Vec& v) const = 0;
};

struct IdentityPrecond final : Preconditioner {
  Vec apply(const Vec& v) const override { return v; }
};

struct BlockJacobiPrecond final : Preconditioner {
  std::vector<Mat3> inv_blocks;

  explicit BlockJacobiPrecond(const SparseMat& A, int bs) {
    if (bs != 3) throw SolveError("block-Jacobi preconditioner supports 3x3 blocks");
    const int nb = static_cast<int>(A.rows()) / 3;
    std::vector<Mat3> blocks(static_cast<std::size_t>(nb), Mat3::Zero());
    for (int k = 0; k < A.outerSize(); ++k) {
      for (SparseMat::InnerIterator it(A, k); it; ++it) {
        const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
        if (r / 3 == c / 3) blocks[static_cast<std::size_t>(r / 3)](r % 3, c % 3) = it.value();
      }
    }
    inv_blocks.resize(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Eigen::FullPivLU<Mat3> lu(blocks[b]);
      if (!lu.isInvertible()) {
        // fall back to a scaled identity on a degenerate block
        const double d = std::max(blocks[b].diagonal().cwiseAbs().maxCoeff(), 1e-300);
        inv_blocks[b] = Mat3::Identity() / d;
      } else {
        inv_blocks[b] = lu.inverse();
      }
    }
  }

  Vec apply(const Vec& v) const override {
    Vec y(v.size());
    for (std::size_t b = 0; b < inv_blocks.size(); ++b)
      y.segment<3>(static_cast<Eigen::Index>(3 * b)) =
          inv_blocks[b] * v.segment<3>(static_cast<Eigen::Index>(3 * b));
    return y;
  }
};

struct IluPrecond final : Preconditioner {
  Eigen::IncompleteLUT<double> ilu;

  IluPrecond(const SparseMat& A, double droptol, int fill) {
    ilu.setDroptol(droptol);
    ilu.setFillfactor(fill);
    ilu.compute(A);
    if (ilu.info() != Eigen::Success)
      throw SolveError("incomplete LU factorization failed");
  }

  Vec apply(const Vec& v) const override { return ilu.solve(v); }
};

// Woodbury correction of a sparse-part preconditioner P for A + U sigma V^T:
//   M^{-1} v = P^{-1} v - P^{-1} U (I + sigma V^T P^{-1} U)^{-1} sigma V^T P^{-1} v
struct WoodburyPrecond final : Preconditioner {
  const Preconditioner& base;
  const LowRank& lr;
  Mat W;                              // P^{-1} U
  Eigen::PartialPivLU<Mat> small_lu;  // I + sigma V^T W

  WoodburyPrecond(const Preconditioner& base_, const LowRank& lr_)
      : base(base_), lr(lr_) {
    const int r = lr.rank();
    W.resize(lr.U.rows(), r);
    for (int j = 0; j < r; ++j) W.col(j) = base.apply(lr.U.col(j));
    const Mat small = Mat::Identity(r, r) + lr.sigma * (lr.V.transpose() * W);
    small_lu.compute(small);
  }

  Vec apply(const Vec& v) const override {
    Vec y = base.apply(v);
    y.noalias() -= W * small_lu.solve(lr.sigma * (lr.V.transpose() * y));
    return y;
  }
};

}  // namespace

SolveReport solve(const SparseOperator& op, const Vec& rhs, Vec& x,
                  const SolverOptions& opts) {
  const int n = op.rows();
  if (rhs.size() != n) throw SolveError("solve: rhs dimension mismatch");
  if (!rhs.allFinite()) throw SolveError("solve: rhs contains non-finite entries");
  if (x.size() != n) x = Vec::Zero(n);

  std::unique_ptr<Preconditioner> sparse_precond;
  switch (opts.precond) {
    case PrecondKind::None:
      sparse_precond = std::make_unique<IdentityPrecond>();
      break;
    case PrecondKind::BlockJacobi:
      sparse_precond = std::make_unique<BlockJacobiPrecond>(*op.A, opts.block_size);
      break;
    case PrecondKind::Ilu:
      sparse_precond = std::make_unique<IluPrecond>(*op.A, opts.ilu_drop_tol, opts.ilu_fill);
      break;
  }
  std::unique_ptr<Preconditioner> woodbury;
  const Preconditioner* M = sparse_precond.get();
  if (op.lowrank && !op.lowrank->empty()) {
    woodbury = std::make_unique<WoodburyPrecond>(*sparse_precond, *op.lowrank);
    M = woodbury.get();
  }

  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    x.setZero();
    return {0, 0.0};
  }
  const double target = opts.rel_tol * bnorm;

  std::vector<double> history;
  int total_iters = 0;
  Vec r = rhs - op.apply(x);
  double rnorm = r.norm();
  history.push_back(rnorm / bnorm);

  const int m = std::max(1, opts.restart);
  Mat V(n, m + 1);
  Mat H = Mat::Zero(m + 1, m);
  Mat Z(n, m);  // preconditioned Krylov vectors
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
  Vec beta_vec(m + 1);

  while (rnorm > target && total_iters < opts.max_iters) {
    V.col(0) = r / rnorm;
    beta_vec.setZero();
    beta_vec[0] = rnorm;
    int k = 0;
    for (; k < m && total_iters < opts.max_iters; ++k, ++total_iters) {
      Z.col(k) = M->apply(V.col(k));
      Vec w = op.apply(Z.col(k));
      for (int i = 0; i <= k; ++i) {
        H(i, k) = w.dot(V.col(i));
        w.noalias() -= H(i, k) * V.col(i);
      }
      H(k + 1, k) = w.norm();
      if (H(k + 1, k) > 1e-300) V.col(k + 1) = w / H(k + 1, k);

      // apply stored Givens rotations, then form a new one
      for (int i = 0; i < k; ++i) {
        const double t = cs[static_cast<std::size_t>(i)] * H(i, k) +
                         sn[static_cast<std::size_t>(i)] * H(i + 1, k);
        H(i + 1, k) = -sn[static_cast<std::size_t>(i)] * H(i, k) +
                      cs[static_cast<std::size_t>(i)] * H(i + 1, k);
        H(i, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      if (denom < 1e-300) {
        ++k;
        break;
      }
      cs[static_cast<std::size_t>(k)] = H(k, k) / denom;
      sn[static_cast<std::size_t>(k)] = H(k + 1, k) / denom;
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      beta_vec[k + 1] = -sn[static_cast<std::size_t>(k)] * beta_vec[k];
      beta_vec[k] = cs[static_cast<std::size_t>(k)] * beta_vec[k];
      rnorm = std::abs(beta_vec[k + 1]);
      history.push_back(rnorm / bnorm);
      if (rnorm <= target) {
        ++k;
        break;
      }
    }
    // back substitution for the inner solution
    Vec y = Vec::Zero(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = beta_vec[i];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
      y[i] = s / H(i, i);
    }
    x.noalias() += Z.leftCols(k) * y;
    r = rhs - op.apply(x);
    rnorm = r.norm();

    if (rnorm > target && history.size() > 20) {
      // stagnation guard: no meaningful progress across the last restart
      const double prev = history[history.size() - static_cast<std::size_t>(std::min<int>(20, k + 1))];
      if (rnorm / bnorm > 0.999 * prev && total_iters >= opts.max_iters / 2)
        throw SolveError("linear solver stagnated at relative residual " +
                             std::to_string(rnorm / bnorm),
                         history);
    }
  }

  if (rnorm > target)
    throw SolveError("linear solver did not reach tolerance: " +
                         std::to_string(rnorm / bnorm) + " after " +
                         std::to_string(total_iters) + " iterations",
                     history);
  return {total_iters, rnorm / bnorm};
}

}  // namespace hemofem::la
