#pragma once

#include "hemofem/common.hpp"

#include <memory>
#include <vector>

namespace hemofem::la {

// Low-rank augmentation sum_{l,m} sigma(l,m) u_l v_m^T, stored as factors.
// The vectors are never densified into the sparse matrix; they enter through
// the operator product and the preconditioner.
struct LowRank {
  Mat U;      // n x r, columns u_l
  Mat V;      // n x r, columns v_m
  Mat sigma;  // r x r scale factors

  bool empty() const { return U.cols() == 0; }
  int rank() const { return static_cast<int>(U.cols()); }
};

// A + sum sigma_lm u_l v_m^T acting by matrix-vector products.
struct SparseOperator {
  const SparseMat* A = nullptr;
  const LowRank* lowrank = nullptr;

  int rows() const { return static_cast<int>(A->rows()); }
  Vec apply(const Vec& x) const {
    Vec y = (*A) * x;
    if (lowrank && !lowrank->empty())
      y.noalias() += lowrank->U * (lowrank->sigma * (lowrank->V.transpose() * x));
    return y;
  }
};

enum class PrecondKind { None, BlockJacobi, Ilu };

struct SolverOptions {
  double rel_tol = 1e-10;
  int max_iters = 2000;
  int restart = 100;
  PrecondKind precond = PrecondKind::Ilu;
  double ilu_drop_tol = 1e-4;
  int ilu_fill = 60;
  int block_size = 3;  // nodal blocks for BlockJacobi
};

struct SolveReport {
  int iters = 0;
  double rel_residual = 0.0;
};

// Right-preconditioned restarted GMRES on the augmented operator. The
// preconditioner approximates the sparse part; the low-rank term is folded
// in exactly via the Woodbury identity around it, which keeps the iteration
// count insensitive to large interface resistances. Throws SolveError (with
// the residual history) on breakdown or stagnation.
SolveReport solve(const SparseOperator& op, const Vec& rhs, Vec& x,
                  const SolverOptions& opts);

}  // namespace hemofem::la
