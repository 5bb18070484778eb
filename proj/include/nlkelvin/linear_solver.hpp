#pragma once

#include <span>
#include <vector>

#include "nlkelvin/pair_kernels.hpp"

namespace nlkelvin {

/// Symmetric sparse matrix in CSR form over a contiguous unknown numbering.
struct CsrMatrix {
  int rows = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  kernels::CsrView view() const { return {row_ptr, col, val}; }
  std::vector<double> diagonal() const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// x^T A x
  double quadratic_form(std::span<const double> x) const;
};

struct SolverOptions {
  double rel_tol = 1e-10;
  int max_iters = 20000;
};

struct CgReport {
  int iterations = 0;
  /// ||b - A x|| / ||b|| recomputed from scratch at exit.
  double rel_residual = 0.0;
  std::vector<double> history;
};

/// Jacobi-preconditioned conjugate gradients for an SPD matrix. x holds the
/// initial guess on entry. Throws SolverError (with the residual history) if the
/// true relative residual does not reach opts.rel_tol.
CgReport conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                            const SolverOptions& opts);

/// Smallest eigenpair of A v = lambda * mass * v for SPD A and a positive scalar
/// mass, by inverse iteration with inner CG solves.
struct EigenReport {
  double lambda = 0.0;
  int iterations = 0;
  std::vector<double> vector;
};
EigenReport smallest_eigenpair(const CsrMatrix& a, double mass, const SolverOptions& inner, double rel_tol = 1e-12,
                               int max_iters = 500);

}  // namespace nlkelvin
