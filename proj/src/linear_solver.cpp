#include "nlkelvin/linear_solver.hpp"

#include <cmath>
#include <sstream>

#include "nlkelvin/errors.hpp"

namespace nlkelvin {

namespace k = kernels::omp;

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      if (col[p] == r) d[r] += val[p];
    }
  }
  return d;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const { k::csr_matvec(view(), x, y); }

double CsrMatrix::quadratic_form(std::span<const double> x) const {
  std::vector<double> y(rows);
  multiply(x, y);
  return k::dot(x, y);
}

namespace {

double true_residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x,
                     std::vector<double>& r) {
  a.multiply(x, r);
  for (int i = 0; i < a.rows; ++i) r[i] = b[i] - r[i];
  return std::sqrt(k::dot(r, r));
}

}  // namespace

CgReport conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                            const SolverOptions& opts) {
  const int n = a.rows;
  CgReport report;
  const double bnorm = std::sqrt(k::dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.history.push_back(0.0);
    return report;
  }

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw StructuralError("stiffness matrix has a non-positive diagonal entry");
    d = 1.0 / d;
  }
  std::vector<double> r(n), z(n), p(n), ap(n);

  // The recursive residual drifts from the true one; restart from the true
  // residual until it also meets the tolerance.
  constexpr int kRestarts = 4;
  double rel = true_residual(a, b, x, r) / bnorm;
  report.history.push_back(rel);
  for (int restart = 0; restart <= kRestarts && rel > opts.rel_tol; ++restart) {
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = k::dot(r, z);
    while (report.iterations < opts.max_iters) {
      a.multiply(p, ap);
      const double alpha = rz / k::dot(p, ap);
      k::axpy(alpha, p, x);
      k::axpy(-alpha, ap, r);
      ++report.iterations;
      rel = std::sqrt(k::dot(r, r)) / bnorm;
      report.history.push_back(rel);
      if (rel <= 0.5 * opts.rel_tol) break;
      for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_next = k::dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rel = true_residual(a, b, x, r) / bnorm;
    if (report.iterations >= opts.max_iters) break;
  }
  report.rel_residual = rel;
  if (!(rel <= opts.rel_tol)) {
    std::ostringstream msg;
    msg << "conjugate gradients stopped at relative residual " << rel << " after " << report.iterations
        << " iterations (tolerance " << opts.rel_tol << ")";
    throw SolverError(msg.str(), report.history);
  }
  return report;
}

EigenReport smallest_eigenpair(const CsrMatrix& a, double mass, const SolverOptions& inner, double rel_tol,
                               int max_iters) {
  const int n = a.rows;
  EigenReport report;
  std::vector<double> v(n, 1.0), w(n, 0.0), av(n);
  auto normalize = [&](std::vector<double>& x) {
    const double s = std::sqrt(mass * k::dot(x, x));
    for (double& e : x) e /= s;
  };
  normalize(v);
  double lambda = a.quadratic_form(v);
  std::vector<double> history{lambda};
  for (int it = 1; it <= max_iters; ++it) {
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = mass * v[i];
    w = v;  // warm start: v is already close to an eigenvector of A^{-1}
    for (double& e : w) e /= lambda;
    conjugate_gradient(a, rhs, w, inner);
    normalize(w);
    v.swap(w);
    const double next = a.quadratic_form(v);
    history.push_back(next);
    report.iterations = it;
    if (std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      lambda = next;
      report.lambda = lambda;
      report.vector = std::move(v);
      return report;
    }
    lambda = next;
  }
  throw SolverError("inverse iteration did not converge", history);
}

}  // namespace nlkelvin
