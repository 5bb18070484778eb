#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlkelvin/design_opt.hpp"
#include "nlkelvin/fields.hpp"
#include "nlkelvin/geometry.hpp"
#include "nlkelvin/kernel.hpp"
#include "nlkelvin/material.hpp"
#include "nlkelvin/sources.hpp"

namespace nlkelvin {

/// Compactly supported smooth vector field q = (psi, ..., psi) with
/// psi(x) = prod_a (1 - t_a^2)^3, t_a = (x_a - c_a) / r_a, on the box Omega shrunk
/// by `margin` on every side. psi is C^2 and vanishes with its first two
/// derivatives on the support boundary.
struct BumpField {
  Domain domain;
  double margin = 0.1;

  Vec3 value(const Vec3& x) const;
  double divergence(const Vec3& x) const;
  /// Midpoint samples on every cell (zero outside the support).
  VectorCellField sample(const Mesh& mesh) const;
  CellField sample_divergence(const Mesh& mesh) const;
};

/// Least-squares slope of log(error) against log(delta). Entries with a
/// non-positive error are skipped.
double fitted_rate(const std::vector<double>& delta, const std::vector<double>& error);

/// Relative L2 error of R R* e - e over interior cells at distance >= delta from
/// the boundary, for a constant vector e.
double recovery_identity_error(const Discretization& disc, const Vec3& e);

struct ConvergencePoint {
  double delta = 0.0;
  double h = 0.0;
  double error = 0.0;
  /// Value the error is measured against (|div q| or I_loc), for relative reporting.
  double reference = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergencePoint> points;
  double rate = 0.0;
};

/// e(delta) = ||D R* q - div q||_{L2(Omega)} with h = delta / ratio.
ConvergenceStudy recovery_convergence(const BumpField& q, KernelFamily family, const std::vector<double>& deltas,
                                      double ratio = 4.0);

using ScalarFunction = std::function<double(const Vec3&)>;

/// |I(kappa_pair; R* q) - I_loc(kappa; q)| with harmonic pair averaging and both
/// energies evaluated by midpoint quadrature on the same mesh.
ConvergenceStudy energy_convergence(const BumpField& q, const ScalarFunction& kappa, KernelFamily family,
                                    const std::vector<double>& deltas, double ratio = 4.0);

/// I(kappa_pair; q) - I_loc(kappa; R q) under harmonic averaging.
double one_sided_bound(const PairFlux& q, const DesignField& kappa, const Discretization& disc);

struct SweepConfig {
  Domain domain = Domain::unit(2);
  std::vector<double> deltas{0.4, 0.2, 0.1};
  double ratio = 4.0;
  KernelFamily family = KernelFamily::TruncatedTent;
  MaterialBounds bounds;
  SourceSpec source;
  OptimizerConfig optimizer;
  SolverOptions solver;
  double bump_margin = 0.1;
};

struct SweepRecord {
  double delta = 0.0;
  double h = 0.0;
  double d_delta = 0.0;
  double p_delta = 0.0;
  double d_star_local = 0.0;
  double infsup = 0.0;
  double stability_ratio = 0.0;
  double recovery_div_err = 0.0;
  double recovery_energy_err = 0.0;
  double poincare_const = 0.0;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  /// False when a run failed; records then hold the entries finished before it.
  bool complete = true;
  std::string failure;
};

/// Throws ConfigError unless deltas are strictly decreasing and ratio >= 4.
void validate_sweep(const SweepConfig& cfg);

/// Per delta: optimal nonlocal design, inf-sup and Poincare constants, stability of
/// the optimal state, the local optimal value at the same h, and the bump-field
/// recovery errors (divergence and relative energy).
SweepResult delta_sweep(const SweepConfig& cfg);

}  // namespace nlkelvin
