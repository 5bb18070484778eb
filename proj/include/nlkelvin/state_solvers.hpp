#pragma once

#include <optional>

#include "nlkelvin/fields.hpp"
#include "nlkelvin/geometry.hpp"
#include "nlkelvin/linear_solver.hpp"
#include "nlkelvin/material.hpp"
#include "nlkelvin/sources.hpp"

namespace nlkelvin {

/// Stiffness of the nonlocal Dirichlet form on interior unknowns (numbered by
/// Mesh::interior_index), with u = 0 on the collar:
///   u^T A u = 2 sum_{i<j} kappa_ij omega_ij^2 (u_i - u_j)^2 h^{2n}.
/// Interior-collar pairs contribute to the diagonal only.
CsrMatrix assemble_stiffness(const SymPairField& kappa_pair, const PairList& pairs, const Mesh& mesh);

/// l(v) = sum_i f_i v_i h^n on interior unknowns.
std::vector<double> load_vector(const SourceField& f, const Mesh& mesh);

struct StateResiduals {
  /// ||A u - F|| / ||F|| of the primal system.
  double linear_solve = 0.0;
  /// ||D q - f||_{L2(Omega)}; zero for primal-only solves.
  double constraint = 0.0;
};

struct StateSolution {
  CellField u;
  std::optional<PairFlux> q;
  /// Primal energy 0.5 a(u,u) - l(u).
  double energy_primal = 0.0;
  /// Complementary energy 0.5 (kappa^{-1} q, q); set by dual solves.
  double energy_dual = 0.0;
  StateResiduals residuals;
  int iterations = 0;
};

/// warm_start, if given, seeds CG with its interior values.
StateSolution solve_primal(const Discretization& disc, const DesignField& kappa, const SourceField& f,
                           AveragingScheme scheme, const SolverOptions& opts = {},
                           const CellField* warm_start = nullptr);

/// Mixed (Kelvin) solve by reduction: the primal solution u is the multiplier of
/// the flux problem and q = -kappa_pair * G u. The divergence constraint is then
/// checked independently; a residual above opts.rel_tol * ||f|| (plus rounding
/// slack) throws SolverError.
StateSolution solve_kelvin(const Discretization& disc, const DesignField& kappa, const SourceField& f,
                           AveragingScheme scheme, const SolverOptions& opts = {},
                           const CellField* warm_start = nullptr);

/// Throws StructuralError unless every interior cell reaches the collar through
/// the pair graph, which is equivalent to the divergence having full row rank.
void require_full_rank(const Mesh& mesh, const PairList& pairs);

/// 0.5 (kappa_pair^{-1} q, q) under the pair inner product.
double complementary_energy(const PairFlux& q, const SymPairField& kappa_pair, const Mesh& mesh);

struct InfSupReport {
  double beta = 0.0;
  /// Smallest eigenvalue of the unit-conductivity stiffness relative to the L2(Omega) mass.
  double lambda_min = 0.0;
  /// Discrete Poincare constant: ||u|| <= C ||G u|| for u vanishing on the collar.
  double poincare = 0.0;
  int iterations = 0;
};

/// Discrete inf-sup constant of the divergence with ||q||_Q^2 = ||q||^2 + ||D q||^2.
/// Since D = -G^*, the Schur operator B M_Q^{-1} B^T reduces to K (M + K)^{-1}
/// relative to the mass M, with K the unit-conductivity stiffness, so
/// beta = sqrt(lambda / (1 + lambda)) for the smallest eigenvalue lambda of K
/// relative to M.
InfSupReport infsup_constant(const Mesh& mesh, const PairList& pairs, const SolverOptions& opts = {});

/// (||q||_Q + ||u||) / ||f||, or 0 when f vanishes.
double stability_check(const StateSolution& solution, const SourceField& f, const Discretization& disc);

}  // namespace nlkelvin
