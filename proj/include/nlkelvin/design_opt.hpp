#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlkelvin/fields.hpp"
#include "nlkelvin/geometry.hpp"
#include "nlkelvin/linear_solver.hpp"
#include "nlkelvin/material.hpp"
#include "nlkelvin/sources.hpp"

namespace nlkelvin {

/// Minimizes sum_i m_i / kappa_i * cell_measure subject to
/// kappa_min <= kappa_i <= kappa_max and sum_i kappa_i * cell_measure <= budget.
/// The minimizer is kappa_i = clamp(t sqrt(m_i)) with one scalar t >= 0; cells with
/// m_i = 0 get kappa_min. Throws InternalError if the volume cannot be matched.
std::vector<double> water_fill(std::span<const double> m, double cell_measure, double budget,
                               const MaterialBounds& bounds);

/// Design step of the alternating scheme: water_fill on interior cells with budget
/// gamma |Omega|; collar cells get kappa_max.
DesignField kappa_subproblem(const CellField& m, const MaterialBounds& bounds, const Mesh& mesh);

/// Row energies m_i = h^n sum_j q_ij^2 over every cell. Under harmonic averaging
/// 0.5 (kappa_pair^{-1} q, q) = 0.5 sum_i m_i / kappa_i h^n.
CellField row_energies(const PairFlux& q, const Discretization& disc);

/// 0.5 sum_i m_i / kappa_i h^n over every cell.
double design_energy(const CellField& m, const DesignField& kappa, const Mesh& mesh);

struct OptimizerConfig {
  int max_iters = 200;
  double rel_tol = 1e-7;
  SolverOptions solver{1e-12, 20000};
};

struct DesignResult {
  DesignField kappa_opt;
  PairFlux flux_opt;
  CellField u_opt;
  double d_value = 0.0;
  double p_value = 0.0;
  /// Number of flux solves.
  int iterations = 0;
  bool converged = false;
  /// Objective after every flux and every design step, in order.
  std::vector<double> descent_history;
  double volume_slack = 0.0;
};

/// Alternating minimization of the dual design problem under harmonic averaging.
/// Starts from `init` when given, else from kappa = gamma. Ends on a flux step, so
/// d_value = -min_u I(kappa_opt; u).
DesignResult optimize_design(const Discretization& disc, const SourceField& f, const MaterialBounds& bounds,
                             const OptimizerConfig& cfg = {}, const DesignField* init = nullptr);

struct SaddleReport {
  double primal_value = 0.0;
  /// |I(kappa_opt) + d_value| / max(1, |d_value|)
  double value_mismatch = 0.0;
  /// Largest min_u I(kappa') - min_u I(kappa_opt) over the probes.
  double max_ascent = 0.0;
  int probes = 0;
  bool ok = false;
  std::string message;
};

/// Re-solves the primal at kappa_opt and at random admissible convex combinations
/// of kappa_opt, checking that none of them raises min_u I above tolerance.
SaddleReport verify_saddle(const Discretization& disc, const SourceField& f, const DesignResult& result,
                           int n_probes, std::uint64_t seed = 1, double tol = 1e-7,
                           const SolverOptions& solver = {1e-12, 20000});

}  // namespace nlkelvin
