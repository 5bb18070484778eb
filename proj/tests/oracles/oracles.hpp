#pragma once
// Independent reference computations for the test suites. Everything here works
// from mesh centres and the kernel formula directly: pairs are re-enumerated by
// brute force and systems are solved with dense Eigen factorizations.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "nlkelvin/geometry.hpp"
#include "nlkelvin/material.hpp"
#include "nlkelvin/sources.hpp"

namespace oracle {

using nlkelvin::Discretization;
using nlkelvin::Mesh;

struct Pair {
  int i;
  int j;
  double omega;
};

/// All unordered interacting pairs i < j, found by testing every cell pair.
std::vector<Pair> brute_force_pairs(const Discretization& disc);

double averaged(double a, double b, nlkelvin::AveragingScheme scheme);

struct PrimalResult {
  Eigen::VectorXd u;  // interior unknowns, interior_cells() order
  double energy = 0.0;
};

/// Dense LU solve of the nonlocal Dirichlet problem.
PrimalResult dense_primal(const Discretization& disc, const std::vector<double>& kappa, const std::vector<double>& f,
                          nlkelvin::AveragingScheme scheme);

struct KktResult {
  std::vector<Pair> pairs;
  Eigen::VectorXd q;  // one value per pair, oriented i -> j
  Eigen::VectorXd u;  // multiplier on interior cells
  double energy = 0.0;
};

/// Dense solve of [W, -B^T M; B, 0] [q; u] = [0; f] over unordered pairs.
KktResult dense_kkt(const Discretization& disc, const std::vector<double>& kappa, const std::vector<double>& f,
                    nlkelvin::AveragingScheme scheme);

struct OrderedKktResult {
  std::vector<std::pair<int, int>> ordered;  // (i, j) for every ordered interacting pair
  Eigen::VectorXd q;
  double energy = 0.0;
};

/// Flux problem with q(x_i, x_j) and q(x_j, x_i) as independent unknowns.
OrderedKktResult ordered_pair_kkt(const Discretization& disc, const std::vector<double>& kappa,
                                  const std::vector<double>& f, nlkelvin::AveragingScheme scheme);

/// Smallest eigenvalue of B M_Q^{-1} B^T relative to M, with M_Q = P + B^T M B
/// assembled explicitly; returns its square root.
double dense_infsup(const Discretization& disc);

/// Minimum compliance 0.5 F.u(kappa) over the admissible set by accelerated
/// projected gradient (harmonic pair averaging).
double projected_gradient_design(const Discretization& disc, const std::vector<double>& f,
                                 const nlkelvin::MaterialBounds& bounds, int max_iters = 20000, double tol = 1e-12);

/// Same for the finite-difference problem (harmonic face averaging, half-cell boundary faces).
double projected_gradient_local_design(const Mesh& mesh, const std::vector<double>& f,
                                       const nlkelvin::MaterialBounds& bounds, int max_iters = 20000,
                                       double tol = 1e-12);

/// min sum m_i / kappa_i over kappa_i in {kappa_min + k * step} with sum kappa_i <= budget,
/// by dynamic programming over the discretized volume.
double grid_water_fill(const std::vector<double>& m, double budget, const nlkelvin::MaterialBounds& bounds,
                       double step = 1e-3);

/// Midpoint-rule value of int |z|^2 w(|z|)^2 dz over a Cartesian grid of the ball.
double cartesian_second_moment(const std::function<double(double)>& radial, double delta, int dim, int cells);

}  // namespace oracle
