#pragma once

#include <vector>

#include "nlkelvin/design_opt.hpp"
#include "nlkelvin/fields.hpp"
#include "nlkelvin/geometry.hpp"
#include "nlkelvin/linear_solver.hpp"
#include "nlkelvin/material.hpp"
#include "nlkelvin/sources.hpp"

namespace nlkelvin {

/// Classical diffusion -div(kappa grad u) = f, u = 0 on the boundary of Omega,
/// discretized by cell-centred finite differences on the interior cells of a Mesh.
/// Interior faces use the harmonic mean of the two cell conductivities; boundary
/// faces use the cell value over the half-cell distance h/2.

/// One face of the finite-difference grid. `second` is -1 on the boundary, where
/// `side` tells whether the face lies on the +axis or -axis side of `first`.
struct LocalFace {
  int first = 0;
  int second = -1;
  int axis = 0;
  int side = 1;
};

std::vector<LocalFace> local_faces(const Mesh& mesh);

struct LocalSolution {
  CellField u;
  /// Normal flux -kappa du/dx_axis per face, oriented along +axis.
  std::vector<double> face_flux;
  /// Face fluxes averaged to cell centres. Collar cells next to a boundary face
  /// carry the ghost value 2 q_face - q_cell in the normal component, so centred
  /// differences see the boundary flux.
  VectorCellField flux;
  /// Face-based energy weights m_i = 0.5 sum_{faces of i} q_f^2, so that the
  /// complementary energy is exactly 0.5 sum_i m_i / kappa_i h^n.
  CellField m;
  double I_loc_primal = 0.0;
  double I_loc_dual = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

LocalSolution solve_local(const Mesh& mesh, const DesignField& kappa, const SourceField& f,
                          const SolverOptions& opts = {}, const CellField* warm_start = nullptr);

/// 0.5 sum_{i in Omega} |q_i|^2 / kappa_i h^n.
double local_kelvin_energy(const VectorCellField& q, const DesignField& kappa, const Mesh& mesh);

/// ||div_h q - f||_{L2(Omega)} with centred differences over neighbouring cells.
double divergence_residual(const VectorCellField& q, const SourceField& f, const Mesh& mesh);

struct LocalDesignResult {
  DesignField kappa;
  double d_star = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> descent_history;
  LocalSolution solution;
};

/// Same alternating scheme as optimize_design with the finite-difference flux step.
LocalDesignResult optimize_local_design(const Mesh& mesh, const SourceField& f, const MaterialBounds& bounds,
                                        const OptimizerConfig& cfg = {}, const DesignField* init = nullptr);

}  // namespace nlkelvin
