#pragma once

#include <vector>

#include "nlkelvin/fields.hpp"
#include "nlkelvin/geometry.hpp"
#include "nlkelvin/pair_kernels.hpp"

namespace nlkelvin {

/// Discrete nonlocal calculus under cell-centre (midpoint) quadrature.
///
/// Inner products:
///   cells of Omega:   (u, v)   = sum_{i in Omega} u_i v_i h^n
///   vector fields:    (v, w)   = sum_{i in Omega_delta} v_i . w_i h^n
///   pairs:            (q, p)   = 2 sum_{i<j} q_ij p_ij h^{2n}
/// The divergence is the exact negative adjoint of the gradient under these
/// products, so (D q, u) + (q, G u) = 0 holds to rounding for every u vanishing
/// on the collar.

kernels::PairTopology topology(const PairList& pairs);

/// (G u)_ij = (u_i - u_j) omega_ij.
PairFlux apply_gradient(const CellField& u, const PairList& pairs);

/// (D q)_i = -2 h^n sum_j q(x_i, x_j) omega_ij on interior cells, zero on the collar.
CellField apply_divergence(const PairFlux& q, const PairList& pairs, const Mesh& mesh);

/// (R q)_i = h^n sum_j (x_i - x_j) q(x_i, x_j) omega_ij on every cell.
VectorCellField flux_recovery(const PairFlux& q, const PairList& pairs, const Mesh& mesh);

/// (R* v)_ij = 0.5 (v_i + v_j) . (x_i - x_j) omega_ij.
PairFlux adjoint_recovery(const VectorCellField& v, const PairList& pairs);

/// Pair-space inner product; throws StructuralError for fields of different pair lists.
double pair_inner(const PairFlux& q, const PairFlux& p, const Mesh& mesh);
double pair_norm(const PairFlux& q, const Mesh& mesh);

/// L2(Omega) inner product over interior cells.
double cell_inner(const CellField& u, const CellField& v, const Mesh& mesh);
double cell_norm(const CellField& u, const Mesh& mesh);

/// L2 inner product of vector fields over interior cells only, or over all cells.
double vector_inner(const VectorCellField& a, const VectorCellField& b, const Mesh& mesh, Support over);

/// Dense two-point array on a small mesh: values[i * num_cells + j] = q(x_i, x_j).
struct DenseTwoPoint {
  std::size_t num_cells = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * num_cells + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * num_cells + j]; }
};

/// Antisymmetric part (q(x,x') - q(x',x))/2 packed on the pairs.
PairFlux antisymmetrize(const DenseTwoPoint& raw, const PairList& pairs);

/// Divergence of an unconstrained two-point field:
/// (D q)_i = h^n sum_j [q(x_j, x_i) - q(x_i, x_j)] omega_ij over interacting j.
CellField apply_divergence_dense(const DenseTwoPoint& raw, const PairList& pairs, const Mesh& mesh);

}  // namespace nlkelvin
