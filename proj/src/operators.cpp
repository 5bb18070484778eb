#include "nlkelvin/operators.hpp"

#include <cmath>

#include "nlkelvin/errors.hpp"

namespace nlkelvin {

namespace {

void require_same_list(std::uint64_t a, std::uint64_t b) {
  if (a != b) throw StructuralError("pair fields belong to different pair lists");
}

void require_pairs(const PairList& pairs, std::uint64_t id, std::size_t size) {
  if (pairs.id() != id || pairs.size() != size) throw StructuralError("pair field does not match the pair list");
}

void require_cells(const Mesh& mesh, std::size_t size) {
  if (mesh.num_cells() != size) throw StructuralError("cell field does not match the mesh");
}

}  // namespace

kernels::PairTopology topology(const PairList& pairs) {
  return kernels::PairTopology{pairs.first(),         pairs.second(),         pairs.omega(),
                               pairs.offsets(),       pairs.adjacency_ptr(),  pairs.adjacency_pair(),
                               pairs.adjacency_sign(), pairs.dim()};
}

PairFlux apply_gradient(const CellField& u, const PairList& pairs) {
  if (u.values.size() != pairs.num_cells()) throw StructuralError("cell field does not match the pair list");
  PairFlux out(pairs);
  kernels::omp::gradient(topology(pairs), u.values, out.values);
  return out;
}

CellField apply_divergence(const PairFlux& q, const PairList& pairs, const Mesh& mesh) {
  require_pairs(pairs, q.list_id, q.size());
  CellField out = CellField::zeros(mesh, Support::Interior);
  kernels::omp::divergence(topology(pairs), q.values, -2.0 * mesh.cell_measure(), out.values);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    if (!mesh.is_interior(static_cast<int>(c))) out.values[c] = 0.0;
  }
  return out;
}

VectorCellField flux_recovery(const PairFlux& q, const PairList& pairs, const Mesh& mesh) {
  require_pairs(pairs, q.list_id, q.size());
  VectorCellField out = VectorCellField::zeros(mesh, Support::AllCells);
  kernels::omp::recovery(topology(pairs), q.values, mesh.cell_measure(), out.values);
  return out;
}

PairFlux adjoint_recovery(const VectorCellField& v, const PairList& pairs) {
  if (v.values.size() != 3 * pairs.num_cells()) throw StructuralError("vector field does not match the pair list");
  PairFlux out(pairs);
  kernels::omp::adjoint_recovery(topology(pairs), v.values, out.values);
  return out;
}

double pair_inner(const PairFlux& q, const PairFlux& p, const Mesh& mesh) {
  require_same_list(q.list_id, p.list_id);
  if (q.size() != p.size()) throw StructuralError("pair fields differ in length");
  const double w = 2.0 * mesh.cell_measure() * mesh.cell_measure();
  return w * kernels::omp::dot(q.values, p.values);
}

double pair_norm(const PairFlux& q, const Mesh& mesh) { return std::sqrt(pair_inner(q, q, mesh)); }

double cell_inner(const CellField& u, const CellField& v, const Mesh& mesh) {
  require_cells(mesh, u.values.size());
  require_cells(mesh, v.values.size());
  const auto interior = mesh.interior_cells();
  std::vector<double> a(interior.size()), b(interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) {
    a[k] = u.values[interior[k]];
    b[k] = v.values[interior[k]];
  }
  return mesh.cell_measure() * kernels::omp::dot(a, b);
}

double cell_norm(const CellField& u, const Mesh& mesh) { return std::sqrt(cell_inner(u, u, mesh)); }

double vector_inner(const VectorCellField& a, const VectorCellField& b, const Mesh& mesh, Support over) {
  require_cells(mesh, a.values.size() / 3);
  require_cells(mesh, b.values.size() / 3);
  if (over == Support::AllCells) return mesh.cell_measure() * kernels::omp::dot(a.values, b.values);
  const auto interior = mesh.interior_cells();
  std::vector<double> x(3 * interior.size()), y(3 * interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) {
    for (int c = 0; c < 3; ++c) {
      x[3 * k + c] = a.values[3 * interior[k] + c];
      y[3 * k + c] = b.values[3 * interior[k] + c];
    }
  }
  return mesh.cell_measure() * kernels::omp::dot(x, y);
}

PairFlux antisymmetrize(const DenseTwoPoint& raw, const PairList& pairs) {
  if (raw.num_cells != pairs.num_cells()) throw StructuralError("dense two-point array does not match the pairs");
  PairFlux out(pairs);
  const auto first = pairs.first();
  const auto second = pairs.second();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    out.values[p] = 0.5 * (raw(first[p], second[p]) - raw(second[p], first[p]));
  }
  return out;
}

CellField apply_divergence_dense(const DenseTwoPoint& raw, const PairList& pairs, const Mesh& mesh) {
  if (raw.num_cells != mesh.num_cells()) throw StructuralError("dense two-point array does not match the mesh");
  CellField out = CellField::zeros(mesh, Support::Interior);
  const auto first = pairs.first();
  const auto second = pairs.second();
  const auto omega = pairs.omega();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const int i = first[p];
    const int j = second[p];
    const double w = omega[p] * mesh.cell_measure();
    out.values[i] += (raw(j, i) - raw(i, j)) * w;
    out.values[j] += (raw(i, j) - raw(j, i)) * w;
  }
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    if (!mesh.is_interior(static_cast<int>(c))) out.values[c] = 0.0;
  }
  return out;
}

}  // namespace nlkelvin
