#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nlkelvin/geometry.hpp"
#include "nlkelvin/vec.hpp"

namespace nlkelvin {

/// Which cells carry meaningful values.
enum class Support {
  AllCells,  ///< every cell of Omega_delta (design fields, recovered fluxes)
  Interior,  ///< cells of Omega only; collar entries are held at zero
};

/// Scalar per cell, indexed by cell id over the whole mesh.
struct CellField {
  Support support = Support::Interior;
  std::vector<double> values;

  static CellField zeros(const Mesh& mesh, Support support = Support::Interior) {
    return CellField{support, std::vector<double>(mesh.num_cells(), 0.0)};
  }
};

/// n-vector per cell, stored with stride 3 (unused components are zero).
struct VectorCellField {
  int dim = 2;
  Support support = Support::AllCells;
  std::vector<double> values;

  static VectorCellField zeros(const Mesh& mesh, Support support = Support::AllCells) {
    return VectorCellField{mesh.dim(), support, std::vector<double>(3 * mesh.num_cells(), 0.0)};
  }
  Vec3 at(std::size_t cell) const { return {values[3 * cell], values[3 * cell + 1], values[3 * cell + 2]}; }
  void set(std::size_t cell, const Vec3& v) {
    values[3 * cell] = v[0];
    values[3 * cell + 1] = v[1];
    values[3 * cell + 2] = v[2];
  }
};

struct AntisymmetricTag {};
struct SymmetricTag {};

/// A two-point field stored once per unordered pair (i < j) of a PairList.
/// The tag fixes how the (j, i) value is implied: the negated value for
/// antisymmetric fluxes, the same value for symmetric conductivities.
template <typename Tag>
struct PairField {
  std::uint64_t list_id = 0;
  std::vector<double> values;

  PairField() = default;
  explicit PairField(const PairList& pairs) : list_id(pairs.id()), values(pairs.size(), 0.0) {}
  PairField(const PairList& pairs, std::vector<double> v) : list_id(pairs.id()), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
};

/// Antisymmetric two-point flux: q(x_j, x_i) = -q(x_i, x_j).
using PairFlux = PairField<AntisymmetricTag>;
/// Symmetric two-point field, e.g. averaged conductivities.
using SymPairField = PairField<SymmetricTag>;

}  // namespace nlkelvin
