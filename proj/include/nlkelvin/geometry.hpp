#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "nlkelvin/kernel.hpp"
#include "nlkelvin/vec.hpp"

namespace nlkelvin {

/// Axis-aligned box Omega = prod (lo_a, hi_a).
struct Domain {
  int dim = 2;
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{1.0, 1.0, 1.0};

  static Domain unit(int dim);
  double measure() const;
  void validate() const;
};

enum class CellLabel { Interior, Collar };

struct Cell {
  Vec3 center;
  CellLabel label;
};

using LatticeIndex = std::array<int, 3>;

/// Uniform cell-centred grid of Omega padded by ceil(delta/h) layers.
///
/// Cell ids increase with the lattice linear index (x fastest), so a positive
/// lattice offset always maps to a larger id. Padding cells whose centre is
/// farther than delta + h from Omega are dropped.
class Mesh {
 public:
  static Mesh build(const Domain& domain, double h, double delta);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  double h() const { return h_; }
  double cell_measure() const { return cell_measure_; }
  double domain_measure() const { return domain_.measure(); }
  int padding() const { return padding_; }

  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_interior() const { return interior_.size(); }
  std::span<const Cell> cells() const { return cells_; }
  const Vec3& center(int cell) const { return cells_[cell].center; }
  bool is_interior(int cell) const { return cells_[cell].label == CellLabel::Interior; }

  /// Interior cell ids in increasing order.
  std::span<const int> interior_cells() const { return interior_; }
  /// Position of a cell in interior_cells(), or -1 for collar cells.
  int interior_index(int cell) const { return interior_index_[cell]; }

  /// Cells per axis of the padded lattice (1 for unused axes).
  const LatticeIndex& lattice_extent() const { return extent_; }
  /// Interior cells per axis.
  const LatticeIndex& interior_extent() const { return interior_extent_; }
  const LatticeIndex& lattice_index(int cell) const { return lattice_[cell]; }
  /// Cell id at a padded-lattice index, or -1 if outside or dropped.
  int find_cell(const LatticeIndex& index) const;

 private:
  Domain domain_;
  double h_ = 0.0;
  double cell_measure_ = 0.0;
  int padding_ = 0;
  LatticeIndex extent_{1, 1, 1};
  LatticeIndex interior_extent_{1, 1, 1};
  std::vector<Cell> cells_;
  std::vector<LatticeIndex> lattice_;
  std::vector<int> interior_;
  std::vector<int> interior_index_;
  std::vector<int> lattice_to_cell_;
};

/// Unordered interacting pairs (i < j) with 0 < |x_i - x_j| < delta, stored as
/// structure-of-arrays for the pair kernels.
///
/// Each cell also has a CSR adjacency list of the pairs it belongs to, with a
/// sign of +1 when it is the first member of the pair and -1 otherwise.
class PairList {
 public:
  static PairList build(const Mesh& mesh, const KernelSpec& kernel);

  std::size_t size() const { return first_.size(); }
  int dim() const { return dim_; }
  std::uint64_t id() const { return id_; }
  std::size_t num_cells() const { return adj_ptr_.empty() ? 0 : adj_ptr_.size() - 1; }

  std::span<const int> first() const { return first_; }
  std::span<const int> second() const { return second_; }
  std::span<const double> omega() const { return omega_; }
  /// x_i - x_j, strided by 3.
  std::span<const double> offsets() const { return offset_; }
  Vec3 offset(std::size_t p) const { return {offset_[3 * p], offset_[3 * p + 1], offset_[3 * p + 2]}; }

  std::span<const int> adjacency_ptr() const { return adj_ptr_; }
  std::span<const int> adjacency_pair() const { return adj_pair_; }
  std::span<const signed char> adjacency_sign() const { return adj_sign_; }
  int degree(int cell) const { return adj_ptr_[cell + 1] - adj_ptr_[cell]; }

 private:
  int dim_ = 0;
  std::uint64_t id_ = 0;
  std::vector<int> first_;
  std::vector<int> second_;
  std::vector<double> omega_;
  std::vector<double> offset_;
  std::vector<int> adj_ptr_;
  std::vector<int> adj_pair_;
  std::vector<signed char> adj_sign_;
};

inline Mesh build_mesh(const Domain& domain, double h, double delta) { return Mesh::build(domain, h, delta); }
inline PairList build_pairs(const Mesh& mesh, const KernelSpec& kernel) { return PairList::build(mesh, kernel); }

/// Everything a nonlocal solve needs: box, kernel, grid and pair list.
struct Discretization {
  Domain domain;
  KernelSpec kernel;
  Mesh mesh;
  PairList pairs;

  static Discretization build(const Domain& domain, double h, const KernelSpec& kernel);
};

}  // namespace nlkelvin
