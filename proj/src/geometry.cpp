#include "nlkelvin/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "nlkelvin/errors.hpp"

namespace nlkelvin {

namespace {

std::atomic<std::uint64_t> next_pair_list_id{1};

// Relative guard for the strict |x_i - x_j| < delta test, so that lattice ties
// computed with rounding noise are still excluded.
constexpr double kTieTolerance = 1e-12;

}  // namespace

Domain Domain::unit(int dim) {
  Domain d;
  d.dim = dim;
  for (int a = dim; a < 3; ++a) d.hi[a] = 0.0;
  return d;
}

double Domain::measure() const {
  double m = 1.0;
  for (int a = 0; a < dim; ++a) m *= hi[a] - lo[a];
  return m;
}

void Domain::validate() const {
  if (dim < 1 || dim > 3) throw ConfigError("domain: dimension must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (!(hi[a] > lo[a])) throw ConfigError("domain.box: hi must exceed lo on axis " + std::to_string(a));
  }
}

Mesh Mesh::build(const Domain& domain, double h, double delta) {
  domain.validate();
  if (!(h > 0.0)) throw ConfigError("mesh.h must be positive");
  if (!(delta > 0.0)) throw ConfigError("kernel.delta must be positive");
  if (delta / h < 2.0 * (1.0 - kTieTolerance)) {
    throw ConfigError("resolution: delta/h = " + std::to_string(delta / h) + " < 2 under-resolves the kernel");
  }

  Mesh mesh;
  mesh.domain_ = domain;
  mesh.h_ = h;
  mesh.cell_measure_ = std::pow(h, domain.dim);
  mesh.padding_ = static_cast<int>(std::ceil(delta / h * (1.0 - kTieTolerance)));

  for (int a = 0; a < domain.dim; ++a) {
    const double cells = (domain.hi[a] - domain.lo[a]) / h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
      throw ConfigError("mesh.h must divide the box extent on axis " + std::to_string(a));
    }
    mesh.interior_extent_[a] = static_cast<int>(rounded);
    mesh.extent_[a] = mesh.interior_extent_[a] + 2 * mesh.padding_;
  }

  const auto& ext = mesh.extent_;
  const std::size_t lattice_size = static_cast<std::size_t>(ext[0]) * ext[1] * ext[2];
  mesh.lattice_to_cell_.assign(lattice_size, -1);
  const double keep_radius = delta + h;

  for (int k2 = 0; k2 < ext[2]; ++k2) {
    for (int k1 = 0; k1 < ext[1]; ++k1) {
      for (int k0 = 0; k0 < ext[0]; ++k0) {
        const LatticeIndex idx{k0, k1, k2};
        Vec3 center{0.0, 0.0, 0.0};
        bool interior = true;
        double dist2 = 0.0;
        for (int a = 0; a < domain.dim; ++a) {
          center[a] = domain.lo[a] + (idx[a] - mesh.padding_ + 0.5) * h;
          const int local = idx[a] - mesh.padding_;
          if (local < 0 || local >= mesh.interior_extent_[a]) interior = false;
          const double excess = std::max({0.0, domain.lo[a] - center[a], center[a] - domain.hi[a]});
          dist2 += excess * excess;
        }
        if (!interior && std::sqrt(dist2) >= keep_radius) continue;
        const int id = static_cast<int>(mesh.cells_.size());
        mesh.cells_.push_back({center, interior ? CellLabel::Interior : CellLabel::Collar});
        mesh.lattice_.push_back(idx);
        mesh.interior_index_.push_back(interior ? static_cast<int>(mesh.interior_.size()) : -1);
        if (interior) mesh.interior_.push_back(id);
        mesh.lattice_to_cell_[k0 + static_cast<std::size_t>(ext[0]) * (k1 + static_cast<std::size_t>(ext[1]) * k2)] = id;
      }
    }
  }
  return mesh;
}

int Mesh::find_cell(const LatticeIndex& index) const {
  for (int a = 0; a < 3; ++a) {
    if (index[a] < 0 || index[a] >= extent_[a]) return -1;
  }
  return lattice_to_cell_[index[0] + static_cast<std::size_t>(extent_[0]) *
                                         (index[1] + static_cast<std::size_t>(extent_[1]) * index[2])];
}

PairList PairList::build(const Mesh& mesh, const KernelSpec& kernel) {
  if (kernel.dim() != mesh.dim()) throw ConfigError("kernel dimension does not match the mesh");
  const int dim = mesh.dim();
  const double h = mesh.h();
  const double delta = kernel.delta();
  const int reach = static_cast<int>(std::ceil(delta / h));

  // Lattice offsets that are positive in linear-index order (z, then y, then x).
  struct Offset {
    LatticeIndex k;
    Vec3 d;  // x_i - x_j for j = i + k
    double omega;
  };
  std::vector<Offset> offsets;
  const int r1 = dim >= 2 ? reach : 0;
  const int r2 = dim >= 3 ? reach : 0;
  for (int k2 = -r2; k2 <= r2; ++k2) {
    for (int k1 = -r1; k1 <= r1; ++k1) {
      for (int k0 = -reach; k0 <= reach; ++k0) {
        const bool positive = k2 > 0 || (k2 == 0 && (k1 > 0 || (k1 == 0 && k0 > 0)));
        if (!positive) continue;
        const double len2 = (static_cast<double>(k0) * k0 + static_cast<double>(k1) * k1 +
                             static_cast<double>(k2) * k2) * h * h;
        if (len2 >= delta * delta * (1.0 - kTieTolerance)) continue;
        const Vec3 d{-k0 * h, -k1 * h, -k2 * h};
        const double w = kernel(d);
        if (w <= 0.0) continue;
        offsets.push_back({{k0, k1, k2}, d, w});
      }
    }
  }

  PairList list;
  list.dim_ = dim;
  list.id_ = next_pair_list_id.fetch_add(1);
  const int num_cells = static_cast<int>(mesh.num_cells());
  for (int i = 0; i < num_cells; ++i) {
    const LatticeIndex& base = mesh.lattice_index(i);
    for (const Offset& off : offsets) {
      const int j = mesh.find_cell({base[0] + off.k[0], base[1] + off.k[1], base[2] + off.k[2]});
      if (j < 0) continue;
      list.first_.push_back(i);
      list.second_.push_back(j);
      list.omega_.push_back(off.omega);
      list.offset_.insert(list.offset_.end(), off.d.begin(), off.d.end());
    }
  }

  // CSR adjacency, pairs listed in increasing pair index per cell.
  list.adj_ptr_.assign(num_cells + 1, 0);
  for (std::size_t p = 0; p < list.size(); ++p) {
    ++list.adj_ptr_[list.first_[p] + 1];
    ++list.adj_ptr_[list.second_[p] + 1];
  }
  for (int c = 0; c < num_cells; ++c) list.adj_ptr_[c + 1] += list.adj_ptr_[c];
  list.adj_pair_.resize(list.adj_ptr_.back());
  list.adj_sign_.resize(list.adj_ptr_.back());
  std::vector<int> cursor(list.adj_ptr_.begin(), list.adj_ptr_.end() - 1);
  for (std::size_t p = 0; p < list.size(); ++p) {
    const int a = cursor[list.first_[p]]++;
    list.adj_pair_[a] = static_cast<int>(p);
    list.adj_sign_[a] = 1;
    const int b = cursor[list.second_[p]]++;
    list.adj_pair_[b] = static_cast<int>(p);
    list.adj_sign_[b] = -1;
  }
  return list;
}

Discretization Discretization::build(const Domain& domain, double h, const KernelSpec& kernel) {
  Mesh mesh = Mesh::build(domain, h, kernel.delta());
  PairList pairs = PairList::build(mesh, kernel);
  return Discretization{domain, kernel, std::move(mesh), std::move(pairs)};
}

}  // namespace nlkelvin
