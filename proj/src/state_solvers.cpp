#include "nlkelvin/state_solvers.hpp"

#include <cmath>
#include <deque>
#include <sstream>

#include "nlkelvin/errors.hpp"
#include "nlkelvin/operators.hpp"

namespace nlkelvin {

namespace k = kernels::omp;

CsrMatrix assemble_stiffness(const SymPairField& kappa_pair, const PairList& pairs, const Mesh& mesh) {
  if (kappa_pair.list_id != pairs.id() || kappa_pair.size() != pairs.size()) {
    throw StructuralError("pair conductivity does not match the pair list");
  }
  const double w = 2.0 * mesh.cell_measure() * mesh.cell_measure();
  const auto interior = mesh.interior_cells();
  const auto ptr = pairs.adjacency_ptr();
  const auto adj = pairs.adjacency_pair();
  const auto first = pairs.first();
  const auto second = pairs.second();
  const auto omega = pairs.omega();

  CsrMatrix a;
  a.rows = static_cast<int>(interior.size());
  a.row_ptr.assign(a.rows + 1, 0);
  for (int r = 0; r < a.rows; ++r) {
    const int c = interior[r];
    int count = 1;
    for (int e = ptr[c]; e < ptr[c + 1]; ++e) {
      const int p = adj[e];
      const int other = first[p] == c ? second[p] : first[p];
      if (mesh.is_interior(other)) ++count;
    }
    a.row_ptr[r + 1] = a.row_ptr[r] + count;
  }
  a.col.resize(a.row_ptr.back());
  a.val.resize(a.row_ptr.back());

#pragma omp parallel for schedule(static)
  for (int r = 0; r < a.rows; ++r) {
    const int c = interior[r];
    int slot = a.row_ptr[r];
    const int diag = slot++;
    double d = 0.0;
    // Adjacency is ordered by pair index, not by neighbour; columns are left
    // unsorted, which the matvec does not need.
    for (int e = ptr[c]; e < ptr[c + 1]; ++e) {
      const int p = adj[e];
      const int other = first[p] == c ? second[p] : first[p];
      const double entry = w * kappa_pair.values[p] * omega[p] * omega[p];
      d += entry;
      if (mesh.is_interior(other)) {
        a.col[slot] = mesh.interior_index(other);
        a.val[slot] = -entry;
        ++slot;
      }
    }
    a.col[diag] = r;
    a.val[diag] = d;
  }
  return a;
}

std::vector<double> load_vector(const SourceField& f, const Mesh& mesh) {
  if (f.f.values.size() != mesh.num_cells()) throw StructuralError("source does not match the mesh");
  const auto interior = mesh.interior_cells();
  std::vector<double> b(interior.size());
  for (std::size_t r = 0; r < interior.size(); ++r) b[r] = f.f.values[interior[r]] * mesh.cell_measure();
  return b;
}

namespace {

struct PrimalSystem {
  SymPairField kappa_pair;
  CsrMatrix a;
  std::vector<double> b;
  std::vector<double> x;
  CgReport report;
};

PrimalSystem solve_system(const Discretization& disc, const DesignField& kappa, const SourceField& f,
                          AveragingScheme scheme, const SolverOptions& opts, const CellField* warm_start) {
  require_admissible(kappa, disc.mesh);
  PrimalSystem s;
  s.kappa_pair = pair_conductivity(kappa, scheme, disc.pairs);
  s.a = assemble_stiffness(s.kappa_pair, disc.pairs, disc.mesh);
  s.b = load_vector(f, disc.mesh);
  s.x.assign(s.b.size(), 0.0);
  if (warm_start != nullptr) {
    if (warm_start->values.size() != disc.mesh.num_cells()) throw StructuralError("warm start does not match the mesh");
    const auto interior = disc.mesh.interior_cells();
    for (std::size_t r = 0; r < interior.size(); ++r) s.x[r] = warm_start->values[interior[r]];
  }
  s.report = conjugate_gradient(s.a, s.b, s.x, opts);
  return s;
}

CellField scatter_interior(const std::vector<double>& x, const Mesh& mesh) {
  CellField u = CellField::zeros(mesh, Support::Interior);
  const auto interior = mesh.interior_cells();
  for (std::size_t r = 0; r < interior.size(); ++r) u.values[interior[r]] = x[r];
  return u;
}

}  // namespace

StateSolution solve_primal(const Discretization& disc, const DesignField& kappa, const SourceField& f,
                           AveragingScheme scheme, const SolverOptions& opts, const CellField* warm_start) {
  PrimalSystem s = solve_system(disc, kappa, f, scheme, opts, warm_start);
  StateSolution out;
  out.u = scatter_interior(s.x, disc.mesh);
  out.energy_primal = 0.5 * s.a.quadratic_form(s.x) - k::dot(s.b, s.x);
  out.residuals.linear_solve = s.report.rel_residual;
  out.iterations = s.report.iterations;
  return out;
}

double complementary_energy(const PairFlux& q, const SymPairField& kappa_pair, const Mesh& mesh) {
  if (q.list_id != kappa_pair.list_id || q.size() != kappa_pair.size()) {
    throw StructuralError("flux and conductivity belong to different pair lists");
  }
  std::vector<double> resistivity(q.size());
  for (std::size_t p = 0; p < q.size(); ++p) resistivity[p] = 1.0 / kappa_pair.values[p];
  const double w = 2.0 * mesh.cell_measure() * mesh.cell_measure();
  return 0.5 * w * k::weighted_dot(q.values, resistivity, q.values);
}

void require_full_rank(const Mesh& mesh, const PairList& pairs) {
  // Breadth-first search from the collar; an interior cell it never reaches
  // belongs to a component whose divergence rows sum to zero.
  const std::size_t n = mesh.num_cells();
  std::vector<char> seen(n, 0);
  std::deque<int> queue;
  for (std::size_t c = 0; c < n; ++c) {
    if (!mesh.is_interior(static_cast<int>(c))) {
      seen[c] = 1;
      queue.push_back(static_cast<int>(c));
    }
  }
  const auto ptr = pairs.adjacency_ptr();
  const auto adj = pairs.adjacency_pair();
  const auto first = pairs.first();
  const auto second = pairs.second();
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    for (int e = ptr[c]; e < ptr[c + 1]; ++e) {
      const int p = adj[e];
      const int other = first[p] == c ? second[p] : first[p];
      if (!seen[other]) {
        seen[other] = 1;
        queue.push_back(other);
      }
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (!seen[c]) {
      std::ostringstream msg;
      msg << "divergence is rank deficient: interior cell " << c << " is not connected to the collar";
      throw StructuralError(msg.str());
    }
  }
}

StateSolution solve_kelvin(const Discretization& disc, const DesignField& kappa, const SourceField& f,
                           AveragingScheme scheme, const SolverOptions& opts, const CellField* warm_start) {
  require_full_rank(disc.mesh, disc.pairs);
  PrimalSystem s = solve_system(disc, kappa, f, scheme, opts, warm_start);

  StateSolution out;
  out.u = scatter_interior(s.x, disc.mesh);
  out.energy_primal = 0.5 * s.a.quadratic_form(s.x) - k::dot(s.b, s.x);
  out.residuals.linear_solve = s.report.rel_residual;
  out.iterations = s.report.iterations;

  PairFlux q = apply_gradient(out.u, disc.pairs);
  for (std::size_t p = 0; p < q.size(); ++p) q.values[p] *= -s.kappa_pair.values[p];
  out.energy_dual = complementary_energy(q, s.kappa_pair, disc.mesh);

  CellField div = apply_divergence(q, disc.pairs, disc.mesh);
  for (std::size_t c = 0; c < div.values.size(); ++c) div.values[c] -= f.f.values[c];
  out.residuals.constraint = cell_norm(div, disc.mesh);
  // D q - f = (A u - F) / h^n cellwise, so the relative residual matches the CG one.
  const double fnorm = cell_norm(f.f, disc.mesh);
  const double allowed = 10.0 * opts.rel_tol * fnorm + 1e-13 * (1.0 + fnorm);
  if (out.residuals.constraint > allowed) {
    std::ostringstream msg;
    msg << "Kelvin constraint residual " << out.residuals.constraint << " exceeds " << allowed;
    throw SolverError(msg.str(), s.report.history);
  }
  out.q = std::move(q);
  return out;
}

InfSupReport infsup_constant(const Mesh& mesh, const PairList& pairs, const SolverOptions& opts) {
  require_full_rank(mesh, pairs);
  SymPairField unit(pairs, std::vector<double>(pairs.size(), 1.0));
  const CsrMatrix a = assemble_stiffness(unit, pairs, mesh);
  SolverOptions inner = opts;
  inner.rel_tol = std::min(opts.rel_tol, 1e-12);
  const EigenReport eig = smallest_eigenpair(a, mesh.cell_measure(), inner);
  InfSupReport out;
  out.lambda_min = eig.lambda;
  out.beta = std::sqrt(eig.lambda / (1.0 + eig.lambda));
  out.poincare = 1.0 / std::sqrt(eig.lambda);
  out.iterations = eig.iterations;
  return out;
}

double stability_check(const StateSolution& solution, const SourceField& f, const Discretization& disc) {
  if (!solution.q) throw StructuralError("stability check needs a dual solve");
  const double fnorm = cell_norm(f.f, disc.mesh);
  if (fnorm == 0.0) return 0.0;
  const PairFlux& q = *solution.q;
  const double qn = pair_norm(q, disc.mesh);
  const double dn = cell_norm(apply_divergence(q, disc.pairs, disc.mesh), disc.mesh);
  const double qq = std::sqrt(qn * qn + dn * dn);
  return (qq + cell_norm(solution.u, disc.mesh)) / fnorm;
}

}  // namespace nlkelvin
