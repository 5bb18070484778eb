#include "nlkelvin/local_ref.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlkelvin/errors.hpp"
#include "nlkelvin/operators.hpp"
#include "nlkelvin/state_solvers.hpp"

namespace nlkelvin {

namespace {

int neighbour(const Mesh& mesh, int cell, int axis, int step) {
  LatticeIndex idx = mesh.lattice_index(cell);
  idx[axis] += step;
  return mesh.find_cell(idx);
}

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

}  // namespace

std::vector<LocalFace> local_faces(const Mesh& mesh) {
  std::vector<LocalFace> faces;
  for (int c : mesh.interior_cells()) {
    for (int a = 0; a < mesh.dim(); ++a) {
      const int lower = neighbour(mesh, c, a, -1);
      if (lower < 0 || !mesh.is_interior(lower)) faces.push_back({c, -1, a, -1});
      const int upper = neighbour(mesh, c, a, +1);
      if (upper >= 0 && mesh.is_interior(upper)) {
        faces.push_back({c, upper, a, 1});
      } else {
        faces.push_back({c, -1, a, 1});
      }
    }
  }
  return faces;
}

LocalSolution solve_local(const Mesh& mesh, const DesignField& kappa, const SourceField& f,
                          const SolverOptions& opts, const CellField* warm_start) {
  if (kappa.kappa.size() != mesh.num_cells() || f.f.values.size() != mesh.num_cells()) {
    throw StructuralError("local solve inputs do not match the mesh");
  }
  const double h = mesh.h();
  const double hn = mesh.cell_measure();
  const double face_scale = hn / (h * h);
  const std::vector<LocalFace> faces = local_faces(mesh);
  const auto interior = mesh.interior_cells();
  const int rows = static_cast<int>(interior.size());

  // Row r couples to at most 2n neighbours; the diagonal comes first.
  std::vector<std::vector<std::pair<int, double>>> entries(rows);
  for (int r = 0; r < rows; ++r) entries[r].push_back({r, 0.0});
  for (const LocalFace& face : faces) {
    const int i = mesh.interior_index(face.first);
    if (face.second < 0) {
      entries[i][0].second += 2.0 * kappa.kappa[face.first] * face_scale;
    } else {
      const int j = mesh.interior_index(face.second);
      const double c = harmonic(kappa.kappa[face.first], kappa.kappa[face.second]) * face_scale;
      entries[i][0].second += c;
      entries[j][0].second += c;
      entries[i].push_back({j, -c});
      entries[j].push_back({i, -c});
    }
  }
  CsrMatrix a;
  a.rows = rows;
  a.row_ptr.assign(rows + 1, 0);
  for (int r = 0; r < rows; ++r) a.row_ptr[r + 1] = a.row_ptr[r] + static_cast<int>(entries[r].size());
  for (const auto& row : entries) {
    for (const auto& [col, val] : row) {
      a.col.push_back(col);
      a.val.push_back(val);
    }
  }

  const std::vector<double> b = load_vector(f, mesh);
  std::vector<double> x(rows, 0.0);
  if (warm_start != nullptr) {
    for (int r = 0; r < rows; ++r) x[r] = warm_start->values[interior[r]];
  }
  const CgReport report = conjugate_gradient(a, b, x, opts);

  LocalSolution out;
  out.u = CellField::zeros(mesh, Support::Interior);
  for (int r = 0; r < rows; ++r) out.u.values[interior[r]] = x[r];
  out.residual = report.rel_residual;
  out.iterations = report.iterations;
  out.I_loc_primal = 0.5 * a.quadratic_form(x) - kernels::omp::dot(b, x);

  out.face_flux.resize(faces.size());
  out.flux = VectorCellField::zeros(mesh, Support::AllCells);
  out.m = CellField::zeros(mesh, Support::Interior);
  const auto& u = out.u.values;
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const LocalFace& face = faces[k];
    const int i = face.first;
    double q = 0.0;
    if (face.second < 0) {
      q = face.side * 2.0 * kappa.kappa[i] * u[i] / h;
    } else {
      q = -harmonic(kappa.kappa[i], kappa.kappa[face.second]) * (u[face.second] - u[i]) / h;
      out.flux.values[3 * face.second + face.axis] += 0.5 * q;
      out.m.values[face.second] += 0.5 * q * q;
    }
    out.face_flux[k] = q;
    out.flux.values[3 * i + face.axis] += 0.5 * q;
    out.m.values[i] += 0.5 * q * q;
  }
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const LocalFace& face = faces[k];
    if (face.second >= 0) continue;
    const int ghost = neighbour(mesh, face.first, face.axis, face.side);
    if (ghost < 0) continue;
    out.flux.values[3 * ghost + face.axis] = 2.0 * out.face_flux[k] - out.flux.values[3 * face.first + face.axis];
  }
  double dual = 0.0;
  for (int c : interior) dual += out.m.values[c] / kappa.kappa[c];
  out.I_loc_dual = 0.5 * dual * hn;
  return out;
}

double local_kelvin_energy(const VectorCellField& q, const DesignField& kappa, const Mesh& mesh) {
  double sum = 0.0;
  for (int c : mesh.interior_cells()) {
    const Vec3 v = q.at(c);
    sum += dot(v, v) / kappa.kappa[c];
  }
  return 0.5 * sum * mesh.cell_measure();
}

double divergence_residual(const VectorCellField& q, const SourceField& f, const Mesh& mesh) {
  CellField r = CellField::zeros(mesh, Support::Interior);
  const double h = mesh.h();
  for (int c : mesh.interior_cells()) {
    double div = 0.0;
    for (int a = 0; a < mesh.dim(); ++a) {
      const int up = neighbour(mesh, c, a, +1);
      const int down = neighbour(mesh, c, a, -1);
      const double qu = up >= 0 ? q.values[3 * up + a] : 0.0;
      const double qd = down >= 0 ? q.values[3 * down + a] : 0.0;
      div += (qu - qd) / (2.0 * h);
    }
    r.values[c] = div - f.f.values[c];
  }
  return cell_norm(r, mesh);
}

LocalDesignResult optimize_local_design(const Mesh& mesh, const SourceField& f, const MaterialBounds& bounds,
                                        const OptimizerConfig& cfg, const DesignField* init) {
  bounds.validate();
  DesignField kappa = init != nullptr ? *init : DesignField::uniform(mesh, bounds, bounds.gamma);
  kappa.bounds = bounds;
  require_admissible(kappa, mesh);

  auto require_descent = [](double before, double after, const char* step) {
    if (after > before + 1e-12 * std::max(1.0, std::abs(before))) {
      std::ostringstream msg;
      msg.precision(17);
      msg << step << " step increased the local objective from " << before << " to " << after;
      throw InternalError(msg.str());
    }
  };

  LocalDesignResult out;
  LocalSolution sol = solve_local(mesh, kappa, f, cfg.solver);
  double value = -sol.I_loc_primal;
  out.descent_history.push_back(value);
  out.iterations = 1;
  out.converged = value == 0.0;
  for (int it = 1; it < cfg.max_iters && !out.converged; ++it) {
    DesignField next = kappa_subproblem(sol.m, bounds, mesh);
    const double current = design_energy(sol.m, kappa, mesh);
    const double designed = design_energy(sol.m, next, mesh);
    require_descent(current, designed, "design");
    out.descent_history.push_back(designed);

    sol = solve_local(mesh, next, f, cfg.solver, &sol.u);
    ++out.iterations;
    const double updated = -sol.I_loc_primal;
    require_descent(designed, updated, "flux");
    out.descent_history.push_back(updated);
    kappa = std::move(next);

    const double change = std::abs(value - updated) / std::max(std::abs(updated), 1e-300);
    value = updated;
    out.converged = change < cfg.rel_tol;
  }
  out.kappa = std::move(kappa);
  out.d_star = value;
  out.solution = std::move(sol);
  return out;
}

}  // namespace nlkelvin
