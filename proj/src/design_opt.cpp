#include "nlkelvin/design_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nlkelvin/errors.hpp"
#include "nlkelvin/operators.hpp"
#include "nlkelvin/state_solvers.hpp"

namespace nlkelvin {

namespace {

struct Fill {
  std::vector<double> kappa;
  double volume = 0.0;
};

Fill fill_at(std::span<const double> root, double t, const MaterialBounds& b) {
  Fill out;
  out.kappa.resize(root.size());
  for (std::size_t i = 0; i < root.size(); ++i) {
    out.kappa[i] = root[i] > 0.0 ? std::clamp(t * root[i], b.kappa_min, b.kappa_max) : b.kappa_min;
    out.volume += out.kappa[i];
  }
  return out;
}

}  // namespace

std::vector<double> water_fill(std::span<const double> m, double cell_measure, double budget,
                               const MaterialBounds& bounds) {
  bounds.validate();
  const double target = budget / cell_measure;
  std::vector<double> root(m.size());
  double root_min = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!(m[i] >= 0.0) || !std::isfinite(m[i])) throw InternalError("energy weights must be finite and non-negative");
    root[i] = std::sqrt(m[i]);
    if (root[i] > 0.0 && (root_min == 0.0 || root[i] < root_min)) root_min = root[i];
  }
  const double slack = 1e-10 * std::max(1.0, std::abs(target));

  if (root_min == 0.0) return fill_at(root, 0.0, bounds).kappa;
  // Every weighted cell at kappa_max fits: the volume constraint is inactive.
  const double t_max = bounds.kappa_max / root_min;
  Fill top = fill_at(root, t_max, bounds);
  if (top.volume <= target + slack) return top.kappa;
  if (fill_at(root, 0.0, bounds).volume > target + slack) throw InternalError("volume budget below kappa_min");

  double lo = 0.0;
  double hi = t_max;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fill_at(root, mid, bounds).volume > target ? hi : lo) = mid;
  }
  // Solve exactly on the active set found by bisection.
  const double t_mid = 0.5 * (lo + hi);
  double fixed = 0.0;
  double free_root = 0.0;
  for (double r : root) {
    const double k = r * t_mid;
    if (r == 0.0 || k <= bounds.kappa_min) {
      fixed += bounds.kappa_min;
    } else if (k >= bounds.kappa_max) {
      fixed += bounds.kappa_max;
    } else {
      free_root += r;
    }
  }
  double t = t_mid;
  if (free_root > 0.0) {
    const double exact = (target - fixed) / free_root;
    if (exact >= lo && exact <= hi) t = exact;
  }
  Fill out = fill_at(root, t, bounds);
  if (std::abs(out.volume - target) * cell_measure > 1e-10 * std::max(1.0, budget)) {
    std::ostringstream msg;
    msg << "water filling missed the volume budget by " << (out.volume - target) * cell_measure;
    throw InternalError(msg.str());
  }
  return out.kappa;
}

DesignField kappa_subproblem(const CellField& m, const MaterialBounds& bounds, const Mesh& mesh) {
  if (m.values.size() != mesh.num_cells()) throw StructuralError("energy weights do not match the mesh");
  const auto interior = mesh.interior_cells();
  std::vector<double> weights(interior.size());
  for (std::size_t r = 0; r < interior.size(); ++r) weights[r] = m.values[interior[r]];
  const std::vector<double> inner =
      water_fill(weights, mesh.cell_measure(), bounds.gamma * mesh.domain_measure(), bounds);
  DesignField out = DesignField::uniform(mesh, bounds, bounds.kappa_max);
  for (std::size_t r = 0; r < interior.size(); ++r) out.kappa[interior[r]] = inner[r];
  return out;
}

CellField row_energies(const PairFlux& q, const Discretization& disc) {
  if (q.list_id != disc.pairs.id()) throw StructuralError("flux does not belong to the pair list");
  CellField m = CellField::zeros(disc.mesh, Support::AllCells);
  const std::vector<double> ones(q.size(), 1.0);
  kernels::omp::row_energy(topology(disc.pairs), q.values, ones, disc.mesh.cell_measure(), m.values);
  return m;
}

double design_energy(const CellField& m, const DesignField& kappa, const Mesh& mesh) {
  std::vector<double> inv(kappa.kappa.size());
  for (std::size_t c = 0; c < inv.size(); ++c) inv[c] = 1.0 / kappa.kappa[c];
  const std::vector<double> ones(inv.size(), 1.0);
  return 0.5 * mesh.cell_measure() * kernels::omp::weighted_dot(m.values, inv, ones);
}

DesignResult optimize_design(const Discretization& disc, const SourceField& f, const MaterialBounds& bounds,
                             const OptimizerConfig& cfg, const DesignField* init) {
  bounds.validate();
  DesignField kappa = init != nullptr ? *init : DesignField::uniform(disc.mesh, bounds, bounds.gamma);
  kappa.bounds = bounds;
  require_admissible(kappa, disc.mesh);
  constexpr AveragingScheme scheme = AveragingScheme::Harmonic;

  DesignResult out;
  StateSolution sol = solve_kelvin(disc, kappa, f, scheme, cfg.solver);
  double value = -sol.energy_primal;
  out.descent_history.push_back(value);
  out.iterations = 1;

  auto require_descent = [](double before, double after, const char* step) {
    if (after > before + 1e-12 * std::max(1.0, std::abs(before))) {
      std::ostringstream msg;
      msg.precision(17);
      msg << step << " step increased the objective from " << before << " to " << after;
      throw InternalError(msg.str());
    }
  };

  if (value != 0.0) {
    for (int it = 1; it < cfg.max_iters; ++it) {
      const CellField m = row_energies(*sol.q, disc);
      DesignField next = kappa_subproblem(m, bounds, disc.mesh);
      // Compare both designs on the same flux so that the design step is
      // checked exactly.
      const double current = design_energy(m, kappa, disc.mesh);
      const double designed = design_energy(m, next, disc.mesh);
      require_descent(current, designed, "design");
      out.descent_history.push_back(designed);

      sol = solve_kelvin(disc, next, f, scheme, cfg.solver, &sol.u);
      ++out.iterations;
      const double updated = -sol.energy_primal;
      require_descent(designed, updated, "flux");
      out.descent_history.push_back(updated);
      kappa = std::move(next);

      const double change = std::abs(value - updated) / std::max(std::abs(updated), 1e-300);
      value = updated;
      if (change < cfg.rel_tol) {
        out.converged = true;
        break;
      }
    }
  } else {
    out.converged = true;
  }

  out.kappa_opt = std::move(kappa);
  out.d_value = value;
  out.p_value = -value;
  out.u_opt = std::move(sol.u);
  out.flux_opt = std::move(*sol.q);
  out.volume_slack = check_admissible(out.kappa_opt, disc.mesh).volume_slack;
  return out;
}

SaddleReport verify_saddle(const Discretization& disc, const SourceField& f, const DesignResult& result,
                           int n_probes, std::uint64_t seed, double tol, const SolverOptions& solver) {
  constexpr AveragingScheme scheme = AveragingScheme::Harmonic;
  SaddleReport report;
  const StateSolution base = solve_primal(disc, result.kappa_opt, f, scheme, solver);
  report.primal_value = base.energy_primal;
  const double scale = std::max(1.0, std::abs(result.d_value));
  report.value_mismatch = std::abs(base.energy_primal + result.d_value) / scale;
  report.ok = report.value_mismatch <= tol;
  if (!report.ok) report.message = "primal value at kappa_opt does not match -d_value";

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> theta_dist(0.0, 1.0);
  report.max_ascent = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < n_probes; ++p) {
    const DesignField other = DesignField::random(disc.mesh, result.kappa_opt.bounds, rng());
    const double theta = p == 0 ? 0.0 : theta_dist(rng);
    DesignField probe = result.kappa_opt;
    for (std::size_t c = 0; c < probe.kappa.size(); ++c) {
      probe.kappa[c] = (1.0 - theta) * probe.kappa[c] + theta * other.kappa[c];
    }
    const StateSolution s = solve_primal(disc, probe, f, scheme, solver, &base.u);
    const double ascent = s.energy_primal - base.energy_primal;
    report.max_ascent = std::max(report.max_ascent, ascent);
    ++report.probes;
    if (ascent > tol * scale && report.ok) {
      report.ok = false;
      std::ostringstream msg;
      msg << "probe " << p << " raised the primal value by " << ascent;
      report.message = msg.str();
    }
  }
  if (n_probes == 0) report.max_ascent = 0.0;
  return report;
}

}  // namespace nlkelvin
