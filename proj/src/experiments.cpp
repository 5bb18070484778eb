#include "nlkelvin/experiments.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include "nlkelvin/errors.hpp"
#include "nlkelvin/local_ref.hpp"
#include "nlkelvin/operators.hpp"
#include "nlkelvin/state_solvers.hpp"

namespace nlkelvin {

namespace {

struct BumpAxis {
  double value = 0.0;
  double slope = 0.0;
};

BumpAxis bump_axis(double x, double lo, double hi, double margin) {
  const double c = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo) - margin;
  const double t = (x - c) / r;
  if (std::abs(t) >= 1.0) return {};
  const double s = 1.0 - t * t;
  return {s * s * s, -6.0 * t * s * s / r};
}

Discretization discretize(const Domain& domain, double delta, double ratio, KernelFamily family) {
  return Discretization::build(domain, delta / ratio, KernelSpec(family, delta, domain.dim));
}

}  // namespace

Vec3 BumpField::value(const Vec3& x) const {
  double psi = 1.0;
  for (int a = 0; a < domain.dim; ++a) psi *= bump_axis(x[a], domain.lo[a], domain.hi[a], margin).value;
  Vec3 out{0.0, 0.0, 0.0};
  for (int a = 0; a < domain.dim; ++a) out[a] = psi;
  return out;
}

double BumpField::divergence(const Vec3& x) const {
  BumpAxis axes[3];
  for (int a = 0; a < domain.dim; ++a) axes[a] = bump_axis(x[a], domain.lo[a], domain.hi[a], margin);
  double div = 0.0;
  for (int a = 0; a < domain.dim; ++a) {
    double term = axes[a].slope;
    for (int b = 0; b < domain.dim; ++b) {
      if (b != a) term *= axes[b].value;
    }
    div += term;
  }
  return div;
}

VectorCellField BumpField::sample(const Mesh& mesh) const {
  VectorCellField out = VectorCellField::zeros(mesh, Support::AllCells);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) out.set(c, value(mesh.center(static_cast<int>(c))));
  return out;
}

CellField BumpField::sample_divergence(const Mesh& mesh) const {
  CellField out = CellField::zeros(mesh, Support::Interior);
  for (int c : mesh.interior_cells()) out.values[c] = divergence(mesh.center(c));
  return out;
}

double fitted_rate(const std::vector<double>& delta, const std::vector<double>& error) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < delta.size() && k < error.size(); ++k) {
    if (!(error[k] > 0.0) || !(delta[k] > 0.0)) continue;
    const double x = std::log(delta[k]);
    const double y = std::log(error[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return 0.0;
  const double denom = count * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (count * sxy - sx * sy) / denom;
}

double recovery_identity_error(const Discretization& disc, const Vec3& e) {
  const Mesh& mesh = disc.mesh;
  VectorCellField field = VectorCellField::zeros(mesh, Support::AllCells);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) field.set(c, e);
  const VectorCellField back = flux_recovery(adjoint_recovery(field, disc.pairs), disc.pairs, mesh);
  const Domain& dom = disc.domain;
  const double delta = disc.kernel.delta();
  double err = 0.0;
  double ref = 0.0;
  for (int c : mesh.interior_cells()) {
    const Vec3& x = mesh.center(c);
    double dist = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dom.dim; ++a) dist = std::min({dist, x[a] - dom.lo[a], dom.hi[a] - x[a]});
    if (dist < delta) continue;
    const Vec3 v = back.at(c);
    for (int a = 0; a < dom.dim; ++a) {
      err += (v[a] - e[a]) * (v[a] - e[a]);
      ref += e[a] * e[a];
    }
  }
  return ref > 0.0 ? std::sqrt(err / ref) : 0.0;
}

ConvergenceStudy recovery_convergence(const BumpField& q, KernelFamily family, const std::vector<double>& deltas,
                                      double ratio) {
  ConvergenceStudy study;
  std::vector<double> d, e;
  for (double delta : deltas) {
    const Discretization disc = discretize(q.domain, delta, ratio, family);
    const VectorCellField samples = q.sample(disc.mesh);
    CellField diff = apply_divergence(adjoint_recovery(samples, disc.pairs), disc.pairs, disc.mesh);
    const CellField exact = q.sample_divergence(disc.mesh);
    for (std::size_t c = 0; c < diff.values.size(); ++c) diff.values[c] -= exact.values[c];
    study.points.push_back({delta, disc.mesh.h(), cell_norm(diff, disc.mesh), cell_norm(exact, disc.mesh)});
    d.push_back(delta);
    e.push_back(study.points.back().error);
  }
  study.rate = fitted_rate(d, e);
  return study;
}

ConvergenceStudy energy_convergence(const BumpField& q, const ScalarFunction& kappa, KernelFamily family,
                                    const std::vector<double>& deltas, double ratio) {
  ConvergenceStudy study;
  std::vector<double> d, e;
  for (double delta : deltas) {
    const Discretization disc = discretize(q.domain, delta, ratio, family);
    DesignField k;
    k.kappa.resize(disc.mesh.num_cells());
    for (std::size_t c = 0; c < k.kappa.size(); ++c) k.kappa[c] = kappa(disc.mesh.center(static_cast<int>(c)));
    const VectorCellField samples = q.sample(disc.mesh);
    const PairFlux lifted = adjoint_recovery(samples, disc.pairs);
    const double nonlocal =
        complementary_energy(lifted, pair_conductivity(k, AveragingScheme::Harmonic, disc.pairs), disc.mesh);
    const double local = local_kelvin_energy(samples, k, disc.mesh);
    study.points.push_back({delta, disc.mesh.h(), std::abs(nonlocal - local), local});
    d.push_back(delta);
    e.push_back(study.points.back().error);
  }
  study.rate = fitted_rate(d, e);
  return study;
}

double one_sided_bound(const PairFlux& q, const DesignField& kappa, const Discretization& disc) {
  const double nonlocal =
      complementary_energy(q, pair_conductivity(kappa, AveragingScheme::Harmonic, disc.pairs), disc.mesh);
  const double local = local_kelvin_energy(flux_recovery(q, disc.pairs, disc.mesh), kappa, disc.mesh);
  return nonlocal - local;
}

void validate_sweep(const SweepConfig& cfg) {
  if (cfg.deltas.empty()) throw ConfigError("kernel.delta_list: empty");
  for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
    if (!(cfg.deltas[k] > 0.0)) throw ConfigError("kernel.delta_list: entries must be positive");
    if (k > 0 && !(cfg.deltas[k] < cfg.deltas[k - 1])) throw ConfigError("kernel.delta_list: must be decreasing");
  }
  if (!(cfg.ratio >= 4.0)) throw ConfigError("mesh.ratio: sweeps need delta/h >= 4");
  cfg.bounds.validate();
}

SweepResult delta_sweep(const SweepConfig& cfg) {
  validate_sweep(cfg);
  SweepResult result;
  const BumpField bump{cfg.domain, cfg.bump_margin};
  for (double delta : cfg.deltas) {
    try {
      const Discretization disc = discretize(cfg.domain, delta, cfg.ratio, cfg.family);
      const SourceField f = make_source(disc.mesh, cfg.source);
      SweepRecord rec;
      rec.delta = delta;
      rec.h = disc.mesh.h();

      const DesignResult design = optimize_design(disc, f, cfg.bounds, cfg.optimizer);
      rec.d_delta = design.d_value;
      rec.p_delta = design.p_value;

      const InfSupReport infsup = infsup_constant(disc.mesh, disc.pairs, cfg.solver);
      rec.infsup = infsup.beta;
      rec.poincare_const = infsup.poincare;

      StateSolution state;
      state.u = design.u_opt;
      state.q = design.flux_opt;
      rec.stability_ratio = stability_check(state, f, disc);

      rec.d_star_local = optimize_local_design(disc.mesh, f, cfg.bounds, cfg.optimizer).d_star;

      const ConvergenceStudy div = recovery_convergence(bump, cfg.family, {delta}, cfg.ratio);
      rec.recovery_div_err = div.points.front().error;
      const ConvergenceStudy energy =
          energy_convergence(bump, [](const Vec3&) { return 1.0; }, cfg.family, {delta}, cfg.ratio);
      rec.recovery_energy_err = energy.points.front().error / energy.points.front().reference;
      result.records.push_back(rec);
    } catch (const std::exception& e) {
      result.complete = false;
      result.failure = "delta = " + std::to_string(delta) + ": " + e.what();
      break;
    }
  }
  return result;
}

}  // namespace nlkelvin
