#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "nlkelvin/design_opt.hpp"
#include "nlkelvin/errors.hpp"
#include "nlkelvin/operators.hpp"
#include "nlkelvin/state_solvers.hpp"
#include "oracles.hpp"

using namespace nlkelvin;

namespace {

const MaterialBounds kBounds{1.0, 2.0, 1.4};

Discretization square(double h, double delta) {
  return Discretization::build(Domain::unit(2), h, KernelSpec(KernelFamily::TruncatedTent, delta, 2));
}

double objective(const std::vector<double>& m, const std::vector<double>& kappa) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m[i] / kappa[i];
  return s;
}

SourceField offset_source(const Mesh& mesh) {
  SourceSpec spec;
  spec.preset = SourcePreset::GaussianBump;
  spec.center = {0.35, 0.6, 0.5};
  spec.width = 0.2;
  return make_source(mesh, spec);
}

}  // namespace

TEST_CASE("water filling") {
  SUBCASE("hand example") {
    const std::vector<double> m{0.0, 1.0, 4.0, 9.0, 16.0};
    const auto k = water_fill(m, 1.0, 7.0, kBounds);
    const std::vector<double> expected{1.0, 1.0, 1.2, 1.8, 2.0};
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(k[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
  SUBCASE("constant m spreads the budget evenly") {
    const std::vector<double> m(10, 3.0);
    const auto k = water_fill(m, 0.1, 1.4, kBounds);
    for (double x : k) CHECK(x == doctest::Approx(1.4).epsilon(1e-12));
  }
  SUBCASE("vanishing m gives the lower bound") {
    const std::vector<double> m(6, 0.0);
    for (double x : water_fill(m, 1.0, 8.4, kBounds)) CHECK(x == kBounds.kappa_min);
  }
  SUBCASE("budget above the box saturates") {
    const std::vector<double> m{1.0, 2.0, 3.0};
    for (double x : water_fill(m, 1.0, 100.0, kBounds)) CHECK(x == doctest::Approx(kBounds.kappa_max));
  }
  SUBCASE("agrees with a dynamic-programming oracle") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> m(8);
      for (double& x : m) x = dist(rng) * dist(rng);
      const double budget = 1.4 * m.size();
      const auto k = water_fill(m, 1.0, budget, kBounds);
      CHECK(std::accumulate(k.begin(), k.end(), 0.0) <= budget * (1.0 + 1e-12));
      for (double x : k) {
        CHECK(x >= kBounds.kappa_min);
        CHECK(x <= kBounds.kappa_max);
      }
      const double best = oracle::grid_water_fill(m, budget, kBounds);
      CHECK(objective(m, k) <= best + 1e-12);
      CHECK(objective(m, k) == doctest::Approx(best).epsilon(1e-5));
    }
  }
  SUBCASE("infeasible budget") {
    const std::vector<double> m{1.0, 1.0};
    CHECK_THROWS(water_fill(m, 1.0, 1.0, kBounds));
  }
}

TEST_CASE("kappa subproblem and design energy") {
  const Discretization disc = square(0.125, 0.25);
  const SourceField f = offset_source(disc.mesh);
  const DesignField start = DesignField::uniform(disc.mesh, kBounds, 1.4);
  const StateSolution s = solve_kelvin(disc, start, f, AveragingScheme::Harmonic, {1e-13, 20000});
  const CellField m = row_energies(*s.q, disc);
  // Under harmonic averaging the design energy is the complementary energy.
  CHECK(design_energy(m, start, disc.mesh) == doctest::Approx(s.energy_dual).epsilon(1e-12));

  const DesignField next = kappa_subproblem(m, kBounds, disc.mesh);
  CHECK(check_admissible(next, disc.mesh).admissible(disc.mesh.domain_measure()));
  CHECK(std::abs(check_admissible(next, disc.mesh).volume_slack) < 1e-10);
  for (std::size_t c = 0; c < disc.mesh.num_cells(); ++c) {
    if (!disc.mesh.is_interior(static_cast<int>(c))) CHECK(next.kappa[c] == kBounds.kappa_max);
  }
  CHECK(design_energy(m, next, disc.mesh) <= design_energy(m, start, disc.mesh));
  // The new design is a valid upper bound for the flux at fixed q.
  const SymPairField kp = pair_conductivity(next, AveragingScheme::Harmonic, disc.pairs);
  CHECK(complementary_energy(*s.q, kp, disc.mesh) <= design_energy(m, next, disc.mesh) * (1.0 + 1e-12));
}

TEST_CASE("alternating design optimizer") {
  SUBCASE("zero source") {
    const Discretization disc = square(0.125, 0.25);
    const SourceField f = custom_source(disc.mesh, std::vector<double>(disc.mesh.num_cells(), 0.0));
    const DesignResult r = optimize_design(disc, f, kBounds);
    CHECK(r.converged);
    CHECK(r.d_value == 0.0);
    for (double x : r.flux_opt.values) CHECK(x == 0.0);
  }
  SUBCASE("matches projected gradient on the compliance") {
    const Discretization disc = square(0.125, 0.5);
    const SourceField f = offset_source(disc.mesh);
    OptimizerConfig cfg;
    cfg.max_iters = 1000;
    cfg.rel_tol = 1e-11;
    const DesignResult r = optimize_design(disc, f, kBounds, cfg);
    const double ref = oracle::projected_gradient_design(disc, f.f.values, kBounds);
    CHECK(r.converged);
    CHECK(r.d_value == doctest::Approx(ref).epsilon(1e-6));
    CHECK(r.d_value >= ref * (1.0 - 1e-6));
  }
  SUBCASE("descent history is monotone and the volume is active") {
    const Discretization disc = square(0.0625, 0.25);
    const SourceField f = offset_source(disc.mesh);
    const DesignResult r = optimize_design(disc, f, kBounds);
    CHECK(r.converged);
    REQUIRE(r.descent_history.size() >= 3);
    for (std::size_t k = 1; k < r.descent_history.size(); ++k) {
      CHECK(r.descent_history[k] <= r.descent_history[k - 1] + 1e-12 * std::abs(r.descent_history[k - 1]));
    }
    CHECK(std::abs(r.volume_slack) < 1e-9);
    CHECK(r.d_value == doctest::Approx(-r.p_value).epsilon(1e-7));
    CHECK(r.d_value == doctest::Approx(r.descent_history.back()).epsilon(1e-14));
  }
  SUBCASE("different starts reach the same value") {
    const Discretization disc = square(0.0625, 0.25);
    const SourceField f = offset_source(disc.mesh);
    OptimizerConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.max_iters = 1000;
    const DesignResult a = optimize_design(disc, f, kBounds, cfg);
    const DesignField init = DesignField::random(disc.mesh, kBounds, 17);
    const DesignResult b = optimize_design(disc, f, kBounds, cfg, &init);
    CHECK(a.d_value == doctest::Approx(b.d_value).epsilon(1e-7));
  }
  SUBCASE("mirror symmetric source gives a mirror symmetric design") {
    const Discretization disc = square(0.0625, 0.25);
    const SourceField f = make_source(disc.mesh, SourceSpec{});
    const DesignResult r = optimize_design(disc, f, kBounds);
    const int lo = disc.mesh.padding();
    const int n = disc.mesh.interior_extent()[0];
    for (int c : disc.mesh.interior_cells()) {
      LatticeIndex idx = disc.mesh.lattice_index(c);
      idx[0] = 2 * lo + n - 1 - idx[0];
      CHECK(r.kappa_opt.kappa[disc.mesh.find_cell(idx)] == doctest::Approx(r.kappa_opt.kappa[c]).epsilon(1e-5));
    }
  }
}

TEST_CASE("saddle point verification") {
  const Discretization disc = square(0.125, 0.25);
  const SourceField f = offset_source(disc.mesh);
  const DesignResult r = optimize_design(disc, f, kBounds);
  const SaddleReport ok = verify_saddle(disc, f, r, 8);
  CHECK(ok.ok);
  CHECK(ok.probes == 8);
  CHECK(ok.value_mismatch < 1e-7);
  CHECK(ok.max_ascent <= 1e-7 * std::max(1.0, r.d_value));

  // A design that leaves the volume unused is not a saddle point.
  DesignResult poor = r;
  poor.kappa_opt = DesignField::uniform(disc.mesh, kBounds, kBounds.kappa_min);
  poor.d_value = -solve_primal(disc, poor.kappa_opt, f, AveragingScheme::Harmonic, {1e-12, 20000}).energy_primal;
  const SaddleReport bad = verify_saddle(disc, f, poor, 8);
  CHECK_FALSE(bad.ok);
  CHECK(bad.max_ascent > 0.0);
  CHECK_FALSE(bad.message.empty());

  DesignResult wrong_value = r;
  wrong_value.d_value *= 1.01;
  CHECK_FALSE(verify_saddle(disc, f, wrong_value, 0).ok);
}
