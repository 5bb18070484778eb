#include <doctest.h>

#include <cmath>
#include <random>

#include "nlkelvin/errors.hpp"
#include "nlkelvin/operators.hpp"
#include "nlkelvin/state_solvers.hpp"
#include "oracles.hpp"

using namespace nlkelvin;

namespace {

Discretization square(double h, double delta, KernelFamily family = KernelFamily::TruncatedTent) {
  return Discretization::build(Domain::unit(2), h, KernelSpec(family, delta, 2));
}

const MaterialBounds kBounds{1.0, 2.0, 1.4};
// Budget large enough for uniform fields at both ends of the box.
const MaterialBounds kWide{0.5, 2.5, 2.2};

double max_abs_diff_interior(const CellField& u, const Eigen::VectorXd& ref, const Mesh& mesh) {
  double worst = 0.0;
  for (int c : mesh.interior_cells()) worst = std::max(worst, std::abs(u.values[c] - ref(mesh.interior_index(c))));
  return worst;
}

SourceField bump_source(const Mesh& mesh) {
  SourceSpec spec;
  spec.preset = SourcePreset::GaussianBump;
  spec.center = {0.3, 0.6, 0.5};
  spec.width = 0.2;
  return make_source(mesh, spec);
}

}  // namespace

TEST_CASE("stiffness form equals the squared gradient norm") {
  const Discretization disc = square(0.0625, 0.25);
  const DesignField kappa = DesignField::random(disc.mesh, kBounds, 2);
  const SymPairField kp = pair_conductivity(kappa, AveragingScheme::Harmonic, disc.pairs);
  const CsrMatrix a = assemble_stiffness(kp, disc.pairs, disc.mesh);
  REQUIRE(a.rows == static_cast<int>(disc.mesh.num_interior()));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    CellField u = CellField::zeros(disc.mesh);
    std::vector<double> x(a.rows);
    for (int c : disc.mesh.interior_cells()) u.values[c] = x[disc.mesh.interior_index(c)] = dist(rng);
    const PairFlux g = apply_gradient(u, disc.pairs);
    PairFlux kg = g;
    for (std::size_t p = 0; p < g.size(); ++p) kg.values[p] *= kp.values[p];
    CHECK(a.quadratic_form(x) == doctest::Approx(pair_inner(kg, g, disc.mesh)).epsilon(1e-12));
  }

  // Symmetric with positive diagonal.
  for (int r = 0; r < a.rows; ++r) {
    for (int e = a.row_ptr[r]; e < a.row_ptr[r + 1]; ++e) {
      const int c = a.col[e];
      if (c == r) {
        CHECK(a.val[e] > 0.0);
        continue;
      }
      bool found = false;
      for (int e2 = a.row_ptr[c]; e2 < a.row_ptr[c + 1]; ++e2) {
        if (a.col[e2] == r) {
          CHECK(a.val[e2] == a.val[e]);
          found = true;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("hand-assembled stiffness in 1D") {
  // h = 0.25, delta = 0.5: nearest neighbours only, four interior cells.
  const Discretization disc = Discretization::build(Domain::unit(1), 0.25, KernelSpec(KernelFamily::ConstantBall, 0.5, 1));
  const DesignField kappa = DesignField::uniform(disc.mesh, kBounds, 1.0);
  const CsrMatrix a = assemble_stiffness(pair_conductivity(kappa, AveragingScheme::Harmonic, disc.pairs), disc.pairs,
                                         disc.mesh);
  const double w = disc.kernel.radial(0.25);
  const double off = -2.0 * 0.25 * 0.25 * w * w;
  REQUIRE(a.rows == 4);
  std::vector<double> dense(16, 0.0);
  for (int r = 0; r < 4; ++r) {
    for (int e = a.row_ptr[r]; e < a.row_ptr[r + 1]; ++e) dense[4 * r + a.col[e]] += a.val[e];
  }
  for (int r = 0; r < 4; ++r) {
    CHECK(dense[4 * r + r] == doctest::Approx(-2.0 * off).epsilon(1e-14));
    if (r + 1 < 4) CHECK(dense[4 * r + r + 1] == doctest::Approx(off).epsilon(1e-14));
    if (r + 2 < 4) CHECK(dense[4 * r + r + 2] == 0.0);
  }
}

TEST_CASE("primal solve") {
  SUBCASE("zero source gives zero state") {
    const Discretization disc = square(0.125, 0.25);
    const SourceField f = custom_source(disc.mesh, std::vector<double>(disc.mesh.num_cells(), 0.0));
    const StateSolution s = solve_primal(disc, DesignField::uniform(disc.mesh, kBounds, 1.4), f,
                                         AveragingScheme::Harmonic);
    for (double x : s.u.values) CHECK(x == 0.0);
    CHECK(s.energy_primal == 0.0);
  }
  SUBCASE("matches a dense LU solve") {
    const Discretization disc = square(0.125, 0.5);
    const DesignField kappa = DesignField::random(disc.mesh, kBounds, 9);
    const SourceField f = bump_source(disc.mesh);
    for (auto scheme : {AveragingScheme::Harmonic, AveragingScheme::Arithmetic, AveragingScheme::Geometric}) {
      const StateSolution s = solve_primal(disc, kappa, f, scheme, {1e-13, 20000});
      const oracle::PrimalResult ref = oracle::dense_primal(disc, kappa.kappa, f.f.values, scheme);
      CHECK(max_abs_diff_interior(s.u, ref.u, disc.mesh) <= 1e-10 * ref.u.lpNorm<Eigen::Infinity>());
      CHECK(s.energy_primal == doctest::Approx(ref.energy).epsilon(1e-10));
      CHECK(s.residuals.linear_solve < 1e-13);
      for (std::size_t c = 0; c < disc.mesh.num_cells(); ++c) {
        if (!disc.mesh.is_interior(static_cast<int>(c))) CHECK(s.u.values[c] == 0.0);
      }
    }
  }
  SUBCASE("mirror symmetry of a symmetric problem") {
    const Discretization disc = square(0.0625, 0.25);
    const SourceField f = make_source(disc.mesh, SourceSpec{});
    const StateSolution s = solve_primal(disc, DesignField::uniform(disc.mesh, kBounds, 1.4), f,
                                         AveragingScheme::Harmonic, {1e-13, 20000});
    for (int c : disc.mesh.interior_cells()) {
      LatticeIndex idx = disc.mesh.lattice_index(c);
      const int lo = disc.mesh.padding();
      const int n = disc.mesh.interior_extent()[0];
      idx[0] = 2 * lo + n - 1 - idx[0];
      const int mirror = disc.mesh.find_cell(idx);
      REQUIRE(mirror >= 0);
      CHECK(s.u.values[mirror] == doctest::Approx(s.u.values[c]).epsilon(1e-9));
    }
  }
  SUBCASE("energy scales with the conductivity and the source") {
    const Discretization disc = square(0.125, 0.25);
    const SourceField f = bump_source(disc.mesh);
    SourceField f2 = f;
    for (double& x : f2.f.values) x *= 3.0;
    const double e1 = solve_primal(disc, DesignField::uniform(disc.mesh, kWide, 1.0), f, AveragingScheme::Harmonic,
                                   {1e-13, 20000}).energy_primal;
    const double e2 = solve_primal(disc, DesignField::uniform(disc.mesh, kWide, 2.0), f, AveragingScheme::Harmonic,
                                   {1e-13, 20000}).energy_primal;
    const double e3 = solve_primal(disc, DesignField::uniform(disc.mesh, kWide, 1.0), f2,
                                   AveragingScheme::Harmonic, {1e-13, 20000}).energy_primal;
    CHECK(e1 < 0.0);
    CHECK(e2 == doctest::Approx(0.5 * e1).epsilon(1e-10));
    CHECK(e3 == doctest::Approx(9.0 * e1).epsilon(1e-10));
  }
  SUBCASE("warm start from the solution converges immediately") {
    const Discretization disc = square(0.0625, 0.25);
    const DesignField kappa = DesignField::uniform(disc.mesh, kBounds, 1.4);
    const SourceField f = bump_source(disc.mesh);
    const StateSolution cold = solve_primal(disc, kappa, f, AveragingScheme::Harmonic, {1e-10, 20000});
    const StateSolution warm = solve_primal(disc, kappa, f, AveragingScheme::Harmonic, {1e-10, 20000}, &cold.u);
    CHECK(warm.iterations <= 1);
  }
}

TEST_CASE("Kelvin solve") {
  SUBCASE("zero source gives zero flux") {
    const Discretization disc = square(0.125, 0.25);
    const SourceField f = custom_source(disc.mesh, std::vector<double>(disc.mesh.num_cells(), 0.0));
    const StateSolution s = solve_kelvin(disc, DesignField::uniform(disc.mesh, kBounds, 1.4), f,
                                         AveragingScheme::Harmonic);
    REQUIRE(s.q.has_value());
    for (double x : s.q->values) CHECK(x == 0.0);
    CHECK(s.energy_dual == 0.0);
  }
  SUBCASE("matches a dense KKT solve and closes the duality gap") {
    const Discretization disc = square(0.125, 0.25);
    const DesignField kappa = DesignField::random(disc.mesh, kBounds, 4);
    const SourceField f = bump_source(disc.mesh);
    const StateSolution s = solve_kelvin(disc, kappa, f, AveragingScheme::Harmonic, {1e-13, 20000});
    const oracle::KktResult ref = oracle::dense_kkt(disc, kappa.kappa, f.f.values, AveragingScheme::Harmonic);
    REQUIRE(ref.pairs.size() == s.q->size());
    double worst = 0.0;
    for (std::size_t p = 0; p < ref.pairs.size(); ++p) {
      REQUIRE(ref.pairs[p].i == disc.pairs.first()[p]);
      REQUIRE(ref.pairs[p].j == disc.pairs.second()[p]);
      worst = std::max(worst, std::abs(s.q->values[p] - ref.q(p)));
    }
    CHECK(worst <= 1e-8 * ref.q.lpNorm<Eigen::Infinity>());
    CHECK(s.energy_dual == doctest::Approx(ref.energy).epsilon(1e-8));
    // The primal state is the multiplier of the flux problem.
    CHECK(max_abs_diff_interior(s.u, ref.u, disc.mesh) <= 1e-8 * ref.u.lpNorm<Eigen::Infinity>());
    // Strong duality: I_dual = -min I_primal.
    CHECK(s.energy_dual == doctest::Approx(-s.energy_primal).epsilon(1e-10));
    CHECK(s.residuals.constraint <= 1e-10 * cell_norm(f.f, disc.mesh));
  }
  SUBCASE("ordered-pair formulation has an antisymmetric minimizer") {
    const Discretization disc = square(0.25, 0.5);
    const DesignField kappa = DesignField::random(disc.mesh, kBounds, 5);
    const SourceField f = make_source(disc.mesh, SourceSpec{});
    const StateSolution s = solve_kelvin(disc, kappa, f, AveragingScheme::Harmonic, {1e-13, 20000});
    const oracle::OrderedKktResult ref = oracle::ordered_pair_kkt(disc, kappa.kappa, f.f.values,
                                                                  AveragingScheme::Harmonic);
    CHECK(s.energy_dual == doctest::Approx(ref.energy).epsilon(1e-9));
  }
  SUBCASE("flux is minus the conductivity times the gradient") {
    const Discretization disc = square(0.0625, 0.25);
    const DesignField kappa = DesignField::checkerboard(disc.mesh, kBounds, 2);
    const SourceField f = bump_source(disc.mesh);
    const StateSolution s = solve_kelvin(disc, kappa, f, AveragingScheme::Arithmetic);
    const SymPairField kp = pair_conductivity(kappa, AveragingScheme::Arithmetic, disc.pairs);
    const PairFlux g = apply_gradient(s.u, disc.pairs);
    for (std::size_t p = 0; p < g.size(); ++p) CHECK(s.q->values[p] == doctest::Approx(-kp.values[p] * g.values[p]));
    CHECK(complementary_energy(*s.q, kp, disc.mesh) == doctest::Approx(s.energy_dual).epsilon(1e-14));
    const CellField d = apply_divergence(*s.q, disc.pairs, disc.mesh);
    for (int c : disc.mesh.interior_cells()) CHECK(d.values[c] == doctest::Approx(f.f.values[c]).epsilon(1e-7));
  }
}

TEST_CASE("rank-deficient divergence is reported") {
  // A pair list with delta below the mesh spacing has no pairs.
  const Mesh mesh = Mesh::build(Domain::unit(2), 0.125, 0.25);
  const PairList empty = PairList::build(mesh, KernelSpec(KernelFamily::TruncatedTent, 0.0625, 2));
  CHECK(empty.size() == 0);
  CHECK_THROWS_AS(require_full_rank(mesh, empty), StructuralError);
  CHECK_NOTHROW(require_full_rank(mesh, PairList::build(mesh, KernelSpec(KernelFamily::TruncatedTent, 0.25, 2))));
}

TEST_CASE("inf-sup constant") {
  SUBCASE("matches the dense generalized eigenproblem") {
    for (double delta : {0.25, 0.5}) {
      const Discretization disc = square(0.125, delta);
      const InfSupReport r = infsup_constant(disc.mesh, disc.pairs, {1e-13, 20000});
      CHECK(r.beta == doctest::Approx(oracle::dense_infsup(disc)).epsilon(1e-8));
      CHECK(r.beta > 0.0);
      CHECK(r.beta < 1.0);
      CHECK(r.poincare == doctest::Approx(1.0 / std::sqrt(r.lambda_min)).epsilon(1e-14));
    }
  }
  SUBCASE("single interior cell has a closed form") {
    Domain d = Domain::unit(2);
    d.hi = {0.25, 0.25, 0.0};
    const Discretization disc = Discretization::build(d, 0.25, KernelSpec(KernelFamily::ConstantBall, 0.5, 2));
    REQUIRE(disc.mesh.num_interior() == 1);
    const int c = disc.mesh.interior_cells()[0];
    double sum = 0.0;
    for (int e = disc.pairs.adjacency_ptr()[c]; e < disc.pairs.adjacency_ptr()[c + 1]; ++e) {
      const double w = disc.pairs.omega()[disc.pairs.adjacency_pair()[e]];
      sum += w * w;
    }
    const double a = 2.0 * disc.mesh.cell_measure() * sum;
    const InfSupReport r = infsup_constant(disc.mesh, disc.pairs);
    CHECK(r.lambda_min == doctest::Approx(a).epsilon(1e-12));
    CHECK(r.beta == doctest::Approx(std::sqrt(a / (1.0 + a))).epsilon(1e-12));
  }
}

TEST_CASE("stability ratio") {
  const Discretization disc = square(0.0625, 0.25);
  const SourceField zero = custom_source(disc.mesh, std::vector<double>(disc.mesh.num_cells(), 0.0));
  const StateSolution s0 = solve_kelvin(disc, DesignField::uniform(disc.mesh, kBounds, 1.4), zero,
                                        AveragingScheme::Harmonic);
  CHECK(stability_check(s0, zero, disc) == 0.0);

  const SourceField f = make_source(disc.mesh, SourceSpec{});
  const double lo = stability_check(
      solve_kelvin(disc, DesignField::uniform(disc.mesh, kWide, 1.0), f, AveragingScheme::Harmonic), f, disc);
  const double hi = stability_check(
      solve_kelvin(disc, DesignField::uniform(disc.mesh, kWide, 2.0), f, AveragingScheme::Harmonic), f, disc);
  CHECK(lo > 1.0);
  CHECK(hi > 1.0);
  // A stiffer material halves the state but leaves the flux unchanged.
  CHECK(hi < lo);
  CHECK_THROWS_AS(stability_check(solve_primal(disc, DesignField::uniform(disc.mesh, kBounds, 1.4), f,
                                               AveragingScheme::Harmonic),
                                  f, disc),
                  StructuralError);
}

TEST_CASE("iteration cap raises SolverError with a history") {
  const Discretization disc = square(0.0625, 0.25);
  const SourceField f = bump_source(disc.mesh);
  try {
    solve_primal(disc, DesignField::uniform(disc.mesh, kBounds, 1.4), f, AveragingScheme::Harmonic, {1e-12, 1});
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK_FALSE(e.residual_history().empty());
  }
}
