#include <doctest.h>

#include <random>
#include <vector>

#include "nlkelvin/geometry.hpp"
#include "nlkelvin/operators.hpp"
#include "nlkelvin/pair_kernels.hpp"

using namespace nlkelvin;
namespace k = nlkelvin::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("OpenMP kernels are bit-identical to the serial reference for any thread count") {
  const Discretization disc =
      Discretization::build(Domain::unit(2), 1.0 / 32.0, KernelSpec(KernelFamily::TruncatedTent, 0.125, 2));
  const k::PairTopology t = topology(disc.pairs);
  const std::size_t np = t.num_pairs();
  const std::size_t nc = t.num_cells();
  const auto u = random_vector(nc, 1);
  const auto q = random_vector(np, 2);
  const auto w = random_vector(np, 3);
  const auto v = random_vector(3 * nc, 4);
  const double scale = 0.37;

  std::vector<double> ref_grad(np), ref_div(nc), ref_rec(3 * nc), ref_adj(np), ref_row(nc);
  k::serial::gradient(t, u, ref_grad);
  k::serial::divergence(t, q, scale, ref_div);
  k::serial::recovery(t, q, scale, ref_rec);
  k::serial::adjoint_recovery(t, v, ref_adj);
  k::serial::row_energy(t, q, w, scale, ref_row);
  const double ref_dot = k::serial::dot(q, w);
  const double ref_wdot = k::serial::weighted_dot(q, w, q);

  const int original = k::max_threads();
  for (int threads : {1, 2, 3, 4, 8}) {
    k::set_threads(threads);
    CAPTURE(threads);
    std::vector<double> grad(np), div(nc), rec(3 * nc), adj(np), row(nc);
    k::omp::gradient(t, u, grad);
    k::omp::divergence(t, q, scale, div);
    k::omp::recovery(t, q, scale, rec);
    k::omp::adjoint_recovery(t, v, adj);
    k::omp::row_energy(t, q, w, scale, row);
    CHECK(grad == ref_grad);
    CHECK(adj == ref_adj);
    // Gathering per cell sums in adjacency order; so does the serial scatter.
    CHECK(div == ref_div);
    CHECK(rec == ref_rec);
    CHECK(row == ref_row);
    CHECK(k::omp::dot(q, w) == doctest::Approx(ref_dot).epsilon(1e-13));
    CHECK(k::omp::weighted_dot(q, w, q) == doctest::Approx(ref_wdot).epsilon(1e-13));
  }
  // Reductions must not depend on the thread count.
  k::set_threads(1);
  const double d1 = k::omp::dot(q, w);
  k::set_threads(7);
  CHECK(k::omp::dot(q, w) == d1);
  k::set_threads(original);
}

TEST_CASE("CSR matvec and axpy agree") {
  // 1D Laplacian with 5 rows.
  std::vector<int> ptr{0, 2, 5, 8, 11, 13};
  std::vector<int> col{0, 1, 0, 1, 2, 1, 2, 3, 2, 3, 4, 3, 4};
  std::vector<double> val{2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2};
  const k::CsrView a{ptr, col, val};
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> ys(5), yo(5);
  k::serial::csr_matvec(a, x, ys);
  k::omp::csr_matvec(a, x, yo);
  CHECK(ys == std::vector<double>{0, 0, 0, 0, 6});
  CHECK(yo == ys);
  std::vector<double> zs(x), zo(x);
  k::serial::axpy(-2.0, x, zs);
  k::omp::axpy(-2.0, x, zo);
  CHECK(zs == std::vector<double>{-1, -2, -3, -4, -5});
  CHECK(zo == zs);
}
