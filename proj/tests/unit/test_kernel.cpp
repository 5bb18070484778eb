#include <doctest.h>

#include <array>
#include <cmath>

#include "nlkelvin/errors.hpp"
#include "nlkelvin/kernel.hpp"
#include "oracles.hpp"

using namespace nlkelvin;

TEST_CASE("sphere moments of a squared coordinate") {
  CHECK(sphere_moment(2, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sphere_moment(2, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sphere_moment(2, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(sphere_moment(4, 2), ConfigError);
  CHECK_THROWS_AS(sphere_moment(2, 4), ConfigError);
}

TEST_CASE("constant ball values") {
  const KernelSpec k(KernelFamily::ConstantBall, 1.0, 2);
  CHECK(kernel_value({2.0, 0.0, 0.0}, k) == 0.0);
  // c^2 * 2 pi delta^4 / 4 = 2
  CHECK(kernel_value({0.3, 0.0, 0.0}, k) == doctest::Approx(1.1283791670955126).epsilon(1e-14));
}

TEST_CASE("truncated tent value against a Cartesian moment oracle") {
  const KernelSpec k(KernelFamily::TruncatedTent, 1.0, 2);
  // Frozen from oracle::cartesian_second_moment on the unscaled profile (1 - r)_+.
  CHECK(kernel_value({0.5, 0.0, 0.0}, k) == doctest::Approx(2.1850968611841584).epsilon(1e-12));

  const double moment =
      oracle::cartesian_second_moment([](double r) { return std::max(0.0, 1.0 - r); }, 1.0, 2, 1000);
  const double c = std::sqrt(2.0 / moment);
  CHECK(kernel_value({0.5, 0.0, 0.0}, k) == doctest::Approx(0.5 * c).epsilon(1e-5));
}

TEST_CASE("normalization check") {
  SUBCASE("constant ball is exact") {
    for (double delta : {0.01, 0.1, 0.7, 1.0}) {
      CHECK(check_normalization(KernelSpec(KernelFamily::ConstantBall, delta, 2)) < 1e-12);
    }
  }
  SUBCASE("tent to quadrature accuracy") {
    CHECK(check_normalization(KernelSpec(KernelFamily::TruncatedTent, 0.25, 2)) < 1e-6);
  }
  SUBCASE("doubled scale gives residual 3") {
    const double c = normalization_constant(KernelFamily::ConstantBall, 0.5, 2);
    const KernelSpec k = KernelSpec::with_scale(KernelFamily::ConstantBall, 0.5, 2, 2.0 * c);
    CHECK(check_normalization(k) == doctest::Approx(3.0).epsilon(1e-10));
  }
  SUBCASE("log-spaced delta sweep in every dimension") {
    for (auto family : {KernelFamily::ConstantBall, KernelFamily::TruncatedTent}) {
      for (int dim = 1; dim <= 3; ++dim) {
        for (int e = 0; e <= 8; ++e) {
          const double delta = std::pow(10.0, -2.0 + 0.25 * e);
          CHECK(check_normalization(KernelSpec(family, delta, dim)) < 1e-6);
        }
      }
    }
  }
  SUBCASE("too few quadrature panels") {
    CHECK_THROWS_AS(check_normalization(KernelSpec(KernelFamily::TruncatedTent, 1.0, 2), 16), ConfigError);
  }
}

TEST_CASE("tent normalization agrees with brute-force quadrature in 3D") {
  const KernelSpec k(KernelFamily::TruncatedTent, 1.0, 3);
  const double moment = oracle::cartesian_second_moment([&](double r) { return k.radial(r); }, 1.0, 3, 160);
  CHECK(moment == doctest::Approx(3.0).epsilon(2e-3));
}

TEST_CASE("radial symmetry and compact support") {
  for (auto family : {KernelFamily::ConstantBall, KernelFamily::TruncatedTent}) {
    const KernelSpec k(family, 0.8, 3);
    const Vec3 z{0.1, -0.3, 0.45};
    const double ref = k(z);
    const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (const auto& p : perms) {
      for (int signs = 0; signs < 8; ++signs) {
        Vec3 w{};
        for (int a = 0; a < 3; ++a) w[a] = ((signs >> a) & 1 ? -1.0 : 1.0) * z[p[a]];
        CHECK(k(w) == ref);
      }
    }
    CHECK(k({0.8, 0.0, 0.0}) == 0.0);
    CHECK(k({0.6, 0.6, 0.0}) == 0.0);
    CHECK(k.radial(0.8) == 0.0);
    CHECK(k.radial(1e3) == 0.0);
  }
}

TEST_CASE("family names round trip") {
  for (auto family : {KernelFamily::ConstantBall, KernelFamily::TruncatedTent}) {
    CHECK(parse_kernel_family(to_string(family)) == family);
  }
  CHECK_THROWS_AS(parse_kernel_family("gaussian"), ConfigError);
  CHECK_THROWS_AS(KernelSpec(KernelFamily::ConstantBall, -1.0, 2), ConfigError);
}
