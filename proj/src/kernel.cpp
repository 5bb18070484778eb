#include "nlkelvin/kernel.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "nlkelvin/errors.hpp"

namespace nlkelvin {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw ConfigError("kernel: dimension must be 1, 2 or 3");
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::ConstantBall:
      return "constant_ball";
    case KernelFamily::TruncatedTent:
      return "truncated_tent";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "constant_ball") return KernelFamily::ConstantBall;
  if (name == "truncated_tent") return KernelFamily::TruncatedTent;
  throw ConfigError("kernel.family: unknown family '" + std::string(name) + "'");
}

double sphere_area(int dim) {
  check_dim(dim);
  const double pi = boost::math::constants::pi<double>();
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * pi;
    default:
      return 4.0 * pi;
  }
}

double sphere_moment(int p, int dim) {
  if (p != 2) throw ConfigError("sphere_moment: only p = 2 is supported");
  check_dim(dim);
  return 1.0 / dim;
}

double normalization_constant(KernelFamily family, double delta, int dim) {
  check_dim(dim);
  if (!(delta > 0.0)) throw ConfigError("kernel.delta must be positive");
  const double n = dim;
  const double target = 1.0 / sphere_moment(2, dim);
  // int_0^delta r^{n+1} g(r/delta)^2 dr = delta^{n+2} * m, with m the profile moment.
  double profile_moment = 0.0;
  switch (family) {
    case KernelFamily::ConstantBall:
      profile_moment = 1.0 / (n + 2.0);
      break;
    case KernelFamily::TruncatedTent:
      // Beta(n+2, 3)
      profile_moment = 2.0 / ((n + 2.0) * (n + 3.0) * (n + 4.0));
      break;
  }
  return std::sqrt(target / (sphere_area(dim) * std::pow(delta, n + 2.0) * profile_moment));
}

KernelSpec::KernelSpec(KernelFamily family, double delta, int dim)
    : KernelSpec(family, delta, dim, normalization_constant(family, delta, dim)) {}

KernelSpec::KernelSpec(KernelFamily family, double delta, int dim, double scale)
    : family_(family), delta_(delta), dim_(dim), scale_(scale) {
  check_dim(dim);
  if (!(delta > 0.0)) throw ConfigError("kernel.delta must be positive");
  if (!(scale > 0.0)) throw ConfigError("kernel scale must be positive");
}

KernelSpec KernelSpec::with_scale(KernelFamily family, double delta, int dim, double scale) {
  return KernelSpec(family, delta, dim, scale);
}

double KernelSpec::radial(double r) const {
  if (r >= delta_) return 0.0;
  switch (family_) {
    case KernelFamily::ConstantBall:
      return scale_;
    case KernelFamily::TruncatedTent:
      return scale_ * (1.0 - r / delta_);
  }
  return 0.0;
}

double kernel_value(const Vec3& z, const KernelSpec& spec) { return spec(z); }

double check_normalization(const KernelSpec& spec, int quad_resolution) {
  if (quad_resolution < 32) throw ConfigError("check_normalization: quad_resolution must be >= 32");
  const double delta = spec.delta();
  const int n = spec.dim();
  const double panel = delta / quad_resolution;
  double integral = 0.0;
  for (int k = 0; k < quad_resolution; ++k) {
    const double a = k * panel;
    const double b = a + panel;
    integral += boost::math::quadrature::gauss<double, 7>::integrate(
        [&](double r) {
          const double w = spec.radial(r);
          return std::pow(r, n + 1) * w * w;
        },
        a, b);
  }
  integral *= sphere_area(n);
  const double target = 1.0 / sphere_moment(2, n);
  return std::abs(integral - target) / target;
}

}  // namespace nlkelvin
