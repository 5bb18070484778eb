#pragma once

#include <string>
#include <string_view>

#include "nlkelvin/vec.hpp"

namespace nlkelvin {

enum class KernelFamily { ConstantBall, TruncatedTent };

std::string to_string(KernelFamily family);
/// Accepts "constant_ball" and "truncated_tent".
KernelFamily parse_kernel_family(std::string_view name);

/// Surface area of the unit sphere S^{n-1} (|S^0| = 2).
double sphere_area(int dim);

/// Average of |s.e|^p over the unit sphere. Only p = 2 is supported, where it equals 1/n.
double sphere_moment(int p, int dim);

/// Radial interaction kernel supported in the open ball of radius delta.
///
/// The scale c is fixed so that the *squared* kernel has the second moment
///   int |z|^2 omega(z)^2 dz = 1 / K_{2,n} = n.
/// Normalizing omega instead of omega^2 is a common mistake; every consumer of
/// this class (gradient, recovery, stiffness) relies on the omega^2 moment.
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, double delta, int dim);

  /// Same family and support but an explicit scale; used to probe the normalization check.
  static KernelSpec with_scale(KernelFamily family, double delta, int dim, double scale);

  KernelFamily family() const { return family_; }
  double delta() const { return delta_; }
  int dim() const { return dim_; }
  double scale() const { return scale_; }

  /// Kernel as a function of |z|.
  double radial(double r) const;
  double operator()(const Vec3& z) const { return radial(norm(z)); }

 private:
  KernelSpec(KernelFamily family, double delta, int dim, double scale);

  KernelFamily family_;
  double delta_;
  int dim_;
  double scale_;
};

/// Analytic normalization constant for a family.
double normalization_constant(KernelFamily family, double delta, int dim);

double kernel_value(const Vec3& z, const KernelSpec& spec);

/// Relative deviation of the radial quadrature of int |z|^2 omega^2 from n.
/// quad_resolution is the number of panels along the radius (>= 32), each
/// integrated with 7-point Gauss-Legendre.
double check_normalization(const KernelSpec& spec, int quad_resolution = 64);

}  // namespace nlkelvin
