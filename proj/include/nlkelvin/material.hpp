#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nlkelvin/fields.hpp"
#include "nlkelvin/geometry.hpp"

namespace nlkelvin {

/// Box bounds and volume budget of the admissible conductivities.
struct MaterialBounds {
  double kappa_min = 1.0;
  double kappa_max = 2.0;
  double gamma = 1.4;

  /// Requires 0 < kappa_min < kappa_max and gamma strictly between them.
  void validate() const;
};

enum class AveragingScheme { Harmonic, Arithmetic, Geometric };

std::string to_string(AveragingScheme scheme);
AveragingScheme parse_averaging_scheme(std::string_view name);

/// Conductivity per cell of Omega_delta. Only interior cells count towards the volume.
struct DesignField {
  std::vector<double> kappa;
  MaterialBounds bounds;

  static DesignField uniform(const Mesh& mesh, const MaterialBounds& bounds, double value);
  /// Alternates kappa_min and 2*gamma - kappa_min on lattice blocks of the given edge
  /// length (in cells), so the interior mean is close to gamma.
  static DesignField checkerboard(const Mesh& mesh, const MaterialBounds& bounds, int block);
  /// Uniform random values in the box, rescaled towards kappa_min until the volume fits.
  static DesignField random(const Mesh& mesh, const MaterialBounds& bounds, std::uint64_t seed);
};

/// Mean of two conductivities under a scheme.
double average_conductivity(double a, double b, AveragingScheme scheme);

/// Per-pair averaged conductivity.
SymPairField pair_conductivity(const DesignField& kappa, AveragingScheme scheme, const PairList& pairs);

struct AdmissibilityReport {
  bool bounds_ok = false;
  /// gamma |Omega| - sum_{interior} kappa_i h^n
  double volume_slack = 0.0;

  /// Bounds hold and the volume is within 1e-9 |Omega| of the budget.
  bool admissible(double domain_measure) const { return bounds_ok && volume_slack >= -1e-9 * domain_measure; }
};

AdmissibilityReport check_admissible(const DesignField& kappa, const Mesh& mesh);

/// Throws ConfigError if kappa is not admissible on the mesh.
void require_admissible(const DesignField& kappa, const Mesh& mesh);

}  // namespace nlkelvin
