#include "nlkelvin/material.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nlkelvin/errors.hpp"

namespace nlkelvin {

void MaterialBounds::validate() const {
  if (!(kappa_min > 0.0)) throw ConfigError("material.kappa_min must be positive");
  if (!(kappa_max > kappa_min)) throw ConfigError("material.kappa_max must exceed material.kappa_min");
  if (!(gamma > kappa_min && gamma < kappa_max)) {
    throw ConfigError("material.gamma must lie strictly between kappa_min and kappa_max");
  }
}

std::string to_string(AveragingScheme scheme) {
  switch (scheme) {
    case AveragingScheme::Harmonic:
      return "harmonic";
    case AveragingScheme::Arithmetic:
      return "arithmetic";
    case AveragingScheme::Geometric:
      return "geometric";
  }
  return "unknown";
}

AveragingScheme parse_averaging_scheme(std::string_view name) {
  if (name == "harmonic") return AveragingScheme::Harmonic;
  if (name == "arithmetic") return AveragingScheme::Arithmetic;
  if (name == "geometric") return AveragingScheme::Geometric;
  throw ConfigError("material.scheme: unknown scheme '" + std::string(name) + "'");
}

DesignField DesignField::uniform(const Mesh& mesh, const MaterialBounds& bounds, double value) {
  return DesignField{std::vector<double>(mesh.num_cells(), value), bounds};
}

DesignField DesignField::checkerboard(const Mesh& mesh, const MaterialBounds& bounds, int block) {
  const double low = bounds.kappa_min;
  const double high = std::min(bounds.kappa_max, 2.0 * bounds.gamma - bounds.kappa_min);
  DesignField field = uniform(mesh, bounds, low);
  const int b = std::max(1, block);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& idx = mesh.lattice_index(static_cast<int>(c));
    int parity = 0;
    for (int a = 0; a < mesh.dim(); ++a) {
      parity += static_cast<int>(std::floor(static_cast<double>(idx[a] - mesh.padding()) / b));
    }
    field.kappa[c] = (parity % 2 + 2) % 2 == 0 ? high : low;
  }
  // An odd number of blocks leaves the high value in the majority; pull it back into budget.
  const AdmissibilityReport report = check_admissible(field, mesh);
  if (report.volume_slack < 0.0) {
    double high_volume = 0.0;
    for (int c : mesh.interior_cells()) {
      if (field.kappa[c] > low) high_volume += (field.kappa[c] - low) * mesh.cell_measure();
    }
    const double shrink = (high_volume + report.volume_slack) / high_volume;
    for (double& k : field.kappa) {
      if (k > low) k = low + (k - low) * shrink;
    }
  }
  return field;
}

DesignField DesignField::random(const Mesh& mesh, const MaterialBounds& bounds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(bounds.kappa_min, bounds.kappa_max);
  DesignField field = uniform(mesh, bounds, bounds.kappa_min);
  for (double& k : field.kappa) k = dist(rng);
  double excess = 0.0;
  for (int c : mesh.interior_cells()) excess += (field.kappa[c] - bounds.kappa_min) * mesh.cell_measure();
  const double budget = (bounds.gamma - bounds.kappa_min) * mesh.domain_measure();
  if (excess > budget) {
    const double shrink = budget / excess;
    for (int c : mesh.interior_cells()) {
      field.kappa[c] = bounds.kappa_min + (field.kappa[c] - bounds.kappa_min) * shrink;
    }
  }
  return field;
}

double average_conductivity(double a, double b, AveragingScheme scheme) {
  switch (scheme) {
    case AveragingScheme::Harmonic:
      return 2.0 * a * b / (a + b);
    case AveragingScheme::Arithmetic:
      return 0.5 * (a + b);
    case AveragingScheme::Geometric:
      return std::sqrt(a * b);
  }
  return 0.0;
}

SymPairField pair_conductivity(const DesignField& kappa, AveragingScheme scheme, const PairList& pairs) {
  if (kappa.kappa.size() != pairs.num_cells()) throw StructuralError("design field does not match the pair list");
  SymPairField out(pairs);
  const auto first = pairs.first();
  const auto second = pairs.second();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    out.values[p] = average_conductivity(kappa.kappa[first[p]], kappa.kappa[second[p]], scheme);
  }
  return out;
}

AdmissibilityReport check_admissible(const DesignField& kappa, const Mesh& mesh) {
  if (kappa.kappa.size() != mesh.num_cells()) throw StructuralError("design field does not match the mesh");
  AdmissibilityReport report;
  report.bounds_ok = std::all_of(kappa.kappa.begin(), kappa.kappa.end(), [&](double k) {
    return k >= kappa.bounds.kappa_min && k <= kappa.bounds.kappa_max;
  });
  double volume = 0.0;
  for (int c : mesh.interior_cells()) volume += kappa.kappa[c];
  report.volume_slack = kappa.bounds.gamma * mesh.domain_measure() - volume * mesh.cell_measure();
  return report;
}

void require_admissible(const DesignField& kappa, const Mesh& mesh) {
  const AdmissibilityReport report = check_admissible(kappa, mesh);
  if (!report.bounds_ok) throw ConfigError("design field violates the conductivity bounds");
  if (!report.admissible(mesh.domain_measure())) {
    std::ostringstream msg;
    msg << "design field violates the volume budget by " << -report.volume_slack;
    throw ConfigError(msg.str());
  }
}

}  // namespace nlkelvin
