#include "nlkelvin/sources.hpp"

#include <cmath>

#include "nlkelvin/errors.hpp"

namespace nlkelvin {

std::string to_string(SourcePreset preset) {
  switch (preset) {
    case SourcePreset::Constant:
      return "constant";
    case SourcePreset::GaussianBump:
      return "gaussian_bump";
    case SourcePreset::Checkerboard:
      return "checkerboard";
    case SourcePreset::Custom:
      return "custom";
  }
  return "unknown";
}

SourcePreset parse_source_preset(std::string_view name) {
  if (name == "constant") return SourcePreset::Constant;
  if (name == "gaussian_bump") return SourcePreset::GaussianBump;
  if (name == "checkerboard") return SourcePreset::Checkerboard;
  throw ConfigError("source.preset: unknown preset '" + std::string(name) + "'");
}

double SourceSpec::evaluate(const Vec3& x, int dim) const {
  switch (preset) {
    case SourcePreset::Constant:
      return amplitude;
    case SourcePreset::GaussianBump: {
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
      return amplitude * std::exp(-r2 / (2.0 * width * width));
    }
    case SourcePreset::Checkerboard: {
      long parity = 0;
      for (int a = 0; a < dim; ++a) parity += static_cast<long>(std::floor(x[a] / period));
      return parity % 2 == 0 ? amplitude : -amplitude;
    }
    case SourcePreset::Custom:
      break;
  }
  throw ConfigError("custom sources have no closed-form expression");
}

SourceField make_source(const Mesh& mesh, const SourceSpec& spec) {
  SourceField out{spec.preset, CellField::zeros(mesh, Support::Interior)};
  for (int c : mesh.interior_cells()) out.f.values[c] = spec.evaluate(mesh.center(c), mesh.dim());
  return out;
}

SourceField custom_source(const Mesh& mesh, std::vector<double> values) {
  if (values.size() != mesh.num_cells()) throw StructuralError("source values do not match the mesh");
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (!mesh.is_interior(static_cast<int>(c))) values[c] = 0.0;
  }
  return SourceField{SourcePreset::Custom, CellField{Support::Interior, std::move(values)}};
}

}  // namespace nlkelvin
