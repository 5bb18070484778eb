#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nlkelvin/fields.hpp"
#include "nlkelvin/geometry.hpp"

namespace nlkelvin {

enum class SourcePreset { Constant, GaussianBump, Checkerboard, Custom };

std::string to_string(SourcePreset preset);
SourcePreset parse_source_preset(std::string_view name);

struct SourceSpec {
  SourcePreset preset = SourcePreset::Constant;
  double amplitude = 1.0;
  Vec3 center{0.5, 0.5, 0.5};  ///< GaussianBump
  double width = 0.15;         ///< GaussianBump standard deviation
  double period = 0.25;        ///< Checkerboard block edge

  double evaluate(const Vec3& x, int dim) const;
};

/// Heat source on interior cells, evaluated at cell centres; zero on the collar.
struct SourceField {
  SourcePreset preset = SourcePreset::Custom;
  CellField f;
};

SourceField make_source(const Mesh& mesh, const SourceSpec& spec);

/// Wraps explicit per-cell values; collar entries are zeroed.
SourceField custom_source(const Mesh& mesh, std::vector<double> values);

}  // namespace nlkelvin
