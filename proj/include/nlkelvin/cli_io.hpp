#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nlkelvin/design_opt.hpp"
#include "nlkelvin/fields.hpp"
#include "nlkelvin/geometry.hpp"
#include "nlkelvin/kernel.hpp"
#include "nlkelvin/linear_solver.hpp"
#include "nlkelvin/material.hpp"
#include "nlkelvin/sources.hpp"

namespace nlkelvin {

enum class ExitCode : int { Ok = 0, ValidationFailure = 1, SolverFailure = 2, Usage = 64 };

/// Fully resolved run configuration.
///
/// Text format: INI-style sections [domain] [mesh] [kernel] [material] [source]
/// [solver] [optimizer] [output] holding `key = value` lines; `;` and `#` start
/// comment lines. Lists are whitespace separated.
struct RunConfig {
  Domain domain;
  /// Explicit mesh width; 0 means h = delta / ratio.
  double h = 0.0;
  double ratio = 4.0;

  KernelFamily family = KernelFamily::TruncatedTent;
  double delta = 0.0;
  std::vector<double> delta_list;

  MaterialBounds bounds;
  AveragingScheme scheme = AveragingScheme::Harmonic;
  /// Fixed design for the solve commands: uniform, checkerboard or random.
  std::string field = "uniform";
  /// Value of the uniform field; 0 means gamma.
  double field_value = 0.0;
  /// Checkerboard block edge in cells.
  int block = 4;

  SourceSpec source;
  SolverOptions solver;
  OptimizerConfig optimizer;
  std::uint64_t seed = 1;
  /// Optimizer start: uniform (kappa = gamma) or random.
  std::string init = "uniform";

  std::string output_dir = "nlkelvin_out";

  double mesh_width(double for_delta) const { return h > 0.0 ? h : for_delta / ratio; }
  /// delta_list if present, else {delta}.
  std::vector<double> deltas() const;
  /// INI text of every key with defaults filled in; parse_config(to_ini()) reproduces *this.
  std::string to_ini() const;
};

/// Throws ConfigError naming the offending key path.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the design field requested by `material.field` on a mesh.
DesignField make_design(const RunConfig& cfg, const Mesh& mesh);

/// CSV with header `cell_id,x[,y[,z]],value` (or value_x,value_y,...), one row per
/// supported cell in id order, 17 significant digits, LF line endings.
void write_field_csv(const CellField& field, const Mesh& mesh, const std::filesystem::path& path);
void write_field_csv(const VectorCellField& field, const Mesh& mesh, const std::filesystem::path& path);
/// Interior cells only.
void write_field_csv(const DesignField& field, const Mesh& mesh, const std::filesystem::path& path);
/// cell_id,x[,y[,z]],interior
void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& path);

struct FieldTable {
  std::vector<std::string> columns;
  std::vector<int> cell_ids;
  /// Row-major, one row per cell, all columns after cell_id.
  std::vector<std::vector<double>> rows;
};

FieldTable read_field_csv(const std::filesystem::path& path);

/// Runs `nlkelvin <subcommand> --config <file> [--out <dir>] [--dual]`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace nlkelvin
