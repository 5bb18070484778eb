#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlkelvin/cli_io.hpp"
#include "nlkelvin/errors.hpp"

namespace nlkelvin {

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
  }
  void header(const Mesh& mesh, const std::vector<std::string>& values) {
    out_ << "cell_id";
    static const char* axes[] = {"x", "y", "z"};
    for (int a = 0; a < mesh.dim(); ++a) out_ << ',' << axes[a];
    for (const auto& v : values) out_ << ',' << v;
    out_ << '\n';
  }
  void row(const Mesh& mesh, int cell, std::span<const double> values) {
    out_ << cell;
    const Vec3& x = mesh.center(cell);
    for (int a = 0; a < mesh.dim(); ++a) put(x[a]);
    for (double v : values) put(v);
    out_ << '\n';
  }
  void close() {
    out_.flush();
    if (!out_) throw Error("write failed");
  }

 private:
  void put(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    out_ << buf;
  }
  std::ofstream out_;
};

std::vector<int> cells_for(Support support, const Mesh& mesh) {
  if (support == Support::Interior) {
    const auto interior = mesh.interior_cells();
    return {interior.begin(), interior.end()};
  }
  std::vector<int> all(mesh.num_cells());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = static_cast<int>(c);
  return all;
}

}  // namespace

void write_field_csv(const CellField& field, const Mesh& mesh, const std::filesystem::path& path) {
  if (field.values.size() != mesh.num_cells()) throw StructuralError("field does not match the mesh");
  CsvWriter csv(path);
  csv.header(mesh, {"value"});
  for (int c : cells_for(field.support, mesh)) csv.row(mesh, c, std::span<const double>(&field.values[c], 1));
  csv.close();
}

void write_field_csv(const VectorCellField& field, const Mesh& mesh, const std::filesystem::path& path) {
  if (field.values.size() != 3 * mesh.num_cells()) throw StructuralError("field does not match the mesh");
  static const char* names[] = {"value_x", "value_y", "value_z"};
  CsvWriter csv(path);
  csv.header(mesh, std::vector<std::string>(names, names + mesh.dim()));
  for (int c : cells_for(field.support, mesh)) {
    csv.row(mesh, c, std::span<const double>(&field.values[3 * c], mesh.dim()));
  }
  csv.close();
}

void write_field_csv(const DesignField& field, const Mesh& mesh, const std::filesystem::path& path) {
  if (field.kappa.size() != mesh.num_cells()) throw StructuralError("design does not match the mesh");
  CsvWriter csv(path);
  csv.header(mesh, {"value"});
  for (int c : mesh.interior_cells()) csv.row(mesh, c, std::span<const double>(&field.kappa[c], 1));
  csv.close();
}

void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& path) {
  CsvWriter csv(path);
  csv.header(mesh, {"interior"});
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double flag = mesh.is_interior(static_cast<int>(c)) ? 1.0 : 0.0;
    csv.row(mesh, static_cast<int>(c), std::span<const double>(&flag, 1));
  }
  csv.close();
}

FieldTable read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  FieldTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": missing header");
  {
    std::istringstream head(line);
    std::string col;
    std::getline(head, col, ',');
    if (col != "cell_id") throw Error(path.string() + ": first column must be cell_id");
    while (std::getline(head, col, ',')) table.columns.push_back(col);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    table.cell_ids.push_back(std::stoi(cell));
    std::vector<double> values;
    values.reserve(table.columns.size());
    while (std::getline(row, cell, ',')) values.push_back(std::strtod(cell.c_str(), nullptr));
    if (values.size() != table.columns.size()) throw Error(path.string() + ": ragged row");
    table.rows.push_back(std::move(values));
  }
  return table;
}

}  // namespace nlkelvin
