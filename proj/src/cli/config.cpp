#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nlkelvin/cli_io.hpp"
#include "nlkelvin/errors.hpp"

namespace nlkelvin {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"domain", {"box"}},
      {"mesh", {"h", "ratio"}},
      {"kernel", {"family", "delta", "delta_list"}},
      {"material", {"kappa_min", "kappa_max", "gamma", "scheme", "field", "value", "block"}},
      {"source", {"preset", "amplitude", "center", "width", "period"}},
      {"solver", {"tol", "max_iters"}},
      {"optimizer", {"max_iters", "rel_tol", "seed", "init"}},
      {"output", {"dir"}},
  };
  return keys;
}

double to_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size() || !std::isfinite(v)) throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

long to_integer(const std::string& key, const std::string& text) {
  const double v = to_number(key, text);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError(key + ": expected an integer");
  return static_cast<long>(v);
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(to_number(key, token));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const double* v, int n) {
  std::string s;
  for (int k = 0; k < n; ++k) s += (k ? " " : "") + fmt(v[k]);
  return s;
}

void validate(const RunConfig& cfg) {
  cfg.domain.validate();
  cfg.bounds.validate();
  if (!(cfg.ratio >= 2.0)) throw ConfigError("mesh.ratio: delta/h must be at least 2");
  const std::vector<double> deltas = cfg.deltas();
  if (deltas.empty() || !(deltas.front() > 0.0)) throw ConfigError("kernel.delta: required and positive");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double d = deltas[k];
    if (!(d > 0.0)) throw ConfigError("kernel.delta_list: entries must be positive");
    if (k > 0 && !(d < deltas[k - 1])) throw ConfigError("kernel.delta_list: must be strictly decreasing");
    const double h = cfg.mesh_width(d);
    if (d / h < 2.0 * (1.0 - 1e-12)) throw ConfigError("kernel.delta: delta/h = " + fmt(d / h) + " is below 2");
    for (int a = 0; a < cfg.domain.dim; ++a) {
      const double cells = (cfg.domain.hi[a] - cfg.domain.lo[a]) / h;
      if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
        throw ConfigError("mesh.h: " + fmt(h) + " does not divide the box on axis " + std::to_string(a));
      }
    }
  }
  if (cfg.field != "uniform" && cfg.field != "checkerboard" && cfg.field != "random") {
    throw ConfigError("material.field: expected uniform, checkerboard or random");
  }
  if (cfg.field_value != 0.0 && (cfg.field_value < cfg.bounds.kappa_min || cfg.field_value > cfg.bounds.gamma)) {
    throw ConfigError("material.value: must lie in [kappa_min, gamma]");
  }
  if (cfg.block < 1) throw ConfigError("material.block: must be positive");
  if (cfg.source.preset == SourcePreset::GaussianBump && !(cfg.source.width > 0.0)) {
    throw ConfigError("source.width: must be positive");
  }
  if (cfg.source.preset == SourcePreset::Checkerboard && !(cfg.source.period > 0.0)) {
    throw ConfigError("source.period: must be positive");
  }
  if (!(cfg.solver.rel_tol > 0.0) || cfg.solver.max_iters < 1) throw ConfigError("solver: tol and max_iters must be positive");
  if (!(cfg.optimizer.rel_tol > 0.0) || cfg.optimizer.max_iters < 1) {
    throw ConfigError("optimizer: rel_tol and max_iters must be positive");
  }
  if (cfg.init != "uniform" && cfg.init != "random") throw ConfigError("optimizer.init: expected uniform or random");
}

}  // namespace

std::vector<double> RunConfig::deltas() const {
  if (!delta_list.empty()) return delta_list;
  return {delta};
}

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " at line " + std::to_string(e.line()));
  }

  RunConfig cfg;
  bool have_box = false;
  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      if (!body.data().empty()) throw ConfigError(section + ": keys must sit inside a section");
      throw ConfigError(section + ": unknown section");
    }
    for (const auto& [key, node] : body) {
      const std::string path = section + "." + key;
      if (!known->second.count(key)) throw ConfigError(path + ": unknown key");
      const std::string value = node.get_value<std::string>();

      if (path == "domain.box") {
        const std::vector<double> box = to_list(path, value);
        if (box.size() % 2 != 0 || box.size() > 6) throw ConfigError(path + ": expected lo hi pairs for 1 to 3 axes");
        cfg.domain.dim = static_cast<int>(box.size() / 2);
        for (int a = 0; a < 3; ++a) {
          cfg.domain.lo[a] = a < cfg.domain.dim ? box[2 * a] : 0.0;
          cfg.domain.hi[a] = a < cfg.domain.dim ? box[2 * a + 1] : 0.0;
        }
        have_box = true;
      } else if (path == "mesh.h") {
        cfg.h = to_number(path, value);
        if (!(cfg.h > 0.0)) throw ConfigError(path + ": must be positive");
      } else if (path == "mesh.ratio") {
        cfg.ratio = to_number(path, value);
      } else if (path == "kernel.family") {
        cfg.family = parse_kernel_family(value);
      } else if (path == "kernel.delta") {
        cfg.delta = to_number(path, value);
      } else if (path == "kernel.delta_list") {
        cfg.delta_list = to_list(path, value);
      } else if (path == "material.kappa_min") {
        cfg.bounds.kappa_min = to_number(path, value);
      } else if (path == "material.kappa_max") {
        cfg.bounds.kappa_max = to_number(path, value);
      } else if (path == "material.gamma") {
        cfg.bounds.gamma = to_number(path, value);
      } else if (path == "material.scheme") {
        cfg.scheme = parse_averaging_scheme(value);
      } else if (path == "material.field") {
        cfg.field = value;
      } else if (path == "material.value") {
        cfg.field_value = to_number(path, value);
      } else if (path == "material.block") {
        cfg.block = static_cast<int>(to_integer(path, value));
      } else if (path == "source.preset") {
        cfg.source.preset = parse_source_preset(value);
      } else if (path == "source.amplitude") {
        cfg.source.amplitude = to_number(path, value);
      } else if (path == "source.center") {
        const std::vector<double> c = to_list(path, value);
        if (c.size() > 3) throw ConfigError(path + ": at most 3 coordinates");
        for (std::size_t a = 0; a < c.size(); ++a) cfg.source.center[a] = c[a];
      } else if (path == "source.width") {
        cfg.source.width = to_number(path, value);
      } else if (path == "source.period") {
        cfg.source.period = to_number(path, value);
      } else if (path == "solver.tol") {
        cfg.solver.rel_tol = to_number(path, value);
      } else if (path == "solver.max_iters") {
        cfg.solver.max_iters = static_cast<int>(to_integer(path, value));
      } else if (path == "optimizer.max_iters") {
        cfg.optimizer.max_iters = static_cast<int>(to_integer(path, value));
      } else if (path == "optimizer.rel_tol") {
        cfg.optimizer.rel_tol = to_number(path, value);
      } else if (path == "optimizer.seed") {
        const long seed = to_integer(path, value);
        if (seed < 0) throw ConfigError(path + ": must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(seed);
      } else if (path == "optimizer.init") {
        cfg.init = value;
      } else if (path == "output.dir") {
        cfg.output_dir = value;
      }
    }
  }
  if (!have_box) throw ConfigError("domain.box: required");
  if (cfg.delta == 0.0 && cfg.delta_list.empty()) throw ConfigError("kernel.delta: required");
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string RunConfig::to_ini() const {
  std::ostringstream out;
  double box[6];
  for (int a = 0; a < domain.dim; ++a) {
    box[2 * a] = domain.lo[a];
    box[2 * a + 1] = domain.hi[a];
  }
  out << "[domain]\nbox = " << fmt_list(box, 2 * domain.dim) << "\n\n";
  out << "[mesh]\n";
  if (h > 0.0) out << "h = " << fmt(h) << "\n";
  out << "ratio = " << fmt(ratio) << "\n\n";
  out << "[kernel]\nfamily = " << to_string(family) << "\n";
  if (delta > 0.0) out << "delta = " << fmt(delta) << "\n";
  if (!delta_list.empty()) {
    out << "delta_list = " << fmt_list(delta_list.data(), static_cast<int>(delta_list.size())) << "\n";
  }
  out << "\n[material]\nkappa_min = " << fmt(bounds.kappa_min) << "\nkappa_max = " << fmt(bounds.kappa_max)
      << "\ngamma = " << fmt(bounds.gamma) << "\nscheme = " << to_string(scheme) << "\nfield = " << field
      << "\nvalue = " << fmt(field_value) << "\nblock = " << block << "\n\n";
  out << "[source]\npreset = " << to_string(source.preset) << "\namplitude = " << fmt(source.amplitude)
      << "\ncenter = " << fmt_list(source.center.data(), domain.dim) << "\nwidth = " << fmt(source.width)
      << "\nperiod = " << fmt(source.period) << "\n\n";
  out << "[solver]\ntol = " << fmt(solver.rel_tol) << "\nmax_iters = " << solver.max_iters << "\n\n";
  out << "[optimizer]\nmax_iters = " << optimizer.max_iters << "\nrel_tol = " << fmt(optimizer.rel_tol)
      << "\nseed = " << seed << "\ninit = " << init << "\n\n";
  out << "[output]\ndir = " << output_dir << "\n";
  return out.str();
}

DesignField make_design(const RunConfig& cfg, const Mesh& mesh) {
  if (cfg.field == "checkerboard") return DesignField::checkerboard(mesh, cfg.bounds, cfg.block);
  if (cfg.field == "random") return DesignField::random(mesh, cfg.bounds, cfg.seed);
  return DesignField::uniform(mesh, cfg.bounds, cfg.field_value > 0.0 ? cfg.field_value : cfg.bounds.gamma);
}

}  // namespace nlkelvin
