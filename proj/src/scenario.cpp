#include "dipsurf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace dipsurf {

std::string to_string(Task task) {
  switch (task) {
    case Task::Epsilon: return "epsilon";
    case Task::SingleRate: return "single_rate";
    case Task::CouplingMap: return "coupling_map";
    case Task::CouplingCut: return "coupling_cut";
    case Task::Shift: return "shift";
    case Task::Modes: return "modes";
    case Task::Transport: return "transport";
  }
  return "?";
}

std::string to_string(Orientation orientation) {
  switch (orientation) {
    case Orientation::Parallel: return "parallel";
    case Orientation::Perpendicular: return "perpendicular";
    case Orientation::Aligned: return "aligned";
  }
  return "?";
}

std::string to_string(Geometry geometry) {
  switch (geometry) {
    case Geometry::Vacuum: return "vacuum";
    case Geometry::OneSurface: return "one_surface";
    case Geometry::TwoSurfaces: return "two_surfaces";
  }
  return "?";
}

Vec3 dipole_direction(Orientation orientation) {
  switch (orientation) {
    case Orientation::Parallel: return Vec3::UnitY();
    case Orientation::Perpendicular: return Vec3::UnitZ();
    case Orientation::Aligned: return Vec3::UnitX();
  }
  return Vec3::UnitX();
}

double Scenario::gap_for(double z) const {
  if (gap_nm) return *gap_nm;
  return symmetric_gap ? 2.0 * z : 0.0;
}

LayerStack Scenario::stack(Geometry geometry, const MaterialDb& db, const std::string& material, double z) const {
  switch (geometry) {
    case Geometry::Vacuum: return LayerStack::vacuum();
    case Geometry::OneSurface: return LayerStack::one_surface(db.at(material).model);
    case Geometry::TwoSurfaces:
      return LayerStack::two_surfaces(db.at(material).model, db.at(upper_material.value_or(material)).model,
                                      gap_for(z));
  }
  return LayerStack::vacuum();
}

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

ScenarioError make_error(std::vector<std::string> problems) { return ScenarioError(std::move(problems)); }

const std::set<std::string> kKeys = {
    "name",          "task",         "materials", "upper_material", "geometry", "gap_nm",     "symmetric_gap",
    "z_nm",          "orientations", "omega",     "omega_eV",       "wavelength_nm", "a_nm",  "chain_length",
    "t_max",         "dt_out",       "gamma_eV",  "quadrature",     "output",   "material_db"};

const std::set<std::string> kAxisKeys = {"from", "to", "steps", "scale", "unit_eV"};
const std::set<std::string> kQuadratureKeys = {"rel_tol",        "abs_tol",         "ellipse_half_width",
                                               "cavity_half_width", "ellipse_height", "max_evaluations"};

class Reader {
 public:
  std::vector<std::string> problems;

  void fail(const std::string& field, const std::string& message) { problems.push_back(field + ": " + message); }

  template <typename T>
  std::optional<T> scalar(const YAML::Node& node, const std::string& field) {
    if (!node || node.IsNull()) return std::nullopt;
    if (!node.IsScalar()) {
      fail(field, "expected a scalar");
      return std::nullopt;
    }
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(field, "cannot read '" + node.Scalar() + "'");
      return std::nullopt;
    }
  }

  std::optional<double> number(const YAML::Node& node, const std::string& field) {
    auto v = scalar<double>(node, field);
    if (v && !std::isfinite(*v)) {
      fail(field, "must be finite");
      return std::nullopt;
    }
    return v;
  }

  std::vector<std::string> strings(const YAML::Node& node, const std::string& field) {
    std::vector<std::string> out;
    if (!node || node.IsNull()) return out;
    if (node.IsScalar()) {
      out.push_back(node.Scalar());
    } else if (node.IsSequence()) {
      for (const auto& item : node) {
        if (item.IsScalar()) out.push_back(item.Scalar());
        else fail(field, "entries must be strings");
      }
    } else {
      fail(field, "expected a string or a list of strings");
    }
    return out;
  }

  /// A number, a list of numbers, or {from, to, steps[, scale]}.
  std::vector<double> axis(const YAML::Node& node, const std::string& field, double* unit = nullptr) {
    std::vector<double> out;
    if (!node || node.IsNull()) return out;
    if (node.IsScalar()) {
      if (auto v = number(node, field)) out.push_back(*v);
      return out;
    }
    if (node.IsSequence()) {
      for (std::size_t i = 0; i < node.size(); ++i)
        if (auto v = number(node[i], field + "[" + std::to_string(i) + "]")) out.push_back(*v);
      return out;
    }
    if (!node.IsMap()) {
      fail(field, "expected a number, a list or a range");
      return out;
    }
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!kAxisKeys.count(key) || (key == "unit_eV" && !unit)) fail(field + "." + key, "unknown key");
    }
    const auto from = number(node["from"], field + ".from");
    const auto to = number(node["to"], field + ".to");
    const auto steps = scalar<long long>(node["steps"], field + ".steps");
    const auto scale = scalar<std::string>(node["scale"], field + ".scale").value_or("linear");
    if (unit) *unit = number(node["unit_eV"], field + ".unit_eV").value_or(1.0);
    if (!from) fail(field + ".from", "missing");
    if (!to) fail(field + ".to", "missing");
    if (!steps) fail(field + ".steps", "missing");
    if (scale != "linear" && scale != "log") fail(field + ".scale", "must be 'linear' or 'log'");
    if (!from || !to || !steps) return out;
    if (*steps < 1) {
      fail(field + ".steps", "must be >= 1");
      return out;
    }
    if (*steps == 1 && *from != *to) fail(field + ".steps", "a single step needs from == to");
    if (scale == "log" && !(*from > 0 && *to > 0)) {
      fail(field, "log scale needs positive bounds");
      return out;
    }
    for (long long i = 0; i < *steps; ++i) {
      const double t = *steps == 1 ? 0.0 : double(i) / double(*steps - 1);
      out.push_back(scale == "log" ? *from * std::pow(*to / *from, t) : *from + t * (*to - *from));
    }
    return out;
  }
};

std::optional<Task> parse_task(const std::string& s) {
  static const std::vector<std::pair<std::string, Task>> table = {
      {"epsilon", Task::Epsilon},         {"single_rate", Task::SingleRate}, {"coupling_map", Task::CouplingMap},
      {"coupling_cut", Task::CouplingCut}, {"shift", Task::Shift},           {"modes", Task::Modes},
      {"transport", Task::Transport}};
  for (const auto& [name, task] : table)
    if (name == s) return task;
  return std::nullopt;
}

std::optional<Geometry> parse_geometry(const std::string& s) {
  if (s == "vacuum") return Geometry::Vacuum;
  if (s == "one_surface") return Geometry::OneSurface;
  if (s == "two_surfaces") return Geometry::TwoSurfaces;
  return std::nullopt;
}

std::optional<Orientation> parse_orientation(const std::string& s) {
  if (s == "parallel") return Orientation::Parallel;
  if (s == "perpendicular") return Orientation::Perpendicular;
  if (s == "aligned") return Orientation::Aligned;
  return std::nullopt;
}

Scenario read(const std::string& text, const MaterialDb* db_in, std::vector<std::string>& problems,
              const std::filesystem::path& base_dir = {}) {
  Scenario sc;
  sc.source = text;
  Reader r;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    problems.push_back(std::string("config: not valid YAML: ") + e.what());
    return sc;
  }
  if (!root.IsMap()) {
    problems.push_back("config: top level must be a mapping");
    return sc;
  }
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!kKeys.count(key)) r.fail(key, "unknown key");
  }

  sc.name = r.scalar<std::string>(root["name"], "name").value_or("");
  if (sc.name.empty()) r.fail("name", "missing");
  sc.output = r.scalar<std::string>(root["output"], "output").value_or(sc.name);
  if (sc.output.find('/') != std::string::npos) r.fail("output", "must be a file stem without directories");
  sc.material_db = r.scalar<std::string>(root["material_db"], "material_db").value_or("");
  if (!sc.material_db.empty() && std::filesystem::path(sc.material_db).is_relative() && !base_dir.empty())
    sc.material_db = (base_dir / sc.material_db).string();

  const auto task_name = r.scalar<std::string>(root["task"], "task");
  if (!task_name) {
    r.fail("task", "missing");
  } else if (auto t = parse_task(*task_name)) {
    sc.task = *t;
  } else {
    r.fail("task", "unknown task '" + *task_name +
                       "' (epsilon, single_rate, coupling_map, coupling_cut, shift, modes, transport)");
  }
  const bool known_task = task_name && parse_task(*task_name);

  // frequency axis: exactly one of omega, omega_eV, wavelength_nm
  const int freq_keys = int(bool(root["omega"])) + int(bool(root["omega_eV"])) + int(bool(root["wavelength_nm"]));
  if (freq_keys > 1) r.fail("omega", "give only one of omega, omega_eV, wavelength_nm");
  if (root["omega"]) {
    sc.omega_eV = r.axis(root["omega"], "omega", &sc.omega_unit_eV);
    if (!(sc.omega_unit_eV > 0)) r.fail("omega.unit_eV", "must be > 0");
    for (auto& w : sc.omega_eV) w *= sc.omega_unit_eV;
  } else if (root["omega_eV"]) {
    sc.omega_eV = r.axis(root["omega_eV"], "omega_eV");
  } else if (root["wavelength_nm"]) {
    for (double lambda : r.axis(root["wavelength_nm"], "wavelength_nm")) {
      if (lambda > 0) sc.omega_eV.push_back(energy_from_wavelength(lambda));
      else r.fail("wavelength_nm", "must be > 0");
    }
  } else {
    r.fail("omega", "missing frequency axis (omega, omega_eV or wavelength_nm)");
  }
  for (double w : sc.omega_eV)
    if (!(w > 0)) {
      r.fail("omega", "frequencies must be > 0");
      break;
    }

  sc.materials = r.strings(root["materials"], "materials");
  if (auto up = r.scalar<std::string>(root["upper_material"], "upper_material")) sc.upper_material = *up;

  if (root["geometry"]) {
    sc.geometries.clear();
    for (const auto& g : r.strings(root["geometry"], "geometry")) {
      if (auto geo = parse_geometry(g)) sc.geometries.push_back(*geo);
      else r.fail("geometry", "unknown geometry '" + g + "' (vacuum, one_surface, two_surfaces)");
    }
    if (sc.geometries.empty()) r.fail("geometry", "empty");
  }
  if (root["orientations"]) {
    sc.orientations.clear();
    for (const auto& o : r.strings(root["orientations"], "orientations")) {
      if (auto ori = parse_orientation(o)) sc.orientations.push_back(*ori);
      else r.fail("orientations", "unknown orientation '" + o + "' (parallel, perpendicular, aligned)");
    }
    if (sc.orientations.empty()) r.fail("orientations", "empty");
  }

  sc.gap_nm = r.number(root["gap_nm"], "gap_nm");
  sc.symmetric_gap = r.scalar<bool>(root["symmetric_gap"], "symmetric_gap").value_or(false);
  sc.z_nm = r.axis(root["z_nm"], "z_nm");
  sc.a_nm = r.axis(root["a_nm"], "a_nm");
  if (auto n = r.scalar<long long>(root["chain_length"], "chain_length")) {
    if (*n < 1) r.fail("chain_length", "chain length must be >= 1");
    else sc.chain_length = static_cast<std::size_t>(*n);
  }
  sc.t_max = r.number(root["t_max"], "t_max").value_or(sc.t_max);
  sc.dt_out = r.number(root["dt_out"], "dt_out").value_or(sc.dt_out);
  sc.gamma_eV = r.number(root["gamma_eV"], "gamma_eV").value_or(sc.gamma_eV);

  if (const auto q = root["quadrature"]) {
    if (!q.IsMap()) {
      r.fail("quadrature", "expected a mapping");
    } else {
      for (const auto& kv : q) {
        const auto key = kv.first.as<std::string>();
        if (!kQuadratureKeys.count(key)) r.fail("quadrature." + key, "unknown key");
      }
      auto& p = sc.quadrature;
      p.rel_tol = r.number(q["rel_tol"], "quadrature.rel_tol").value_or(p.rel_tol);
      p.abs_tol = r.number(q["abs_tol"], "quadrature.abs_tol").value_or(p.abs_tol);
      p.ellipse_half_width = r.number(q["ellipse_half_width"], "quadrature.ellipse_half_width").value_or(p.ellipse_half_width);
      p.cavity_half_width = r.number(q["cavity_half_width"], "quadrature.cavity_half_width").value_or(p.cavity_half_width);
      p.ellipse_height = r.number(q["ellipse_height"], "quadrature.ellipse_height").value_or(p.ellipse_height);
      if (auto b = r.scalar<long long>(q["max_evaluations"], "quadrature.max_evaluations")) {
        if (*b < 0) r.fail("quadrature.max_evaluations", "must be positive");
        else p.max_evaluations = static_cast<std::size_t>(*b);
      }
      try {
        validate(p);
      } catch (const std::invalid_argument& e) {
        r.fail("quadrature", e.what());
      }
    }
  }

  // task-specific requirements
  const bool epsilon = sc.task == Task::Epsilon;
  const bool needs_a = sc.task == Task::CouplingMap || sc.task == Task::CouplingCut || sc.task == Task::Modes ||
                       sc.task == Task::Transport;
  const bool chain = sc.task == Task::Modes || sc.task == Task::Transport;
  const bool all_vacuum = std::all_of(sc.geometries.begin(), sc.geometries.end(),
                                      [](Geometry g) { return g == Geometry::Vacuum; });
  const bool two = std::count(sc.geometries.begin(), sc.geometries.end(), Geometry::TwoSurfaces) > 0;
  if (known_task) {
    if (epsilon && sc.materials.empty()) r.fail("materials", "missing material name");
    if (!epsilon && !all_vacuum && sc.materials.empty()) r.fail("materials", "missing material name");
    if (!epsilon && sc.z_nm.empty()) {
      if (all_vacuum) sc.z_nm = {0.0};
      else r.fail("z_nm", "missing");
    }
    if (needs_a && sc.a_nm.empty()) r.fail("a_nm", "missing");
    if (sc.task == Task::CouplingCut && sc.a_nm.size() > 1)
      r.fail("a_nm", "coupling_cut takes one separation; use coupling_map for a sweep");
    if (sc.task == Task::Transport) {
      if (sc.a_nm.size() > 1) r.fail("a_nm", "transport takes one spacing");
      if (sc.z_nm.size() > 1) r.fail("z_nm", "transport takes one height");
      if (sc.omega_eV.size() > 1) r.fail("omega", "transport takes one transition frequency");
      if (!(sc.t_max > 0)) r.fail("t_max", "must be > 0");
      if (!(sc.dt_out > 0) || sc.dt_out > sc.t_max) r.fail("dt_out", "must satisfy 0 < dt_out <= t_max");
    }
    if (chain && !root["chain_length"]) r.fail("chain_length", "missing");
    if (sc.task == Task::Shift && !(sc.gamma_eV > 0)) r.fail("gamma_eV", "must be > 0");
    if (two) {
      if (!sc.gap_nm && !sc.symmetric_gap) r.fail("gap_nm", "two_surfaces needs gap_nm or symmetric_gap: true");
      if (sc.gap_nm && sc.symmetric_gap) r.fail("gap_nm", "give either gap_nm or symmetric_gap, not both");
      if (sc.gap_nm && !(*sc.gap_nm > 0)) r.fail("gap_nm", "must be > 0");
    }
    for (double a : sc.a_nm)
      if (!(a > 0)) {
        r.fail("a_nm", "spacings must be > 0");
        break;
      }
    if (!epsilon && !all_vacuum)
      for (double z : sc.z_nm) {
        if (!(z > 0)) {
          r.fail("z_nm", "heights must be > 0 above a surface");
          break;
        }
        if (two && sc.gap_nm && !(z < *sc.gap_nm)) {
          r.fail("z_nm", "height " + std::to_string(z) + " nm is not inside the " + std::to_string(*sc.gap_nm) +
                             " nm gap");
          break;
        }
      }
  }

  // material names
  if (!sc.materials.empty() || sc.upper_material) {
    std::optional<MaterialDb> own;
    const MaterialDb* db = db_in;
    if (!db) {
      try {
        own = sc.material_db.empty() ? MaterialDb::bundled() : MaterialDb::load(sc.material_db);
        db = &*own;
      } catch (const std::exception& e) {
        r.fail("material_db", e.what());
      }
    }
    if (db) {
      for (const auto& m : sc.materials)
        if (!db->contains(m)) r.fail("materials", "material not found: '" + m + "'");
      if (sc.upper_material && !db->contains(*sc.upper_material))
        r.fail("upper_material", "material not found: '" + *sc.upper_material + "'");
    }
  }
  problems.insert(problems.end(), r.problems.begin(), r.problems.end());
  return sc;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error("invalid scenario:\n  " + join(problems, "\n  ")), problems_(std::move(problems)) {}

Scenario parse_scenario(const std::string& yaml_text, const MaterialDb* db) {
  std::vector<std::string> problems;
  Scenario sc = read(yaml_text, db, problems);
  if (!problems.empty()) throw make_error(std::move(problems));
  return sc;
}

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

Scenario load_scenario(const std::string& path, const MaterialDb* db) {
  std::vector<std::string> problems;
  Scenario sc = read(slurp(path), db, problems, std::filesystem::path(path).parent_path());
  if (!problems.empty()) throw make_error(std::move(problems));
  return sc;
}

std::vector<std::string> validate_config(const std::string& yaml_text, const MaterialDb* db) {
  std::vector<std::string> problems;
  read(yaml_text, db, problems);
  return problems;
}

MaterialDb scenario_materials(const Scenario& scenario) {
  return scenario.material_db.empty() ? MaterialDb::bundled() : MaterialDb::load(scenario.material_db);
}

}  // namespace dipsurf
