#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dipsurf/greens.hpp"
#include "dipsurf/material_db.hpp"
#include "dipsurf/sommerfeld.hpp"

namespace dipsurf {

enum class Task { Epsilon, SingleRate, CouplingMap, CouplingCut, Shift, Modes, Transport };

/// Dipole orientation relative to the surface and to the chain axis (x):
/// Parallel = in-plane and perpendicular to the axis (y), Perpendicular = normal
/// to the surface (z), Aligned = along the axis (x).
enum class Orientation { Parallel, Perpendicular, Aligned };

std::string to_string(Task task);
std::string to_string(Orientation orientation);
std::string to_string(Geometry geometry);
Vec3 dipole_direction(Orientation orientation);

/// One scenario file. Frequencies are stored in eV; `omega_unit_eV` is the
/// scale used for the dimensionless frequency column (e.g. a plasma energy).
struct Scenario {
  std::string name;
  Task task = Task::SingleRate;
  std::vector<std::string> materials;
  std::optional<std::string> upper_material;  // defaults to the lower one
  std::vector<Geometry> geometries{Geometry::OneSurface};
  std::optional<double> gap_nm;
  bool symmetric_gap = false;  // gap = 2 z
  std::vector<double> z_nm;
  std::vector<Orientation> orientations{Orientation::Parallel};
  std::vector<double> omega_eV;
  double omega_unit_eV = 1.0;
  std::vector<double> a_nm;
  std::size_t chain_length = 2;
  double t_max = 3.0;
  double dt_out = 0.005;
  double gamma_eV = 1.9e-10;  // hbar * gamma, shift task only
  PathParams quadrature{};
  std::string output;
  std::string material_db;  // empty: bundled
  std::string source;       // verbatim config text

  double gap_for(double z) const;
  LayerStack stack(Geometry geometry, const MaterialDb& db, const std::string& material, double z) const;
};

/// Every schema violation found in a config, in file order.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Unreadable config or output location.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and validates; throws ScenarioError listing all violations.
/// `db` resolves material names; when null, the scenario's own material_db (or
/// the bundled one) is loaded.
Scenario parse_scenario(const std::string& yaml_text, const MaterialDb* db = nullptr);
Scenario load_scenario(const std::string& path, const MaterialDb* db = nullptr);

/// All violations in a config; empty when valid.
std::vector<std::string> validate_config(const std::string& yaml_text, const MaterialDb* db = nullptr);

/// The database a scenario refers to.
MaterialDb scenario_materials(const Scenario& scenario);

}  // namespace dipsurf
