#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dipsurf/material_db.hpp"
#include "dipsurf/runner.hpp"
#include "dipsurf/scenario.hpp"

namespace {

using namespace dipsurf;

struct Globals {
  unsigned threads = 0;
  std::optional<double> tolerance;
  std::string output_dir = ".";
  bool json = false;
  std::string materials;
};

int cmd_run(const std::string& config, const Globals& g) {
  try {
    std::optional<MaterialDb> db;
    if (!g.materials.empty()) db = MaterialDb::load(g.materials);
    Scenario sc = load_scenario(config, db ? &*db : nullptr);
    if (!g.materials.empty() && sc.material_db.empty()) sc.material_db = g.materials;
    RunOptions opt;
    opt.threads = g.threads;
    opt.tolerance = g.tolerance;
    opt.output_dir = g.output_dir;
    opt.json = g.json;
    const RunOutcome out = run_scenario(std::move(sc), opt);
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& f : out.files) std::cout << f << '\n';
    if (out.failed_points > 0)
      std::cerr << "error: " << out.failed_points
                << " sweep point(s) did not converge; partial results written with status 'nonconverged'\n";
    return out.exit_code;
  } catch (const ScenarioError& e) {
    std::cerr << config << ": invalid scenario\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return exit_code::schema;
  } catch (const MaterialDbError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == MaterialDbError::Kind::MissingFile ? exit_code::io : exit_code::schema;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::schema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::failure;
  }
}

int cmd_validate(const std::string& config, const Globals& g) {
  std::ifstream in(config, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config '" << config << "'\n";
    return exit_code::io;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  std::vector<std::string> problems;
  try {
    std::optional<MaterialDb> db;
    if (!g.materials.empty()) db = MaterialDb::load(g.materials);
    problems = validate_config(ss.str(), db ? &*db : nullptr);
  } catch (const std::exception& e) {
    problems.push_back(std::string("materials: ") + e.what());
  }
  if (g.json) {
    std::cout << nlohmann::json{{"config", config}, {"ok", problems.empty()}, {"problems", problems}}.dump() << '\n';
  } else if (problems.empty()) {
    std::cout << "ok\n";
  } else {
    for (const auto& p : problems) std::cout << p << '\n';
  }
  return problems.empty() ? exit_code::ok : exit_code::schema;
}

int cmd_list(const Globals& g) {
  try {
    const MaterialDb db = g.materials.empty() ? MaterialDb::bundled() : MaterialDb::load(g.materials);
    if (g.json) {
      auto arr = nlohmann::json::array();
      for (const auto& name : db.names()) {
        const auto& m = db.at(name);
        arr.push_back({{"name", name}, {"model", model_tag(m.model)}, {"source", m.source}});
      }
      std::cout << arr.dump(1) << '\n';
    } else {
      for (const auto& name : db.names()) {
        const auto& m = db.at(name);
        std::cout << name << '\t' << model_tag(m.model) << '\t' << m.source << '\n';
      }
    }
    return exit_code::ok;
  } catch (const MaterialDbError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == MaterialDbError::Kind::MissingFile ? exit_code::io : exit_code::schema;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dipole-dipole couplings and transport near planar surfaces"};
  app.set_version_flag("--version", DIPSURF_VERSION);
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)")->capture_default_str();
  app.add_option("--tolerance", g.tolerance, "Override the quadrature relative tolerance")
      ->check(CLI::Range(1e-15, 0.5));
  app.add_option("--output-dir", g.output_dir, "Directory for result files")->capture_default_str();
  app.add_flag("--json", g.json, "Also write JSON mirrors (run) or print JSON (validate, list-materials)");
  app.add_option("--materials", g.materials, "Material database file (default: bundled)");

  std::string config;
  auto* run = app.add_subcommand("run", "Run a scenario and write its result tables");
  run->add_option("config", config, "Scenario file")->required();
  auto* val = app.add_subcommand("validate", "Check a scenario file and list every problem");
  val->add_option("config", config, "Scenario file")->required();
  auto* list = app.add_subcommand("list-materials", "List the material database");
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::schema;
  }
  if (*run) return cmd_run(config, g);
  if (*val) return cmd_validate(config, g);
  if (*list) return cmd_list(g);
  return exit_code::failure;
}
