#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "dipsurf/result_table.hpp"
#include "dipsurf/runner.hpp"
#include "dipsurf/scenario.hpp"

using namespace dipsurf;
namespace fs = std::filesystem;

namespace {

bool mentions(const std::vector<std::string>& problems, const std::string& text) {
  for (const auto& p : problems)
    if (p.find(text) != std::string::npos) return true;
  return false;
}

std::string body(const ResultTable& t) {
  std::ostringstream ss;
  t.write_csv(ss);
  std::string out, line;
  std::istringstream in(ss.str());
  while (std::getline(in, line))
    if (line.rfind("# generated", 0) != 0) out += line + "\n";
  return out;
}

const char* kRates = R"(
name: t
task: single_rate
geometry: one_surface
materials: [Ag]
z_nm: [10, 40]
orientations: [parallel, perpendicular]
omega: {from: 0.3, to: 0.7, steps: 5, unit_eV: 9.01}
)";

}  // namespace

TEST_CASE("every bundled config validates") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(DIPSURF_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    std::ifstream in(entry.path());
    std::stringstream ss;
    ss << in.rdbuf();
    CAPTURE(entry.path().string());
    CHECK(validate_config(ss.str()).empty());
    CHECK_NOTHROW(load_scenario(entry.path().string()));
    ++count;
  }
  CHECK(count >= 10);
}

TEST_CASE("validation lists every problem, naming the field") {
  const auto problems = validate_config(R"(
name: broken
task: transport
geometry: one_surface
z_nm: 100
orientations: [aligned, diagonal]
chain_length: 0
a_nm: 206.4
wavelength_nm: 2600
colour: blue
)");
  CHECK(mentions(problems, "materials: missing material name"));
  CHECK(mentions(problems, "chain length must be >= 1"));
  CHECK(mentions(problems, "unknown orientation 'diagonal'"));
  CHECK(mentions(problems, "colour: unknown key"));
  CHECK(problems.size() >= 4);
}

TEST_CASE("validation: specific schema rules") {
  CHECK(mentions(validate_config("name: x\ntask: epsilon\nmaterials: [Ag]\n"), "missing frequency axis"));
  CHECK(mentions(validate_config("name: x\ntask: fly\nomega_eV: 1\n"), "unknown task"));
  CHECK(mentions(validate_config("name: x\ntask: epsilon\nmaterials: [Xx]\nomega_eV: 1\n"), "material not found: 'Xx'"));
  CHECK(mentions(validate_config("name: x\ntask: single_rate\ngeometry: two_surfaces\nmaterials: Ag\nz_nm: 10\n"
                                 "omega_eV: 1\n"),
                 "gap_nm"));
  CHECK(mentions(validate_config("name: x\ntask: single_rate\ngeometry: two_surfaces\nmaterials: Ag\nz_nm: 300\n"
                                 "gap_nm: 200\nomega_eV: 1\n"),
                 "not inside"));
  CHECK(mentions(validate_config("name: x\ntask: single_rate\nmaterials: Ag\nz_nm: 10\nomega: {from: 1, to: 2}\n"),
                 "omega.steps: missing"));
  CHECK(mentions(validate_config("name: x\ntask: single_rate\nmaterials: Ag\nz_nm: 10\nomega_eV: 1\n"
                                 "quadrature: {rel_tol: 2}\n"),
                 "quadrature"));
  CHECK(mentions(validate_config("name: [\n"), "not valid YAML"));
  CHECK(validate_config(kRates).empty());
}

TEST_CASE("axes: lists, linear and log ranges, unit scaling") {
  const auto sc = parse_scenario(R"(
name: axes
task: shift
geometry: one_surface
materials: Ag
z_nm: {from: 10, to: 1000, steps: 3, scale: log}
omega: {from: 0.5, to: 1.0, steps: 2, unit_eV: 2.0}
)");
  REQUIRE(sc.z_nm.size() == 3);
  CHECK(sc.z_nm[1] == doctest::Approx(100.0));
  REQUIRE(sc.omega_eV.size() == 2);
  CHECK(sc.omega_eV[0] == 1.0);
  CHECK(sc.omega_eV[1] == 2.0);
  CHECK(sc.output == "axes");
}

TEST_CASE("parse errors carry all problems") {
  try {
    parse_scenario("name: x\ntask: modes\nmaterials: Ag\n");
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    CHECK(e.problems().size() >= 3);
  }
}

TEST_CASE("result table: 17 significant digits, metadata, JSON mirror") {
  ResultTable t({{"x", "nm"}, {"label", ""}, {"n", ""}});
  t.add_meta("scenario", "demo\nsecond line");
  t.add_row({0.1, std::string("a,b"), 3LL});
  t.add_row({std::numeric_limits<double>::quiet_NaN(), std::string("c"), 4LL});
  CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
  std::ostringstream csv;
  t.write_csv(csv);
  CHECK(csv.str() ==
        "# scenario: demo\n# scenario: second line\n# units: x=nm, label=1, n=1\nx,label,n\n"
        "0.10000000000000001,\"a,b\",3\nnan,c,4\n");
  std::ostringstream json;
  t.write_json(json);
  CHECK(json.str().find("null") != std::string::npos);
  CHECK(json.str().find("\"unit\": \"nm\"") != std::string::npos);
  CHECK(ResultTable::format_number(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("sweeps are ordered and identical for any thread count") {
  const auto sc = parse_scenario(kRates);
  const auto& db = MaterialDb::bundled();
  const auto serial = compute_scenario(sc, db, 1);
  const auto threaded = compute_scenario(sc, db, 4);
  REQUIRE(serial.tables.size() == 1);
  CHECK(body(serial.tables[0].table) == body(threaded.tables[0].table));
  const auto& t = serial.tables[0].table;
  CHECK(t.rows.size() == 2 * 2 * 5);
  const auto zi = t.column_index("z_nm");
  CHECK(std::get<double>(t.rows.front()[zi]) == 10.0);
  CHECK(std::get<double>(t.rows.back()[zi]) == 40.0);
}

TEST_CASE("quadrature failures become marked rows") {
  auto sc = parse_scenario(kRates);
  sc.quadrature.max_evaluations = 250;
  const auto r = compute_scenario(sc, MaterialDb::bundled(), 2);
  CHECK(r.failed_points > 0);
  const auto& t = r.tables[0].table;
  const auto si = t.column_index("status");
  std::size_t marked = 0;
  for (const auto& row : t.rows)
    if (std::get<std::string>(row[si]) == "nonconverged") ++marked;
  CHECK(marked == r.failed_points);
}

TEST_CASE("run writes CSV and JSON and reports failures with exit code 3") {
  const fs::path dir = fs::temp_directory_path() / "dipsurf_scenario_test";
  fs::remove_all(dir);
  RunOptions opt;
  opt.output_dir = dir.string();
  opt.json = true;
  opt.timestamp = "fixed";
  auto out = run_scenario(parse_scenario(kRates), opt);
  CHECK(out.exit_code == 0);
  CHECK(fs::exists(dir / "t.csv"));
  CHECK(fs::exists(dir / "t.json"));

  auto sc = parse_scenario(kRates);
  sc.quadrature.max_evaluations = 250;
  sc.output = "t_fail";
  out = run_scenario(sc, opt);
  CHECK(out.exit_code == exit_code::nonconvergence);
  CHECK(fs::exists(dir / "t_fail.csv"));
  fs::remove_all(dir);
}

TEST_CASE("transport task: trajectory and metrics tables") {
  const auto sc = parse_scenario(R"(
name: chain
task: transport
geometry: vacuum
orientations: [aligned]
chain_length: 20
a_nm: 206.4
wavelength_nm: 2600
)");
  const auto r = compute_scenario(sc, MaterialDb::bundled(), 1);
  REQUIRE(r.tables.size() == 2);
  CHECK(r.tables[1].suffix == "_metrics");
  const auto& m = r.tables[1].table;
  REQUIRE(m.rows.size() == 1);
  CHECK(std::get<double>(m.rows[0][m.column_index("t_P")]) == doctest::Approx(0.82).epsilon(0.1));
  const auto& traj = r.tables[0].table;
  CHECK(traj.rows.size() == 601);
  CHECK(traj.columns.size() == 5 + 2 + 20 + 2);
}

TEST_CASE("column schema per task") {
  const std::string head = "materials: [Ag]\ngeometry: one_surface\nz_nm: 20\norientations: [perpendicular]\n";
  const std::vector<std::string> cases = {"material", "geometry", "gap_nm", "z_nm", "orientation"};
  auto with = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    a.insert(a.end(), {"status", "reason"});
    return a;
  };
  const std::vector<std::string> coupling = {"a_nm", "a_over_lambda", "omega_eV", "omega_scaled", "V0",
                                             "Gamma0_ab", "V", "Gamma_ab", "Gamma_aa", "dV",
                                             "V_over_Gamma_aa", "Gamma_ab_over_Gamma_aa"};
  const std::vector<std::pair<std::string, std::vector<std::string>>> expected = {
      {"task: epsilon\nmaterials: [Ag]\nomega_eV: 1\n",
       with({"material", "omega_eV", "omega_scaled", "eps_re", "eps_im"}, {})},
      {"task: single_rate\n" + head + "omega_eV: 1\n",
       with(cases, {"omega_eV", "omega_scaled", "rate", "quad_error"})},
      {"task: coupling_cut\n" + head + "a_nm: 100\nomega_eV: 1\n", with(cases, coupling)},
      {"task: coupling_map\n" + head + "a_nm: [100, 200]\nomega_eV: 1\n", with(cases, coupling)},
      {"task: shift\n" + head + "omega_eV: 0.5\n",
       with(cases, {"omega_eV", "shifted_eV", "shift_eV", "shift_over_omega", "iterations", "converged"})},
      {"task: modes\n" + head + "a_nm: 100\nchain_length: 3\nomega_eV: 1\n",
       with(cases, {"a_nm", "a_over_lambda", "omega_eV", "chain_length", "mode", "rate", "min_over_max"})},
  };
  for (const auto& [yaml, names] : expected) {
    CAPTURE(yaml);
    const auto r = compute_scenario(parse_scenario("name: s\n" + yaml), MaterialDb::bundled(), 1);
    std::vector<std::string> got;
    for (const auto& c : r.tables.at(0).table.columns) got.push_back(c.name);
    CHECK(got == names);
  }
  const auto r = compute_scenario(parse_scenario("name: s\ntask: transport\n" + head +
                                                 "a_nm: 200\nchain_length: 2\nomega_eV: 1\nt_max: 20\n"),
                                  MaterialDb::bundled(), 1);
  std::vector<std::string> got;
  for (const auto& c : r.tables.at(1).table.columns) got.push_back(c.name);
  CHECK(got == with(cases, {"a_nm", "omega_eV", "chain_length", "t_P", "peak_population", "n_at_t_P",
                            "early_decay_rate", "late_decay_rate"}));
  CHECK(r.tables.at(0).table.columns.size() == cases.size() + 2 + 2 + 2);
}
