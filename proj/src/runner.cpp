#include "dipsurf/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "dipsurf/couplings.hpp"
#include "dipsurf/dynamics.hpp"
#include "dipsurf/parallel.hpp"

#ifndef DIPSURF_VERSION
#define DIPSURF_VERSION "unknown"
#endif

namespace dipsurf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Rows = std::vector<std::vector<Cell>>;

struct Point {
  std::vector<Cell> labels;
  std::function<Rows()> compute;  // value cells, one vector per output row
};

struct Case {
  std::string material;
  Geometry geometry;
  double z;
  double gap;
  Orientation orientation;
  LayerStack stack;

  std::vector<Cell> labels() const {
    return {material, to_string(geometry), gap, z, to_string(orientation)};
  }
};

const std::vector<Column> kCaseColumns = {
    {"material", ""}, {"geometry", ""}, {"gap_nm", "nm"}, {"z_nm", "nm"}, {"orientation", ""}};

std::vector<Case> cases(const Scenario& sc, const MaterialDb& db) {
  std::vector<Case> out;
  for (Geometry g : sc.geometries) {
    const std::vector<std::string> mats = g == Geometry::Vacuum ? std::vector<std::string>{"vacuum"} : sc.materials;
    for (const auto& m : mats)
      for (double z : sc.z_nm)
        for (Orientation o : sc.orientations) {
          const double gap = g == Geometry::TwoSurfaces ? sc.gap_for(z) : 0.0;
          out.push_back({m, g, z, gap, o, sc.stack(g, db, m, z)});
        }
  }
  return out;
}

std::vector<Column> concat(std::vector<Column> a, const std::vector<Column>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// Evaluates points in parallel and appends rows in point order.
std::size_t sweep(const std::vector<Point>& points, std::size_t value_columns, unsigned threads, ResultTable& table) {
  std::vector<Rows> results(points.size());
  std::vector<std::string> failures(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    try {
      results[i] = points[i].compute();
    } catch (const ConvergenceError& e) {
      failures[i] = e.what();
    }
  });
  std::size_t failed = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!failures[i].empty()) {
      ++failed;
      std::vector<Cell> row = points[i].labels;
      row.insert(row.end(), value_columns, Cell{kNaN});
      row.emplace_back(std::string("nonconverged"));
      row.emplace_back(failures[i]);
      table.add_row(std::move(row));
      continue;
    }
    for (auto& values : results[i]) {
      std::vector<Cell> row = points[i].labels;
      row.insert(row.end(), values.begin(), values.end());
      row.emplace_back(std::string("ok"));
      row.emplace_back(std::string());
      table.add_row(std::move(row));
    }
  }
  return failed;
}

const std::vector<Column> kStatusColumns = {{"status", ""}, {"reason", ""}};

ComputeResult epsilon_task(const Scenario& sc, const MaterialDb& db, unsigned threads) {
  ResultTable t(concat(concat({{"material", ""}, {"omega_eV", "eV"}, {"omega_scaled", "omega_unit"}},
                              {{"eps_re", ""}, {"eps_im", ""}}),
                       kStatusColumns));
  std::vector<Point> pts;
  for (const auto& m : sc.materials)
    for (double w : sc.omega_eV) {
      const MaterialModel* model = &db.at(m).model;
      pts.push_back({{m, w, w / sc.omega_unit_eV}, [model, w] {
                       const auto e = permittivity(*model, w);
                       return Rows{{e.real(), e.imag()}};
                     }});
    }
  ComputeResult out;
  out.failed_points = sweep(pts, 2, threads, t);
  out.tables.push_back({"", std::move(t)});
  return out;
}

ComputeResult single_rate_task(const Scenario& sc, const MaterialDb& db, unsigned threads) {
  ResultTable t(concat(concat(concat(kCaseColumns, {{"omega_eV", "eV"}, {"omega_scaled", "omega_unit"}}),
                              {{"rate", "gamma"}, {"quad_error", "gamma"}}),
                       kStatusColumns));
  const auto cs = cases(sc, db);
  std::vector<Point> pts;
  for (const auto& c : cs)
    for (double w : sc.omega_eV) {
      auto labels = c.labels();
      labels.insert(labels.end(), {w, w / sc.omega_unit_eV});
      pts.push_back({labels, [&c, w, &sc] {
                       const Vec3 r(0, 0, c.z);
                       const Vec3 d = dipole_direction(c.orientation);
                       const auto g = scattering_green(c.stack, r, r, w, sc.quadrature);
                       const double lambda = wavelength(w);
                       return Rows{{1.0 + 3.0 * lambda * d.dot(g.value.imag() * d), 3.0 * lambda * g.error}};
                     }});
    }
  ComputeResult out;
  out.failed_points = sweep(pts, 2, threads, t);
  out.tables.push_back({"", std::move(t)});
  return out;
}

ComputeResult coupling_task(const Scenario& sc, const MaterialDb& db, unsigned threads) {
  ResultTable t(concat(concat(concat(kCaseColumns, {{"a_nm", "nm"}, {"a_over_lambda", ""}, {"omega_eV", "eV"},
                                                    {"omega_scaled", "omega_unit"}}),
                              {{"V0", "gamma"},
                               {"Gamma0_ab", "gamma"},
                               {"V", "gamma"},
                               {"Gamma_ab", "gamma"},
                               {"Gamma_aa", "gamma"},
                               {"dV", "gamma"},
                               {"V_over_Gamma_aa", ""},
                               {"Gamma_ab_over_Gamma_aa", ""}}),
                       kStatusColumns));
  const auto cs = cases(sc, db);
  std::vector<Point> pts;
  for (const auto& c : cs)
    for (double a : sc.a_nm)
      for (double w : sc.omega_eV) {
        auto labels = c.labels();
        labels.insert(labels.end(), {a, a / wavelength(w), w, w / sc.omega_unit_eV});
        pts.push_back({labels, [&c, a, w, &sc] {
                         const Vec3 d = dipole_direction(c.orientation);
                         const auto atoms = AtomArray::chain(2, a, c.z, d, w);
                         CouplingOptions opt;
                         opt.path = sc.quadrature;
                         const auto set = coupling_matrices(atoms, c.stack, opt);
                         const auto vac = vacuum_coupling<double>(Vec3(a, 0, 0), d, wavelength(w));
                         const double v = set.coherent(0, 1), g = set.dissipative(0, 1), gaa = set.dissipative(0, 0);
                         return Rows{{vac.coherent, vac.dissipative, v, g, gaa, v - vac.coherent, v / gaa, g / gaa}};
                       }});
      }
  ComputeResult out;
  out.failed_points = sweep(pts, 8, threads, t);
  out.tables.push_back({"", std::move(t)});
  return out;
}

ComputeResult shift_task(const Scenario& sc, const MaterialDb& db, unsigned threads) {
  ResultTable t(concat(concat(concat(kCaseColumns, {{"omega_eV", "eV"}}),
                              {{"shifted_eV", "eV"},
                               {"shift_eV", "eV"},
                               {"shift_over_omega", ""},
                               {"iterations", ""},
                               {"converged", ""}}),
                       kStatusColumns));
  const auto cs = cases(sc, db);
  std::vector<Point> pts;
  for (const auto& c : cs)
    for (double w : sc.omega_eV) {
      auto labels = c.labels();
      labels.push_back(w);
      pts.push_back({labels, [&c, w, &sc] {
                       const auto s = surface_shift(c.stack, Vec3(0, 0, c.z), dipole_direction(c.orientation), w,
                                                    sc.gamma_eV, sc.quadrature);
                       return Rows{{s.shifted, s.shift, s.shift / w, (long long)s.iterations,
                                    (long long)(s.converged ? 1 : 0)}};
                     }});
    }
  ComputeResult out;
  out.failed_points = sweep(pts, 5, threads, t);
  for (const auto& row : t.rows)
    if (const auto* conv = std::get_if<long long>(&row[t.column_index("converged")]); conv && *conv == 0)
      out.warnings.push_back("shift iteration did not converge at z = " +
                             ResultTable::format_number(std::get<double>(row[3])) + " nm");
  out.tables.push_back({"", std::move(t)});
  return out;
}

ComputeResult modes_task(const Scenario& sc, const MaterialDb& db, unsigned threads) {
  ResultTable t(concat(concat(concat(kCaseColumns, {{"a_nm", "nm"}, {"a_over_lambda", ""}, {"omega_eV", "eV"},
                                                    {"chain_length", ""}}),
                              {{"mode", ""}, {"rate", "gamma"}, {"min_over_max", ""}}),
                       kStatusColumns));
  const auto cs = cases(sc, db);
  std::vector<Point> pts;
  for (const auto& c : cs)
    for (double a : sc.a_nm)
      for (double w : sc.omega_eV) {
        auto labels = c.labels();
        labels.insert(labels.end(), {a, a / wavelength(w), w, (long long)sc.chain_length});
        pts.push_back({labels, [&c, a, w, &sc] {
                         const auto atoms =
                             AtomArray::chain(sc.chain_length, a, c.z, dipole_direction(c.orientation), w);
                         CouplingOptions opt;
                         opt.path = sc.quadrature;
                         const auto set = coupling_matrices(atoms, c.stack, opt);
                         const auto& rates = set.modes.rates;
                         const double ratio = rates.minCoeff() / rates.maxCoeff();
                         Rows rows;
                         for (Eigen::Index m = 0; m < rates.size(); ++m) rows.push_back({(long long)m, rates(m), ratio});
                         return rows;
                       }});
      }
  ComputeResult out;
  out.failed_points = sweep(pts, 3, threads, t);
  out.tables.push_back({"", std::move(t)});
  return out;
}

ComputeResult transport_task(const Scenario& sc, const MaterialDb& db, unsigned threads) {
  const std::size_t n = sc.chain_length;
  std::vector<Column> traj_cols = concat(kCaseColumns, {{"t", "1/gamma"}, {"n_total", ""}});
  for (std::size_t i = 1; i <= n; ++i) traj_cols.push_back({"n_" + std::to_string(i), ""});
  ResultTable traj(concat(traj_cols, kStatusColumns));
  ResultTable metrics(concat(concat(concat(kCaseColumns, {{"a_nm", "nm"}, {"omega_eV", "eV"}, {"chain_length", ""}}),
                                    {{"t_P", "1/gamma"},
                                     {"peak_population", ""},
                                     {"n_at_t_P", ""},
                                     {"early_decay_rate", "gamma"},
                                     {"late_decay_rate", "gamma"}}),
                             kStatusColumns));

  const auto cs = cases(sc, db);
  const double a = sc.a_nm.front(), w = sc.omega_eV.front();
  std::vector<Trajectory> trajectories(cs.size());
  std::vector<std::string> failures(cs.size());
  parallel_for(cs.size(), threads, [&](std::size_t i) {
    const auto atoms = AtomArray::chain(n, a, cs[i].z, dipole_direction(cs[i].orientation), w);
    CouplingOptions opt;
    opt.path = sc.quadrature;
    try {
      const auto set = coupling_matrices(atoms, cs[i].stack, opt);
      trajectories[i] = propagate(build_effective_hamiltonian(set), localized_excitation(Eigen::Index(n)), sc.t_max,
                                  sc.dt_out);
    } catch (const ConvergenceError& e) {
      failures[i] = e.what();
    }
  });

  ComputeResult out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    auto labels = cs[i].labels();
    auto mlabels = labels;
    mlabels.insert(mlabels.end(), {a, w, (long long)n});
    if (!failures[i].empty()) {
      ++out.failed_points;
      auto row = mlabels;
      row.insert(row.end(), 5, Cell{kNaN});
      row.insert(row.end(), {std::string("nonconverged"), failures[i]});
      metrics.add_row(std::move(row));
      continue;
    }
    const auto& tr = trajectories[i];
    const Eigen::MatrixXd pop = tr.populations();
    const Eigen::VectorXd total = tr.total();
    for (Eigen::Index s = 0; s < tr.times.size(); ++s) {
      auto row = labels;
      row.insert(row.end(), {tr.times(s), total(s)});
      for (Eigen::Index j = 0; j < pop.cols(); ++j) row.emplace_back(pop(s, j));
      row.insert(row.end(), {std::string("ok"), std::string()});
      traj.add_row(std::move(row));
    }
    auto row = mlabels;
    try {
      const auto m = transport_metrics(tr);
      const double early = mean_decay_rate(tr, 0.0, std::min(0.1, sc.t_max));
      const double late = m.arrival_time / 2 + sc.dt_out < m.arrival_time
                              ? mean_decay_rate(tr, m.arrival_time / 2, m.arrival_time)
                              : kNaN;
      row.insert(row.end(), {m.arrival_time, m.peak_population, m.remaining_fraction, early, late});
      row.insert(row.end(), {std::string("ok"), std::string()});
    } catch (const TransportWindowError& e) {
      row.insert(row.end(), 5, Cell{kNaN});
      row.insert(row.end(), {std::string("window_too_short"), std::string(e.what())});
      out.warnings.push_back(std::string(e.what()) + " [" + cs[i].material + ", " + to_string(cs[i].geometry) + ", " +
                             to_string(cs[i].orientation) + "]");
    }
    metrics.add_row(std::move(row));
  }
  out.tables.push_back({"", std::move(traj)});
  out.tables.push_back({"_metrics", std::move(metrics)});
  return out;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

std::string describe(const PathParams& p) {
  return "rel_tol=" + ResultTable::format_number(p.rel_tol) + " abs_tol=" + ResultTable::format_number(p.abs_tol) +
         " ellipse_half_width=" + ResultTable::format_number(p.ellipse_half_width) +
         " cavity_half_width=" + ResultTable::format_number(p.cavity_half_width) +
         " ellipse_height=" + ResultTable::format_number(p.ellipse_height) +
         " max_evaluations=" + std::to_string(p.max_evaluations);
}

}  // namespace

ComputeResult compute_scenario(const Scenario& sc, const MaterialDb& db, unsigned threads) {
  switch (sc.task) {
    case Task::Epsilon: return epsilon_task(sc, db, threads);
    case Task::SingleRate: return single_rate_task(sc, db, threads);
    case Task::CouplingMap:
    case Task::CouplingCut: return coupling_task(sc, db, threads);
    case Task::Shift: return shift_task(sc, db, threads);
    case Task::Modes: return modes_task(sc, db, threads);
    case Task::Transport: return transport_task(sc, db, threads);
  }
  return {};
}

RunOutcome run_scenario(Scenario sc, const RunOptions& options) {
  if (options.tolerance) {
    sc.quadrature.rel_tol = *options.tolerance;
    validate(sc.quadrature);
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(options.output_dir, ec);
  if (ec || !fs::is_directory(options.output_dir))
    throw IoError("cannot create output directory '" + options.output_dir + "'");

  const MaterialDb db = scenario_materials(sc);
  ComputeResult result = compute_scenario(sc, db, options.threads);

  RunOutcome out;
  out.failed_points = result.failed_points;
  out.warnings = result.warnings;
  const std::string stamp = options.timestamp.empty() ? utc_now() : options.timestamp;
  for (auto& [suffix, table] : result.tables) {
    table.metadata.insert(table.metadata.begin(),
                          {{"dipsurf", DIPSURF_VERSION},
                           {"scenario", sc.name},
                           {"task", to_string(sc.task)},
                           {"generated", stamp},
                           {"quadrature", describe(sc.quadrature)},
                           {"omega_unit_eV", ResultTable::format_number(sc.omega_unit_eV)},
                           {"failed_points", std::to_string(result.failed_points)},
                           {"config", sc.source}});
    const fs::path base = fs::path(options.output_dir) / (sc.output + suffix);
    table.save_csv(base.string() + ".csv");
    out.files.push_back(base.string() + ".csv");
    if (options.json) {
      table.save_json(base.string() + ".json");
      out.files.push_back(base.string() + ".json");
    }
  }
  out.exit_code = result.failed_points > 0 ? exit_code::nonconvergence : exit_code::ok;
  return out;
}

}  // namespace dipsurf
