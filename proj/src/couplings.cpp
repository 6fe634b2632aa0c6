#include "dipsurf/couplings.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "dipsurf/parallel.hpp"

namespace dipsurf {

AtomArray AtomArray::chain(std::size_t n, double spacing_nm, double height_nm, const Vec3& dipole,
                           double transition_energy_eV) {
  AtomArray atoms;
  atoms.dipole = dipole;
  atoms.transition_energy = transition_energy_eV;
  for (std::size_t i = 0; i < n; ++i) atoms.positions.emplace_back(double(i) * spacing_nm, 0.0, height_nm);
  return atoms;
}

void AtomArray::validate(const LayerStack& stack) const {
  if (positions.empty()) throw std::invalid_argument("atom array is empty");
  if (std::abs(dipole.norm() - 1.0) > 1e-12) throw std::invalid_argument("dipole direction must be a unit vector");
  if (!(transition_energy > 0.0)) throw std::invalid_argument("transition energy must be > 0");
  for (std::size_t a = 0; a < positions.size(); ++a) {
    stack.require_inside(positions[a].z());
    for (std::size_t b = a + 1; b < positions.size(); ++b)
      if ((positions[a] - positions[b]).norm() == 0.0)
        throw std::invalid_argument("atoms " + std::to_string(a) + " and " + std::to_string(b) +
                                    " share a position");
  }
}

CouplingConvergenceError::CouplingConvergenceError(const ConvergenceError& cause, std::size_t alpha,
                                                   std::size_t beta, double omega_eV)
    : ConvergenceError(std::string(cause.what()) + " (atoms " + std::to_string(alpha) + ", " +
                           std::to_string(beta) + ", omega = " + std::to_string(omega_eV) + " eV)",
                       cause.estimate(), cause.error_bound(), cause.evaluations()),
      alpha_(alpha),
      beta_(beta),
      omega_(omega_eV) {}

CollectiveModes collective_modes(const Eigen::MatrixXd& dissipative) {
  const Eigen::Index n = dissipative.rows();
  if (n != dissipative.cols()) throw std::invalid_argument("dissipation matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dissipative);
  CollectiveModes modes;
  modes.rates = solver.eigenvalues().reverse();
  modes.vectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index m = 0; m < n; ++m) {
    auto v = modes.vectors.col(m);
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-10 * scale) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
  }
  return modes;
}

namespace {

using GeometryKey = std::tuple<long long, long long, long long, long long>;

long long quantize(double x) { return std::llround(x * 1e9); }

GeometryKey key_of(const Vec3& ra, const Vec3& rb) {
  return {quantize(ra.x() - rb.x()), quantize(ra.y() - rb.y()), quantize(ra.z()), quantize(rb.z())};
}

}  // namespace

CouplingSet coupling_matrices(const AtomArray& atoms, const LayerStack& stack, const CouplingOptions& options) {
  atoms.validate(stack);
  const std::size_t n = atoms.size();
  const double omega = atoms.transition_energy;
  const double k = wavenumber(omega);
  const double lambda = atoms.wavelength();
  const Vec3& d = atoms.dipole;

  // Distinct scattering geometries among pairs (alpha <= beta).
  struct Job {
    Vec3 ra, rb;
    std::size_t alpha, beta;
  };
  std::map<GeometryKey, std::size_t> index;
  std::vector<Job> jobs;
  std::vector<std::size_t> pair_job(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      const auto key = key_of(atoms.positions[a], atoms.positions[b]);
      auto [it, inserted] = index.emplace(key, jobs.size());
      if (inserted) jobs.push_back({atoms.positions[a], atoms.positions[b], a, b});
      pair_job[a * n + b] = it->second;
    }

  std::vector<Tensor3c> reflected(jobs.size(), Tensor3c::Zero());
  if (stack.geometry != Geometry::Vacuum) {
    parallel_for(jobs.size(), options.threads, [&](std::size_t j) {
      try {
        reflected[j] = scattering_green(stack, jobs[j].ra, jobs[j].rb, omega, options.path).value;
      } catch (const ConvergenceError& e) {
        throw CouplingConvergenceError(e, jobs[j].alpha, jobs[j].beta, omega);
      }
    });
  }

  CouplingSet out;
  out.coherent = Eigen::MatrixXd::Zero(n, n);
  out.dissipative = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const Tensor3c& self = reflected[pair_job[a * n + a]];
    out.dissipative(a, a) = 1.0 + 3.0 * lambda * d.dot(self.imag() * d);
    for (std::size_t b = a + 1; b < n; ++b) {
      const Tensor3c total =
          bulk_green<double>(atoms.positions[a] - atoms.positions[b], k) + reflected[pair_job[a * n + b]];
      const double v = 1.5 * lambda * d.dot(total.real() * d);
      const double g = 3.0 * lambda * d.dot(total.imag() * d);
      out.coherent(a, b) = out.coherent(b, a) = v;
      out.dissipative(a, b) = out.dissipative(b, a) = g;
    }
  }
  out.modes = collective_modes(out.dissipative);
  return out;
}

double single_atom_rate(const LayerStack& stack, const Vec3& position, const Vec3& dipole, double omega_eV,
                        const PathParams& path) {
  const auto g = scattering_green(stack, position, position, omega_eV, path);
  return 1.0 + 3.0 * wavelength(omega_eV) * dipole.dot(g.value.imag() * dipole);
}

ShiftResult surface_shift(const LayerStack& stack, const Vec3& position, const Vec3& dipole, double omega_eV,
                          double gamma_eV, const PathParams& path, double tolerance, int max_iterations) {
  if (!(omega_eV > 0.0)) throw std::domain_error("surface_shift: frequency must be > 0");
  stack.require_inside(position.z());
  const double lambda = wavelength(omega_eV);
  ShiftResult out;
  out.bare = omega_eV;
  double shifted = omega_eV;
  for (int it = 1; it <= max_iterations; ++it) {
    const auto g = scattering_green(stack, position, position, shifted, path);
    const double ratio = shifted / omega_eV;
    const double delta = gamma_eV * 1.5 * lambda * ratio * ratio * dipole.dot(g.value.real() * dipole);
    const double next = omega_eV - delta;
    out.iterations = it;
    const bool done = std::abs(next - shifted) / omega_eV < tolerance;
    shifted = next;
    if (done) {
      out.converged = true;
      break;
    }
    if (!(shifted > 0.0)) break;
  }
  out.shifted = shifted;
  out.shift = omega_eV - shifted;
  return out;
}

}  // namespace dipsurf
