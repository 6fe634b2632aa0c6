#include "dipsurf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dipsurf {

using cplx = std::complex<double>;

EffectiveHamiltonian build_effective_hamiltonian(const Eigen::MatrixXd& coherent,
                                                 const Eigen::MatrixXd& dissipative) {
  if (coherent.rows() != dissipative.rows() || coherent.cols() != dissipative.cols() ||
      coherent.rows() != coherent.cols())
    throw std::invalid_argument("coupling matrices must be square and of equal size");
  EffectiveHamiltonian h;
  h.generator = cplx(0.0, 1.0) * coherent.cast<cplx>() - 0.5 * dissipative.cast<cplx>();
  return h;
}

EffectiveHamiltonian build_effective_hamiltonian(const CouplingSet& couplings) {
  return build_effective_hamiltonian(couplings.coherent, couplings.dissipative);
}

Eigen::VectorXcd localized_excitation(Eigen::Index n, Eigen::Index site) {
  if (site < 0 || site >= n) throw std::out_of_range("excitation site outside the array");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  c(site) = 1.0;
  return c;
}

namespace {

std::size_t grid_size(double t_max, double dt) {
  return static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
}

bool propagate_eigen(const Eigen::MatrixXcd& k, const Eigen::VectorXcd& c0, const Eigen::VectorXd& times,
                     const PropagationOptions& options, Eigen::MatrixXcd& out, std::string& why) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(k);
  if (solver.info() != Eigen::Success) {
    why = "eigen-decomposition failed";
    return false;
  }
  const Eigen::MatrixXcd& p = solver.eigenvectors();
  const Eigen::VectorXcd& lambda = solver.eigenvalues();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p);
  const auto& sv = svd.singularValues();
  const double condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(condition < options.max_condition)) {
    why = "eigenvector condition number " + std::to_string(condition);
    return false;
  }
  const Eigen::VectorXcd coeff = p.partialPivLu().solve(c0);
  if ((p * coeff - c0).norm() > 1e-10 * std::max(1.0, c0.norm())) {
    why = "inaccurate modal expansion";
    return false;
  }
  out.resize(times.size(), c0.size());
  for (Eigen::Index s = 0; s < times.size(); ++s) {
    const Eigen::VectorXcd phase = (lambda * times(s)).array().exp();
    out.row(s) = (p * phase.cwiseProduct(coeff)).transpose();
  }
  return true;
}

// Dormand-Prince 5(4) with step-size control, landing on each output time.
void propagate_stepping(const Eigen::MatrixXcd& k, const Eigen::VectorXcd& c0, const Eigen::VectorXd& times,
                        double tolerance, Eigen::MatrixXcd& out) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2, (void)c3, (void)c4, (void)c5;

  const double atol = 1e-3 * tolerance, rtol = 1e-3 * tolerance;
  Eigen::VectorXcd y = c0;
  double t = 0.0;
  double h = 1e-3 / std::max(1.0, k.cwiseAbs().maxCoeff());
  out.resize(times.size(), c0.size());
  for (Eigen::Index s = 0; s < times.size(); ++s) {
    while (t < times(s) - 1e-15) {
      const double step = std::min(h, times(s) - t);
      const Eigen::VectorXcd k1 = k * y;
      const Eigen::VectorXcd k2 = k * (y + step * a21 * k1);
      const Eigen::VectorXcd k3 = k * (y + step * (a31 * k1 + a32 * k2));
      const Eigen::VectorXcd k4 = k * (y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      const Eigen::VectorXcd k5 = k * (y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Eigen::VectorXcd k6 = k * (y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Eigen::VectorXcd y5 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Eigen::VectorXcd k7 = k * y5;
      const Eigen::VectorXcd err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double norm = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
        norm = std::max(norm, std::abs(err(i)) / sc);
      }
      if (norm <= 1.0) {
        t += step;
        y = y5;
      }
      const double factor = norm > 0 ? 0.9 * std::pow(norm, -0.2) : 5.0;
      h = step * std::clamp(factor, 0.2, 5.0);
    }
    t = times(s);
    out.row(s) = y.transpose();
  }
}

}  // namespace

Trajectory propagate(const EffectiveHamiltonian& k, const Eigen::VectorXcd& c0, double t_max, double dt_out,
                     const PropagationOptions& options) {
  const auto& g = k.generator;
  if (g.rows() != g.cols() || g.rows() != c0.size())
    throw std::invalid_argument("generator and initial state dimensions differ");
  if (c0.norm() > 1.0 + 1e-12) throw std::invalid_argument("initial state norm exceeds 1");
  if (!(t_max > 0.0) || !(dt_out > 0.0) || dt_out > t_max)
    throw std::invalid_argument("need 0 < dt_out <= t_max");

  Trajectory traj;
  const std::size_t steps = grid_size(t_max, dt_out);
  traj.times.resize(static_cast<Eigen::Index>(steps));
  for (std::size_t s = 0; s < steps; ++s) traj.times(static_cast<Eigen::Index>(s)) = double(s) * dt_out;

  if (options.method != PropagationMethod::Stepping) {
    std::string why;
    if (propagate_eigen(g, c0, traj.times, options, traj.amplitudes, why)) return traj;
    if (options.method == PropagationMethod::Eigen)
      throw std::runtime_error("eigen-decomposition propagation unavailable: " + why);
    const std::string msg = "propagate: generator treated as defective (" + why + "), using adaptive stepping";
    if (options.log) options.log(msg);
    else std::clog << msg << '\n';
  }
  propagate_stepping(g, c0, traj.times, options.tolerance, traj.amplitudes);
  return traj;
}

TransportMetrics transport_metrics(const Trajectory& trajectory) {
  const Eigen::Index steps = trajectory.times.size();
  if (steps < 2 || trajectory.amplitudes.cols() == 0) throw std::invalid_argument("empty trajectory");
  const Eigen::VectorXd last = trajectory.amplitudes.col(trajectory.amplitudes.cols() - 1).cwiseAbs2();
  Eigen::Index peak = 0;
  last.maxCoeff(&peak);
  if (peak == steps - 1)
    throw TransportWindowError("window too short: last-site population still rising at t_max = " +
                               std::to_string(trajectory.times(steps - 1)) + "; increase t_max");

  TransportMetrics m;
  m.arrival_time = trajectory.times(peak);
  m.peak_population = last(peak);
  const Eigen::VectorXd total = trajectory.total();
  m.remaining_fraction = total(peak);
  if (peak > 0) {
    const double y0 = last(peak - 1), y1 = last(peak), y2 = last(peak + 1);
    const double h = trajectory.times(peak + 1) - trajectory.times(peak);
    const double curvature = y0 - 2.0 * y1 + y2;
    if (curvature < 0.0) {
      const double u = 0.5 * (y0 - y2) / curvature;  // in units of h, |u| <= 1/2
      m.arrival_time += u * h;
      m.peak_population = y1 - 0.25 * (y0 - y2) * u;
      // total population at t_P from the parabola through the same three samples
      const double n0 = total(peak - 1), n1 = total(peak), n2 = total(peak + 1);
      m.remaining_fraction = n1 + 0.5 * u * (n2 - n0) + 0.5 * u * u * (n0 - 2.0 * n1 + n2);
    }
  }
  return m;
}

double mean_decay_rate(const Trajectory& trajectory, double t0, double t1) {
  const Eigen::Index steps = trajectory.times.size();
  if (steps < 2 || !(t1 > t0)) throw std::invalid_argument("mean_decay_rate needs t1 > t0 and a sampled trajectory");
  const double dt = trajectory.times(1) - trajectory.times(0);
  auto index = [&](double t) {
    return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::lround(t / dt)), 0, steps - 1);
  };
  const Eigen::Index i0 = index(t0), i1 = index(t1);
  if (i1 <= i0) throw std::invalid_argument("decay window shorter than one output step");
  const Eigen::VectorXd total = trajectory.total();
  return std::log(total(i0) / total(i1)) / (trajectory.times(i1) - trajectory.times(i0));
}

}  // namespace dipsurf
