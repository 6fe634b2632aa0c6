#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "dipsurf/couplings.hpp"

namespace dipsurf {

/// Generator of single-excitation amplitudes, dc/dt = K c with
/// K = i V - Gamma / 2 (rates in gamma, time in 1/gamma).
struct EffectiveHamiltonian {
  Eigen::MatrixXcd generator;
};

EffectiveHamiltonian build_effective_hamiltonian(const CouplingSet& couplings);
EffectiveHamiltonian build_effective_hamiltonian(const Eigen::MatrixXd& coherent, const Eigen::MatrixXd& dissipative);

struct Trajectory {
  Eigen::VectorXd times;         // 1/gamma
  Eigen::MatrixXcd amplitudes;   // row k: c(t_k)

  Eigen::MatrixXd populations() const { return amplitudes.cwiseAbs2(); }
  Eigen::VectorXd total() const { return populations().rowwise().sum(); }
};

enum class PropagationMethod { Automatic, Eigen, Stepping };

struct PropagationOptions {
  PropagationMethod method = PropagationMethod::Automatic;
  double tolerance = 1e-9;               // local accuracy target
  double max_condition = 1e8;            // eigenvector condition above which K counts as defective
  std::function<void(const std::string&)> log = nullptr;  // defaults to std::clog
};

/// Evolves c0 to t_max and samples on the grid 0, dt, 2 dt, ... (t_max included
/// when it is a grid point). Uses the eigen-decomposition of K; falls back to
/// adaptive Dormand-Prince stepping when K is numerically defective.
Trajectory propagate(const EffectiveHamiltonian& k, const Eigen::VectorXcd& c0, double t_max, double dt_out,
                     const PropagationOptions& options = {});

struct TransportMetrics {
  double arrival_time = 0.0;  // t_P: maximum of the last site's population, 1/gamma
  double peak_population = 0.0;
  double remaining_fraction = 0.0;  // n(t_P)
};

class TransportWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// t_P from the sampled last-site population, refined by a parabola through the
/// discrete maximum and its neighbours.
TransportMetrics transport_metrics(const Trajectory& trajectory);

/// Mean decay rate of the total excitation between t0 and t1,
/// ln(n(t0) / n(t1)) / (t1 - t0), from the nearest grid samples.
double mean_decay_rate(const Trajectory& trajectory, double t0, double t1);

/// Initial state with the excitation on one site.
Eigen::VectorXcd localized_excitation(Eigen::Index n, Eigen::Index site = 0);

}  // namespace dipsurf
