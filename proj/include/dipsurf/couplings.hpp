#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dipsurf/greens.hpp"
#include "dipsurf/quadrature.hpp"

namespace dipsurf {

/// Identical two-level atoms sharing one dipole direction. Rates are reported in
/// units of the free-space single-atom rate gamma.
struct AtomArray {
  std::vector<Vec3> positions;  // nm
  Vec3 dipole = Vec3::UnitX();  // unit vector
  double transition_energy = 1.0;  // hbar omega_a, eV

  double wavelength() const { return dipsurf::wavelength(transition_energy); }
  std::size_t size() const { return positions.size(); }

  /// N atoms on a line along x at height z, spacing a.
  static AtomArray chain(std::size_t n, double spacing_nm, double height_nm, const Vec3& dipole,
                         double transition_energy_eV);

  /// Throws std::invalid_argument on a non-unit dipole, duplicate positions or
  /// an atom outside the vacuum layer of `stack`.
  void validate(const LayerStack& stack) const;
};

struct CollectiveModes {
  Eigen::VectorXd rates;    // gamma_m / gamma, descending
  Eigen::MatrixXd vectors;  // column m is the m-th mode
};

struct CouplingSet {
  Eigen::MatrixXd coherent;     // V / gamma, zero diagonal
  Eigen::MatrixXd dissipative;  // Gamma / gamma
  CollectiveModes modes;
};

/// Quadrature failure for one atom pair.
class CouplingConvergenceError : public ConvergenceError {
 public:
  CouplingConvergenceError(const ConvergenceError& cause, std::size_t alpha, std::size_t beta, double omega_eV);
  std::size_t alpha() const noexcept { return alpha_; }
  std::size_t beta() const noexcept { return beta_; }
  double omega() const noexcept { return omega_; }

 private:
  std::size_t alpha_, beta_;
  double omega_;
};

struct CouplingOptions {
  PathParams path{};
  unsigned threads = 1;
};

/// Symmetric orthogonal decomposition Gamma = M diag(gamma_m) M^T, rates sorted
/// descending; each eigenvector's first non-negligible component is positive.
CollectiveModes collective_modes(const Eigen::MatrixXd& dissipative);

/// d . Re/Im[G0 + G^R] . d scaled into V and Gamma for every pair. Scattering
/// tensors are shared between pairs with the same (x_ab, y_ab, z_a, z_b).
CouplingSet coupling_matrices(const AtomArray& atoms, const LayerStack& stack, const CouplingOptions& options = {});

/// Surface-induced single-atom rate Gamma_aa / gamma at one position.
double single_atom_rate(const LayerStack& stack, const Vec3& position, const Vec3& dipole, double omega_eV,
                        const PathParams& path = {});

struct ShiftResult {
  double bare = 0.0;     // omega, eV
  double shifted = 0.0;  // omega~, eV
  double shift = 0.0;    // delta = omega - omega~, eV
  int iterations = 0;
  bool converged = false;
};

/// Self-consistent surface level shift
///   delta(w~) = gamma (3 lambda / 2) (w~/w)^2 d . Re G^R(r, r, w~) . d,  w~ = w - delta,
/// solved by fixed-point iteration from w~ = w. `gamma_eV` is hbar * gamma.
ShiftResult surface_shift(const LayerStack& stack, const Vec3& position, const Vec3& dipole, double omega_eV,
                          double gamma_eV, const PathParams& path = {}, double tolerance = 1e-12,
                          int max_iterations = 50);

}  // namespace dipsurf
