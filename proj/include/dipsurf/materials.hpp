#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace dipsurf {

// Dielectric models. All energies in eV.

template <typename Scalar = double>
struct DrudeParams {
  Scalar plasma_energy{};
  Scalar damping{};
};

template <typename Scalar = double>
struct LorentzOscillator {
  Scalar weight{};
  Scalar resonance{};
  Scalar damping{};
};

/// Drude-Lorentz: the first oscillator is the free-electron term (resonance 0).
template <typename Scalar = double>
struct DrudeLorentzParams {
  Scalar plasma_energy{};
  std::vector<LorentzOscillator<Scalar>> oscillators;
};

template <typename Scalar = double>
struct BroadenedOscillator {
  Scalar weight{};
  Scalar resonance{};
  Scalar damping{};
  Scalar broadening{};  // alpha: Gaussian weight of the frequency-dependent damping
};

template <typename Scalar = double>
struct ModifiedLorentzParams {
  Scalar eps_infinity{1};
  std::vector<BroadenedOscillator<Scalar>> oscillators;
};

/// Frequency-independent permittivity (vacuum, ideal dielectrics in tests).
struct ConstantPermittivity {
  std::complex<double> value{1.0, 0.0};
};

/// Ideal metal, eps -> -infinity: r^p = +1, r^s = -1 at every k.
struct PerfectConductor {};

using MaterialModel = std::variant<DrudeParams<double>, DrudeLorentzParams<double>,
                                   ModifiedLorentzParams<double>, ConstantPermittivity,
                                   PerfectConductor>;

namespace detail {
template <typename Scalar>
void require_positive_frequency(Scalar omega) {
  if (!(omega > Scalar(0)))
    throw std::domain_error("permittivity requested at non-positive frequency");
}
}  // namespace detail

template <typename Scalar>
std::complex<Scalar> eval_drude(const DrudeParams<Scalar>& p, Scalar omega) {
  detail::require_positive_frequency(omega);
  using C = std::complex<Scalar>;
  return Scalar(1) - p.plasma_energy * p.plasma_energy / C(omega * omega, omega * p.damping);
}

template <typename Scalar>
std::complex<Scalar> eval_drude_lorentz(const DrudeLorentzParams<Scalar>& p, Scalar omega) {
  detail::require_positive_frequency(omega);
  using C = std::complex<Scalar>;
  const Scalar wp2 = p.plasma_energy * p.plasma_energy;
  C eps(1);
  for (const auto& o : p.oscillators)
    eps += o.weight * wp2 / C(o.resonance * o.resonance - omega * omega, -omega * o.damping);
  return eps;
}

template <typename Scalar>
Scalar broadened_damping(const BroadenedOscillator<Scalar>& o, Scalar omega) {
  const Scalar x = (omega - o.resonance) / o.damping;
  return o.damping * std::exp(-o.broadening * x * x);
}

template <typename Scalar>
std::complex<Scalar> eval_modified_lorentz(const ModifiedLorentzParams<Scalar>& p, Scalar omega) {
  detail::require_positive_frequency(omega);
  using C = std::complex<Scalar>;
  C eps(p.eps_infinity);
  for (const auto& o : p.oscillators) {
    const Scalar wj2 = o.resonance * o.resonance;
    eps += o.weight * wj2 / C(omega * omega - wj2, -omega * broadened_damping(o, omega));
  }
  return eps;
}

/// Permittivity of any model at photon energy omega (eV). A perfect conductor
/// reports -infinity; fresnel() understands that value.
std::complex<double> permittivity(const MaterialModel& model, double omega);

bool is_perfect_conductor(const MaterialModel& model);
bool is_vacuum(const MaterialModel& model);

/// Checks the invariants of a parameter set; throws std::invalid_argument.
void validate(const MaterialModel& model);

std::string model_tag(const MaterialModel& model);

}  // namespace dipsurf
