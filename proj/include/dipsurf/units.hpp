#pragma once

#include <numbers>

namespace dipsurf {

/// hbar * c in eV nm. Frequencies are carried as photon energies (eV) throughout;
/// this constant is the only place where they meet lengths.
inline constexpr double kHbarC_eVnm = 197.3269804;

/// hbar in eV s, used only when a rate is given in 1/s.
inline constexpr double kHbar_eVs = 6.582119569e-16;

inline constexpr double kPi = std::numbers::pi;

/// Vacuum wavenumber k = omega / c in 1/nm for a photon energy in eV.
inline constexpr double wavenumber(double energy_eV) { return energy_eV / kHbarC_eVnm; }

/// Vacuum wavelength 2 pi c / omega in nm.
inline constexpr double wavelength(double energy_eV) { return 2.0 * kPi * kHbarC_eVnm / energy_eV; }

inline constexpr double energy_from_wavelength(double wavelength_nm) {
  return 2.0 * kPi * kHbarC_eVnm / wavelength_nm;
}

}  // namespace dipsurf
