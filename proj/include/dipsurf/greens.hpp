#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

#include "dipsurf/materials.hpp"
#include "dipsurf/quadrature.hpp"
#include "dipsurf/sommerfeld.hpp"
#include "dipsurf/units.hpp"

namespace dipsurf {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Tensor3 = Eigen::Matrix<std::complex<Scalar>, 3, 3>;

using Vec3 = Vector3<double>;
using Tensor3c = Tensor3<double>;

// ---------------------------------------------------------------------------
// Free-space tensor and closed-form vacuum couplings

namespace detail {

/// sin x / x and cos x / x^2 - sin x / x^3; Taylor series below x = 0.1.
template <typename Scalar>
std::pair<Scalar, Scalar> radiative_terms(Scalar x) {
  using std::cos;
  using std::sin;
  if (x < Scalar(0.1)) {
    const Scalar x2 = x * x;
    // t = (-1)^n x^(2n-2) / (2n+1)!
    Scalar s0 = 1, g = 0, t = 1;
    for (int n = 1; n < 8; ++n) {
      t *= -Scalar(1) / Scalar((2 * n) * (2 * n + 1));
      g += Scalar(2 * n) * t;
      s0 += t * x2;
      t *= x2;
    }
    return {s0, g};
  }
  const Scalar s = sin(x), c = cos(x);
  return {s / x, c / (x * x) - s / (x * x * x)};
}

}  // namespace detail

/// Free-space Green tensor (grad grad + k^2) exp(ikr) / (4 pi k^2 r), closed form.
/// Lengths in nm, k in 1/nm, result in 1/nm.
template <typename Scalar>
Tensor3<Scalar> bulk_green(const Vector3<Scalar>& separation, Scalar k) {
  using C = std::complex<Scalar>;
  const Scalar r = separation.norm();
  if (!(r > Scalar(0)))
    throw std::domain_error(
        "bulk Green tensor is singular at zero separation; use bulk_green_imag_coincident for the "
        "coincident-point rate");
  const Vector3<Scalar> u = separation / r;
  const Scalar kr = k * r;
  const C ikr(0, kr);
  const C prefactor = std::exp(ikr) / (Scalar(4) * Scalar(kPi) * r);
  const C a = Scalar(1) + C(0, 1) / kr - Scalar(1) / (kr * kr);
  const C b = Scalar(-1) - C(0, 3) / kr + Scalar(3) / (kr * kr);
  Tensor3<Scalar> g = (b * (u * u.transpose()).template cast<C>()).eval();
  g.diagonal().array() += a;
  g = prefactor * g;
  if (kr < Scalar(0.1)) {
    const auto [s0, q] = detail::radiative_terms(kr);
    Eigen::Matrix<Scalar, 3, 3> im = (-s0 - Scalar(3) * q) * (u * u.transpose());
    im.diagonal().array() += s0 + q;
    g.imag() = k / (Scalar(4) * Scalar(kPi)) * im;
  }
  return g;
}

/// Im G0(r, r) = k / (6 pi) * identity; the real part diverges and is absorbed
/// into the bare transition frequency.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> bulk_green_imag_coincident(Scalar k) {
  return Eigen::Matrix<Scalar, 3, 3>::Identity() * (k / (Scalar(6) * Scalar(kPi)));
}

template <typename Scalar>
struct PairCoupling {
  Scalar coherent;     // V / gamma
  Scalar dissipative;  // Gamma / gamma
};

/// Closed-form free-space exchange and collective-decay coefficients, in units of
/// the single-atom rate, for dipoles along `dipole` separated by `separation`.
template <typename Scalar>
PairCoupling<Scalar> vacuum_coupling(const Vector3<Scalar>& separation, const Vector3<Scalar>& dipole,
                                     Scalar wavelength) {
  using std::cos;
  using std::sin;
  const Scalar r = separation.norm();
  if (!(r > Scalar(0))) throw std::domain_error("vacuum coupling undefined at zero separation");
  const Scalar kappa = Scalar(2) * Scalar(kPi) * r / wavelength;
  const Scalar c = dipole.dot(separation) / (r * dipole.norm());
  const Scalar transverse = Scalar(1) - c * c;
  const Scalar longitudinal = Scalar(1) - Scalar(3) * c * c;
  const Scalar s = sin(kappa), co = cos(kappa);
  const Scalar k2 = kappa * kappa, k3 = k2 * kappa;
  PairCoupling<Scalar> out;
  out.coherent = Scalar(0.75) * (transverse * co / kappa - longitudinal * (s / k2 + co / k3));
  const auto [s0, q] = detail::radiative_terms(kappa);
  out.dissipative = Scalar(1.5) * (transverse * s0 + longitudinal * q);
  return out;
}

// ---------------------------------------------------------------------------
// Fresnel coefficients

enum class Polarization { s, p };

/// sqrt with Im >= 0, and Re >= 0 when Im == 0.
template <typename Scalar>
std::complex<Scalar> upper_sqrt(const std::complex<Scalar>& x) {
  std::complex<Scalar> s = std::sqrt(x);
  if (s.imag() < Scalar(0) || (s.imag() == Scalar(0) && s.real() < Scalar(0))) s = -s;
  return s;
}

/// Reflection coefficient of the vacuum side of a planar interface with a medium
/// of permittivity eps, given the vacuum k and the in-plane wavenumber.
template <typename Scalar>
std::complex<Scalar> fresnel_k(Polarization q, const std::complex<Scalar>& k_rho, Scalar k,
                               const std::complex<Scalar>& eps) {
  using C = std::complex<Scalar>;
  if (std::isinf(eps.real())) return q == Polarization::p ? C(1) : C(-1);
  const C kr2 = k_rho * k_rho;
  const C kz = upper_sqrt(C(k * k) - kr2);
  const C kmz = upper_sqrt(eps * (k * k) - kr2);
  if (q == Polarization::p) return (eps * kz - kmz) / (eps * kz + kmz);
  return (kz - kmz) / (kz + kmz);
}

/// Same, with the frequency given as a photon energy in eV.
inline std::complex<double> fresnel(Polarization q, std::complex<double> k_rho, double omega_eV,
                                    std::complex<double> eps) {
  if (!(omega_eV > 0)) throw std::domain_error("fresnel: frequency must be > 0");
  return fresnel_k<double>(q, k_rho, wavenumber(omega_eV), eps);
}

// ---------------------------------------------------------------------------
// Layered environment and the scattering tensor

enum class Geometry { Vacuum, OneSurface, TwoSurfaces };

/// Planar environment around a vacuum layer. The lower interface is z = 0; the
/// upper one (TwoSurfaces) is z = gap.
struct LayerStack {
  Geometry geometry = Geometry::Vacuum;
  MaterialModel lower = ConstantPermittivity{};  // below z = 0
  MaterialModel upper = ConstantPermittivity{};  // above z = gap
  double gap = 0.0;                              // nm

  static LayerStack vacuum() { return {}; }
  static LayerStack one_surface(MaterialModel below) {
    return {Geometry::OneSurface, std::move(below), ConstantPermittivity{}, 0.0};
  }
  static LayerStack two_surfaces(MaterialModel below, MaterialModel above, double gap_nm) {
    return {Geometry::TwoSurfaces, std::move(below), std::move(above), gap_nm};
  }

  /// Throws std::domain_error unless z lies strictly inside the vacuum layer.
  void require_inside(double z) const;
};

/// Coefficient functions of the reflected field at one k_rho, with the common
/// exp(i k_z h) factor already absorbed (so the one-surface case needs no h):
///   A~^q_pm = [r_- e^{ik_z(za+zb)} + r_+ e^{ik_z(2h-za-zb)} pm 2 r_+ r_- cos(k_z zab) e^{2ik_z h}] / D_q
///   B~^q_pm = [r_- e^{ik_z(za+zb)} - r_+ e^{ik_z(2h-za-zb)} pm 2i r_+ r_- sin(k_z zab) e^{2ik_z h}] / D_q
///   D_q     = 1 - r_+ r_- e^{2ik_z h}
struct ReflectionKernel {
  std::complex<double> a_plus, a_minus, b_plus, b_minus;
};

ReflectionKernel reflection_kernel(std::complex<double> kz, std::complex<double> r_lower,
                                   std::complex<double> r_upper, double z_alpha, double z_beta,
                                   double gap, bool has_upper);

/// Integrand of the scattering tensor at a (complex) k_rho on the path.
class ScatteringIntegrand {
 public:
  ScatteringIntegrand(const LayerStack& stack, const Vec3& r_alpha, const Vec3& r_beta, double omega_eV);

  Tensor3c operator()(std::complex<double> k_rho) const;

  double wavenumber() const { return k_; }
  /// e-folding length of the slowest evanescent exponential, nm.
  double decay_length() const;

 private:
  Geometry geometry_;
  double k_;
  std::complex<double> eps_lower_, eps_upper_;
  double gap_;
  double rho_, cos_phi_, sin_phi_, cos_2phi_, sin_2phi_;
  double z_alpha_, z_beta_;
};

struct GreenResult {
  Tensor3c value = Tensor3c::Zero();
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// Reflected part G^R(r_alpha, r_beta, omega) of the Green tensor, 1/nm.
/// Zero for a vacuum stack. Throws std::domain_error if an atom is outside the
/// vacuum layer and ConvergenceError if the Sommerfeld integral fails.
GreenResult scattering_green(const LayerStack& stack, const Vec3& r_alpha, const Vec3& r_beta,
                             double omega_eV, const PathParams& path = {});

}  // namespace dipsurf
