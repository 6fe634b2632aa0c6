#include "dipsurf/greens.hpp"

#include <algorithm>
#include <string>

#include "dipsurf/bessel.hpp"

namespace dipsurf {

using cplx = std::complex<double>;

void LayerStack::require_inside(double z) const {
  switch (geometry) {
    case Geometry::Vacuum:
      return;
    case Geometry::OneSurface:
      if (!(z > 0.0))
        throw std::domain_error("atom at z = " + std::to_string(z) + " nm is not above the surface (z > 0)");
      return;
    case Geometry::TwoSurfaces:
      if (!(gap > 0.0)) throw std::domain_error("two-surface gap must be > 0");
      if (!(z > 0.0 && z < gap))
        throw std::domain_error("atom at z = " + std::to_string(z) + " nm is outside the gap (0, " +
                                std::to_string(gap) + ") nm");
      return;
  }
}

ReflectionKernel reflection_kernel(cplx kz, cplx r_lower, cplx r_upper, double z_alpha, double z_beta,
                                   double gap, bool has_upper) {
  const cplx i(0.0, 1.0);
  const cplx lower_path = r_lower * std::exp(i * kz * (z_alpha + z_beta));
  if (!has_upper) return {lower_path, lower_path, lower_path, lower_path};

  const double z_rel = z_alpha - z_beta;
  const cplx upper_path = r_upper * std::exp(i * kz * (2.0 * gap - z_alpha - z_beta));
  const cplx rr = r_upper * r_lower;
  const cplx e_plus = std::exp(i * kz * (2.0 * gap + z_rel));
  const cplx e_minus = std::exp(i * kz * (2.0 * gap - z_rel));
  const cplx inv_d = 1.0 / (1.0 - rr * std::exp(2.0 * i * kz * gap));
  const cplx cos_term = rr * (e_plus + e_minus);  // 2 r+ r- cos(kz zab) e^{2ikz h}
  const cplx sin_term = rr * (e_plus - e_minus);  // 2i r+ r- sin(kz zab) e^{2ikz h}
  return {(lower_path + upper_path + cos_term) * inv_d, (lower_path + upper_path - cos_term) * inv_d,
          (lower_path - upper_path + sin_term) * inv_d, (lower_path - upper_path - sin_term) * inv_d};
}

ScatteringIntegrand::ScatteringIntegrand(const LayerStack& stack, const Vec3& r_alpha, const Vec3& r_beta,
                                         double omega_eV)
    : geometry_(stack.geometry),
      k_(dipsurf::wavenumber(omega_eV)),
      eps_lower_(permittivity(stack.lower, omega_eV)),
      eps_upper_(stack.geometry == Geometry::TwoSurfaces ? permittivity(stack.upper, omega_eV) : cplx(1.0)),
      gap_(stack.gap),
      z_alpha_(r_alpha.z()),
      z_beta_(r_beta.z()) {
  const double dx = r_alpha.x() - r_beta.x();
  const double dy = r_alpha.y() - r_beta.y();
  rho_ = std::hypot(dx, dy);
  const double phi = rho_ > 0.0 ? std::atan2(dy, dx) : 0.0;
  cos_phi_ = std::cos(phi);
  sin_phi_ = std::sin(phi);
  cos_2phi_ = std::cos(2.0 * phi);
  sin_2phi_ = std::sin(2.0 * phi);
}

double ScatteringIntegrand::decay_length() const {
  double len = z_alpha_ + z_beta_;
  if (geometry_ == Geometry::TwoSurfaces) {
    len = std::min(len, 2.0 * gap_ - z_alpha_ - z_beta_);
    len = std::min(len, 2.0 * gap_ - std::abs(z_alpha_ - z_beta_));
  }
  return len;
}

Tensor3c ScatteringIntegrand::operator()(cplx k_rho) const {
  const cplx i(0.0, 1.0);
  const double k2 = k_ * k_;
  const cplx kz = upper_sqrt(cplx(k2) - k_rho * k_rho);
  const bool has_upper = geometry_ == Geometry::TwoSurfaces;

  const cplx rs_lower = fresnel_k<double>(Polarization::s, k_rho, k_, eps_lower_);
  const cplx rp_lower = fresnel_k<double>(Polarization::p, k_rho, k_, eps_lower_);
  const cplx rs_upper = has_upper ? fresnel_k<double>(Polarization::s, k_rho, k_, eps_upper_) : cplx(0.0);
  const cplx rp_upper = has_upper ? fresnel_k<double>(Polarization::p, k_rho, k_, eps_upper_) : cplx(0.0);
  const auto ks = reflection_kernel(kz, rs_lower, rs_upper, z_alpha_, z_beta_, gap_, has_upper);
  const auto kp = reflection_kernel(kz, rp_lower, rp_upper, z_alpha_, z_beta_, gap_, has_upper);

  cplx j0, j1, j2;
  const cplx arg = k_rho * rho_;
  if (arg.imag() == 0.0) {
    const auto j = bessel_j012(arg.real());
    j0 = j.j0, j1 = j.j1, j2 = j.j2;
  } else {
    const auto j = bessel_j012(arg);
    j0 = j.j0, j1 = j.j1, j2 = j.j2;
  }

  // s part
  const cplx s_half = 0.5 * ks.a_plus;
  // p part, already multiplied by -(kz^2/k^2)
  const cplx p_scale = -(kz * kz) / k2;
  const cplx p_half = 0.5 * kp.a_minus * p_scale;
  const cplx p_zz = (k_rho * k_rho / k2) * kp.a_plus * j0;
  const cplx p_odd = i * k_rho * kz / k2;  // -(kz^2/k^2) * (i k_rho / kz) = -i k_rho kz / k^2

  Tensor3c g;
  g(0, 0) = s_half * (j0 + j2 * cos_2phi_) + p_half * (j0 - j2 * cos_2phi_);
  g(1, 1) = s_half * (j0 - j2 * cos_2phi_) + p_half * (j0 + j2 * cos_2phi_);
  g(2, 2) = p_zz;
  g(0, 1) = s_half * j2 * sin_2phi_ - p_half * j2 * sin_2phi_;
  g(1, 0) = g(0, 1);
  g(0, 2) = -p_odd * kp.b_plus * j1 * cos_phi_;
  g(1, 2) = -p_odd * kp.b_plus * j1 * sin_phi_;
  g(2, 0) = p_odd * kp.b_minus * j1 * cos_phi_;
  g(2, 1) = p_odd * kp.b_minus * j1 * sin_phi_;

  const cplx prefactor = i / (4.0 * kPi) * k_rho / kz;
  return prefactor * g;
}

GreenResult scattering_green(const LayerStack& stack, const Vec3& r_alpha, const Vec3& r_beta, double omega_eV,
                             const PathParams& path) {
  if (!(omega_eV > 0.0)) throw std::domain_error("scattering_green: frequency must be > 0");
  stack.require_inside(r_alpha.z());
  stack.require_inside(r_beta.z());
  if (stack.geometry == Geometry::Vacuum) return {};
  if (is_vacuum(stack.lower) && (stack.geometry == Geometry::OneSurface || is_vacuum(stack.upper))) return {};

  const ScatteringIntegrand integrand(stack, r_alpha, r_beta, omega_eV);
  // gap: ellipse starts at the origin
  PathParams p = path;
  if (stack.geometry == Geometry::TwoSurfaces) p.ellipse_half_width = path.cavity_half_width;
  const auto result = sommerfeld_integrate<Tensor3c>(integrand, integrand.wavenumber(), p, integrand.decay_length());
  return {result.value, result.error, result.evaluations};
}

}  // namespace dipsurf
