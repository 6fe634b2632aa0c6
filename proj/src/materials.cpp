#include "dipsurf/materials.hpp"

#include <type_traits>

namespace dipsurf {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::complex<double> permittivity(const MaterialModel& model, double omega) {
  return std::visit(
      overloaded{
          [&](const DrudeParams<double>& p) { return eval_drude(p, omega); },
          [&](const DrudeLorentzParams<double>& p) { return eval_drude_lorentz(p, omega); },
          [&](const ModifiedLorentzParams<double>& p) { return eval_modified_lorentz(p, omega); },
          [&](const ConstantPermittivity& p) {
            detail::require_positive_frequency(omega);
            return p.value;
          },
          [&](const PerfectConductor&) {
            detail::require_positive_frequency(omega);
            return std::complex<double>(-std::numeric_limits<double>::infinity(), 0.0);
          },
      },
      model);
}

bool is_perfect_conductor(const MaterialModel& model) {
  return std::holds_alternative<PerfectConductor>(model);
}

bool is_vacuum(const MaterialModel& model) {
  const auto* c = std::get_if<ConstantPermittivity>(&model);
  return c != nullptr && c->value == std::complex<double>(1.0, 0.0);
}

void validate(const MaterialModel& model) {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  std::visit(overloaded{
                 [&](const DrudeParams<double>& p) {
                   if (!(p.plasma_energy > 0)) fail("drude: plasma energy must be > 0");
                   if (!(p.damping >= 0)) fail("drude: damping must be >= 0");
                 },
                 [&](const DrudeLorentzParams<double>& p) {
                   if (!(p.plasma_energy > 0)) fail("drude_lorentz: plasma energy must be > 0");
                   if (p.oscillators.empty()) fail("drude_lorentz: no oscillators");
                   if (p.oscillators.front().resonance != 0.0)
                     fail("drude_lorentz: first oscillator must have zero resonance (Drude term)");
                   for (const auto& o : p.oscillators) {
                     if (!(o.weight >= 0)) fail("drude_lorentz: oscillator weight must be >= 0");
                     if (!(o.damping >= 0)) fail("drude_lorentz: oscillator damping must be >= 0");
                     if (!(o.resonance >= 0)) fail("drude_lorentz: resonance must be >= 0");
                   }
                 },
                 [&](const ModifiedLorentzParams<double>& p) {
                   if (!(p.eps_infinity >= 1)) fail("modified_lorentz: eps_infinity must be >= 1");
                   for (const auto& o : p.oscillators) {
                     if (!(o.damping > 0)) fail("modified_lorentz: damping must be > 0");
                     if (!(o.weight >= 0)) fail("modified_lorentz: weight must be >= 0");
                     if (!(o.resonance > 0)) fail("modified_lorentz: resonance must be > 0");
                     if (!std::isfinite(o.broadening)) fail("modified_lorentz: alpha must be finite");
                   }
                 },
                 [&](const ConstantPermittivity& p) {
                   if (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag()))
                     fail("constant permittivity must be finite");
                 },
                 [](const PerfectConductor&) {},
             },
             model);
}

std::string model_tag(const MaterialModel& model) {
  return std::visit(overloaded{
                        [](const DrudeParams<double>&) { return std::string("drude"); },
                        [](const DrudeLorentzParams<double>&) { return std::string("drude_lorentz"); },
                        [](const ModifiedLorentzParams<double>&) {
                          return std::string("modified_lorentz");
                        },
                        [](const ConstantPermittivity&) { return std::string("constant"); },
                        [](const PerfectConductor&) { return std::string("perfect_conductor"); },
                    },
                    model);
}

}  // namespace dipsurf
