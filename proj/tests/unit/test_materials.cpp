#include <cmath>
#include <fstream>
#include <random>

#include <doctest.h>

#include "dipsurf/material_db.hpp"
#include "dipsurf/materials.hpp"

using namespace dipsurf;
using cplx = std::complex<double>;

TEST_CASE("drude: lossless zero crossing and high-frequency limit") {
  const DrudeParams<double> lossless{9.01, 0.0};
  CHECK(std::abs(eval_drude(lossless, 9.01)) < 1e-15);
  const DrudeParams<double> p{9.01, 0.1};
  CHECK(std::abs(eval_drude(p, 1e6) - 1.0) < 1e-9);
}

TEST_CASE("drude: frozen value at 1 eV") {
  const cplx eps = eval_drude(DrudeParams<double>{9.01, 0.1}, 1.0);
  CHECK(eps.real() == doctest::Approx(-79.376336633663366).epsilon(1e-14));
  CHECK(eps.imag() == doctest::Approx(8.0376336633663366).epsilon(1e-14));
}

TEST_CASE("drude: non-positive frequency rejected") {
  CHECK_THROWS_AS(eval_drude(DrudeParams<double>{9.01, 0.1}, 0.0), std::domain_error);
  CHECK_THROWS_AS(eval_drude(DrudeParams<double>{9.01, 0.1}, -1.0), std::domain_error);
  CHECK_THROWS_AS(eval_drude_lorentz(DrudeLorentzParams<double>{1.0, {}}, 0.0), std::domain_error);
  CHECK_THROWS_AS(eval_modified_lorentz(ModifiedLorentzParams<double>{1.0, {}}, 0.0), std::domain_error);
}

TEST_CASE("drude-lorentz: free-electron term alone equals drude on a log grid") {
  const DrudeParams<double> d{9.01, 0.048};
  const DrudeLorentzParams<double> dl{9.01, {{1.0, 0.0, 0.048}}};
  for (int i = 0; i <= 200; ++i) {
    const double w = 0.01 * std::pow(1e4, i / 200.0);
    const cplx a = eval_drude(d, w), b = eval_drude_lorentz(dl, w);
    CHECK(std::abs(a - b) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(a));
  }
}

TEST_CASE("drude-lorentz: single bound oscillator") {
  const DrudeLorentzParams<double> p{1.0, {{1.0, 2.0, 0.0}}};
  const cplx eps = eval_drude_lorentz(p, 1.0);
  CHECK(eps.real() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(eps.imag() == 0.0);
  CHECK(std::abs(eval_drude_lorentz(p, 1e5) - 1.0) < 1e-9);
}

TEST_CASE("modified lorentz: broadening, constant background, frozen value") {
  const BroadenedOscillator<double> o{1.0, 2.0, 0.5, 1.0};
  CHECK(broadened_damping(o, 2.0) == 0.5);
  CHECK(broadened_damping(o, 1.0) == doctest::Approx(0.5 * std::exp(-4.0)).epsilon(1e-15));

  const ModifiedLorentzParams<double> bare{2.0, {}};
  CHECK(eval_modified_lorentz(bare, 3.7) == cplx(2.0, 0.0));

  const ModifiedLorentzParams<double> p{1.0, {o}};
  const cplx eps = eval_modified_lorentz(p, 1.0);
  CHECK(eps.real() == doctest::Approx(-0.33332090890733502).epsilon(1e-12));
  CHECK(eps.imag() == doctest::Approx(0.0040701040483909315).epsilon(1e-12));
  CHECK(broadened_damping(o, 1.0) == doctest::Approx(0.0091578194443670901).epsilon(1e-14));
}

TEST_CASE("bundled database: silver, lookups, passivity, limits") {
  const MaterialDb& db = MaterialDb::bundled();
  const auto& ag = db.at("Ag");
  const auto* dl = std::get_if<DrudeLorentzParams<double>>(&ag.model);
  REQUIRE(dl != nullptr);
  CHECK(dl->plasma_energy == 9.01);
  CHECK(dl->oscillators.front().resonance == 0.0);

  for (const char* name : {"Ag", "Au", "Ti", "SiO2", "GaAs", "vacuum", "perfect_conductor"}) CHECK(db.contains(name));

  try {
    db.at("Unobtainium");
    FAIL("expected an exception");
  } catch (const MaterialDbError& e) {
    CHECK(e.kind() == MaterialDbError::Kind::NotFound);
    CHECK(std::string(e.what()).find("material not found") != std::string::npos);
  }

  for (const auto& name : db.names()) {
    const auto& m = db.at(name).model;
    if (is_perfect_conductor(m)) continue;
    CAPTURE(name);
    for (int i = 0; i <= 300; ++i) {
      const double w = 0.005 * std::pow(4e3, i / 300.0);
      CHECK(permittivity(m, w).imag() >= 0.0);
    }
    const cplx high = permittivity(m, 1e4);
    double limit = 1.0;
    if (const auto* ml = std::get_if<ModifiedLorentzParams<double>>(&m)) limit = ml->eps_infinity;
    if (const auto* c = std::get_if<ConstantPermittivity>(&m)) limit = c->value.real();
    CHECK(std::abs(high - limit) < 1e-4);
  }
}

TEST_CASE("bundled silver: real part changes sign near 0.4 and 0.6 of the plasma energy") {
  const auto& m = MaterialDb::bundled().at("Ag").model;
  std::vector<double> crossings;
  double prev = permittivity(m, 0.3 * 9.01).real();
  for (int i = 1; i <= 400; ++i) {
    const double x = 0.3 + 0.4 * i / 400.0;
    const double re = permittivity(m, x * 9.01).real();
    if ((re > 0) != (prev > 0)) crossings.push_back(x);
    prev = re;
  }
  REQUIRE(crossings.size() >= 2);
  CHECK(crossings.front() == doctest::Approx(0.4).epsilon(0.1));
  CHECK(crossings.back() == doctest::Approx(0.6).epsilon(0.1));
}

TEST_CASE("perfect conductor and vacuum built-ins") {
  const MaterialDb& db = MaterialDb::bundled();
  CHECK(is_perfect_conductor(db.at("perfect_conductor").model));
  CHECK(std::isinf(permittivity(db.at("perfect_conductor").model, 1.0).real()));
  CHECK(is_vacuum(db.at("vacuum").model));
  CHECK(permittivity(db.at("vacuum").model, 2.0) == cplx(1.0, 0.0));
}

namespace {
MaterialDbError::Kind parse_kind(const std::string& text) {
  try {
    MaterialDb::parse(text);
  } catch (const MaterialDbError& e) {
    return e.kind();
  }
  FAIL("parse accepted invalid input");
  return MaterialDbError::Kind::NotFound;
}
}  // namespace

TEST_CASE("database parser: distinct diagnostics") {
  CHECK_THROWS_AS(MaterialDb::load("/nonexistent/materials.yaml"), MaterialDbError);
  try {
    MaterialDb::load("/nonexistent/materials.yaml");
  } catch (const MaterialDbError& e) {
    CHECK(e.kind() == MaterialDbError::Kind::MissingFile);
  }
  CHECK(parse_kind("name: X\nmodel: plasma\nsource: test\n") == MaterialDbError::Kind::UnknownModel);
  CHECK(parse_kind("name: X\nmodel: drude\nsource: t\nplasma_energy_eV: 9\ndamping_eV: 0.1\ncolour: red\n") ==
        MaterialDbError::Kind::MalformedEntry);
  CHECK(parse_kind("name: X\nmodel: drude\nsource: t\nplasma_energy_eV: -9\ndamping_eV: 0.1\n") ==
        MaterialDbError::Kind::MalformedEntry);
  CHECK(parse_kind("name: X\nmodel: drude\nplasma_energy_eV: [1, 2\n") == MaterialDbError::Kind::MalformedEntry);
}
