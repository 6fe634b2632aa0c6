#include <cmath>
#include <random>

#include <doctest.h>
#include <Eigen/Eigenvalues>

#include "dipsurf/couplings.hpp"
#include "dipsurf/material_db.hpp"

using namespace dipsurf;

namespace {

const MaterialModel& material(const char* name) { return MaterialDb::bundled().at(name).model; }

double min_eig_ratio(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(g);
  return s.eigenvalues().minCoeff() / s.eigenvalues().maxCoeff();
}

AtomArray random_array(std::mt19937& rng, std::size_t n, double lambda_nm) {
  std::uniform_real_distribution<double> pos(-300, 300), height(5, 300);
  std::normal_distribution<double> gauss;
  AtomArray atoms;
  atoms.transition_energy = energy_from_wavelength(lambda_nm);
  atoms.dipole = Vec3(gauss(rng), gauss(rng), gauss(rng)).normalized();
  for (std::size_t i = 0; i < n; ++i) atoms.positions.emplace_back(pos(rng), pos(rng), height(rng));
  return atoms;
}

}  // namespace

TEST_CASE("vacuum: unit diagonal and closed-form off-diagonals") {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto atoms = random_array(rng, 6, 400.0 + 100.0 * trial);
    const auto set = coupling_matrices(atoms, LayerStack::vacuum());
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      CHECK(set.dissipative(a, a) == 1.0);
      CHECK(set.coherent(a, a) == 0.0);
      for (std::size_t b = a + 1; b < atoms.size(); ++b) {
        const auto c = vacuum_coupling<double>(atoms.positions[a] - atoms.positions[b], atoms.dipole,
                                               atoms.wavelength());
        CHECK(std::abs(set.coherent(a, b) - c.coherent) < 1e-9);
        CHECK(std::abs(set.dissipative(a, b) - c.dissipative) < 1e-9);
      }
    }
  }
}

TEST_CASE("vacuum: translation invariance and far-field falloff") {
  const double omega = energy_from_wavelength(600.0);
  auto atoms = AtomArray::chain(4, 170.0, 10.0, Vec3::UnitY(), omega);
  const auto ref = coupling_matrices(atoms, LayerStack::vacuum());
  for (auto& p : atoms.positions) p += Vec3(13.0, -250.0, 400.0);
  const auto moved = coupling_matrices(atoms, LayerStack::vacuum());
  CHECK((ref.coherent - moved.coherent).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ref.dissipative - moved.dissipative).cwiseAbs().maxCoeff() < 1e-12);

  const auto far = coupling_matrices(AtomArray::chain(2, 50 * 600.0, 0, Vec3::UnitY(), omega), LayerStack::vacuum());
  CHECK(std::abs(far.dissipative(0, 1)) < 0.005);
}

TEST_CASE("surface: symmetry, positive semidefinite dissipator, in-plane translation invariance") {
  std::mt19937 rng(2);
  const std::vector<LayerStack> stacks = {LayerStack::one_surface(material("Ag")),
                                          LayerStack::one_surface(material("SiO2")),
                                          LayerStack::two_surfaces(material("Au"), material("Au"), 320.0)};
  for (const auto& stack : stacks) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto atoms = random_array(rng, 5, 300.0 + 400.0 * trial);
      const auto set = coupling_matrices(atoms, stack);
      CHECK((set.coherent - set.coherent.transpose()).cwiseAbs().maxCoeff() <=
            1e-9 * set.coherent.cwiseAbs().maxCoeff());
      CHECK((set.dissipative - set.dissipative.transpose()).cwiseAbs().maxCoeff() <=
            1e-9 * set.dissipative.cwiseAbs().maxCoeff());
      CHECK(min_eig_ratio(set.dissipative) >= -1e-8);
      CHECK(set.modes.rates.sum() == doctest::Approx(set.dissipative.trace()).epsilon(1e-12));

      auto shifted = atoms;
      for (auto& p : shifted.positions) p += Vec3(77.0, -31.0, 0.0);
      const auto set2 = coupling_matrices(shifted, stack);
      CHECK((set.dissipative - set2.dissipative).cwiseAbs().maxCoeff() < 1e-7);
      CHECK((set.coherent - set2.coherent).cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("threaded assembly is identical to serial assembly") {
  const auto atoms = AtomArray::chain(8, 150.0, 40.0, Vec3::UnitX(), 2.5);
  const auto stack = LayerStack::one_surface(material("Ag"));
  CouplingOptions serial, threaded;
  threaded.threads = 4;
  const auto a = coupling_matrices(atoms, stack, serial);
  const auto b = coupling_matrices(atoms, stack, threaded);
  CHECK(a.coherent == b.coherent);
  CHECK(a.dissipative == b.dissipative);
}

TEST_CASE("collective modes: small systems") {
  Eigen::MatrixXd one(1, 1);
  one << 0.7;
  CHECK(collective_modes(one).rates(0) == 0.7);

  Eigen::MatrixXd two(2, 2);
  two << 1.0, 0.3, 0.3, 1.0;
  const auto m = collective_modes(two);
  CHECK(m.rates(0) == doctest::Approx(1.3));
  CHECK(m.rates(1) == doctest::Approx(0.7));
  const double s = 1 / std::sqrt(2.0);
  CHECK(m.vectors(0, 0) == doctest::Approx(s));
  CHECK(m.vectors(1, 0) == doctest::Approx(s));
  CHECK(m.vectors(0, 1) == doctest::Approx(s));
  CHECK(m.vectors(1, 1) == doctest::Approx(-s));
}

TEST_CASE("collective modes: reconstruction, ordering, sign convention") {
  std::mt19937 rng(4);
  const auto atoms = random_array(rng, 9, 500.0);
  const auto set = coupling_matrices(atoms, LayerStack::one_surface(material("Ag")));
  const auto& m = set.modes;
  const Eigen::MatrixXd rebuilt = m.vectors * m.rates.asDiagonal() * m.vectors.transpose();
  CHECK((rebuilt - set.dissipative).cwiseAbs().maxCoeff() < 1e-12 * set.dissipative.cwiseAbs().maxCoeff());
  CHECK((m.vectors.transpose() * m.vectors - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index i = 1; i < m.rates.size(); ++i) CHECK(m.rates(i - 1) >= m.rates(i));
  for (Eigen::Index c = 0; c < m.vectors.cols(); ++c) {
    const double scale = m.vectors.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < m.vectors.rows(); ++r)
      if (std::abs(m.vectors(r, c)) > 1e-10 * scale) {
        CHECK(m.vectors(r, c) > 0);
        break;
      }
  }
}

TEST_CASE("twenty-atom vacuum chain has strongly subradiant modes") {
  for (Vec3 d : {Vec3::UnitX(), Vec3::UnitY()}) {
    const auto atoms = AtomArray::chain(20, 206.4, 0.0, d, energy_from_wavelength(2600.0));
    const auto set = coupling_matrices(atoms, LayerStack::vacuum());
    CHECK(set.modes.rates.minCoeff() < 0.1);
    CHECK(set.modes.rates.minCoeff() >= -1e-8 * set.modes.rates.maxCoeff());
  }
}

TEST_CASE("silver: in-plane dipole rate drops below free space at low frequency") {
  const auto ag = LayerStack::one_surface(material("Ag"));
  // far enough from the surface that ohmic losses do not dominate
  const double rate = single_atom_rate(ag, Vec3(0, 0, 100), Vec3::UnitX(), 0.05 * 9.01);
  CHECK(rate < 0.2);
  CHECK(rate > 0.0);
  const double perp = single_atom_rate(ag, Vec3(0, 0, 100), Vec3::UnitZ(), 0.05 * 9.01);
  CHECK(perp > 1.0);
}

TEST_CASE("quadrature failures name the atom pair and the frequency") {
  const auto atoms = AtomArray::chain(3, 100.0, 20.0, Vec3::UnitZ(), 3.0);
  CouplingOptions opt;
  opt.path.max_evaluations = 250;
  try {
    coupling_matrices(atoms, LayerStack::one_surface(material("Ag")), opt);
    FAIL("expected CouplingConvergenceError");
  } catch (const CouplingConvergenceError& e) {
    CHECK(e.omega() == 3.0);
    CHECK(e.alpha() <= e.beta());
    CHECK(std::string(e.what()).find("atoms") != std::string::npos);
  }
}

TEST_CASE("atom arrays are validated") {
  auto atoms = AtomArray::chain(3, 100.0, 20.0, Vec3::UnitZ(), 3.0);
  const auto ag = LayerStack::one_surface(material("Ag"));
  atoms.dipole = Vec3(1, 1, 0);
  CHECK_THROWS_AS(coupling_matrices(atoms, ag), std::invalid_argument);
  atoms.dipole = Vec3::UnitZ();
  atoms.positions[2] = atoms.positions[1];
  CHECK_THROWS_AS(coupling_matrices(atoms, ag), std::invalid_argument);
  atoms = AtomArray::chain(3, 100.0, -5.0, Vec3::UnitZ(), 3.0);
  CHECK_THROWS_AS(coupling_matrices(atoms, ag), std::domain_error);
}

TEST_CASE("surface shift: vacuum, smallness, distance dependence, self-consistency") {
  const double omega = 0.5, gamma_eV = 1.9e-10;
  const auto vac = surface_shift(LayerStack::vacuum(), Vec3(0, 0, 10), Vec3::UnitZ(), omega, gamma_eV);
  CHECK(vac.shift == 0.0);
  CHECK(vac.iterations == 1);
  CHECK(vac.converged);

  for (const char* name : {"Ag", "GaAs", "SiO2"}) {
    const auto stack = LayerStack::one_surface(material(name));
    for (Vec3 d : {Vec3::UnitX(), Vec3::UnitZ()}) {
      const auto near = surface_shift(stack, Vec3(0, 0, 10), d, omega, gamma_eV);
      const auto far = surface_shift(stack, Vec3(0, 0, 100), d, omega, gamma_eV);
      CAPTURE(name);
      CHECK(near.converged);
      CHECK(std::abs(near.shift) / omega < 1e-3);
      CHECK(std::abs(far.shift) < std::abs(near.shift));
      CHECK(std::abs(near.shifted - (omega - near.shift)) < 1e-12 * omega);
    }
  }
  // a large rate makes the fixed point visibly self-consistent
  const auto stack = LayerStack::one_surface(material("Ag"));
  const auto s = surface_shift(stack, Vec3(0, 0, 10), Vec3::UnitZ(), omega, 1e-5);
  REQUIRE(s.converged);
  const auto g = scattering_green(stack, Vec3(0, 0, 10), Vec3(0, 0, 10), s.shifted).value;
  const double delta = 1e-5 * 1.5 * wavelength(omega) * std::pow(s.shifted / omega, 2) * g(2, 2).real();
  CHECK(s.shift == doctest::Approx(delta).epsilon(1e-9));
}
