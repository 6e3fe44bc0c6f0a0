#include "iccsim/params.hpp"

#include <cmath>

#include "iccsim/constants.hpp"
#include "iccsim/crystal.hpp"

namespace iccsim {

namespace {
constexpr double kAmu = constants::atomic_mass_unit;
}

void IonSpecies::validate() const {
  if (!(mass_kg > 0.0)) throw ConfigError("species mass must be positive");
  if (!(charge_c > 0.0)) throw ConfigError("species charge must be positive");
  if (!(transition_wavelength_m > 0.0))
    throw ConfigError("species transition wavelength must be positive");
}

IonSpecies species_by_label(const std::string& label) {
  if (label == "Be9+")
    return {9.0121831 * kAmu, constants::elementary_charge, "Be9+", 313.13e-9};
  if (label == "Mg24+")
    return {23.985041697 * kAmu, constants::elementary_charge, "Mg24+", 280.3e-9};
  if (label == "Ca40+")
    return {39.962590863 * kAmu, constants::elementary_charge, "Ca40+", 729.1e-9};
  throw ConfigError("unknown species label: " + label);
}

std::string to_string(DipoleGeometry g) {
  return g == DipoleGeometry::TransverseOnly ? "transverse-only" : "isotropic-planar";
}

DipoleGeometry dipole_geometry_from_string(const std::string& s) {
  if (s == "transverse-only") return DipoleGeometry::TransverseOnly;
  if (s == "isotropic-planar") return DipoleGeometry::IsotropicPlanar;
  throw ConfigError("unknown dipole geometry: " + s);
}

void TrapScenario::validate() const {
  if (n_ions < 3 || n_ions % 2 == 0)
    throw ConfigError("n_ions must be odd and >= 3 (a central ion must exist)");
  if (!(nu_x_hz > 0.0)) throw ConfigError("nu_x must be positive");
  if (!(nu_y_hz > 0.0)) throw ConfigError("nu_y must be positive");
  if (nu_dip_hz < 0.0) throw ConfigError("nu_dip must be >= 0");
  species.validate();
}

UnitSystem UnitSystem::from_scenario(const TrapScenario& s) {
  const double wx = constants::two_pi * s.nu_x_hz;
  const double q2 = s.species.charge_c * s.species.charge_c;
  const double coulomb = q2 / (4.0 * constants::pi * constants::epsilon0);
  UnitSystem u;
  u.length_m = std::cbrt(coulomb / (s.species.mass_kg * wx * wx));
  u.angular_frequency_rad_s = wx;
  u.energy_j = s.species.mass_kg * wx * wx * u.length_m * u.length_m;
  const double quantum_length =
      std::sqrt(constants::hbar / (s.species.mass_kg * wx));
  u.quantum_scale = u.length_m / quantum_length;
  return u;
}

double critical_frequency_hz(const TrapScenario& scenario) {
  if (scenario.n_ions == 3) return std::sqrt(12.0 / 5.0) * scenario.nu_x_hz;
  if (scenario.n_ions < 2)
    throw ConfigError("critical frequency needs at least 2 ions");

  // Bisect the soft-mode Hessian eigenvalue of the linear chain in a^2.
  // The eigenvalue is a^2 - const, so the bracket is easy to establish.
  auto soft = [&](double a) {
    return linear_chain_soft_eigenvalue(scenario.n_ions, a);
  };
  double lo = 1e-6, hi = 2.0;
  while (soft(hi) < 0.0) hi *= 2.0;
  if (soft(lo) > 0.0) throw NumericalError("bracket", "soft mode has no zero crossing");
  while ((hi - lo) > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (soft(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) * scenario.nu_x_hz;
}

DimensionlessQuench to_dimensionless(const TrapScenario& scenario) {
  const double nu_c = critical_frequency_hz(scenario);
  const double nc2 = nu_c * nu_c;
  DimensionlessQuench q;
  q.g = (scenario.nu_y_hz * scenario.nu_y_hz - nc2) / nc2;
  q.delta = scenario.nu_dip_hz * scenario.nu_dip_hz / nc2;
  return q;
}

TrapScenario from_dimensionless(const TrapScenario& base, double g, double delta) {
  if (g <= -1.0) throw ConfigError("g must be > -1");
  if (delta < 0.0) throw ConfigError("delta must be >= 0");
  TrapScenario s = base;
  s.nu_y_hz = 1.0;  // placeholder so critical_frequency sees a valid-ish scenario
  const double nu_c = critical_frequency_hz(s);
  s.nu_y_hz = nu_c * std::sqrt(1.0 + g);
  s.nu_dip_hz = nu_c * std::sqrt(delta);
  return s;
}

}  // namespace iccsim
