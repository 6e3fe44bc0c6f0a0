#pragma once

#include <string>

#include "iccsim/errors.hpp"

namespace iccsim {

struct IonSpecies {
  double mass_kg = 0.0;
  double charge_c = 0.0;
  std::string label;
  double transition_wavelength_m = 0.0;

  void validate() const;
};

// Known species by label ("Be9+", "Mg24+", "Ca40+").  Throws ConfigError on
// unknown labels.
IonSpecies species_by_label(const std::string& label);

enum class DipoleGeometry { TransverseOnly, IsotropicPlanar };

std::string to_string(DipoleGeometry g);
DipoleGeometry dipole_geometry_from_string(const std::string& s);

// Trap and quench parameters.  Frequencies are stored as nu = omega/2pi in Hz.
struct TrapScenario {
  int n_ions = 3;
  double nu_x_hz = 0.0;    // axial
  double nu_y_hz = 0.0;    // transverse
  double nu_dip_hz = 0.0;  // extra confinement on the central ion in |e>
  DipoleGeometry dipole_geometry = DipoleGeometry::TransverseOnly;
  IonSpecies species;

  // Frequency ratios used by the dimensionless core.
  double a_ratio() const { return nu_y_hz / nu_x_hz; }
  double b_ratio() const { return nu_dip_hz / nu_x_hz; }

  int central_ion() const { return (n_ions - 1) / 2; }  // 0-based

  // Full validation used by config loading and the pipeline entry points:
  // odd n_ions >= 3, positive frequencies, valid species.
  void validate() const;
};

// Nondimensionalization.  Internally hbar = m = 1, lengths are measured in
// the Coulomb length l = (q^2 / (4 pi eps0 m wx^2))^(1/3) and angular
// frequencies in units of wx = 2 pi nu_x.
struct UnitSystem {
  double length_m = 0.0;
  double angular_frequency_rad_s = 0.0;
  double energy_j = 0.0;
  // Coulomb length over the quantum oscillator length sqrt(hbar/(m wx)):
  // converts structural displacements to ladder-operator units.
  double quantum_scale = 1.0;

  static UnitSystem from_scenario(const TrapScenario& s);

  double time_s(double t_dimensionless) const {
    return t_dimensionless / angular_frequency_rad_s;
  }
  double dimensionless_time(double t_seconds) const {
    return t_seconds * angular_frequency_rad_s;
  }
};

// Critical transverse frequency nu_c of the linear-zigzag instability for a
// chain of scenario.n_ions ions.  N = 3 uses the analytic sqrt(12/5) nu_x
// result; other N locate the soft-mode zero crossing by bisection
// (relative tolerance 1e-10).
double critical_frequency_hz(const TrapScenario& scenario);

struct DimensionlessQuench {
  double g = 0.0;      // (nu_y^2 - nu_c^2) / nu_c^2
  double delta = 0.0;  // nu_dip^2 / nu_c^2
};

DimensionlessQuench to_dimensionless(const TrapScenario& scenario);

// Inverse map: fills nu_y_hz and nu_dip_hz of `base` from (g, delta).
TrapScenario from_dimensionless(const TrapScenario& base, double g, double delta);

}  // namespace iccsim
