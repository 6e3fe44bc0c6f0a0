#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iccsim/visibility.hpp"

namespace iccsim {

// Line-oriented `key = value` configuration with one level of [sections].
// The serializer emits a canonical form (fixed order and number format);
// parse(serialize(c)) == c and serializing again is byte-identical.
struct ScenarioConfig {
  // [scenario]
  std::string name = "scenario";
  std::string species = "Be9+";
  int n_ions = 3;
  double nu_x_hz = 1.0e6;
  std::optional<double> nu_y_hz;  // exactly one of nu_y_hz / g
  std::optional<double> g;
  std::optional<double> nu_dip_hz;  // exactly one of nu_dip_hz / delta
  std::optional<double> delta;
  DipoleGeometry dipole_geometry = DipoleGeometry::TransverseOnly;

  // [thermal] — at most one of the three.
  std::optional<double> temperature_uk;
  std::optional<std::vector<double>> temperature_list_uk;
  std::optional<std::vector<double>> per_mode_occupations;

  // [recoil]
  RecoilGeometry recoil_geometry = RecoilGeometry::None;
  std::optional<double> wavelength_nm;  // overrides the species transition
  std::string pulse_convention = "equal";  // k' = k; "explicit" uses vectors
  std::optional<int> target_ion;
  std::optional<std::vector<double>> k_first;   // kx, ky in 1/m
  std::optional<std::vector<double>> k_second;

  // [time]
  double t_max_us = 60.0;
  int n_samples = 0;  // 0: chosen from the grid-density rule

  // [ramsey]
  double ramsey_phase = 0.0;

  // [spectrum]
  double spectrum_floor = 1e-12;
  std::optional<double> spectrum_window_us;  // default: t_max
  bool hann_window = false;

  // [sweep] — cartesian product over the non-empty lists.
  std::vector<double> sweep_temperatures_uk;
  std::vector<double> sweep_deltas;
  std::vector<double> sweep_gs;
  std::vector<RecoilGeometry> sweep_recoil_geometries;
  std::vector<double> sweep_zigzag_temperatures_uk;  // mode-selective cooling

  // [output]
  std::string output_dir = "out";

  void validate() const;
};

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& c);
std::string config_fingerprint(const ScenarioConfig& c);

// Resolve the scenario (g -> nu_y, delta -> nu_dip, species lookup).
TrapScenario make_scenario(const ScenarioConfig& c);

// Thermal spec for one resolved temperature (or the per-mode override).
ThermalSpec make_thermal(const ScenarioConfig& c, const QuenchPipeline& pipeline,
                         std::optional<double> temperature_uk_override = {});

RecoilSpec make_recoil(const ScenarioConfig& c, const TrapScenario& scenario);

// Uniform time grid in seconds; n_samples==0 applies the density rule
// dt * max_omega <= 0.05 given the pipeline's largest mode frequency.
Eigen::VectorXd make_time_grid(const ScenarioConfig& c, double max_omega_dimensionless,
                               double angular_frequency_rad_s);

}  // namespace iccsim
