#include "iccsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "iccsim/constants.hpp"
#include "iccsim/sha256.hpp"

namespace iccsim {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("invalid number '" + item + "' in list " + key);
    }
  }
  return out;
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + value + "' for key " + key);
  }
}

int parse_int(const std::string& value, const std::string& key) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer '" + value + "' for key " + key);
  }
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + value + "' for key " + key);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig c;
  // Reset defaults that the canonical form always writes explicitly.
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qual = section.empty() ? key : section + "." + key;

    if (qual == "scenario.name") c.name = value;
    else if (qual == "scenario.species") c.species = value;
    else if (qual == "scenario.n_ions") c.n_ions = parse_int(value, qual);
    else if (qual == "scenario.nu_x_hz") c.nu_x_hz = parse_double(value, qual);
    else if (qual == "scenario.nu_y_hz") c.nu_y_hz = parse_double(value, qual);
    else if (qual == "scenario.g") c.g = parse_double(value, qual);
    else if (qual == "scenario.nu_dip_hz") c.nu_dip_hz = parse_double(value, qual);
    else if (qual == "scenario.delta") c.delta = parse_double(value, qual);
    else if (qual == "scenario.dipole_geometry")
      c.dipole_geometry = dipole_geometry_from_string(value);
    else if (qual == "thermal.temperature_uK") c.temperature_uk = parse_double(value, qual);
    else if (qual == "thermal.temperature_list_uK")
      c.temperature_list_uk = parse_list(value, qual);
    else if (qual == "thermal.per_mode_occupations")
      c.per_mode_occupations = parse_list(value, qual);
    else if (qual == "recoil.geometry") c.recoil_geometry = recoil_geometry_from_string(value);
    else if (qual == "recoil.wavelength_nm") c.wavelength_nm = parse_double(value, qual);
    else if (qual == "recoil.pulse_convention") c.pulse_convention = value;
    else if (qual == "recoil.target_ion") c.target_ion = parse_int(value, qual);
    else if (qual == "recoil.k_first") c.k_first = parse_list(value, qual);
    else if (qual == "recoil.k_second") c.k_second = parse_list(value, qual);
    else if (qual == "time.t_max_us") c.t_max_us = parse_double(value, qual);
    else if (qual == "time.n_samples") c.n_samples = parse_int(value, qual);
    else if (qual == "ramsey.phase") c.ramsey_phase = parse_double(value, qual);
    else if (qual == "spectrum.floor") c.spectrum_floor = parse_double(value, qual);
    else if (qual == "spectrum.window_us") c.spectrum_window_us = parse_double(value, qual);
    else if (qual == "spectrum.hann_window") c.hann_window = parse_bool(value, qual);
    else if (qual == "sweep.temperature_uK") c.sweep_temperatures_uk = parse_list(value, qual);
    else if (qual == "sweep.delta") c.sweep_deltas = parse_list(value, qual);
    else if (qual == "sweep.g") c.sweep_gs = parse_list(value, qual);
    else if (qual == "sweep.recoil_geometry") {
      c.sweep_recoil_geometries.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ','))
        c.sweep_recoil_geometries.push_back(recoil_geometry_from_string(trim(item)));
    } else if (qual == "sweep.zigzag_temperature_uK")
      c.sweep_zigzag_temperatures_uk = parse_list(value, qual);
    else if (qual == "output.directory") c.output_dir = value;
    else
      throw ConfigError("unknown configuration key: " + qual);
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void ScenarioConfig::validate() const {
  if (name.empty()) throw ConfigError("scenario name must not be empty");
  if (name.find_first_of("/\\ \t") != std::string::npos)
    throw ConfigError("scenario name must not contain spaces or path separators");
  if (nu_y_hz.has_value() == g.has_value())
    throw ConfigError("exactly one of nu_y_hz and g must be set");
  if (nu_dip_hz.has_value() == delta.has_value())
    throw ConfigError("exactly one of nu_dip_hz and delta must be set");
  int thermal_sources = 0;
  thermal_sources += temperature_uk.has_value();
  thermal_sources += temperature_list_uk.has_value();
  thermal_sources += per_mode_occupations.has_value();
  if (thermal_sources > 1)
    throw ConfigError(
        "at most one of temperature_uK, temperature_list_uK, per_mode_occupations");
  if (recoil_geometry == RecoilGeometry::Explicit) {
    if (!k_first || !k_second || k_first->size() != 2 || k_second->size() != 2)
      throw ConfigError("explicit recoil needs k_first and k_second as kx,ky pairs");
  }
  if (pulse_convention != "equal" && pulse_convention != "explicit")
    throw ConfigError("pulse_convention must be 'equal' or 'explicit'");
  if (!(t_max_us > 0.0)) throw ConfigError("t_max_us must be positive");
  if (n_samples < 0) throw ConfigError("n_samples must be >= 0");
  if (!(spectrum_floor > 0.0)) throw ConfigError("spectrum floor must be positive");
  if (spectrum_window_us && !(*spectrum_window_us > 0.0))
    throw ConfigError("spectrum window must be positive");
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "[scenario]\n";
  o << "name = " << c.name << "\n";
  o << "species = " << c.species << "\n";
  o << "n_ions = " << c.n_ions << "\n";
  o << "nu_x_hz = " << format_double(c.nu_x_hz) << "\n";
  if (c.nu_y_hz) o << "nu_y_hz = " << format_double(*c.nu_y_hz) << "\n";
  if (c.g) o << "g = " << format_double(*c.g) << "\n";
  if (c.nu_dip_hz) o << "nu_dip_hz = " << format_double(*c.nu_dip_hz) << "\n";
  if (c.delta) o << "delta = " << format_double(*c.delta) << "\n";
  o << "dipole_geometry = " << to_string(c.dipole_geometry) << "\n";
  o << "\n[thermal]\n";
  if (c.temperature_uk) o << "temperature_uK = " << format_double(*c.temperature_uk) << "\n";
  if (c.temperature_list_uk)
    o << "temperature_list_uK = " << join(*c.temperature_list_uk) << "\n";
  if (c.per_mode_occupations)
    o << "per_mode_occupations = " << join(*c.per_mode_occupations) << "\n";
  o << "\n[recoil]\n";
  o << "geometry = " << to_string(c.recoil_geometry) << "\n";
  if (c.wavelength_nm) o << "wavelength_nm = " << format_double(*c.wavelength_nm) << "\n";
  o << "pulse_convention = " << c.pulse_convention << "\n";
  if (c.target_ion) o << "target_ion = " << *c.target_ion << "\n";
  if (c.k_first) o << "k_first = " << join(*c.k_first) << "\n";
  if (c.k_second) o << "k_second = " << join(*c.k_second) << "\n";
  o << "\n[time]\n";
  o << "t_max_us = " << format_double(c.t_max_us) << "\n";
  o << "n_samples = " << c.n_samples << "\n";
  o << "\n[ramsey]\n";
  o << "phase = " << format_double(c.ramsey_phase) << "\n";
  o << "\n[spectrum]\n";
  o << "floor = " << format_double(c.spectrum_floor) << "\n";
  if (c.spectrum_window_us)
    o << "window_us = " << format_double(*c.spectrum_window_us) << "\n";
  o << "hann_window = " << (c.hann_window ? "true" : "false") << "\n";
  if (!c.sweep_temperatures_uk.empty() || !c.sweep_deltas.empty() || !c.sweep_gs.empty() ||
      !c.sweep_recoil_geometries.empty() || !c.sweep_zigzag_temperatures_uk.empty()) {
    o << "\n[sweep]\n";
    if (!c.sweep_temperatures_uk.empty())
      o << "temperature_uK = " << join(c.sweep_temperatures_uk) << "\n";
    if (!c.sweep_deltas.empty()) o << "delta = " << join(c.sweep_deltas) << "\n";
    if (!c.sweep_gs.empty()) o << "g = " << join(c.sweep_gs) << "\n";
    if (!c.sweep_recoil_geometries.empty()) {
      o << "recoil_geometry = ";
      for (size_t i = 0; i < c.sweep_recoil_geometries.size(); ++i) {
        if (i) o << ", ";
        o << to_string(c.sweep_recoil_geometries[i]);
      }
      o << "\n";
    }
    if (!c.sweep_zigzag_temperatures_uk.empty())
      o << "zigzag_temperature_uK = " << join(c.sweep_zigzag_temperatures_uk) << "\n";
  }
  o << "\n[output]\n";
  o << "directory = " << c.output_dir << "\n";
  return o.str();
}

std::string config_fingerprint(const ScenarioConfig& c) {
  return Sha256::of(serialize_config(c));
}

TrapScenario make_scenario(const ScenarioConfig& c) {
  TrapScenario s;
  s.n_ions = c.n_ions;
  s.nu_x_hz = c.nu_x_hz;
  s.dipole_geometry = c.dipole_geometry;
  s.species = species_by_label(c.species);
  if (c.wavelength_nm) s.species.transition_wavelength_m = *c.wavelength_nm * 1e-9;

  s.nu_y_hz = c.nu_y_hz.value_or(s.nu_x_hz);  // placeholder if g given
  s.nu_dip_hz = c.nu_dip_hz.value_or(0.0);
  if (c.g || c.delta) {
    const double nu_c = critical_frequency_hz(s);  // depends only on N and nu_x
    if (c.g) {
      if (*c.g <= -1.0) throw ConfigError("g must be > -1");
      s.nu_y_hz = nu_c * std::sqrt(1.0 + *c.g);
    }
    if (c.delta) {
      if (*c.delta < 0.0) throw ConfigError("delta must be >= 0");
      s.nu_dip_hz = nu_c * std::sqrt(*c.delta);
    }
  }
  s.validate();
  return s;
}

ThermalSpec make_thermal(const ScenarioConfig& c, const QuenchPipeline& pipeline,
                         std::optional<double> temperature_uk_override) {
  if (temperature_uk_override)
    return ThermalSpec::global_temperature(pipeline.basis_g, pipeline.units,
                                           *temperature_uk_override * 1e-6);
  if (c.per_mode_occupations) {
    const auto& v = *c.per_mode_occupations;
    if (static_cast<int>(v.size()) != pipeline.basis_g.n_modes())
      throw ConfigError("per_mode_occupations must list " +
                        std::to_string(pipeline.basis_g.n_modes()) + " values");
    Eigen::VectorXd occ(v.size());
    for (size_t i = 0; i < v.size(); ++i) occ[i] = v[i];
    return ThermalSpec::per_mode(occ);
  }
  const double t_uk = c.temperature_uk.value_or(0.0);
  return ThermalSpec::global_temperature(pipeline.basis_g, pipeline.units, t_uk * 1e-6);
}

RecoilSpec make_recoil(const ScenarioConfig& c, const TrapScenario& scenario) {
  RecoilSpec r;
  r.geometry = c.recoil_geometry;
  r.target_ion = c.target_ion.value_or(-1);
  if (c.recoil_geometry == RecoilGeometry::Explicit) {
    r.k_first = {(*c.k_first)[0], (*c.k_first)[1]};
    r.k_second = {(*c.k_second)[0], (*c.k_second)[1]};
  }
  if (r.target_ion >= scenario.n_ions)
    throw ConfigError("recoil target ion out of range");
  return r;
}

Eigen::VectorXd make_time_grid(const ScenarioConfig& c, double max_omega_dimensionless,
                               double angular_frequency_rad_s) {
  const double t_max_s = c.t_max_us * 1e-6;
  int n = c.n_samples;
  if (n == 0) {
    const double tau_max = t_max_s * angular_frequency_rad_s;
    n = static_cast<int>(std::ceil(tau_max * max_omega_dimensionless / 0.05)) + 1;
    n = std::max(n, 16);
  }
  if (n < 2) throw ConfigError("n_samples must be at least 2");
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) t[i] = t_max_s * double(i) / double(n - 1);
  return t;
}

}  // namespace iccsim
