#include "iccsim/run_record.hpp"

#include <fstream>

namespace iccsim {

using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

json structure_json(const CrystalStructure& s, const UnitSystem& units) {
  json j;
  j["internal_state"] = to_string(s.internal_state);
  j["label"] = to_string(s.structure_label);
  j["classical_energy"] = s.classical_energy;
  j["positions_dimensionless"] = vector_json(s.positions);
  j["positions_m"] = vector_json(s.positions * units.length_m);
  return j;
}

json basis_json(const ModeBasis& b) {
  json j;
  j["internal_state"] = to_string(b.internal_state);
  j["frequencies_dimensionless"] = vector_json(b.frequencies);
  j["soft_mode_index"] = b.soft_mode_index;
  j["soft_mode_confident"] = b.soft_mode_confident;
  return j;
}

json map_json(const BogoliubovMap& m) {
  json j;
  j["Z"] = m.Z;
  j["u_condition"] = m.u_condition;
  j["a_asymmetry"] = m.a_asymmetry;
  j["beta_g"] = vector_json(m.beta_g);
  j["beta_e"] = vector_json(m.beta_e);
  j["A"] = matrix_json(m.A);
  Eigen::VectorXd v_row_norms(m.v.rows());
  for (int i = 0; i < m.v.rows(); ++i) v_row_norms[i] = m.v.row(i).norm();
  j["v_row_norms"] = vector_json(v_row_norms);
  return j;
}

json pipeline_json(const QuenchPipeline& p) {
  json j;
  j["n_ions"] = p.scenario.n_ions;
  j["nu_x_hz"] = p.scenario.nu_x_hz;
  j["nu_y_hz"] = p.scenario.nu_y_hz;
  j["nu_dip_hz"] = p.scenario.nu_dip_hz;
  j["nu_c_hz"] = p.nu_c_hz;
  j["g"] = p.quench.g;
  j["delta"] = p.quench.delta;
  j["dipole_geometry"] = to_string(p.scenario.dipole_geometry);
  j["species"] = p.scenario.species.label;
  j["length_scale_m"] = p.units.length_m;
  j["angular_frequency_rad_s"] = p.units.angular_frequency_rad_s;
  j["structure_g"] = structure_json(p.struct_g, p.units);
  j["structure_e"] = structure_json(p.struct_e, p.units);
  j["basis_g"] = basis_json(p.basis_g);
  j["basis_e"] = basis_json(p.basis_e);
  j["map"] = map_json(p.map);
  return j;
}

json diagnostics_json(const TraceDiagnostics& d) {
  json j;
  j["max_branch_step_omega"] = d.max_branch_step_omega;
  j["max_branch_step_x"] = d.max_branch_step_x;
  j["max_cond_x"] = d.max_cond_x;
  j["grid_density_ok"] = d.grid_density_ok;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read file: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace iccsim
