#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sagin/geometry.hpp"
#include "sagin/types.hpp"

namespace sagin {

struct ArrayGeometry {
  int nx = 8;
  int ny = 8;
  double spacing = 0.0;  // meters

  int size() const { return nx * ny; }
};

/// Axis-aligned region for a RIS-UAV position.
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
};

struct Scenario {
  double wavelength = 0.0;
  int num_cells = 0;
  int num_ues_per_cell = 0;

  Frame sat_frame;  // translation is the satellite position
  ArrayGeometry sat_array;
  ArrayGeometry bs_array;
  ArrayGeometry ris_array;

  std::vector<Frame> bs_frames;
  std::vector<Vec3> es_positions;
  std::vector<std::vector<Vec3>> ue_positions;  // global coordinates, [k][l]

  double es_dish_diameter = 0.5;
  double es_dish_efficiency = 0.6;
  /// Unit dish-axis directions; the dish boresight is -p_k so [p_k]_3 < 0.
  std::vector<Vec3> es_axis_dirs;

  double rain_mu = -3.125;
  double rain_sigma = 1.591;

  std::vector<double> noise_es;
  std::vector<std::vector<double>> noise_ue;
  double p_sat_max = 5.0;
  double p_bs_max = 1.0;

  /// K x (L+1); column 0 is the ES, column l the l-th UE.
  RMat weights;
  double rmin_es = 0.1;
  double rmin_ue = 0.1;

  double h_min = 50.0;
  double h_max = 200.0;
  std::vector<Box> uav_regions;

  const Vec3& sat_position() const { return sat_frame.translation; }
  int K() const { return num_cells; }
  int L() const { return num_ues_per_cell; }
};

struct RatePlan {
  RVec es;  // K
  RMat ue;  // K x L

  static RatePlan zeros(int K, int L) { return {RVec::Zero(K), RMat::Zero(K, L)}; }
};

struct DesignVariables {
  CVec w_sat_common;
  std::vector<CVec> w_sat;        // K
  std::vector<CVec> w_bs_common;  // K
  CellVectors w_bs;               // K x L
  std::vector<RVec> phases;       // K, radians in [0, 2pi)
  std::vector<Frame> ris_frames;  // K
  RatePlan rates;
};

/// Every violated invariant, one human-readable line each.
std::vector<std::string> validate(const Scenario& scenario);

/// Parameters of the synthetic layout generator. Units are in the key names.
struct ScenarioParams {
  double frequency_hz = 28e9;
  int num_cells = 3;
  int num_ues_per_cell = 2;
  int sat_nx = 8, sat_ny = 8;
  int bs_nx = 8, bs_ny = 8;
  int ris_nx = 8, ris_ny = 8;
  double spacing_wavelengths = 0.5;

  double sat_altitude_m = 600e3;
  double sat_zenith_deg = 20.0;
  double sat_azimuth_deg = 0.0;
  double sat_power_w = 5.0;

  double bs_power_dbm = 30.0;
  double bs_height_m = 25.0;
  double bs_offset_m = 150.0;

  double es_spacing_m = 500.0;
  double es_dish_diameter_m = 0.5;
  double es_dish_efficiency = 0.6;
  double es_pointing_offset_deg = 0.5;

  double ue_disc_radius_m = 100.0;
  double ue_height_m = 0.0;

  double noise_es_dbm = -80.0;
  double noise_ue_dbm = -80.0;
  double rain_mu = -3.125;
  double rain_sigma = 1.591;

  double qos_es_min = 0.1;
  double qos_ue_min = 0.1;

  double uav_h_min_m = 50.0;
  double uav_h_max_m = 200.0;
  double uav_half_width_m = 100.0;

  /// Empty means uniform 1 / (K (L+1)); otherwise K(L+1) values, row-major [k][j].
  std::vector<double> weights;
};

/// Flat `key = value` configuration, `#` starts a comment. Keys keep file order.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  /// Keys that were never read through one of the getters.
  std::vector<std::string> unused_keys() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string serialize() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
  mutable std::map<std::string, bool> used_;
};

/// Reads every `scenario`-namespace key present in `config` over the defaults.
ScenarioParams params_from_config(const KeyValueConfig& config);
void params_to_config(const ScenarioParams& params, KeyValueConfig& config);

/// Deterministic layout: placement randomness is drawn from `seed`.
Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed);

/// Initial RIS poses: middle of the axis range, panel normal bisecting the
/// directions toward the satellite and the ES.
std::vector<Frame> initial_ris_frames(const Scenario& scenario);

/// Axis range of b for cell k; t = Q_E - b p_k.
std::pair<double, double> axis_range(const Scenario& scenario, int cell);
Vec3 axis_point(const Scenario& scenario, int cell, double b);

void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);
std::string scenario_to_text(const Scenario& scenario);
Scenario scenario_from_text(const std::string& text);

}  // namespace sagin
