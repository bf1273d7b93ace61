#include "sagin/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "sagin/rng.hpp"

namespace sagin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += fmt(xs[i]);
  }
  return out;
}

std::string vec_text(const Vec3& v) { return join({v.x(), v.y(), v.z()}); }

std::string mat_text(const Mat3& m) {
  std::vector<double> xs;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) xs.push_back(m(r, c));
  return join(xs);
}

}  // namespace

// ---------------------------------------------------------------------------
// KeyValueConfig

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (cfg.has(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
    cfg.set(key, value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool KeyValueConfig::has(const std::string& key) const { return index_.count(key) > 0; }

std::string KeyValueConfig::get(const std::string& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) throw ConfigError("missing key " + key);
  used_[key] = true;
  return entries_[it->second].second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("key " + key + ": expected a finite number, got '" + v + "'");
}

long long KeyValueConfig::get_int(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("key " + key + ": expected an integer, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  const std::string v = get(key);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      const double x = std::stod(item, &pos);
      if (!trim(item.substr(pos)).empty() || !std::isfinite(x)) throw ConfigError("");
      out.push_back(x);
    } catch (const std::exception&) {
      throw ConfigError("key " + key + ": bad list element '" + item + "'");
    }
  }
  return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  const auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = value;
    return;
  }
  index_[key] = entries_.size();
  entries_.emplace_back(key, value);
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

std::string KeyValueConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Generator parameters

namespace {

struct DoubleKey {
  const char* key;
  double ScenarioParams::*member;
};
struct IntKey {
  const char* key;
  int ScenarioParams::*member;
};

const DoubleKey kDoubleKeys[] = {
    {"carrier.frequency_hz", &ScenarioParams::frequency_hz},
    {"array.spacing_wavelengths", &ScenarioParams::spacing_wavelengths},
    {"sat.altitude_m", &ScenarioParams::sat_altitude_m},
    {"sat.zenith_deg", &ScenarioParams::sat_zenith_deg},
    {"sat.azimuth_deg", &ScenarioParams::sat_azimuth_deg},
    {"sat.power_w", &ScenarioParams::sat_power_w},
    {"bs.power_dbm", &ScenarioParams::bs_power_dbm},
    {"bs.height_m", &ScenarioParams::bs_height_m},
    {"bs.offset_m", &ScenarioParams::bs_offset_m},
    {"es.spacing_m", &ScenarioParams::es_spacing_m},
    {"es.dish_diameter_m", &ScenarioParams::es_dish_diameter_m},
    {"es.dish_efficiency", &ScenarioParams::es_dish_efficiency},
    {"es.pointing_offset_deg", &ScenarioParams::es_pointing_offset_deg},
    {"ue.disc_radius_m", &ScenarioParams::ue_disc_radius_m},
    {"ue.height_m", &ScenarioParams::ue_height_m},
    {"noise.es_dbm", &ScenarioParams::noise_es_dbm},
    {"noise.ue_dbm", &ScenarioParams::noise_ue_dbm},
    {"rain.mu", &ScenarioParams::rain_mu},
    {"rain.sigma", &ScenarioParams::rain_sigma},
    {"qos.es_min", &ScenarioParams::qos_es_min},
    {"qos.ue_min", &ScenarioParams::qos_ue_min},
    {"uav.h_min_m", &ScenarioParams::uav_h_min_m},
    {"uav.h_max_m", &ScenarioParams::uav_h_max_m},
    {"uav.half_width_m", &ScenarioParams::uav_half_width_m},
};

const IntKey kIntKeys[] = {
    {"cells.count", &ScenarioParams::num_cells},
    {"cells.ues_per_cell", &ScenarioParams::num_ues_per_cell},
    {"array.sat.nx", &ScenarioParams::sat_nx},
    {"array.sat.ny", &ScenarioParams::sat_ny},
    {"array.bs.nx", &ScenarioParams::bs_nx},
    {"array.bs.ny", &ScenarioParams::bs_ny},
    {"array.ris.nx", &ScenarioParams::ris_nx},
    {"array.ris.ny", &ScenarioParams::ris_ny},
};

}  // namespace

ScenarioParams params_from_config(const KeyValueConfig& config) {
  ScenarioParams p;
  for (const auto& k : kDoubleKeys)
    if (config.has(k.key)) p.*(k.member) = config.get_double(k.key);
  for (const auto& k : kIntKeys)
    if (config.has(k.key)) {
      const long long v = config.get_int(k.key);
      if (v < 0 || v > 1 << 20) throw ConfigError(std::string("key ") + k.key + " out of range");
      p.*(k.member) = static_cast<int>(v);
    }
  if (config.has("weights")) p.weights = config.get_doubles("weights");
  return p;
}

void params_to_config(const ScenarioParams& params, KeyValueConfig& config) {
  for (const auto& k : kIntKeys) config.set(k.key, std::to_string(params.*(k.member)));
  for (const auto& k : kDoubleKeys) config.set(k.key, fmt(params.*(k.member)));
  if (!params.weights.empty()) config.set("weights", join(params.weights));
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> out;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) out.push_back(msg);
  };
  const int K = s.num_cells, L = s.num_ues_per_cell;
  need(std::isfinite(s.wavelength) && s.wavelength > 0, "wavelength must be > 0");
  need(K >= 1, "num_cells must be >= 1");
  need(L >= 0, "num_ues_per_cell must be >= 0");
  if (K < 1 || L < 0) return out;

  for (const auto& [name, a] : {std::pair{"sat_array", s.sat_array}, std::pair{"bs_array", s.bs_array},
                                std::pair{"ris_array", s.ris_array}}) {
    need(a.nx >= 1 && a.ny >= 1, std::string(name) + ": nx, ny must be >= 1");
    need(a.spacing > 0, std::string(name) + ": spacing must be > 0");
  }
  need(is_valid_rotation(s.sat_frame.rotation), "sat_frame: rotation is not a valid rotation");
  need(s.sat_position().allFinite(), "sat_position must be finite");

  const auto sized = [&](std::size_t n, std::size_t want, const std::string& name) {
    need(n == want, name + ": expected " + std::to_string(want) + " entries, got " + std::to_string(n));
    return n == want;
  };
  if (sized(s.bs_frames.size(), K, "bs_frames"))
    for (int k = 0; k < K; ++k)
      need(is_valid_rotation(s.bs_frames[k].rotation), "bs_frames[" + std::to_string(k) + "]: invalid rotation");
  sized(s.es_positions.size(), K, "es_positions");
  if (sized(s.ue_positions.size(), K, "ue_positions"))
    for (int k = 0; k < K; ++k) sized(s.ue_positions[k].size(), L, "ue_positions[" + std::to_string(k) + "]");

  need(s.es_dish_diameter > 0, "es_dish_diameter must be > 0");
  need(s.es_dish_efficiency > 0 && s.es_dish_efficiency <= 1, "es_dish_efficiency must lie in (0, 1]");
  if (sized(s.es_axis_dirs.size(), K, "es_axis_dirs"))
    for (int k = 0; k < K; ++k) {
      const Vec3& p = s.es_axis_dirs[k];
      need(std::abs(p.norm() - 1.0) <= 1e-9, "es_axis_dirs[" + std::to_string(k) + "]: must be unit norm");
      need(p.z() < 0, "es_axis_dirs[" + std::to_string(k) + "]: third component must be < 0");
    }
  need(std::isfinite(s.rain_mu), "rain_mu must be finite");
  need(s.rain_sigma >= 0, "rain_sigma must be >= 0");

  if (sized(s.noise_es.size(), K, "noise_es"))
    for (int k = 0; k < K; ++k) need(s.noise_es[k] > 0, "noise_es[" + std::to_string(k) + "] must be > 0");
  if (sized(s.noise_ue.size(), K, "noise_ue"))
    for (int k = 0; k < K; ++k)
      if (sized(s.noise_ue[k].size(), L, "noise_ue[" + std::to_string(k) + "]"))
        for (int l = 0; l < L; ++l)
          need(s.noise_ue[k][l] > 0,
               "noise_ue[" + std::to_string(k) + "][" + std::to_string(l) + "] must be > 0");
  need(s.p_sat_max > 0, "p_sat_max must be > 0");
  need(s.p_bs_max > 0, "p_bs_max must be > 0");

  if (s.weights.rows() != K || s.weights.cols() != L + 1) {
    out.push_back("weights: expected a K x (L+1) matrix");
  } else {
    need((s.weights.array() >= 0).all(), "weights must be nonnegative");
    need(std::abs(s.weights.sum() - 1.0) <= 1e-12, "weights: sum must equal 1 within 1e-12");
  }
  need(s.rmin_es >= 0, "rmin_es must be >= 0");
  need(s.rmin_ue >= 0, "rmin_ue must be >= 0");
  need(s.h_min > 0 && s.h_min <= s.h_max, "uav height bounds: need 0 < h_min <= h_max");
  if (sized(s.uav_regions.size(), K, "uav_regions"))
    for (int k = 0; k < K; ++k)
      need((s.uav_regions[k].lo.array() <= s.uav_regions[k].hi.array()).all(),
           "uav_regions[" + std::to_string(k) + "]: lo must be <= hi");
  return out;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

Mat3 rot_x(double a) { return rotation_from_euler({a, 0.0, 0.0}); }

}  // namespace

std::pair<double, double> axis_range(const Scenario& s, int cell) {
  const double p3 = s.es_axis_dirs[cell].z();
  return {-s.h_min / p3, -s.h_max / p3};
}

Vec3 axis_point(const Scenario& s, int cell, double b) { return s.es_positions[cell] - b * s.es_axis_dirs[cell]; }

Scenario generate_scenario(const ScenarioParams& p, std::uint64_t seed) {
  if (p.num_cells < 1) throw ConfigError("cells.count must be >= 1");
  if (p.num_ues_per_cell < 1) throw ConfigError("cells.ues_per_cell must be >= 1");
  if (p.frequency_hz <= 0) throw ConfigError("carrier.frequency_hz must be > 0");
  if (p.sat_altitude_m <= 0) throw ConfigError("sat.altitude_m must be > 0");
  if (p.sat_zenith_deg < 0 || p.sat_zenith_deg >= 80) throw ConfigError("sat.zenith_deg must lie in [0, 80)");
  if (p.uav_h_min_m <= 0 || p.uav_h_max_m < p.uav_h_min_m) throw ConfigError("uav height bounds invalid");

  const int K = p.num_cells, L = p.num_ues_per_cell;
  Scenario s;
  s.wavelength = kSpeedOfLight / p.frequency_hz;
  s.num_cells = K;
  s.num_ues_per_cell = L;
  const double d0 = p.spacing_wavelengths * s.wavelength;
  s.sat_array = {p.sat_nx, p.sat_ny, d0};
  s.bs_array = {p.bs_nx, p.bs_ny, d0};
  s.ris_array = {p.ris_nx, p.ris_ny, d0};

  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(K))));
  Vec3 centroid = Vec3::Zero();
  for (int k = 0; k < K; ++k) {
    s.es_positions.emplace_back((k % cols) * p.es_spacing_m, (k / cols) * p.es_spacing_m, 0.0);
    centroid += s.es_positions.back();
  }
  centroid /= K;

  const double zen = p.sat_zenith_deg * kPi / 180.0, az = p.sat_azimuth_deg * kPi / 180.0;
  const double ground = p.sat_altitude_m * std::tan(zen);
  s.sat_frame.rotation = rot_x(kPi);
  s.sat_frame.translation = centroid + Vec3(ground * std::cos(az), ground * std::sin(az), p.sat_altitude_m);

  s.es_dish_diameter = p.es_dish_diameter_m;
  s.es_dish_efficiency = p.es_dish_efficiency;
  const double tilt = p.es_pointing_offset_deg * kPi / 180.0;
  for (int k = 0; k < K; ++k) {
    const Vec3 to_sat = (s.sat_position() - s.es_positions[k]).normalized();
    // Rotate toward zenith inside the vertical plane holding the satellite direction.
    Vec3 up = Vec3::UnitZ() - Vec3::UnitZ().dot(to_sat) * to_sat;
    Vec3 boresight = to_sat;
    if (up.norm() > 1e-12) boresight = std::cos(tilt) * to_sat + std::sin(tilt) * up.normalized();
    s.es_axis_dirs.push_back(-boresight.normalized());
  }

  for (int k = 0; k < K; ++k) {
    Frame bs;
    bs.rotation = rot_x(kPi);
    bs.translation = s.es_positions[k] + Vec3(0.0, -p.bs_offset_m, p.bs_height_m);
    s.bs_frames.push_back(bs);
    std::vector<Vec3> ues;
    for (int l = 0; l < L; ++l) {
      auto rng = make_rng(seed, {kTagPlacement, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(l)});
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const double r = p.ue_disc_radius_m * std::sqrt(unif(rng));
      const double a = kTwoPi * unif(rng);
      ues.emplace_back(bs.translation.x() + r * std::cos(a), bs.translation.y() + r * std::sin(a), p.ue_height_m);
    }
    s.ue_positions.push_back(ues);
  }

  s.rain_mu = p.rain_mu;
  s.rain_sigma = p.rain_sigma;
  s.noise_es.assign(K, dbm_to_watts(p.noise_es_dbm));
  s.noise_ue.assign(K, std::vector<double>(L, dbm_to_watts(p.noise_ue_dbm)));
  s.p_sat_max = p.sat_power_w;
  s.p_bs_max = dbm_to_watts(p.bs_power_dbm);

  if (p.weights.empty()) {
    s.weights = RMat::Constant(K, L + 1, 1.0 / (K * (L + 1)));
  } else {
    if (static_cast<int>(p.weights.size()) != K * (L + 1))
      throw ConfigError("weights: expected " + std::to_string(K * (L + 1)) + " values");
    s.weights.resize(K, L + 1);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j <= L; ++j) s.weights(k, j) = p.weights[k * (L + 1) + j];
  }
  s.rmin_es = p.qos_es_min;
  s.rmin_ue = p.qos_ue_min;
  s.h_min = p.uav_h_min_m;
  s.h_max = p.uav_h_max_m;
  for (int k = 0; k < K; ++k) {
    const Vec3 half(p.uav_half_width_m, p.uav_half_width_m, 0.0);
    Box box;
    box.lo = s.es_positions[k] - half;
    box.hi = s.es_positions[k] + half;
    box.lo.z() = s.es_positions[k].z() + s.h_min;
    box.hi.z() = s.es_positions[k].z() + s.h_max;
    s.uav_regions.push_back(box);
  }
  return s;
}

std::vector<Frame> initial_ris_frames(const Scenario& s) {
  std::vector<Frame> frames;
  for (int k = 0; k < s.num_cells; ++k) {
    const auto [b0, b1] = axis_range(s, k);
    Frame f;
    f.translation = axis_point(s, k, 0.5 * (b0 + b1));
    const Vec3 to_sat = (s.sat_position() - f.translation).normalized();
    const Vec3 to_es = (s.es_positions[k] - f.translation).normalized();
    Vec3 n = to_sat + to_es;
    if (n.norm() < 1e-9) n = to_sat.unitOrthogonal();
    f.rotation = rotation_with_normal(n);
    frames.push_back(f);
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Explicit serialization

std::string scenario_to_text(const Scenario& s) {
  KeyValueConfig c;
  const int K = s.num_cells, L = s.num_ues_per_cell;
  c.set("wavelength_m", fmt(s.wavelength));
  c.set("cells", std::to_string(K));
  c.set("ues_per_cell", std::to_string(L));
  auto arr = [](const ArrayGeometry& a) { return join({double(a.nx), double(a.ny), a.spacing}); };
  c.set("array.sat", arr(s.sat_array));
  c.set("array.bs", arr(s.bs_array));
  c.set("array.ris", arr(s.ris_array));
  c.set("sat.rotation", mat_text(s.sat_frame.rotation));
  c.set("sat.position_m", vec_text(s.sat_position()));
  c.set("es.dish_diameter_m", fmt(s.es_dish_diameter));
  c.set("es.dish_efficiency", fmt(s.es_dish_efficiency));
  c.set("rain.mu", fmt(s.rain_mu));
  c.set("rain.sigma", fmt(s.rain_sigma));
  c.set("power.sat_w", fmt(s.p_sat_max));
  c.set("power.bs_w", fmt(s.p_bs_max));
  c.set("qos.es_min", fmt(s.rmin_es));
  c.set("qos.ue_min", fmt(s.rmin_ue));
  c.set("uav.h_min_m", fmt(s.h_min));
  c.set("uav.h_max_m", fmt(s.h_max));
  std::vector<double> w;
  for (int k = 0; k < s.weights.rows(); ++k)
    for (int j = 0; j < s.weights.cols(); ++j) w.push_back(s.weights(k, j));
  c.set("weights", join(w));
  for (int k = 0; k < K; ++k) {
    const std::string p = "cell" + std::to_string(k) + ".";
    c.set(p + "bs.rotation", mat_text(s.bs_frames[k].rotation));
    c.set(p + "bs.position_m", vec_text(s.bs_frames[k].translation));
    c.set(p + "es.position_m", vec_text(s.es_positions[k]));
    c.set(p + "es.axis", vec_text(s.es_axis_dirs[k]));
    c.set(p + "es.noise_w", fmt(s.noise_es[k]));
    c.set(p + "uav.box_m", join({s.uav_regions[k].lo.x(), s.uav_regions[k].lo.y(), s.uav_regions[k].lo.z(),
                                 s.uav_regions[k].hi.x(), s.uav_regions[k].hi.y(), s.uav_regions[k].hi.z()}));
    for (int l = 0; l < L; ++l) {
      const std::string q = p + "ue" + std::to_string(l) + ".";
      c.set(q + "position_m", vec_text(s.ue_positions[k][l]));
      c.set(q + "noise_w", fmt(s.noise_ue[k][l]));
    }
  }
  return c.serialize();
}

Scenario scenario_from_text(const std::string& text) {
  const KeyValueConfig c = KeyValueConfig::parse(text);
  auto list = [&](const std::string& key, std::size_t n) {
    auto xs = c.get_doubles(key);
    if (xs.size() != n) throw ConfigError("key " + key + ": expected " + std::to_string(n) + " values");
    return xs;
  };
  auto vec = [&](const std::string& key) {
    const auto xs = list(key, 3);
    return Vec3(xs[0], xs[1], xs[2]);
  };
  auto mat = [&](const std::string& key) {
    const auto xs = list(key, 9);
    Mat3 m;
    for (int r = 0; r < 3; ++r)
      for (int cc = 0; cc < 3; ++cc) m(r, cc) = xs[3 * r + cc];
    return m;
  };
  auto arr = [&](const std::string& key) {
    const auto xs = list(key, 3);
    return ArrayGeometry{static_cast<int>(xs[0]), static_cast<int>(xs[1]), xs[2]};
  };

  Scenario s;
  s.wavelength = c.get_double("wavelength_m");
  s.num_cells = static_cast<int>(c.get_int("cells"));
  s.num_ues_per_cell = static_cast<int>(c.get_int("ues_per_cell"));
  const int K = s.num_cells, L = s.num_ues_per_cell;
  if (K < 1 || L < 0) throw ConfigError("cells must be >= 1 and ues_per_cell >= 0");
  s.sat_array = arr("array.sat");
  s.bs_array = arr("array.bs");
  s.ris_array = arr("array.ris");
  s.sat_frame.rotation = mat("sat.rotation");
  s.sat_frame.translation = vec("sat.position_m");
  s.es_dish_diameter = c.get_double("es.dish_diameter_m");
  s.es_dish_efficiency = c.get_double("es.dish_efficiency");
  s.rain_mu = c.get_double("rain.mu");
  s.rain_sigma = c.get_double("rain.sigma");
  s.p_sat_max = c.get_double("power.sat_w");
  s.p_bs_max = c.get_double("power.bs_w");
  s.rmin_es = c.get_double("qos.es_min");
  s.rmin_ue = c.get_double("qos.ue_min");
  s.h_min = c.get_double("uav.h_min_m");
  s.h_max = c.get_double("uav.h_max_m");
  const auto w = list("weights", static_cast<std::size_t>(K * (L + 1)));
  s.weights.resize(K, L + 1);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j <= L; ++j) s.weights(k, j) = w[k * (L + 1) + j];
  s.ue_positions.resize(K);
  s.noise_ue.resize(K);
  for (int k = 0; k < K; ++k) {
    const std::string p = "cell" + std::to_string(k) + ".";
    Frame bs;
    bs.rotation = mat(p + "bs.rotation");
    bs.translation = vec(p + "bs.position_m");
    s.bs_frames.push_back(bs);
    s.es_positions.push_back(vec(p + "es.position_m"));
    s.es_axis_dirs.push_back(vec(p + "es.axis"));
    s.noise_es.push_back(c.get_double(p + "es.noise_w"));
    const auto b = list(p + "uav.box_m", 6);
    s.uav_regions.push_back(Box{Vec3(b[0], b[1], b[2]), Vec3(b[3], b[4], b[5])});
    for (int l = 0; l < L; ++l) {
      const std::string q = p + "ue" + std::to_string(l) + ".";
      s.ue_positions[k].push_back(vec(q + "position_m"));
      s.noise_ue[k].push_back(c.get_double(q + "noise_w"));
    }
  }
  const auto unused = c.unused_keys();
  if (!unused.empty()) throw ConfigError("unknown scenario key " + unused.front());
  return s;
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write scenario file " + path);
  out << scenario_to_text(scenario);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_text(ss.str());
}

}  // namespace sagin
