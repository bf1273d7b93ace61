#include "sagin/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace sagin {

const char* to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::None: return "none";
    case SweepKind::BsPower: return "bs_power";
    case SweepKind::NumUes: return "num_ues";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(text, &pos);
    if (pos != text.size() || !std::isfinite(x)) throw ConfigError("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(what + ": bad number '" + text + "'");
  }
}

std::uint64_t parse_seed(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("seeds: bad seed '" + text + "'");
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ConfigError("seeds: seed out of range '" + text + "'");
  }
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string joined(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += num(xs[i]);
  }
  return out;
}

}  // namespace

Sweep parse_sweep(const std::string& text) {
  const std::string t = trim(text);
  Sweep sw;
  if (t.empty() || t == "none") return sw;
  const auto colon = t.find(':');
  const std::string name = trim(t.substr(0, colon));
  if (name == "bs_power")
    sw.kind = SweepKind::BsPower;
  else if (name == "num_ues")
    sw.kind = SweepKind::NumUes;
  else
    throw ConfigError("sweep: unknown kind '" + name + "' (expected none, bs_power or num_ues)");
  if (colon == std::string::npos) throw ConfigError("sweep: missing values after '" + name + ":'");
  for (const std::string& v : split(t.substr(colon + 1), ',')) sw.values.push_back(parse_number(v, "sweep"));
  if (sw.values.empty()) throw ConfigError("sweep: no values after '" + name + ":'");
  return sw;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const std::string& part : split(text, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_seed(part));
      continue;
    }
    const std::uint64_t a = parse_seed(trim(part.substr(0, dash)));
    const std::uint64_t b = parse_seed(trim(part.substr(dash + 1)));
    if (b < a) throw ConfigError("seeds: descending range '" + part + "'");
    if (b - a > 1000000) throw ConfigError("seeds: range too long '" + part + "'");
    for (std::uint64_t x = a; x <= b; ++x) out.push_back(x);
  }
  return out;
}

std::vector<Scheme> parse_schemes(const std::string& text) {
  std::vector<Scheme> out;
  for (const std::string& s : split(text, ',')) out.push_back(parse_scheme(s));
  return out;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("seeds: the seed list is empty");
  if (schemes.empty()) throw ConfigError("scheme: no scheme given");
  if (sweep.kind != SweepKind::None) {
    if (sweep.values.empty()) throw ConfigError("sweep: the value list is empty");
    if (!std::is_sorted(sweep.values.begin(), sweep.values.end()))
      throw ConfigError("sweep: values must be sorted ascending");
    if (sweep.kind == SweepKind::NumUes)
      for (double v : sweep.values)
        if (v < 1 || v != std::floor(v)) throw ConfigError("sweep: num_ues values must be positive integers");
  }
  if (workers < 0) throw ConfigError("experiment.workers must be >= 0");
  if (optimizer.max_outer < 1) throw ConfigError("optimizer.max_outer must be >= 1");
  if (!(optimizer.tol >= 0)) throw ConfigError("optimizer.tol must be >= 0");
  if (optimizer.pose_period < 0) throw ConfigError("optimizer.pose_period must be >= 0");
  if (!(optimizer.admm.rho > 0)) throw ConfigError("optimizer.admm_rho must be > 0");
  if (!(optimizer.grid.angle_step > 0)) throw ConfigError("optimizer.grid_angle_step_deg must be > 0");
  if (optimizer.grid.axis_samples < 1) throw ConfigError("optimizer.grid_axis_samples must be >= 1");
}

void apply_optimizer_keys(const KeyValueConfig& c, OptimizeOptions& o) {
  auto integer = [&](const char* key, int& dst) {
    if (c.has(key)) dst = static_cast<int>(c.get_int(key));
  };
  auto real = [&](const char* key, double& dst) {
    if (c.has(key)) dst = c.get_double(key);
  };
  integer("optimizer.max_outer", o.max_outer);
  real("optimizer.tol", o.tol);
  integer("optimizer.patience", o.patience);
  integer("optimizer.pose_period", o.pose_period);
  real("optimizer.sca_tol", o.sca_tol);
  integer("optimizer.sca_max_outer", o.sca_max_outer);
  real("optimizer.admm_rho", o.admm.rho);
  real("optimizer.admm_tol", o.admm.tol_primal);
  if (c.has("optimizer.admm_tol")) o.admm.tol_dual = o.admm.tol_primal;
  integer("optimizer.admm_max_iter", o.admm.max_iter);
  if (c.has("optimizer.grid_angle_step_deg")) o.grid.angle_step = c.get_double("optimizer.grid_angle_step_deg") * kPi / 180.0;
  integer("optimizer.grid_axis_samples", o.grid.axis_samples);
}

ExperimentConfig experiment_from_config(const KeyValueConfig& c) {
  ExperimentConfig e;
  e.params = params_from_config(c);
  if (c.has("experiment.seeds")) e.seeds = parse_seeds(c.get("experiment.seeds"));
  if (c.has("experiment.scheme")) e.schemes = parse_schemes(c.get("experiment.scheme"));
  if (c.has("experiment.sweep")) e.sweep = parse_sweep(c.get("experiment.sweep"));
  if (c.has("experiment.output")) e.output_path = c.get("experiment.output");
  if (c.has("experiment.workers")) e.workers = static_cast<int>(c.get_int("experiment.workers"));
  apply_optimizer_keys(c, e.optimizer);
  const auto unused = c.unused_keys();
  if (!unused.empty()) {
    std::string msg = "unknown configuration key(s):";
    for (const auto& k : unused) msg += " " + k;
    throw ConfigError(msg);
  }
  return e;
}

Scenario build_scenario(const ScenarioParams& params, const Sweep& sweep, std::size_t idx, std::uint64_t seed) {
  ScenarioParams p = params;
  if (sweep.kind == SweepKind::BsPower) p.bs_power_dbm = sweep.values.at(idx);
  if (sweep.kind == SweepKind::NumUes) {
    p.num_ues_per_cell = static_cast<int>(sweep.values.at(idx));
    if (!p.weights.empty() && p.weights.size() != static_cast<std::size_t>(p.num_cells * (p.num_ues_per_cell + 1)))
      throw ConfigError("weights: explicit weights cannot be combined with a num_ues sweep of different size");
  }
  Scenario s = generate_scenario(p, seed);
  const auto problems = validate(s);
  if (!problems.empty()) throw ConfigError("invalid scenario: " + problems.front());
  return s;
}

const char* const kCsvHeader =
    "scheme,sweep,sweep_value,seed,row,iteration,weighted_sum_rate,wmmse_objective,es_rates,ue_rates,feasible,"
    "statuses";
const char* const kTimingHeader = "scheme,sweep,sweep_value,seed,iterations,runtime_ms";

std::string csv_field(const std::string& t) {
  if (t.find_first_of(",\"\r\n") == std::string::npos) return t;
  std::string out = "\"";
  for (char ch : t) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_row(const ExperimentRecord& r) {
  std::vector<std::string> f{r.scheme,
                             r.sweep,
                             r.sweep_value,
                             std::to_string(r.seed),
                             r.final_row ? "final" : "iter",
                             std::to_string(r.iteration),
                             num(r.weighted_sum_rate),
                             num(r.wmmse_objective),
                             r.final_row ? joined(r.es_rates) : "",
                             r.final_row ? joined(r.ue_rates) : "",
                             r.final_row ? (r.feasible ? "1" : "0") : "",
                             r.statuses};
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ',';
    out += csv_field(f[i]);
  }
  return out;
}

namespace {

struct CellKey {
  Scheme scheme;
  std::size_t sweep_index;
  std::uint64_t seed;
};

struct CellOutcome {
  std::vector<ExperimentRecord> records;
  int iterations = 0;
  double runtime_ms = 0.0;
  std::string error;
  bool done = false;
};

CellOutcome run_cell(const ExperimentConfig& cfg, const CellKey& key) {
  CellOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentRecord base;
  base.scheme = to_string(key.scheme);
  base.sweep = to_string(cfg.sweep.kind);
  base.sweep_value = cfg.sweep.kind == SweepKind::None ? "" : num(cfg.sweep.values[key.sweep_index]);
  base.seed = key.seed;
  try {
    const Scenario s = build_scenario(cfg.params, cfg.sweep, key.sweep_index, key.seed);
    OptimizeOptions opt = cfg.optimizer;
    opt.scheme = key.scheme;
    opt.log = nullptr;
    const OptimizeResult res = optimize(s, key.seed, opt);
    for (const IterationTrace& t : res.trace) {
      ExperimentRecord r = base;
      r.iteration = t.iteration;
      r.weighted_sum_rate = t.weighted_sum_rate;
      r.wmmse_objective = t.wmmse_objective;
      r.statuses = t.rate_status + "/" + t.beam_status + "/" + t.phase_status + "/" + t.pose_status;
      out.records.push_back(r);
    }
    out.iterations = static_cast<int>(res.trace.size());
    if (!res.feasibility.all_passed()) {
      out.error = "final point failed certification: " + res.feasibility.summary();
    } else {
      ExperimentRecord r = base;
      r.final_row = true;
      r.iteration = out.iterations;
      r.weighted_sum_rate = res.weighted_sum_rate;
      r.wmmse_objective = res.trace.empty() ? 0.0 : res.trace.back().wmmse_objective;
      r.es_rates.assign(res.rates.es.data(), res.rates.es.data() + res.rates.es.size());
      for (Eigen::Index k = 0; k < res.rates.ue.rows(); ++k)
        for (Eigen::Index l = 0; l < res.rates.ue.cols(); ++l) r.ue_rates.push_back(res.rates.ue(k, l));
      r.feasible = true;
      out.records.push_back(r);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    out.error = e.what();
  }
  out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, std::ostream& csv, std::ostream* timing,
                          std::ostream& diag) {
  cfg.validate();
  // Scenario errors surface before any worker starts.
  for (std::size_t i = 0; i < std::max<std::size_t>(1, cfg.sweep.values.size()); ++i)
    build_scenario(cfg.params, cfg.sweep, i, cfg.seeds.front());

  std::vector<CellKey> keys;
  const std::size_t nsweep = cfg.sweep.kind == SweepKind::None ? 1 : cfg.sweep.values.size();
  for (Scheme sc : cfg.schemes)
    for (std::size_t i = 0; i < nsweep; ++i)
      for (std::uint64_t seed : cfg.seeds) keys.push_back({sc, i, seed});

  std::vector<CellOutcome> results(keys.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::exception_ptr config_error;

  int nworkers = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency());
  nworkers = std::max(1, std::min<int>(nworkers, static_cast<int>(keys.size())));
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= keys.size()) return;
      CellOutcome o;
      try {
        o = run_cell(cfg, keys[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!config_error) config_error = std::current_exception();
        o.error = "configuration error";
      }
      o.done = true;
      {
        std::lock_guard<std::mutex> lk(mu);
        results[i] = std::move(o);
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);

  RunSummary sum;
  sum.cells = static_cast<int>(keys.size());
  csv << kCsvHeader << '\n';
  if (timing) *timing << kTimingHeader << '\n';
  for (std::size_t i = 0; i < keys.size(); ++i) {
    CellOutcome o;
    {
      std::unique_lock<std::mutex> lk(mu);
      cv.wait(lk, [&] { return results[i].done; });
      o = std::move(results[i]);
    }
    const bool ok = o.error.empty();
    if (!ok) {
      ++sum.failed;
      diag << "cell scheme=" << to_string(keys[i].scheme) << " sweep_index=" << keys[i].sweep_index
           << " seed=" << keys[i].seed << ": " << o.error << '\n';
    }
    for (const auto& r : o.records) {
      csv << csv_row(r) << '\n';
      ++sum.rows;
    }
    csv.flush();
    if (timing && ok) {
      *timing << to_string(keys[i].scheme) << ',' << to_string(cfg.sweep.kind) << ','
              << (cfg.sweep.kind == SweepKind::None ? "" : num(cfg.sweep.values[keys[i].sweep_index])) << ','
              << keys[i].seed << ',' << o.iterations << ',' << num(o.runtime_ms) << '\n';
      timing->flush();
    }
  }
  for (auto& t : pool) t.join();
  if (config_error) std::rethrow_exception(config_error);
  return sum;
}

int run_to_files(const ExperimentConfig& cfg, std::ostream& diag) {
  if (cfg.output_path.empty()) throw ConfigError("no output path (set experiment.output or pass --out)");
  std::ofstream csv(cfg.output_path, std::ios::binary);
  if (!csv) throw ConfigError("cannot open output file " + cfg.output_path);
  std::ofstream timing(cfg.output_path + ".timing.csv", std::ios::binary);
  if (!timing) throw ConfigError("cannot open timing file " + cfg.output_path + ".timing.csv");
  const RunSummary sum = run_experiment(cfg, csv, &timing, diag);
  diag << sum.cells << " cells, " << sum.rows << " rows, " << sum.failed << " failed\n";
  return sum.failed ? 3 : 0;
}

}  // namespace sagin
