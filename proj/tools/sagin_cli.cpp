// Command-line front end: run experiments, validate scenarios, trace one optimization.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sagin/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct Flags {
  std::string config;
  std::string out;
  std::string seeds;
  std::string scheme;
  std::string sweep;
  int workers = -1;
};

sagin::ExperimentConfig load(const Flags& f) {
  sagin::KeyValueConfig kv;
  if (!f.config.empty()) kv = sagin::KeyValueConfig::load(f.config);
  sagin::ExperimentConfig cfg = sagin::experiment_from_config(kv);
  if (!f.seeds.empty()) cfg.seeds = sagin::parse_seeds(f.seeds);
  if (!f.scheme.empty()) cfg.schemes = sagin::parse_schemes(f.scheme);
  if (!f.sweep.empty()) cfg.sweep = sagin::parse_sweep(f.sweep);
  if (!f.out.empty()) cfg.output_path = f.out;
  if (f.workers >= 0) cfg.workers = f.workers;
  return cfg;
}

int cmd_run(const Flags& f) {
  const sagin::ExperimentConfig cfg = load(f);
  return sagin::run_to_files(cfg, std::cerr);
}

int cmd_validate(const Flags& f) {
  sagin::ExperimentConfig cfg = load(f);
  if (cfg.seeds.empty()) cfg.seeds = {0};
  cfg.validate();
  const std::size_t nsweep = cfg.sweep.kind == sagin::SweepKind::None ? 1 : cfg.sweep.values.size();
  int infeasible = 0;
  for (std::size_t i = 0; i < nsweep; ++i)
    for (std::uint64_t seed : cfg.seeds) {
      const sagin::Scenario s = sagin::build_scenario(cfg.params, cfg.sweep, i, seed);
      for (sagin::Scheme sc : cfg.schemes) {
        const sagin::RVec rain = sagin::sample_rain(s.rain_mu, s.rain_sigma, seed, s.K());
        const auto frames = sagin::initial_ris_frames(s);
        try {
          const sagin::ChannelSet ch = sagin::scheme_channels(s, frames, rain, sc);
          sagin::initial_point(s, ch, sc, frames);
          std::cout << "ok sweep_index=" << i << " seed=" << seed << " scheme=" << sagin::to_string(sc) << '\n';
        } catch (const sagin::ConfigError&) {
          throw;
        } catch (const sagin::Error& e) {
          ++infeasible;
          std::cout << "infeasible sweep_index=" << i << " seed=" << seed << " scheme=" << sagin::to_string(sc)
                    << ": " << e.what() << '\n';
        }
      }
    }
  return infeasible ? kExitInfeasible : kExitOk;
}

int cmd_trace(const Flags& f) {
  sagin::ExperimentConfig cfg = load(f);
  if (cfg.seeds.empty()) cfg.seeds = {0};
  cfg.validate();
  const std::uint64_t seed = cfg.seeds.front();
  const sagin::Scenario s = sagin::build_scenario(cfg.params, cfg.sweep, 0, seed);
  sagin::OptimizeOptions opt = cfg.optimizer;
  opt.scheme = cfg.schemes.front();
  opt.log = [](const std::string& line) { std::cout << line << '\n'; };
  const sagin::OptimizeResult res = sagin::optimize(s, seed, opt);
  std::cout << "final wsr=" << res.weighted_sum_rate << " iterations=" << res.trace.size()
            << " converged=" << (res.converged ? "yes" : "no") << '\n';
  std::cout << "feasibility " << res.feasibility.summary() << '\n';
  if (!f.out.empty()) {
    std::ofstream out(f.out, std::ios::binary);
    if (!out) throw sagin::ConfigError("cannot open " + f.out);
    out << "iteration,weighted_sum_rate,wmmse_objective,rate,beam,phase,pose,sca_solves,admm_iterations,"
           "admm_primal,admm_dual\n";
    out.precision(17);
    for (const auto& t : res.trace)
      out << t.iteration << ',' << t.weighted_sum_rate << ',' << t.wmmse_objective << ','
          << sagin::csv_field(t.rate_status) << ',' << sagin::csv_field(t.beam_status) << ','
          << sagin::csv_field(t.phase_status) << ',' << sagin::csv_field(t.pose_status) << ',' << t.sca_solves << ','
          << t.admm_iterations << ',' << t.admm_primal << ',' << t.admm_dual << '\n';
  }
  return res.feasibility.all_passed() ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RSMA satellite-terrestrial network optimizer"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "key = value configuration file");
    sub->add_option("--out", flags.out, "output CSV path");
    sub->add_option("--seeds", flags.seeds, "seed list, e.g. 0-19 or 1,5,9");
    sub->add_option("--scheme", flags.scheme, "proposed, no_rsma, no_ris (comma-separated)");
    sub->add_option("--sweep", flags.sweep, "none, bs_power:20,25,30,35 or num_ues:1,2,3");
    sub->add_option("--workers", flags.workers, "worker threads (0 = one per core)");
  };
  CLI::App* run = app.add_subcommand("run", "run an experiment and write CSV records");
  CLI::App* validate = app.add_subcommand("validate", "check the configuration and the starting points");
  CLI::App* trace = app.add_subcommand("trace", "optimize one scenario with per-block logging");
  add_common(run);
  add_common(validate);
  add_common(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(flags);
    if (validate->parsed()) return cmd_validate(flags);
    if (trace->parsed()) return cmd_trace(flags);
  } catch (const sagin::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sagin::InitializationInfeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const sagin::SubproblemInfeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const sagin::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  }
  return kExitOk;
}
