#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "sagin/beamforming_sca.hpp"
#include "sagin/rate_allocation.hpp"
#include "sagin/ris_admm.hpp"
#include "sagin/uav_search.hpp"

namespace sagin {

enum class Scheme { Proposed, NoRsma, NoRis };

const char* to_string(Scheme scheme);
/// "proposed", "no_rsma" or "no_ris"; throws ConfigError otherwise.
Scheme parse_scheme(const std::string& name);

struct OptimizeOptions {
  Scheme scheme = Scheme::Proposed;
  double tol = 1e-4;    // relative change of the weighted sum rate
  int patience = 3;     // consecutive small changes before stopping
  int max_outer = 50;
  int pose_period = 5;
  int max_rate_failures = 3;
  double sca_tol = 1e-5;
  int sca_max_outer = 20;
  BeamOptions beams;
  AdmmOptions admm;
  PoseGrid grid;
  /// Receives one line per block when set.
  std::function<void(const std::string&)> log;
};

struct IterationTrace {
  int iteration = 0;
  double weighted_sum_rate = 0.0;
  double wmmse_objective = 0.0;
  std::string rate_status;
  std::string beam_status;
  std::string phase_status;
  std::string pose_status;
  int sca_solves = 0;
  int admm_iterations = 0;
  double admm_primal = 0.0;
  double admm_dual = 0.0;
  double wall_ms = 0.0;  // excluded from every determinism comparison
};

struct FeasibilityCheck {
  std::string id;  // P1.b ... P1.k
  bool passed = true;
  double margin = 0.0;  // worst case; negative means violated
};

struct FeasibilityReport {
  std::vector<FeasibilityCheck> checks;

  bool all_passed() const;
  const FeasibilityCheck& get(const std::string& id) const;
  std::string summary() const;
};

/// Every constraint of the joint problem at `vars`, with the rate plan in `vars.rates`.
FeasibilityReport check_feasibility(const Scenario& scenario, const ChannelSet& channels,
                                    const DesignVariables& vars);

/// Channels for the poses in `vars`, with the reflected paths removed under NoRis.
ChannelSet scheme_channels(const Scenario& scenario, const std::vector<Frame>& frames, const RVec& rain,
                           Scheme scheme);

/// Best feasible start over a small family: matched-filter or BS zero-forcing
/// directions, crossed with a few common-stream power shares (none without
/// rate splitting). Budgets are met with equality and rates come from
/// greedy_allocate. Throws InitializationInfeasible.
DesignVariables initial_point(const Scenario& scenario, const ChannelSet& channels, Scheme scheme,
                              const std::vector<Frame>& frames);

struct OptimizeResult {
  DesignVariables vars;
  std::vector<IterationTrace> trace;
  RVec rain;
  ChannelSet channels;
  Rates rates;
  double weighted_sum_rate = 0.0;
  double initial_weighted_sum_rate = 0.0;
  bool converged = false;
  FeasibilityReport feasibility;
};

/// Rain is drawn from `seed`. Throws InitializationInfeasible, or
/// SubproblemInfeasible when rate allocation fails repeatedly.
OptimizeResult optimize(const Scenario& scenario, std::uint64_t seed, const OptimizeOptions& options = {});

}  // namespace sagin
