#pragma once

#include "sagin/signal_model.hpp"

namespace sagin {

/// Euler angles run over [0, 2pi) in steps of `angle_step`. Positions along the
/// dish axis use `axis_step` meters when positive, otherwise `axis_samples`
/// evenly spaced values over the axis range.
struct PoseGrid {
  double angle_step = kPi / 4.0;
  double axis_step = 0.0;
  int axis_samples = 8;
};

std::vector<double> angle_samples(const PoseGrid& grid);
std::vector<double> axis_samples(const Scenario& scenario, int cell, const PoseGrid& grid);

/// Box membership plus both halfspace tests.
bool pose_admissible(const Scenario& scenario, int cell, const Frame& pose);

/// Grid poses that pass pose_admissible, in grid order (b fastest). Throws EmptyGrid.
std::vector<Frame> candidate_poses(const Scenario& scenario, int cell, const PoseGrid& grid);

/// Private-stream WMMSE surrogate of cell k (ES k and its UEs) for fixed mu, omega.
double cell_surrogate(const Scenario& scenario, const ChannelSet& channels, const DesignVariables& vars,
                      const WmmseState& wmmse, int cell);

/// Common-rate ceilings and QoS floors of cell k under the current SINRs.
bool cell_rates_feasible(const Scenario& scenario, const ChannelSet& channels, const DesignVariables& vars,
                         const RatePlan& plan, int cell, double tol = 1e-9);

struct CellSearchResult {
  Frame pose;
  double surrogate = 0.0;
  int evaluated = 0;  // candidates that passed every filter
};

/// Best admissible pose for one cell. With `inject_current` the current
/// orientation is tried at every axis sample and the current pose is appended
/// last. Throws NoFeasibleCandidate.
CellSearchResult search_cell(const Scenario& scenario, const ChannelSet& channels, const DesignVariables& vars,
                             const WmmseState& wmmse, const RatePlan& plan, int cell, const PoseGrid& grid,
                             bool inject_current = true);

/// search_cell over every cell.
std::vector<Frame> exhaustive_search(const Scenario& scenario, const ChannelSet& channels,
                                     const DesignVariables& vars, const WmmseState& wmmse, const RatePlan& plan,
                                     const PoseGrid& grid, bool inject_current = true);

}  // namespace sagin
