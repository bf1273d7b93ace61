#pragma once

#include "sagin/beamforming_sca.hpp"
#include "sagin/convex_kernel.hpp"
#include "sagin/signal_model.hpp"

namespace sagin {

/// g(zeta) = m + sum_k sum_j |zeta_k^T c_{k,j}|^2 + sum_k sum_j Re{zeta_k^T d_{k,j}}
struct PhaseQuadraticForm {
  double m = 0.0;
  std::vector<std::vector<CVec>> c;  // per cell, K + (K+1) L vectors
  std::vector<std::vector<CVec>> d;  // per cell, (K+1)(L+1) vectors

  double evaluate(const std::vector<CVec>& zeta) const;
  /// Contribution of cell k only (m excluded).
  double evaluate_cell(int k, const CVec& zeta) const;
};

PhaseQuadraticForm assemble_form(const Scenario& scenario, const ChannelSet& channels, const DesignVariables& vars,
                                 const WmmseState& wmmse);

/// The phase-dependent surrogate written out term by term, with Psi_k = diag(zeta_k).
double phase_objective(const Scenario& scenario, const ChannelSet& channels, const DesignVariables& vars,
                       const WmmseState& wmmse, const std::vector<CVec>& zeta);

/// One rate constraint on zeta_k:
/// gamma (sum_i |a_i + zeta^T x_i|^2 + fixed) <= rhs, where rhs is either the
/// constant `rhs_const` or, when `taylor` holds, the Taylor under-estimator of
/// |a_t + zeta^T x_t|^2 at the anchor.
struct PhaseConstraint {
  double gamma = 0.0;
  std::vector<Complex> a;
  std::vector<CVec> x;
  double fixed = 0.0;  // zeta-independent powers plus noise
  bool taylor = false;
  Complex a_t;
  CVec x_t;
  double rhs_const = 0.0;

  /// lhs - rhs with the Taylor term anchored at `anchor`.
  double slack(const CVec& zeta, const CVec& anchor) const;
  /// lhs - rhs with the exact right-hand side.
  double true_slack(const CVec& zeta) const;
};

/// Rate constraints of cell k with positive Gamma.
std::vector<PhaseConstraint> phase_constraints(const Scenario& scenario, const ChannelSet& channels,
                                               const DesignVariables& vars, const RatePlan& plan, int cell);

struct AdmmState {
  std::vector<CVec> zeta;
  std::vector<CVec> Z;
  std::vector<CVec> Y;
  double rho = 1.0;
};

/// argmin over zeta_k of scale * g_k(zeta) + rho/2 ||zeta - target||^2 subject to
/// `constraints` Taylor-anchored at `anchor`. Throws SubproblemInfeasible.
CVec zeta_update(const PhaseQuadraticForm& form, int cell, double scale, const CVec& target, double rho,
                 const std::vector<PhaseConstraint>& constraints, const CVec& anchor);

/// Elementwise x / |x|, with 0 mapped to 1.
std::vector<CVec> project_unit_modulus(const std::vector<CVec>& zeta_plus_y);
CVec project_unit_modulus(const CVec& zeta_plus_y);

struct AdmmOptions {
  double rho = 1.0;
  double tol_primal = 1e-4;
  double tol_dual = 1e-4;
  int max_iter = 300;
  int stall_window = 20;
  double rho_cap_factor = 64.0;
};

struct AdmmResult {
  std::vector<RVec> phases;  // in [0, 2pi)
  AdmmState state;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

AdmmResult admm_optimize(const Scenario& scenario, const ChannelSet& channels, const DesignVariables& vars,
                         const WmmseState& wmmse, const RatePlan& plan, const AdmmOptions& options = {});

RVec phases_of(const CVec& z);

}  // namespace sagin
