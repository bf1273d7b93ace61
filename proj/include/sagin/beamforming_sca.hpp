#pragma once

#include "sagin/convex_kernel.hpp"
#include "sagin/signal_model.hpp"

namespace sagin {

/// w |-> |h^H w*|^2 + 2 Re{conj(h^H w*) h^H (w - w*)}
struct TaylorAffine {
  CVec h;
  Complex anchor_value;  // h^H w*

  double operator()(const CVec& w) const;
};

TaylorAffine taylor_affine(const CVec& h, const CVec& w_anchor);

struct RsmaGammas {
  RVec es;          // K, may be negative
  RMat ue;          // K x L, may be negative
  double es_common; // >= 0
  RVec ue_common;   // K, >= 0
};

RsmaGammas rsma_gammas(const Scenario& scenario, const RatePlan& plan);

struct BeamOptions {
  /// Search only the span of the channels each transmitter can reach. Exact,
  /// since components outside that span change no received signal.
  bool reduce = true;
  /// Without rate splitting the common beams are fixed at zero.
  bool rsma = true;
  double solver_tolerance = 1e-7;
  int solver_max_iterations = 200;
};

/// Where each beam lives inside the real decision vector.
struct BeamLayout {
  int K = 0, L = 0;
  bool rsma = true;
  CMat sat_basis;              // N_S x r_S, orthonormal columns
  std::vector<CMat> bs_basis;  // per cell, N_B x r_k
  std::vector<int> sat_offset; // complex offset of satellite beam j (0 common, 1..K)
  std::vector<std::vector<int>> bs_offset;  // [k][j], j = 0 common, 1..L
  int complex_dim = 0;

  int dimension() const { return 2 * complex_dim; }
  RVec lift(const DesignVariables& vars) const;
  /// Writes the beams of `x` into `vars`, leaving everything else untouched.
  void unlift(const RVec& x, DesignVariables& vars) const;
};

BeamLayout make_layout(const Scenario& scenario, const ChannelSet& channels, const EffectiveChannels& effective,
                       const BeamOptions& options);

struct BeamSubproblem {
  ConvexProblem problem;
  BeamLayout layout;
};

/// The convex restriction of the beam block around `anchor`.
BeamSubproblem build_subproblem(const Scenario& scenario, const ChannelSet& channels,
                                const EffectiveChannels& effective, const WmmseState& wmmse, const RatePlan& plan,
                                const DesignVariables& anchor, const BeamOptions& options = {});

/// The beam-dependent part of the weighted MSE sum.
double beam_objective(const Scenario& scenario, const ChannelSet& channels, const EffectiveChannels& effective,
                      const DesignVariables& vars, const WmmseState& wmmse);

struct ScaResult {
  DesignVariables vars;
  std::vector<double> objective;  // f after every accepted iterate, starting with the input
  int solves = 0;
};

/// Re-anchors and re-solves until the relative decrease of f drops below `tol`.
/// Throws SubproblemInfeasible when the very first restriction cannot be solved.
ScaResult sca_optimize(const Scenario& scenario, const ChannelSet& channels, const EffectiveChannels& effective,
                       const DesignVariables& vars, const WmmseState& wmmse, const RatePlan& plan, double tol = 1e-5,
                       int max_outer = 20, const BeamOptions& options = {});

}  // namespace sagin
