#pragma once

#include "sagin/channel.hpp"
#include "sagin/scenario.hpp"

namespace sagin {

/// Every scalar channel-beam product the rate expressions need.
struct LinkProducts {
  CMat hw;               // K x (K+1): h~_k^H w^S_j, column 0 is the common beam
  CMat uw;               // K x (L+1): u_k^H w^B_{k,j}, column 0 is the common beam
  std::vector<CMat> vw;  // per cell, L x (L+1): v_{k,l}^H w^B_{k,j}
  std::vector<CMat> fw;  // per cell, L x (K+1): f~_{k,l}^H w^S_j
};

LinkProducts link_products(const ChannelSet& channels, const EffectiveChannels& effective, const DesignVariables& vars);

struct SinrSet {
  RVec es_common;   // K
  RVec es_private;  // K
  RMat ue_common;   // K x L
  RMat ue_private;  // K x L
};

struct Rates {
  RVec es;  // K
  RMat ue;  // K x L
};

/// Column 0 refers to the ES stream, column l to UE l.
struct WmmseState {
  CMat mu;
  RMat omega;
  RMat mse;
};

SinrSet sinrs_from_products(const Scenario& scenario, const LinkProducts& p);
SinrSet compute_sinrs(const Scenario& scenario, const ChannelSet& channels, const EffectiveChannels& effective,
                      const DesignVariables& vars);

Rates total_rates(const SinrSet& sinrs, const RatePlan& plan);
double weighted_sum_rate(const Scenario& scenario, const Rates& rates);

/// Received power at each private-stream receiver, common stream excluded, noise included.
RMat received_power(const Scenario& scenario, const LinkProducts& p);

RMat mse_from_products(const Scenario& scenario, const LinkProducts& p, const CMat& mu);
RMat mse_terms(const Scenario& scenario, const ChannelSet& channels, const EffectiveChannels& effective,
               const DesignVariables& vars, const CMat& mu);

CMat receivers_from_products(const Scenario& scenario, const LinkProducts& p);
CMat update_receivers(const Scenario& scenario, const ChannelSet& channels, const EffectiveChannels& effective,
                      const DesignVariables& vars);

/// omega = 1/e; throws NonpositiveMse for e <= 0.
RMat update_weights(const RMat& mse);

/// sum alpha (omega e - ln omega).
double wmmse_objective(const Scenario& scenario, const RMat& omega, const RMat& mse);

/// MMSE receivers, their MSEs and the matching weights in one pass.
WmmseState refresh_wmmse(const Scenario& scenario, const ChannelSet& channels, const EffectiveChannels& effective,
                         const DesignVariables& vars);

}  // namespace sagin
