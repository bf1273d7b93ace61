#pragma once

#include <variant>

#include "sagin/signal_model.hpp"

namespace sagin {

struct RateBounds {
  double es_common_capacity = 0.0;  // min_k log2(1 + gamma^{E,c}_k)
  RVec ue_common_capacity;          // K: min_l log2(1 + gamma^{U,c}_{k,l})
  RVec es_floor;                    // K
  RMat ue_floor;                    // K x L
};

RateBounds compute_bounds(const SinrSet& sinrs, const Scenario& scenario);

/// Pool that could not meet its floors: -1 for the satellite, k for BS k.
struct Infeasible {
  int pool;
};

using AllocationResult = std::variant<RatePlan, Infeasible>;

/// Floors first, then the whole slack of each pool to its heaviest user
/// (lowest index on ties). `weights` is K x (L+1) as in Scenario.
AllocationResult greedy_allocate(const RateBounds& bounds, const RMat& weights);

}  // namespace sagin
