#include "sagin/rate_allocation.hpp"

#include <algorithm>
#include <cmath>

namespace sagin {

RateBounds compute_bounds(const SinrSet& g, const Scenario& s) {
  const int K = s.K(), L = s.L();
  auto lg = [](double x) { return std::log2(1.0 + x); };
  RateBounds b;
  b.es_common_capacity = K ? lg(g.es_common.minCoeff()) : 0.0;
  b.ue_common_capacity.resize(K);
  b.es_floor.resize(K);
  b.ue_floor.resize(K, L);
  for (int k = 0; k < K; ++k) {
    b.ue_common_capacity(k) = L ? lg(g.ue_common.row(k).minCoeff()) : 0.0;
    b.es_floor(k) = std::max(0.0, s.rmin_es - lg(g.es_private(k)));
    for (int l = 0; l < L; ++l) b.ue_floor(k, l) = std::max(0.0, s.rmin_ue - lg(g.ue_private(k, l)));
  }
  return b;
}

namespace {

int heaviest(const RVec& w) {
  int best = 0;
  for (int i = 1; i < w.size(); ++i)
    if (w(i) > w(best)) best = i;
  return best;
}

}  // namespace

AllocationResult greedy_allocate(const RateBounds& b, const RMat& weights) {
  const int K = static_cast<int>(b.es_floor.size());
  const int L = static_cast<int>(b.ue_floor.cols());
  RatePlan plan{b.es_floor, b.ue_floor};

  const double es_slack = b.es_common_capacity - b.es_floor.sum();
  if (b.es_floor.sum() > b.es_common_capacity) return Infeasible{-1};
  if (K > 0) plan.es(heaviest(weights.col(0))) += es_slack;

  for (int k = 0; k < K; ++k) {
    if (L == 0) continue;
    const double used = b.ue_floor.row(k).sum();
    if (used > b.ue_common_capacity(k)) return Infeasible{k};
    plan.ue(k, heaviest(weights.row(k).tail(L).transpose())) += b.ue_common_capacity(k) - used;
  }
  return plan;
}

}  // namespace sagin
