#include "sagin/signal_model.hpp"

#include <cmath>

namespace sagin {

LinkProducts link_products(const ChannelSet& ch, const EffectiveChannels& eff, const DesignVariables& vars) {
  const int K = static_cast<int>(eff.h.size());
  const int L = K ? static_cast<int>(ch.v[0].size()) : 0;
  LinkProducts p;
  p.hw.resize(K, K + 1);
  p.uw.resize(K, L + 1);
  p.vw.assign(K, CMat(L, L + 1));
  p.fw.assign(K, CMat(L, K + 1));
  for (int k = 0; k < K; ++k) {
    p.hw(k, 0) = eff.h[k].dot(vars.w_sat_common);
    for (int j = 0; j < K; ++j) p.hw(k, j + 1) = eff.h[k].dot(vars.w_sat[j]);
    p.uw(k, 0) = ch.u[k].dot(vars.w_bs_common[k]);
    for (int j = 0; j < L; ++j) p.uw(k, j + 1) = ch.u[k].dot(vars.w_bs[k][j]);
    for (int l = 0; l < L; ++l) {
      p.vw[k](l, 0) = ch.v[k][l].dot(vars.w_bs_common[k]);
      for (int j = 0; j < L; ++j) p.vw[k](l, j + 1) = ch.v[k][l].dot(vars.w_bs[k][j]);
      p.fw[k](l, 0) = eff.f[k][l].dot(vars.w_sat_common);
      for (int j = 0; j < K; ++j) p.fw[k](l, j + 1) = eff.f[k][l].dot(vars.w_sat[j]);
    }
  }
  return p;
}

namespace {

struct StreamPowers {
  double desired;       // private stream
  double common;        // own-transmitter common stream
  double interference;  // everything else except the common stream, noise included
};

StreamPowers es_powers(const Scenario& s, const LinkProducts& p, int k) {
  const int K = s.K(), L = s.L();
  StreamPowers out{std::norm(p.hw(k, k + 1)), std::norm(p.hw(k, 0)), s.noise_es[k]};
  for (int j = 0; j < K; ++j)
    if (j != k) out.interference += std::norm(p.hw(k, j + 1));
  for (int j = 0; j <= L; ++j) out.interference += std::norm(p.uw(k, j));
  return out;
}

StreamPowers ue_powers(const Scenario& s, const LinkProducts& p, int k, int l) {
  const int K = s.K(), L = s.L();
  StreamPowers out{std::norm(p.vw[k](l, l + 1)), std::norm(p.vw[k](l, 0)), s.noise_ue[k][l]};
  for (int j = 0; j < L; ++j)
    if (j != l) out.interference += std::norm(p.vw[k](l, j + 1));
  for (int j = 0; j <= K; ++j) out.interference += std::norm(p.fw[k](l, j));
  return out;
}

}  // namespace

SinrSet sinrs_from_products(const Scenario& s, const LinkProducts& p) {
  const int K = s.K(), L = s.L();
  SinrSet out{RVec(K), RVec(K), RMat(K, L), RMat(K, L)};
  for (int k = 0; k < K; ++k) {
    const auto e = es_powers(s, p, k);
    out.es_private(k) = e.desired / e.interference;
    out.es_common(k) = e.common / (e.interference + e.desired);
    for (int l = 0; l < L; ++l) {
      const auto u = ue_powers(s, p, k, l);
      out.ue_private(k, l) = u.desired / u.interference;
      out.ue_common(k, l) = u.common / (u.interference + u.desired);
    }
  }
  return out;
}

SinrSet compute_sinrs(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff,
                      const DesignVariables& vars) {
  return sinrs_from_products(s, link_products(ch, eff, vars));
}

Rates total_rates(const SinrSet& g, const RatePlan& plan) {
  Rates r;
  r.es = plan.es.array() + (1.0 + g.es_private.array()).log() / std::log(2.0);
  r.ue = plan.ue.array() + (1.0 + g.ue_private.array()).log() / std::log(2.0);
  return r;
}

double weighted_sum_rate(const Scenario& s, const Rates& r) {
  double total = 0.0;
  for (int k = 0; k < s.K(); ++k) {
    total += s.weights(k, 0) * r.es(k);
    for (int l = 0; l < s.L(); ++l) total += s.weights(k, l + 1) * r.ue(k, l);
  }
  return total;
}

RMat received_power(const Scenario& s, const LinkProducts& p) {
  RMat t(s.K(), s.L() + 1);
  for (int k = 0; k < s.K(); ++k) {
    const auto e = es_powers(s, p, k);
    t(k, 0) = e.desired + e.interference;
    for (int l = 0; l < s.L(); ++l) {
      const auto u = ue_powers(s, p, k, l);
      t(k, l + 1) = u.desired + u.interference;
    }
  }
  return t;
}

namespace {

Complex desired_product(const LinkProducts& p, int k, int j) {
  return j == 0 ? p.hw(k, k + 1) : p.vw[k](j - 1, j);
}

}  // namespace

RMat mse_from_products(const Scenario& s, const LinkProducts& p, const CMat& mu) {
  const RMat t = received_power(s, p);
  RMat e(s.K(), s.L() + 1);
  for (int k = 0; k < s.K(); ++k)
    for (int j = 0; j <= s.L(); ++j)
      e(k, j) = std::norm(mu(k, j)) * t(k, j) - 2.0 * std::real(mu(k, j) * desired_product(p, k, j)) + 1.0;
  return e;
}

RMat mse_terms(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff, const DesignVariables& vars,
               const CMat& mu) {
  return mse_from_products(s, link_products(ch, eff, vars), mu);
}

CMat receivers_from_products(const Scenario& s, const LinkProducts& p) {
  const RMat t = received_power(s, p);
  CMat mu(s.K(), s.L() + 1);
  for (int k = 0; k < s.K(); ++k)
    for (int j = 0; j <= s.L(); ++j) mu(k, j) = std::conj(desired_product(p, k, j)) / t(k, j);
  return mu;
}

CMat update_receivers(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff,
                      const DesignVariables& vars) {
  return receivers_from_products(s, link_products(ch, eff, vars));
}

RMat update_weights(const RMat& mse) {
  if ((mse.array() <= 0.0).any()) throw NonpositiveMse("update_weights: MSE must be positive");
  return mse.cwiseInverse();
}

double wmmse_objective(const Scenario& s, const RMat& omega, const RMat& mse) {
  return (s.weights.array() * (omega.array() * mse.array() - omega.array().log())).sum();
}

WmmseState refresh_wmmse(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff,
                         const DesignVariables& vars) {
  const LinkProducts p = link_products(ch, eff, vars);
  WmmseState st;
  st.mu = receivers_from_products(s, p);
  // At the MMSE receiver e = 1 / (1 + SINR); this form avoids the cancellation
  // in 1 - |a|^2 / T when the SINR is large.
  const SinrSet g = sinrs_from_products(s, p);
  st.mse.resize(s.K(), s.L() + 1);
  st.mse.col(0) = (1.0 + g.es_private.array()).inverse();
  st.mse.rightCols(s.L()) = (1.0 + g.ue_private.array()).inverse();
  st.omega = update_weights(st.mse);
  return st;
}

}  // namespace sagin
