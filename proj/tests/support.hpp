#pragma once
// Random instances and independent reference computations shared by the tests.

#include <cmath>
#include <random>
#include <vector>

#include "sagin/beamforming_sca.hpp"
#include "sagin/channel.hpp"
#include "sagin/rate_allocation.hpp"
#include "sagin/signal_model.hpp"

namespace testing_support {

using namespace sagin;

inline CVec random_cvec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale / std::sqrt(2.0));
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
  return v;
}

inline CMat random_cmat(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale / std::sqrt(2.0));
  CMat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

inline CVec random_unit_modulus(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> ud(0.0, kTwoPi);
  CVec z(n);
  for (int i = 0; i < n; ++i) z(i) = std::polar(1.0, ud(rng));
  return z;
}

struct Dims {
  int K = 2, L = 1, NS = 3, NB = 3, NR = 2;
};

/// A scenario carrying only what the signal model and the solvers read.
inline Scenario abstract_scenario(std::mt19937_64& rng, int K, int L) {
  std::uniform_real_distribution<double> ud(0.1, 1.0);
  Scenario s;
  s.num_cells = K;
  s.num_ues_per_cell = L;
  s.wavelength = 0.01;
  s.noise_es.resize(K);
  s.noise_ue.assign(K, std::vector<double>(L));
  for (int k = 0; k < K; ++k) {
    s.noise_es[k] = 0.05 * ud(rng);
    for (int l = 0; l < L; ++l) s.noise_ue[k][l] = 0.05 * ud(rng);
  }
  s.weights.resize(K, L + 1);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j <= L; ++j) s.weights(k, j) = ud(rng);
  s.weights /= s.weights.sum();
  s.p_sat_max = 2.0;
  s.p_bs_max = 1.0;
  s.rmin_es = 0.1;
  s.rmin_ue = 0.1;
  return s;
}

inline ChannelSet random_channels(std::mt19937_64& rng, const Dims& d, bool reflections = true) {
  ChannelSet ch;
  for (int k = 0; k < d.K; ++k) {
    ch.h.push_back(random_cvec(rng, d.NS));
    ch.G.push_back(random_cmat(rng, d.NR, d.NS, 0.5));
    ch.g.push_back(reflections ? random_cvec(rng, d.NR, 0.5) : CVec::Zero(d.NR));
    ch.u.push_back(random_cvec(rng, d.NB, 0.3));
    std::vector<CVec> v, f, q;
    for (int l = 0; l < d.L; ++l) {
      v.push_back(random_cvec(rng, d.NB));
      f.push_back(random_cvec(rng, d.NS, 0.3));
      q.push_back(reflections ? random_cvec(rng, d.NR, 0.3) : CVec::Zero(d.NR));
    }
    ch.v.push_back(v);
    ch.f.push_back(f);
    ch.q.push_back(q);
  }
  ch.rain = RVec::Ones(d.K);
  return ch;
}

/// Random beams scaled so each budget is used to a random fraction.
inline DesignVariables random_vars(std::mt19937_64& rng, const Scenario& s, const Dims& d) {
  std::uniform_real_distribution<double> ud(0.2, 0.95);
  DesignVariables v;
  v.w_sat_common = random_cvec(rng, d.NS);
  double sat = v.w_sat_common.squaredNorm();
  for (int k = 0; k < d.K; ++k) {
    v.w_sat.push_back(random_cvec(rng, d.NS));
    sat += v.w_sat.back().squaredNorm();
  }
  const double fs = std::sqrt(ud(rng) * s.p_sat_max / sat);
  v.w_sat_common *= fs;
  for (auto& w : v.w_sat) w *= fs;
  for (int k = 0; k < d.K; ++k) {
    CVec c = random_cvec(rng, d.NB);
    std::vector<CVec> ws;
    double bs = c.squaredNorm();
    for (int l = 0; l < d.L; ++l) {
      ws.push_back(random_cvec(rng, d.NB));
      bs += ws.back().squaredNorm();
    }
    const double fb = std::sqrt(ud(rng) * s.p_bs_max / bs);
    v.w_bs_common.push_back(c * fb);
    for (auto& w : ws) w *= fb;
    v.w_bs.push_back(ws);
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);
    RVec p(d.NR);
    for (int i = 0; i < d.NR; ++i) p(i) = ph(rng);
    v.phases.push_back(p);
    v.ris_frames.push_back(Frame::identity());
  }
  v.rates = RatePlan::zeros(d.K, d.L);
  return v;
}

/// h~^H = h^H + g^H diag(zeta) G, built with an explicit diagonal matrix.
inline CVec oracle_effective(const CVec& h, const CVec& g, const CMat& G, const CVec& zeta) {
  const CMat psi = zeta.asDiagonal();
  const Eigen::RowVectorXcd row = h.adjoint() + g.adjoint() * psi * G;
  return row.adjoint();
}

inline double sq(Complex z) { return std::norm(z); }
inline Complex ip(const CVec& a, const CVec& b) {  // a^H b, written as a plain loop
  Complex s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += std::conj(a(i)) * b(i);
  return s;
}

struct OracleSinrs {
  std::vector<double> es_c, es_p;
  std::vector<std::vector<double>> ue_c, ue_p;
};

/// The four SINR expressions, summed term by term.
inline OracleSinrs oracle_sinrs(const Scenario& s, const std::vector<CVec>& ht,
                                const std::vector<std::vector<CVec>>& ft, const ChannelSet& ch,
                                const DesignVariables& v) {
  const int K = s.K(), L = s.L();
  OracleSinrs o;
  o.ue_c.assign(K, std::vector<double>(L));
  o.ue_p.assign(K, std::vector<double>(L));
  for (int k = 0; k < K; ++k) {
    double bs_at_es = sq(ip(ch.u[k], v.w_bs_common[k]));
    for (int j = 0; j < L; ++j) bs_at_es += sq(ip(ch.u[k], v.w_bs[k][j]));
    double all_sat = 0.0, others = 0.0;
    for (int j = 0; j < K; ++j) {
      const double t = sq(ip(ht[k], v.w_sat[j]));
      all_sat += t;
      if (j != k) others += t;
    }
    o.es_c.push_back(sq(ip(ht[k], v.w_sat_common)) / (all_sat + bs_at_es + s.noise_es[k]));
    o.es_p.push_back(sq(ip(ht[k], v.w_sat[k])) / (others + bs_at_es + s.noise_es[k]));
    for (int l = 0; l < L; ++l) {
      double sat_at_ue = sq(ip(ft[k][l], v.w_sat_common));
      for (int j = 0; j < K; ++j) sat_at_ue += sq(ip(ft[k][l], v.w_sat[j]));
      double all_bs = 0.0, other_bs = 0.0;
      for (int j = 0; j < L; ++j) {
        const double t = sq(ip(ch.v[k][l], v.w_bs[k][j]));
        all_bs += t;
        if (j != l) other_bs += t;
      }
      o.ue_c[k][l] = sq(ip(ch.v[k][l], v.w_bs_common[k])) / (all_bs + sat_at_ue + s.noise_ue[k][l]);
      o.ue_p[k][l] = sq(ip(ch.v[k][l], v.w_bs[k][l])) / (other_bs + sat_at_ue + s.noise_ue[k][l]);
    }
  }
  return o;
}

/// Effective channels through explicit diagonal phase matrices.
inline void oracle_effective_all(const ChannelSet& ch, const std::vector<CVec>& zeta, std::vector<CVec>& ht,
                                 std::vector<std::vector<CVec>>& ft) {
  ht.clear();
  ft.clear();
  for (std::size_t k = 0; k < ch.h.size(); ++k) {
    ht.push_back(oracle_effective(ch.h[k], ch.g[k], ch.G[k], zeta[k]));
    std::vector<CVec> row;
    for (std::size_t l = 0; l < ch.f[k].size(); ++l) row.push_back(oracle_effective(ch.f[k][l], ch.q[k][l], ch.G[k], zeta[k]));
    ft.push_back(row);
  }
}

inline std::vector<CVec> zeta_of(const std::vector<RVec>& phases) {
  std::vector<CVec> z;
  for (const auto& p : phases) {
    CVec c(p.size());
    for (int i = 0; i < p.size(); ++i) c(i) = std::polar(1.0, p(i));
    z.push_back(c);
  }
  return z;
}

/// The beam/phase surrogate sum alpha omega (|mu|^2 T - 2 Re{mu s}), evaluated
/// directly from explicit effective channels with plain loops.
inline double oracle_surrogate(const Scenario& s, const std::vector<CVec>& ht,
                               const std::vector<std::vector<CVec>>& ft, const ChannelSet& ch,
                               const DesignVariables& v, const WmmseState& wm) {
  const int K = s.K(), L = s.L();
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    double t = sq(ip(ch.u[k], v.w_bs_common[k]));
    for (int j = 0; j < L; ++j) t += sq(ip(ch.u[k], v.w_bs[k][j]));
    for (int j = 0; j < K; ++j) t += sq(ip(ht[k], v.w_sat[j]));
    const Complex mu = wm.mu(k, 0);
    total += s.weights(k, 0) * wm.omega(k, 0) * (std::norm(mu) * t - 2.0 * std::real(mu * ip(ht[k], v.w_sat[k])));
    for (int l = 0; l < L; ++l) {
      double tu = sq(ip(ft[k][l], v.w_sat_common));
      for (int j = 0; j < K; ++j) tu += sq(ip(ft[k][l], v.w_sat[j]));
      for (int j = 0; j < L; ++j) tu += sq(ip(ch.v[k][l], v.w_bs[k][j]));
      const Complex m = wm.mu(k, l + 1);
      total += s.weights(k, l + 1) * wm.omega(k, l + 1) *
               (std::norm(m) * tu - 2.0 * std::real(m * ip(ch.v[k][l], v.w_bs[k][l])));
    }
  }
  return total;
}

/// Continuous knapsack max sum a_i r_i, r >= floor, sum r <= cap, solved by
/// enumerating the vertices of the feasible polytope (one index takes the slack).
struct PoolOracle {
  bool feasible;
  double value;
};

inline PoolOracle lp_pool_oracle(const std::vector<double>& floors, const std::vector<double>& weights, double cap) {
  double base = 0.0, fsum = 0.0;
  for (std::size_t i = 0; i < floors.size(); ++i) {
    base += weights[i] * floors[i];
    fsum += floors[i];
  }
  if (fsum > cap) return {false, 0.0};
  double best = base;  // the vertex that leaves the slack unused
  for (std::size_t i = 0; i < floors.size(); ++i) best = std::max(best, base + weights[i] * (cap - fsum));
  return {true, best};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace testing_support
