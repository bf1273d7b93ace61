// Acceptance suite: prints one PASS/FAIL line per criterion.
// Usage: acceptance [all | 1-5 | 6-9 | 10]

#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "sagin/harness.hpp"
#include "sagin/ris_admm.hpp"
#include "support.hpp"

using namespace sagin;
using namespace testing_support;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Dims random_dims(std::mt19937_64& rng, int nmax, int nrmax) {
  std::uniform_int_distribution<int> k(1, 3), l(1, 2), n(1, nmax), r(1, nrmax);
  return {k(rng), l(rng), n(rng), n(rng), r(rng)};
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Dims d = random_dims(rng, 16, 16);
    const Scenario s = abstract_scenario(rng, d.K, d.L);
    const ChannelSet ch = random_channels(rng, d);
    const DesignVariables v = random_vars(rng, s, d);
    const EffectiveChannels eff = effective_channels(ch, v.phases);
    const SinrSet g = compute_sinrs(s, ch, eff, v);
    const RMat e = mse_terms(s, ch, eff, v, update_receivers(s, ch, eff, v));
    for (int k = 0; k < d.K; ++k) {
      worst = std::max(worst, rel_err(-std::log2(e(k, 0)), std::log2(1 + g.es_private(k))));
      for (int l = 0; l < d.L; ++l)
        worst = std::max(worst, rel_err(-std::log2(e(k, l + 1)), std::log2(1 + g.ue_private(k, l))));
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-9 && secs < 10.0,
         fmt("rate/WMMSE identity on 1000 instances: worst rel err %.2e, %.2f s", worst, secs));
}

void criterion2() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Dims d = random_dims(rng, 4, 4);
    const Scenario s = abstract_scenario(rng, d.K, d.L);
    const ChannelSet ch = random_channels(rng, d);
    const DesignVariables v = random_vars(rng, s, d);
    const SinrSet g = compute_sinrs(s, ch, effective_channels(ch, v.phases), v);
    std::vector<CVec> ht;
    std::vector<std::vector<CVec>> ft;
    oracle_effective_all(ch, zeta_of(v.phases), ht, ft);
    const OracleSinrs o = oracle_sinrs(s, ht, ft, ch, v);
    for (int k = 0; k < d.K; ++k) {
      worst = std::max({worst, rel_err(g.es_common(k), o.es_c[k]), rel_err(g.es_private(k), o.es_p[k])});
      for (int l = 0; l < d.L; ++l)
        worst = std::max({worst, rel_err(g.ue_common(k, l), o.ue_c[k][l]), rel_err(g.ue_private(k, l), o.ue_p[k][l])});
    }
  }
  report(2, worst <= 1e-10, fmt("SINR vs scalar oracle on 200 instances: worst rel err %.2e", worst));
}

void criterion3() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> kd(1, 4), ld(1, 3);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 0.0;
  int verdict_mismatch = 0, infeasible = 0;
  for (int t = 0; t < 500; ++t) {
    const int K = kd(rng), L = ld(rng);
    RateBounds b;
    b.es_floor.resize(K);
    b.ue_floor.resize(K, L);
    b.ue_common_capacity.resize(K);
    for (int k = 0; k < K; ++k) {
      b.es_floor(k) = ud(rng) < 0.3 ? 0.0 : 0.6 * ud(rng);
      b.ue_common_capacity(k) = 2.0 * ud(rng);
      for (int l = 0; l < L; ++l) b.ue_floor(k, l) = ud(rng) < 0.3 ? 0.0 : 0.4 * ud(rng);
    }
    b.es_common_capacity = 3.0 * ud(rng);
    RMat w(K, L + 1);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j <= L; ++j) w(k, j) = ud(rng) < 0.1 ? 0.5 : ud(rng);  // some ties

    std::vector<double> f, a;
    for (int k = 0; k < K; ++k) {
      f.push_back(b.es_floor(k));
      a.push_back(w(k, 0));
    }
    PoolOracle sat = lp_pool_oracle(f, a, b.es_common_capacity);
    bool feasible = sat.feasible;
    double best = sat.value;
    for (int k = 0; k < K && feasible; ++k) {
      std::vector<double> fk, ak;
      for (int l = 0; l < L; ++l) {
        fk.push_back(b.ue_floor(k, l));
        ak.push_back(w(k, l + 1));
      }
      const PoolOracle o = lp_pool_oracle(fk, ak, b.ue_common_capacity(k));
      feasible = o.feasible;
      best += o.value;
    }
    const auto r = greedy_allocate(b, w);
    const bool got = std::holds_alternative<RatePlan>(r);
    if (got != feasible) {
      ++verdict_mismatch;
      continue;
    }
    if (!feasible) {
      ++infeasible;
      continue;
    }
    const RatePlan& p = std::get<RatePlan>(r);
    double value = 0.0;
    for (int k = 0; k < K; ++k) {
      value += w(k, 0) * p.es(k);
      for (int l = 0; l < L; ++l) value += w(k, l + 1) * p.ue(k, l);
    }
    worst = std::max(worst, std::abs(value - best));
  }
  report(3, worst <= 1e-9 && verdict_mismatch == 0,
         fmt("greedy vs LP oracle on 500 bound sets: worst gap %.2e, verdict mismatches %.0f, infeasible %.0f", worst,
             verdict_mismatch, infeasible));
}

void criterion4() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> nd(1, 16);
  double worst = -1e300;
  for (int t = 0; t < 10000; ++t) {
    const int n = nd(rng);
    const CVec h = random_cvec(rng, n), a = random_cvec(rng, n), w = random_cvec(rng, n);
    worst = std::max(worst, taylor_affine(h, a)(w) - std::norm(h.dot(w)));
  }
  // Phase-side anchors: the Taylor-anchored constraint is never looser than the exact one.
  double worst_zeta = -1e300;
  int samples = 0;
  while (samples < 10000) {
    const Dims d = random_dims(rng, 4, 8);
    Scenario s = abstract_scenario(rng, d.K, d.L);
    s.rmin_es = s.rmin_ue = 0.5;
    const ChannelSet ch = random_channels(rng, d);
    const DesignVariables v = random_vars(rng, s, d);
    RatePlan plan = RatePlan::zeros(d.K, d.L);
    plan.es.setConstant(0.05);
    plan.ue.setConstant(0.05);
    for (int k = 0; k < d.K; ++k)
      for (const PhaseConstraint& c : phase_constraints(s, ch, v, plan, k))
        for (int r = 0; r < 20; ++r, ++samples) {
          const CVec z = random_cvec(rng, d.NR), anchor = random_cvec(rng, d.NR);
          const double exact = c.true_slack(z);
          worst_zeta = std::max(worst_zeta, (exact - c.slack(z, anchor)) / std::max(1.0, std::abs(exact)));
        }
  }
  report(4, worst <= 1e-12 && worst_zeta <= 1e-12,
         fmt("Taylor under-estimation: beams max excess %.2e over 1e4 draws; phase anchors max excess %.2e over %.0f "
             "draws",
             worst, worst_zeta, samples));
}

void criterion5() {
  std::mt19937_64 rng(505);
  double worst_zeta = 0.0, worst_Z = 0.0, worst_form = 0.0;
  int capped = 0;
  for (int t = 0; t < 50; ++t) {
    const Dims d = random_dims(rng, 6, 12);
    Scenario s = abstract_scenario(rng, d.K, d.L);
    s.rmin_es = s.rmin_ue = 0.0;  // random beams need not meet any floor
    const ChannelSet ch = random_channels(rng, d);
    const DesignVariables v = random_vars(rng, s, d);
    const WmmseState wm = refresh_wmmse(s, ch, effective_channels(ch, v.phases), v);
    const PhaseQuadraticForm form = assemble_form(s, ch, v, wm);
    for (int r = 0; r < 20; ++r) {
      std::vector<CVec> z;
      for (int k = 0; k < d.K; ++k) z.push_back(random_unit_modulus(rng, d.NR));
      std::vector<CVec> ht;
      std::vector<std::vector<CVec>> ft;
      oracle_effective_all(ch, z, ht, ft);
      worst_form = std::max(worst_form, rel_err(form.evaluate(z), oracle_surrogate(s, ht, ft, ch, v, wm)));
    }
    const AdmmResult res = admm_optimize(s, ch, v, wm, RatePlan::zeros(d.K, d.L));
    if (res.iterations >= AdmmOptions{}.max_iter) ++capped;
    for (int k = 0; k < d.K; ++k)
      for (int i = 0; i < d.NR; ++i) {
        worst_zeta = std::max(worst_zeta, std::abs(std::abs(res.state.zeta[k](i)) - 1.0));
        worst_Z = std::max(worst_Z, std::abs(std::abs(res.state.Z[k](i)) - 1.0));
      }
  }
  report(5, worst_zeta <= 1e-4 && worst_Z <= 1e-12 && worst_form <= 1e-9,
         fmt("ADMM on 50 instances: max ||zeta|-1| %.2e, max ||Z|-1| %.2e, form rel err %.2e, runs at max_iter %.0f",
             worst_zeta, worst_Z, worst_form, capped));
}

// ---------------------------------------------------------------------------

struct RunKey {
  Scheme scheme;
  double power_dbm;
  int L;
  std::uint64_t seed;
  bool operator<(const RunKey& o) const {
    return std::tie(scheme, power_dbm, L, seed) < std::tie(o.scheme, o.power_dbm, o.L, o.seed);
  }
};

struct RunOutcome {
  bool ok = false;
  std::string error;
  double wsr = 0.0;
  bool monotone = true;
  std::size_t iterations = 0;
  bool feasible = false;
  double seconds = 0.0;
};

RunOutcome run_one(const RunKey& key) {
  RunOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioParams p;
  p.bs_power_dbm = key.power_dbm;
  p.num_ues_per_cell = key.L;
  try {
    const Scenario s = generate_scenario(p, key.seed);
    OptimizeOptions opt;
    opt.scheme = key.scheme;
    const OptimizeResult r = optimize(s, key.seed, opt);
    out.ok = true;
    out.wsr = r.weighted_sum_rate;
    out.iterations = r.trace.size();
    for (std::size_t i = 1; i < r.trace.size(); ++i)
      if (r.trace[i].weighted_sum_rate < r.trace[i - 1].weighted_sum_rate - 1e-6) out.monotone = false;
    out.feasible = r.feasibility.all_passed();
  } catch (const Error& e) {
    out.error = e.what();
  }
  out.seconds = seconds_since(t0);
  return out;
}

std::map<RunKey, RunOutcome> run_all(const std::vector<RunKey>& keys) {
  std::vector<RunOutcome> outs(keys.size());
  std::atomic<std::size_t> next{0};
  const unsigned n = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < keys.size();) outs[i] = run_one(keys[i]);
    });
  for (auto& t : pool) t.join();
  std::map<RunKey, RunOutcome> m;
  for (std::size_t i = 0; i < keys.size(); ++i) m[keys[i]] = outs[i];
  return m;
}

void criteria6to9() {
  const int nseeds = 20;
  const double powers[] = {20, 25, 30, 35};
  const int ues[] = {1, 2, 3};
  const Scheme schemes[] = {Scheme::Proposed, Scheme::NoRis, Scheme::NoRsma};

  // Criterion 6 on its own clock.
  std::vector<RunKey> base;
  for (int s = 0; s < nseeds; ++s) base.push_back({Scheme::Proposed, 30.0, 2, std::uint64_t(s)});
  const auto t0 = std::chrono::steady_clock::now();
  std::map<RunKey, RunOutcome> runs = run_all(base);
  const double secs6 = seconds_since(t0);
  {
    bool ok = true;
    std::size_t max_iter = 0;
    int failed = 0;
    for (const auto& k : base) {
      const RunOutcome& o = runs[k];
      if (!o.ok) ++failed;
      ok = ok && o.ok && o.monotone && o.iterations <= 50;
      max_iter = std::max(max_iter, o.iterations);
    }
    report(6, ok && secs6 <= 600.0,
           fmt("20 seeds, default scenario: all monotone and <= 50 iterations (max %.0f), %.0f failed runs, %.1f s",
               double(max_iter), failed, secs6));
  }

  std::vector<RunKey> rest;
  for (Scheme sc : schemes)
    for (int s = 0; s < nseeds; ++s) {
      for (double p : powers)
        if (!(sc == Scheme::Proposed && p == 30.0)) rest.push_back({sc, p, 2, std::uint64_t(s)});
      for (int L : ues)
        if (L != 2) rest.push_back({sc, 30.0, L, std::uint64_t(s)});
    }
  for (auto& [k, v] : run_all(rest)) runs[k] = v;

  auto mean = [&](Scheme sc, double p, int L, int* missing) {
    double sum = 0.0;
    int n = 0;
    for (int s = 0; s < nseeds; ++s) {
      const RunOutcome& o = runs[{sc, p, L, std::uint64_t(s)}];
      if (!o.ok) {
        ++*missing;
        continue;
      }
      sum += o.wsr;
      ++n;
    }
    return n ? sum / n : 0.0;
  };

  // Criterion 7.
  {
    bool ok = true;
    std::ostringstream detail;
    int missing = 0;
    for (double p : powers) {
      const double mp = mean(Scheme::Proposed, p, 2, &missing);
      const double mr = mean(Scheme::NoRis, p, 2, &missing);
      const double mn = mean(Scheme::NoRsma, p, 2, &missing);
      int dom_ris = 0, dom_rsma = 0;
      for (int s = 0; s < nseeds; ++s) {
        const RunOutcome& a = runs[{Scheme::Proposed, p, 2, std::uint64_t(s)}];
        const RunOutcome& b = runs[{Scheme::NoRis, p, 2, std::uint64_t(s)}];
        const RunOutcome& c = runs[{Scheme::NoRsma, p, 2, std::uint64_t(s)}];
        if (a.ok && b.ok && a.wsr >= b.wsr) ++dom_ris;
        if (a.ok && c.ok && a.wsr >= c.wsr) ++dom_rsma;
      }
      const bool here = mp >= mr && mp >= mn && dom_ris >= 0.9 * nseeds && dom_rsma >= 0.9 * nseeds;
      ok = ok && here;
      char buf[200];
      std::snprintf(buf, sizeof buf, " [%g dBm: proposed %.4f no_ris %.4f no_rsma %.4f; wins %d/%d vs no_ris, %d/%d vs no_rsma]",
                    p, mp, mr, mn, dom_ris, nseeds, dom_rsma, nseeds);
      detail << buf;
    }
    report(7, ok && missing == 0, "scheme ordering over the power sweep:" + detail.str());
  }

  // Criterion 8.
  {
    bool ok = true;
    std::ostringstream detail;
    int missing = 0;
    for (Scheme sc : schemes) {
      double prev = -1e300;
      detail << " [" << to_string(sc) << " power:";
      for (double p : powers) {
        const double m = mean(sc, p, 2, &missing);
        ok = ok && m > prev;
        prev = m;
        detail << ' ' << fmt("%.4f", m);
      }
      prev = 1e300;
      detail << "; L:";
      for (int L : ues) {
        const double m = mean(sc, 30.0, L, &missing);
        ok = ok && m < prev;
        prev = m;
        detail << ' ' << fmt("%.4f", m);
      }
      detail << ']';
    }
    report(8, ok && missing == 0, "mean-rate trends (increasing in power, decreasing in L):" + detail.str());
  }

  // Criterion 9.
  {
    int total = 0, certified = 0, failed = 0;
    for (const auto& [k, o] : runs) {
      ++total;
      if (!o.ok) ++failed;
      if (o.ok && o.feasible) ++certified;
    }
    report(9, certified == total,
           fmt("feasibility certified on %.0f of %.0f runs (%.0f runs raised an error)", certified, total, failed));
  }
}

// ---------------------------------------------------------------------------

void criterion10() {
  ExperimentConfig cfg;
  cfg.seeds = {0, 1, 2};
  cfg.schemes = {Scheme::Proposed, Scheme::NoRsma, Scheme::NoRis};
  cfg.sweep = {SweepKind::BsPower, {20, 35}};
  cfg.optimizer.max_outer = 6;
  std::ostringstream a, b, da, db;
  cfg.workers = 0;
  run_experiment(cfg, a, nullptr, da);
  cfg.workers = 1;
  run_experiment(cfg, b, nullptr, db);
  std::ostringstream c, dc;
  cfg.workers = 3;
  run_experiment(cfg, c, nullptr, dc);
  const bool same = a.str() == b.str() && b.str() == c.str();
  report(10, same && !a.str().empty(),
         std::string(same ? "bit-identical CSV" : "CSV differs") +
             fmt(" over three repeated runs (18 cells, 0/1/3 workers), %.0f bytes", double(a.str().size())));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string group = argc > 1 ? argv[1] : "all";
  if (group != "all" && group != "1-5" && group != "6-9" && group != "10") {
    std::fprintf(stderr, "usage: acceptance [all | 1-5 | 6-9 | 10]\n");
    return 2;
  }
  if (group == "all" || group == "1-5") {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
  }
  if (group == "all" || group == "6-9") criteria6to9();
  if (group == "all" || group == "10") criterion10();
  return failures ? 1 : 0;
}
