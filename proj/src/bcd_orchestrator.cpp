#include "sagin/bcd_orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/QR>

namespace sagin {

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Proposed: return "proposed";
    case Scheme::NoRsma: return "no_rsma";
    case Scheme::NoRis: return "no_ris";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "proposed") return Scheme::Proposed;
  if (name == "no_rsma") return Scheme::NoRsma;
  if (name == "no_ris") return Scheme::NoRis;
  throw ConfigError("unknown scheme '" + name + "' (expected proposed, no_rsma or no_ris)");
}

// ---------------------------------------------------------------------------
// Feasibility

bool FeasibilityReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

const FeasibilityCheck& FeasibilityReport::get(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return c;
  throw Error("no feasibility check named " + id);
}

std::string FeasibilityReport::summary() const {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (i) os << ' ';
    os << checks[i].id << '=' << (checks[i].passed ? "ok" : "FAIL") << '(' << checks[i].margin << ')';
  }
  return os.str();
}

namespace {

constexpr double kRateTol = 1e-9;
constexpr double kPowerTol = 1e-8;

double beam_power(const CVec& c, const std::vector<CVec>& p) {
  double t = c.squaredNorm();
  for (const CVec& w : p) t += w.squaredNorm();
  return t;
}

}  // namespace

FeasibilityReport check_feasibility(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars) {
  const int K = s.K(), L = s.L();
  const RatePlan& plan = vars.rates;
  const SinrSet g = compute_sinrs(s, ch, effective_channels(ch, vars.phases), vars);
  const Rates r = total_rates(g, plan);
  FeasibilityReport rep;
  auto add = [&](const std::string& id, double margin, bool passed) { rep.checks.push_back({id, passed, margin}); };

  {
    double m = plan.es.size() ? plan.es.minCoeff() : 0.0;
    if (plan.ue.size()) m = std::min(m, plan.ue.minCoeff());
    add("P1.b", m, m >= -kRateTol);
  }
  {
    const double m = std::log2(1.0 + g.es_common.minCoeff()) - plan.es.sum();
    add("P1.c", m, m >= -kRateTol);
  }
  {
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k)
      if (L) m = std::min(m, std::log2(1.0 + g.ue_common.row(k).minCoeff()) - plan.ue.row(k).sum());
    if (!L) m = 0.0;
    add("P1.d", m, m >= -kRateTol);
  }
  {
    const double m = s.p_sat_max - beam_power(vars.w_sat_common, vars.w_sat);
    add("P1.e", m, m >= -kPowerTol * s.p_sat_max);
  }
  {
    double m = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int k = 0; k < K; ++k) {
      const double mk = s.p_bs_max - beam_power(vars.w_bs_common[k], vars.w_bs[k]);
      m = std::min(m, mk);
      ok = ok && mk >= -kPowerTol * s.p_bs_max;
    }
    add("P1.f", m, ok);
  }
  {
    double m = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const RVec& ph : vars.phases)
      for (Eigen::Index i = 0; i < ph.size(); ++i) {
        ok = ok && ph(i) >= 0.0 && ph(i) < kTwoPi;
        m = std::min({m, ph(i), kTwoPi - ph(i)});
      }
    add("P1.g", m, ok);
  }
  {
    double m = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const Frame& f : vars.ris_frames) {
      const Mat3& R = f.rotation;
      const double dev = std::max((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff(),
                                  std::abs(R.determinant() - 1.0));
      m = std::min(m, -dev);
      ok = ok && is_valid_rotation(R);
    }
    add("P1.h", m, ok);
  }
  {
    double m = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int k = 0; k < K; ++k) {
      const Vec3& t = vars.ris_frames[k].translation;
      const Box& b = s.uav_regions[k];
      const double inside = std::min((t - b.lo).minCoeff(), (b.hi - t).minCoeff());
      // Distance from the dish axis line, relative to the height range.
      const Vec3 p = s.es_axis_dirs[k];
      const Vec3 d = t - s.es_positions[k];
      const double off_axis = (d - d.dot(p) * p).norm();
      const bool axis_ok = off_axis <= 1e-6 * std::max(1.0, s.h_max);
      m = std::min({m, inside, -off_axis});
      ok = ok && b.contains(t) && axis_ok;
    }
    add("P1.i", m, ok);
  }
  {
    double m = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int k = 0; k < K; ++k) {
      const Frame& f = vars.ris_frames[k];
      const double zs = to_local(f, s.sat_position()).z(), ze = to_local(f, s.es_positions[k]).z();
      m = std::min({m, zs, ze});
      ok = ok && zs > 0.0 && ze > 0.0;
    }
    add("P1.j", m, ok);
  }
  {
    double m = (r.es.array() - s.rmin_es).minCoeff();
    if (L) m = std::min(m, (r.ue.array() - s.rmin_ue).minCoeff());
    add("P1.k", m, m >= -kRateTol);
  }
  return rep;
}

ChannelSet scheme_channels(const Scenario& s, const std::vector<Frame>& frames, const RVec& rain, Scheme scheme) {
  ChannelSet ch = build_channels(s, frames, rain);
  if (scheme == Scheme::NoRis) zero_reflections(ch);
  return ch;
}

// ---------------------------------------------------------------------------
// Initialization

namespace {

CVec unit_or_zero(const CVec& v) {
  const double n = v.norm();
  return n > 0.0 ? CVec(v / n) : CVec(v);
}

/// Component of `v` orthogonal to the columns of `others`.
CVec project_out(const CVec& v, const std::vector<CVec>& others) {
  if (others.empty()) return v;
  CMat A(v.size(), static_cast<Eigen::Index>(others.size()));
  for (std::size_t i = 0; i < others.size(); ++i) A.col(static_cast<Eigen::Index>(i)) = others[i];
  Eigen::ColPivHouseholderQR<CMat> qr(A);
  const CMat Q = qr.householderQ() * CMat::Identity(v.size(), qr.rank());
  return v - Q * (Q.adjoint() * v);
}

/// Directions only; powers are assigned afterwards.
struct Directions {
  CVec sat_common;
  std::vector<CVec> sat;
  std::vector<CVec> bs_common;
  CellVectors bs;
};

Directions matched_filters(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff) {
  const int K = s.K(), L = s.L();
  Directions d;
  CVec sum = CVec::Zero(s.sat_array.size());
  for (int k = 0; k < K; ++k) {
    d.sat.push_back(unit_or_zero(eff.h[k]));
    sum += d.sat.back();
  }
  d.sat_common = unit_or_zero(sum);
  for (int k = 0; k < K; ++k) {
    CVec bsum = CVec::Zero(s.bs_array.size());
    std::vector<CVec> row;
    for (int l = 0; l < L; ++l) {
      row.push_back(unit_or_zero(ch.v[k][l]));
      bsum += row.back();
    }
    d.bs.push_back(row);
    d.bs_common.push_back(unit_or_zero(bsum));
  }
  return d;
}

/// BS private beams with the other UEs of the cell and the ES projected out.
Directions bs_zero_forcing(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff) {
  const int K = s.K(), L = s.L();
  Directions d = matched_filters(s, ch, eff);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      std::vector<CVec> others{ch.u[k]};
      for (int j = 0; j < L; ++j)
        if (j != l) others.push_back(ch.v[k][j]);
      const CVec p = unit_or_zero(project_out(ch.v[k][l], others));
      if (p.norm() > 0) d.bs[k][l] = p;
    }
  for (int k = 0; k < K; ++k) {
    const CVec p = unit_or_zero(project_out(d.bs_common[k], {ch.u[k]}));
    if (p.norm() > 0) d.bs_common[k] = p;
  }
  return d;
}

DesignVariables with_powers(const Scenario& s, const Directions& d, bool rsma, double sat_common_share,
                            double bs_common_share, const std::vector<Frame>& frames) {
  const int K = s.K(), L = s.L();
  DesignVariables v;
  const double sc = rsma ? sat_common_share : 0.0;
  const double sp = rsma ? (1.0 - sc) / K : 1.0 / K;
  v.w_sat_common = std::sqrt(sc * s.p_sat_max) * d.sat_common;
  for (int k = 0; k < K; ++k) v.w_sat.push_back(std::sqrt(sp * s.p_sat_max) * d.sat[k]);
  const double bc = rsma ? bs_common_share : 0.0;
  const double bp = (1.0 - bc) / L;
  for (int k = 0; k < K; ++k) {
    v.w_bs_common.push_back(std::sqrt(bc * s.p_bs_max) * d.bs_common[k]);
    std::vector<CVec> row;
    for (int l = 0; l < L; ++l) row.push_back(std::sqrt(bp * s.p_bs_max) * d.bs[k][l]);
    v.w_bs.push_back(row);
  }
  for (int k = 0; k < K; ++k) v.phases.push_back(RVec::Zero(s.ris_array.size()));
  v.ris_frames = frames;
  v.rates = RatePlan::zeros(K, L);
  return v;
}

/// Rate plan for `v` from the greedy rule; false when the floors cannot be met.
bool assign_rates(const Scenario& s, const ChannelSet& ch, DesignVariables& v, bool rsma) {
  const SinrSet g = compute_sinrs(s, ch, effective_channels(ch, v.phases), v);
  if (!rsma) {
    v.rates = RatePlan::zeros(s.K(), s.L());
    return true;
  }
  const AllocationResult res = greedy_allocate(compute_bounds(g, s), s.weights);
  if (std::holds_alternative<Infeasible>(res)) return false;
  v.rates = std::get<RatePlan>(res);
  return true;
}

struct Eval {
  double wsr = 0.0;
  bool feasible = false;
};

Eval evaluate(const Scenario& s, const ChannelSet& ch, const DesignVariables& v) {
  const FeasibilityReport rep = check_feasibility(s, ch, v);
  const SinrSet g = compute_sinrs(s, ch, effective_channels(ch, v.phases), v);
  return {weighted_sum_rate(s, total_rates(g, v.rates)), rep.all_passed()};
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

DesignVariables initial_point(const Scenario& s, const ChannelSet& ch, Scheme scheme,
                              const std::vector<Frame>& frames) {
  const bool rsma = scheme != Scheme::NoRsma;
  std::vector<RVec> zero_phases(s.K(), RVec::Zero(s.ris_array.size()));
  const EffectiveChannels eff = effective_channels(ch, zero_phases);
  const Directions dirs[] = {matched_filters(s, ch, eff), bs_zero_forcing(s, ch, eff)};
  const std::vector<double> sat_shares = rsma ? std::vector<double>{0.0, 0.05, 0.25, 0.5, 0.75} : std::vector<double>{0.0};
  const std::vector<double> bs_shares = rsma ? std::vector<double>{0.0, 0.05, 0.25} : std::vector<double>{0.0};
  std::optional<DesignVariables> best;
  double best_wsr = -std::numeric_limits<double>::infinity();
  for (const Directions& d : dirs)
    for (double ss : sat_shares)
      for (double bs : bs_shares) {
        DesignVariables v = with_powers(s, d, rsma, ss, bs, frames);
        if (!assign_rates(s, ch, v, rsma)) continue;
        const Eval e = evaluate(s, ch, v);
        if (e.feasible && e.wsr > best_wsr) {
          best_wsr = e.wsr;
          best = std::move(v);
        }
      }
  if (!best)
    throw InitializationInfeasible("no feasible starting point: every matched-filter and zero-forcing start "
                                   "violates a rate floor");
  return *best;
}

// ---------------------------------------------------------------------------
// Outer loop

OptimizeResult optimize(const Scenario& s, std::uint64_t seed, const OptimizeOptions& opt) {
  const bool rsma = opt.scheme != Scheme::NoRsma;
  const bool ris = opt.scheme != Scheme::NoRis;
  auto say = [&](const std::string& m) {
    if (opt.log) opt.log(m);
  };

  OptimizeResult out;
  out.rain = sample_rain(s.rain_mu, s.rain_sigma, seed, s.K());
  const std::vector<Frame> frames0 = initial_ris_frames(s);
  ChannelSet ch = scheme_channels(s, frames0, out.rain, opt.scheme);
  DesignVariables vars = initial_point(s, ch, opt.scheme, frames0);
  Eval cur = evaluate(s, ch, vars);
  out.initial_weighted_sum_rate = cur.wsr;
  say("init wsr=" + fmt(cur.wsr));

  BeamOptions bopt = opt.beams;
  bopt.rsma = rsma;
  int rate_failures = 0;
  int calm = 0;
  for (int it = 1; it <= opt.max_outer; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    IterationTrace tr;
    tr.iteration = it;
    const double wsr_start = cur.wsr;

    // Rates.
    if (rsma) {
      const SinrSet g = compute_sinrs(s, ch, effective_channels(ch, vars.phases), vars);
      const AllocationResult res = greedy_allocate(compute_bounds(g, s), s.weights);
      if (const auto* bad = std::get_if<Infeasible>(&res)) {
        tr.rate_status = "infeasible(pool " + std::to_string(bad->pool) + ")";
        if (++rate_failures >= opt.max_rate_failures)
          throw SubproblemInfeasible("rate allocation infeasible for " + std::to_string(rate_failures) +
                                     " consecutive iterations");
      } else {
        rate_failures = 0;
        DesignVariables next = vars;
        next.rates = std::get<RatePlan>(res);
        const Eval e = evaluate(s, ch, next);
        if (e.feasible && e.wsr >= cur.wsr) {
          vars = std::move(next);
          cur = e;
          tr.rate_status = "accepted";
        } else {
          tr.rate_status = "rejected";
        }
      }
    } else {
      tr.rate_status = "fixed";
    }
    say("iter " + std::to_string(it) + " rates " + tr.rate_status + " wsr=" + fmt(cur.wsr));

    // Beams.
    {
      const EffectiveChannels eff = effective_channels(ch, vars.phases);
      const WmmseState wm = refresh_wmmse(s, ch, eff, vars);
      try {
        const ScaResult sr = sca_optimize(s, ch, eff, vars, wm, vars.rates, opt.sca_tol, opt.sca_max_outer, bopt);
        tr.sca_solves = sr.solves;
        const Eval e = evaluate(s, ch, sr.vars);
        if (e.feasible && e.wsr >= cur.wsr) {
          vars = sr.vars;
          cur = e;
          tr.beam_status = "accepted";
        } else {
          tr.beam_status = e.feasible ? "rejected" : "rejected(infeasible)";
        }
      } catch (const SubproblemInfeasible&) {
        tr.beam_status = "infeasible";
      }
    }
    say("iter " + std::to_string(it) + " beams " + tr.beam_status + " solves=" + std::to_string(tr.sca_solves) +
        " wsr=" + fmt(cur.wsr));

    // Phases.
    if (ris) {
      const EffectiveChannels eff = effective_channels(ch, vars.phases);
      const WmmseState wm = refresh_wmmse(s, ch, eff, vars);
      try {
        const AdmmResult ar = admm_optimize(s, ch, vars, wm, vars.rates, opt.admm);
        tr.admm_iterations = ar.iterations;
        tr.admm_primal = ar.primal_residual;
        tr.admm_dual = ar.dual_residual;
        DesignVariables next = vars;
        next.phases = ar.phases;
        const Eval e = evaluate(s, ch, next);
        if (e.feasible && e.wsr >= cur.wsr) {
          vars = std::move(next);
          cur = e;
          tr.phase_status = "accepted";
        } else {
          tr.phase_status = e.feasible ? "rejected" : "rejected(infeasible)";
        }
      } catch (const SubproblemInfeasible&) {
        tr.phase_status = "infeasible";
      }
      say("iter " + std::to_string(it) + " phases " + tr.phase_status + " admm_iters=" +
          std::to_string(tr.admm_iterations) + " primal=" + fmt(tr.admm_primal) + " wsr=" + fmt(cur.wsr));
    } else {
      tr.phase_status = "frozen";
    }

    // Poses.
    if (ris && opt.pose_period > 0 && it % opt.pose_period == 0) {
      const EffectiveChannels eff = effective_channels(ch, vars.phases);
      const WmmseState wm = refresh_wmmse(s, ch, eff, vars);
      std::vector<Frame> frames = vars.ris_frames;
      int kept = 0;
      for (int k = 0; k < s.K(); ++k) {
        try {
          frames[k] = search_cell(s, ch, vars, wm, vars.rates, k, opt.grid, true).pose;
        } catch (const NoFeasibleCandidate&) {
          ++kept;
        }
      }
      DesignVariables next = vars;
      next.ris_frames = frames;
      ChannelSet nch = scheme_channels(s, frames, out.rain, opt.scheme);
      const Eval e = evaluate(s, nch, next);
      if (e.feasible && e.wsr >= cur.wsr) {
        vars = std::move(next);
        ch = std::move(nch);
        cur = e;
        tr.pose_status = kept ? "accepted(" + std::to_string(kept) + " kept)" : "accepted";
      } else {
        tr.pose_status = e.feasible ? "rejected" : "rejected(infeasible)";
      }
      say("iter " + std::to_string(it) + " poses " + tr.pose_status + " wsr=" + fmt(cur.wsr));
    } else {
      tr.pose_status = ris ? "skipped" : "frozen";
    }

    {
      const WmmseState wm = refresh_wmmse(s, ch, effective_channels(ch, vars.phases), vars);
      tr.wmmse_objective = wmmse_objective(s, wm.omega, wm.mse);
    }
    tr.weighted_sum_rate = cur.wsr;
    tr.wall_ms = elapsed_ms(t0);
    out.trace.push_back(tr);

    const double rel = std::abs(cur.wsr - wsr_start) / std::max(std::abs(wsr_start), 1e-12);
    calm = rel < opt.tol ? calm + 1 : 0;
    if (calm >= opt.patience) {
      out.converged = true;
      break;
    }
  }

  out.vars = vars;
  out.channels = ch;
  out.rates = total_rates(compute_sinrs(s, ch, effective_channels(ch, vars.phases), vars), vars.rates);
  out.weighted_sum_rate = cur.wsr;
  out.feasibility = check_feasibility(s, ch, vars);
  return out;
}

}  // namespace sagin
