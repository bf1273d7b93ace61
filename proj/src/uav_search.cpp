#include "sagin/uav_search.hpp"

#include <cmath>
#include <limits>

namespace sagin {

std::vector<double> angle_samples(const PoseGrid& grid) {
  if (!(grid.angle_step > 0.0)) throw EmptyGrid("angle_step must be positive");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double a = i * grid.angle_step;
    if (a >= kTwoPi - 1e-12) break;
    out.push_back(a);
  }
  return out;
}

std::vector<double> axis_samples(const Scenario& s, int k, const PoseGrid& grid) {
  if (!(s.es_axis_dirs[k].z() < 0.0) || s.h_min > s.h_max) throw EmptyGrid("empty axis range");
  const auto [b0, b1] = axis_range(s, k);
  std::vector<double> out;
  if (grid.axis_step > 0.0) {
    for (int i = 0;; ++i) {
      const double b = b0 + i * grid.axis_step;
      if (b > b1 + 1e-9 * std::max(1.0, std::abs(b1))) break;
      out.push_back(std::min(b, b1));
    }
  } else {
    const int n = grid.axis_samples;
    if (n < 1) throw EmptyGrid("axis_samples must be >= 1");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? b0 : b0 + (b1 - b0) * i / (n - 1));
  }
  return out;
}

bool pose_admissible(const Scenario& s, int k, const Frame& pose) {
  return s.uav_regions[k].contains(pose.translation) && forward_halfspace(pose, s.sat_position()) &&
         forward_halfspace(pose, s.es_positions[k]);
}

std::vector<Frame> candidate_poses(const Scenario& s, int k, const PoseGrid& grid) {
  const std::vector<double> ang = angle_samples(grid);
  const std::vector<double> bs = axis_samples(s, k, grid);
  std::vector<Frame> out;
  for (double bx : ang)
    for (double by : ang)
      for (double bz : ang) {
        const Mat3 R = rotation_from_euler({bx, by, bz});
        for (double b : bs) {
          const Frame f{R, axis_point(s, k, b)};
          if (pose_admissible(s, k, f)) out.push_back(f);
        }
      }
  if (out.empty()) throw EmptyGrid("no admissible pose for cell " + std::to_string(k));
  return out;
}

namespace {

struct CellLinks {
  Complex hc;
  std::vector<Complex> hs;  // K private satellite beams
  std::vector<Complex> u;   // L+1 BS beams
  CMat vw;                  // L x (L+1)
  CMat fw;                  // L x (K+1)
};

CellLinks cell_links(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars, int k) {
  const int K = s.K(), L = s.L();
  const CVec z = unit_phasors(vars.phases[k]);
  CellLinks c;
  const CVec h = ch.h[k] + ch.G[k].adjoint() * z.conjugate().cwiseProduct(ch.g[k]);
  c.hc = h.dot(vars.w_sat_common);
  for (int j = 0; j < K; ++j) c.hs.push_back(h.dot(vars.w_sat[j]));
  c.u.push_back(ch.u[k].dot(vars.w_bs_common[k]));
  for (int j = 0; j < L; ++j) c.u.push_back(ch.u[k].dot(vars.w_bs[k][j]));
  c.vw.resize(L, L + 1);
  c.fw.resize(L, K + 1);
  for (int l = 0; l < L; ++l) {
    const CVec f = ch.f[k][l] + ch.G[k].adjoint() * z.conjugate().cwiseProduct(ch.q[k][l]);
    c.vw(l, 0) = ch.v[k][l].dot(vars.w_bs_common[k]);
    for (int j = 0; j < L; ++j) c.vw(l, j + 1) = ch.v[k][l].dot(vars.w_bs[k][j]);
    c.fw(l, 0) = f.dot(vars.w_sat_common);
    for (int j = 0; j < K; ++j) c.fw(l, j + 1) = f.dot(vars.w_sat[j]);
  }
  return c;
}

}  // namespace

double cell_surrogate(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars, const WmmseState& wm,
                      int k) {
  const int L = s.L();
  const CellLinks c = cell_links(s, ch, vars, k);
  double t = 0.0;
  for (const Complex& x : c.hs) t += std::norm(x);
  for (const Complex& x : c.u) t += std::norm(x);
  const double aw = s.weights(k, 0) * wm.omega(k, 0);
  double f = aw * (std::norm(wm.mu(k, 0)) * t - 2.0 * std::real(wm.mu(k, 0) * c.hs[k]));
  for (int l = 0; l < L; ++l) {
    double tu = 0.0;
    for (int j = 1; j <= L; ++j) tu += std::norm(c.vw(l, j));
    for (Eigen::Index j = 0; j < c.fw.cols(); ++j) tu += std::norm(c.fw(l, j));
    const double awu = s.weights(k, l + 1) * wm.omega(k, l + 1);
    f += awu * (std::norm(wm.mu(k, l + 1)) * tu - 2.0 * std::real(wm.mu(k, l + 1) * c.vw(l, l + 1)));
  }
  return f;
}

bool cell_rates_feasible(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars, const RatePlan& plan,
                         int k, double tol) {
  const int L = s.L();
  const CellLinks c = cell_links(s, ch, vars, k);

  double es_int = s.noise_es[k];
  for (std::size_t j = 0; j < c.hs.size(); ++j)
    if (static_cast<int>(j) != k) es_int += std::norm(c.hs[j]);
  for (const Complex& x : c.u) es_int += std::norm(x);
  const double es_des = std::norm(c.hs[k]);
  const double es_common = std::norm(c.hc) / (es_int + es_des);
  if (plan.es.sum() > std::log2(1.0 + es_common) + tol) return false;
  if (plan.es(k) + std::log2(1.0 + es_des / es_int) < s.rmin_es - tol) return false;

  const double ue_sum = plan.ue.row(k).sum();
  for (int l = 0; l < L; ++l) {
    double in = s.noise_ue[k][l];
    for (int j = 1; j <= L; ++j)
      if (j != l + 1) in += std::norm(c.vw(l, j));
    for (Eigen::Index j = 0; j < c.fw.cols(); ++j) in += std::norm(c.fw(l, j));
    const double des = std::norm(c.vw(l, l + 1));
    if (ue_sum > std::log2(1.0 + std::norm(c.vw(l, 0)) / (in + des)) + tol) return false;
    if (plan.ue(k, l) + std::log2(1.0 + des / in) < s.rmin_ue - tol) return false;
  }
  return true;
}

CellSearchResult search_cell(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars,
                             const WmmseState& wm, const RatePlan& plan, int k, const PoseGrid& grid,
                             bool inject_current) {
  std::vector<Frame> cands;
  try {
    cands = candidate_poses(s, k, grid);
  } catch (const EmptyGrid&) {
    if (!inject_current) throw;
  }
  if (inject_current) {
    const Mat3& R = vars.ris_frames[k].rotation;
    for (double b : axis_samples(s, k, grid)) {
      const Frame f{R, axis_point(s, k, b)};
      if (pose_admissible(s, k, f)) cands.push_back(f);
    }
    if (pose_admissible(s, k, vars.ris_frames[k])) cands.push_back(vars.ris_frames[k]);
  }

  ChannelSet work = ch;
  CellSearchResult best;
  best.surrogate = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const Frame& f : cands) {
    rebuild_cell_reflections(s, k, f, work);
    if (!cell_rates_feasible(s, work, vars, plan, k)) continue;
    ++best.evaluated;
    const double v = cell_surrogate(s, work, vars, wm, k);
    if (v < best.surrogate) {
      best.surrogate = v;
      best.pose = f;
      found = true;
    }
  }
  if (!found) throw NoFeasibleCandidate(k);
  return best;
}

std::vector<Frame> exhaustive_search(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars,
                                     const WmmseState& wm, const RatePlan& plan, const PoseGrid& grid,
                                     bool inject_current) {
  std::vector<Frame> out;
  for (int k = 0; k < s.K(); ++k) out.push_back(search_cell(s, ch, vars, wm, plan, k, grid, inject_current).pose);
  return out;
}

}  // namespace sagin
