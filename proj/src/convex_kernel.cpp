#include "sagin/convex_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>

namespace sagin {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBarrierStep = 20.0;
constexpr double kNewtonTol = 1e-10;
constexpr int kMaxCenteringSteps = 60;
constexpr double kPhaseOneMargin = 1e-7;

struct Cone {
  RMat A;
  RVec b;
  RVec c;
  double d;
  RMat AtA;
};

/// Normalized working copy of a problem.
struct Work {
  int n = 0;
  RMat P;
  RVec q;
  double obj_scale = 1.0;
  std::vector<Cone> cones;
  RMat E;
  RVec e;

  double f(const RVec& x) const { return 0.5 * x.dot(P * x) + q.dot(x); }
  double theta() const { return 2.0 * cones.size(); }
};

double max_abs(const RMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Cone make_cone(const RMat& A, const RVec& b, const RVec& c, double d) {
  const double s = std::max({max_abs(A), max_abs(b), max_abs(c), std::abs(d)});
  Cone cone{A / s, b / s, c / s, d / s, RMat()};
  cone.AtA = cone.A.transpose() * cone.A;
  return cone;
}

Work prepare(const ConvexProblem& p) {
  Work w;
  w.n = p.dimension;
  const double s = std::max(max_abs(p.P), max_abs(p.q));
  w.obj_scale = s > 0 ? 1.0 / s : 1.0;
  w.P = p.P * w.obj_scale;
  w.P = 0.5 * (w.P + w.P.transpose());
  w.q = p.q * w.obj_scale;
  for (const auto& k : p.soc) {
    const double s2 = std::max({max_abs(k.A), max_abs(k.b), max_abs(k.c), std::abs(k.d)});
    if (s2 == 0.0) continue;  // 0 <= 0 holds everywhere
    w.cones.push_back(make_cone(k.A, k.b, k.c, k.d));
  }
  w.E.resize(static_cast<Eigen::Index>(p.eq.size()), w.n);
  w.e.resize(static_cast<Eigen::Index>(p.eq.size()));
  for (std::size_t i = 0; i < p.eq.size(); ++i) {
    const double nrm = p.eq[i].a.norm();
    const double sc = nrm > 0 ? 1.0 / nrm : 1.0;
    w.E.row(static_cast<Eigen::Index>(i)) = p.eq[i].a.transpose() * sc;
    w.e(static_cast<Eigen::Index>(i)) = p.eq[i].b * sc;
  }
  return w;
}

/// Smallest s - ||u|| over the cones; +inf without cones.
double min_margin(const Work& w, const RVec& x) {
  double m = kInf;
  for (const auto& k : w.cones) m = std::min(m, k.c.dot(x) + k.d - (k.A * x + k.b).norm());
  return m;
}

/// Barrier value; +inf outside the interior.
double barrier_value(const Work& w, const RVec& x) {
  double v = 0.0;
  for (const auto& k : w.cones) {
    const double s = k.c.dot(x) + k.d;
    const double nu = (k.A * x + k.b).norm();
    if (!(s - nu > 0.0)) return kInf;
    v -= std::log((s - nu) * (s + nu));
  }
  return v;
}

void barrier_derivatives(const Work& w, const RVec& x, RVec& grad, RMat& hess) {
  for (const auto& k : w.cones) {
    const RVec u = k.A * x + k.b;
    const double s = k.c.dot(x) + k.d;
    const double nu = u.norm();
    const double r = (s - nu) * (s + nu);
    const RVec gr = 2.0 * s * k.c - 2.0 * (k.A.transpose() * u);
    grad -= gr / r;
    hess.noalias() += (2.0 / r) * (k.AtA - k.c * k.c.transpose());
    hess.noalias() += (gr / r) * (gr / r).transpose();
  }
}

/// Newton direction for the equality-constrained centering problem.
RVec newton_direction(const Work& w, RMat H, const RVec& g, const RVec& x) {
  const int n = w.n;
  const double reg = 1e-13 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  H.diagonal().array() += reg;
  if (w.E.rows() == 0) {
    Eigen::LDLT<RMat> ldlt(H);
    RVec dx = ldlt.solve(-g);
    if (dx.allFinite()) return dx;
    return Eigen::PartialPivLU<RMat>(H).solve(-g);
  }
  const int m = static_cast<int>(w.E.rows());
  RMat kkt = RMat::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = H;
  kkt.topRightCorner(n, m) = w.E.transpose();
  kkt.bottomLeftCorner(m, n) = w.E;
  RVec rhs(n + m);
  rhs.head(n) = -g;
  rhs.tail(m) = w.e - w.E * x;
  return Eigen::PartialPivLU<RMat>(kkt).solve(rhs).head(n);
}

enum class CenterResult { Converged, Stalled, Budget };

/// Minimizes t f(x) + phi(x) from a strictly feasible x. `stop` may end the
/// loop early (used by phase I).
template <class Stop>
CenterResult center(const Work& w, RVec& x, double t, int& iterations, int max_iterations, Stop&& stop) {
  for (int step = 0; step < kMaxCenteringSteps; ++step) {
    if (iterations >= max_iterations) return CenterResult::Budget;
    RVec g = t * (w.P * x + w.q);
    RMat H = t * w.P;
    barrier_derivatives(w, x, g, H);
    const RVec dx = newton_direction(w, H, g, x);
    ++iterations;
    const double decrement = -g.dot(dx);
    if (!dx.allFinite()) return CenterResult::Stalled;
    if (decrement <= 2.0 * kNewtonTol) return CenterResult::Converged;

    const double f0 = t * w.f(x) + barrier_value(w, x);
    double alpha = 1.0;
    for (int i = 0; i < 80 && min_margin(w, x + alpha * dx) <= 0.0; ++i) alpha *= 0.5;
    double f1 = kInf;
    for (int i = 0; i < 80; ++i) {
      const RVec trial = x + alpha * dx;
      f1 = t * w.f(trial) + barrier_value(w, trial);
      if (f1 <= f0 - 0.25 * alpha * decrement) break;
      alpha *= 0.5;
    }
    if (!(f1 < kInf) || alpha < 1e-14) return CenterResult::Stalled;
    x += alpha * dx;
    if (stop(x)) return CenterResult::Converged;
  }
  return CenterResult::Converged;
}

double initial_t(const Work& w, const RVec& x) {
  if (w.cones.empty()) return 1.0;
  RVec gf = w.P * x + w.q;
  RVec gb = RVec::Zero(w.n);
  RMat H = RMat::Zero(w.n, w.n);
  barrier_derivatives(w, x, gb, H);
  const double ff = gf.squaredNorm();
  if (ff < 1e-20) return 1.0;
  return std::clamp(-gf.dot(gb) / ff, 1e-2, 1e4);
}

enum class BarrierResult { Optimal, Budget, Stalled };

template <class Stop>
BarrierResult barrier_loop(const Work& w, RVec& x, double tol, int& iterations, int max_iterations,
                           std::vector<double>* trace, double obj_unscale, double obj_const, Stop&& stop) {
  double t = initial_t(w, x);
  for (;;) {
    const CenterResult cr = center(w, x, t, iterations, max_iterations, stop);
    if (trace) trace->push_back(w.f(x) * obj_unscale + obj_const);
    if (stop(x)) return BarrierResult::Optimal;
    const double gap = w.theta() / t;
    if (gap <= tol * std::max(1.0, std::abs(w.f(x)))) return BarrierResult::Optimal;
    if (cr == CenterResult::Budget) return BarrierResult::Budget;
    if (cr == CenterResult::Stalled && gap <= std::sqrt(tol)) return BarrierResult::Optimal;
    if (cr == CenterResult::Stalled) return BarrierResult::Stalled;
    t *= kBarrierStep;
  }
}

/// Returns true when a strictly feasible point was found.
bool phase_one(const Work& w, RVec& x, double tol, int& iterations, int max_iterations) {
  const int n = w.n;
  double worst = 0.0;
  for (const auto& k : w.cones) worst = std::max(worst, (k.A * x + k.b).norm() - k.c.dot(x) - k.d);
  Work p1;
  p1.n = n + 1;
  p1.P = RMat::Zero(n + 1, n + 1);
  p1.q = RVec::Zero(n + 1);
  p1.q(n) = 1.0;
  for (const auto& k : w.cones) {
    Cone c;
    c.A = RMat::Zero(k.A.rows(), n + 1);
    c.A.leftCols(n) = k.A;
    c.b = k.b;
    c.c = RVec::Zero(n + 1);
    c.c.head(n) = k.c;
    c.c(n) = 1.0;
    c.d = k.d;
    c.AtA = c.A.transpose() * c.A;
    p1.cones.push_back(std::move(c));
  }
  {
    // tau >= -1 keeps the auxiliary problem bounded.
    Cone c;
    c.A = RMat::Zero(1, n + 1);
    c.b = RVec::Zero(1);
    c.c = RVec::Zero(n + 1);
    c.c(n) = 1.0;
    c.d = 1.0;
    c.AtA = RMat::Zero(n + 1, n + 1);
    p1.cones.push_back(std::move(c));
  }
  p1.E = RMat::Zero(w.E.rows(), n + 1);
  p1.E.leftCols(n) = w.E;
  p1.e = w.e;

  RVec z(n + 1);
  z.head(n) = x;
  z(n) = worst + 1.0;
  auto done = [&](const RVec& v) { return v(n) < -kPhaseOneMargin; };
  barrier_loop(p1, z, tol, iterations, max_iterations, nullptr, 1.0, 0.0, done);
  x = z.head(n);
  return min_margin(w, x) > 0.0;
}

}  // namespace

ConvexSolution solve(const ConvexProblem& problem, const SolveOptions& opt) {
  const Work w = prepare(problem);
  ConvexSolution sol;
  RVec x = opt.initial_point && opt.initial_point->size() == w.n ? *opt.initial_point : RVec(RVec::Zero(w.n));
  if (w.E.rows() > 0) {
    const RVec r = w.e - w.E * x;
    x += w.E.completeOrthogonalDecomposition().solve(r);
  }
  if (!(min_margin(w, x) > 0.0)) {
    if (!phase_one(w, x, opt.tolerance, sol.iterations, opt.max_iterations)) {
      sol.x = x;
      sol.objective_value = problem.objective(x);
      sol.status = sol.iterations >= opt.max_iterations ? SolveStatus::MaxIterations : SolveStatus::Infeasible;
      return sol;
    }
  }
  const BarrierResult br = barrier_loop(w, x, opt.tolerance, sol.iterations, opt.max_iterations, &sol.trace,
                                        1.0 / w.obj_scale, problem.c, [](const RVec&) { return false; });
  sol.x = x;
  sol.objective_value = problem.objective(x);
  sol.status = br == BarrierResult::Optimal ? SolveStatus::Optimal : SolveStatus::MaxIterations;
  return sol;
}

ConvexSolution solve(const ConvexProblem& problem, double tolerance, int max_iterations) {
  SolveOptions o;
  o.tolerance = tolerance;
  o.max_iterations = max_iterations;
  return solve(problem, o);
}

double max_soc_violation(const ConvexProblem& p, const RVec& x) {
  double v = -kInf;
  for (const auto& k : p.soc) v = std::max(v, (k.A * x + k.b).norm() - k.c.dot(x) - k.d);
  return v;
}

double max_equality_violation(const ConvexProblem& p, const RVec& x) {
  double v = 0.0;
  for (const auto& e : p.eq) v = std::max(v, std::abs(e.a.dot(x) - e.b));
  return v;
}

SocConstraint quadratic_le_affine(const RMat& F, const RVec& f, const RVec& a, double a0, double scale) {
  const double rs = std::sqrt(scale);
  const Eigen::Index m = F.rows(), n = F.cols();
  SocConstraint c;
  c.A.resize(m + 1, n);
  c.A.topRows(m) = 2.0 * rs * F;
  c.A.row(m) = scale * a.transpose();
  c.b.resize(m + 1);
  c.b.head(m) = 2.0 * rs * f;
  c.b(m) = scale * a0 - 1.0;
  c.c = scale * a;
  c.d = scale * a0 + 1.0;
  return c;
}

SocConstraint ball(const RVec& center, double radius) {
  const Eigen::Index n = center.size();
  return SocConstraint{RMat::Identity(n, n), -center, RVec::Zero(n), radius};
}

std::string dump_problem(const ConvexProblem& p) {
  // One line per block: "dimension n", "P", "q", "c", then "soc ..." and "eq ..." lines.
  std::string out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, " %.17g", v);
    out += buf;
  };
  auto matrix = [&](const char* tag, const RMat& m) {
    out += tag;
    out += " " + std::to_string(m.rows()) + " " + std::to_string(m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) num(m(r, c));
  };
  out += "dimension " + std::to_string(p.dimension) + "\n";
  matrix("P", p.P);
  out += "\n";
  matrix("q", p.q);
  out += "\nc";
  num(p.c);
  out += "\n";
  for (const auto& k : p.soc) {
    matrix("soc A", k.A);
    matrix(" b", k.b);
    matrix(" c", k.c);
    out += " d";
    num(k.d);
    out += "\n";
  }
  for (const auto& e : p.eq) {
    matrix("eq a", e.a);
    out += " b";
    num(e.b);
    out += "\n";
  }
  return out;
}

}  // namespace sagin
