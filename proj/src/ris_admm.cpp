#include "sagin/ris_admm.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace sagin {

namespace {

/// x^T y without conjugation.
Complex tdot(const CVec& x, const CVec& y) { return x.cwiseProduct(y).sum(); }

}  // namespace

double PhaseQuadraticForm::evaluate_cell(int k, const CVec& zeta) const {
  double v = 0.0;
  for (const CVec& ci : c[k]) v += std::norm(tdot(zeta, ci));
  for (const CVec& di : d[k]) v += std::real(tdot(zeta, di));
  return v;
}

double PhaseQuadraticForm::evaluate(const std::vector<CVec>& zeta) const {
  double v = m;
  for (std::size_t k = 0; k < c.size(); ++k) v += evaluate_cell(static_cast<int>(k), zeta[k]);
  return v;
}

PhaseQuadraticForm assemble_form(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars,
                                 const WmmseState& wm) {
  const int K = s.K(), L = s.L();
  const EffectiveChannels plain{ch.h, ch.f};
  const LinkProducts p = link_products(ch, plain, vars);
  PhaseQuadraticForm out;
  out.c.resize(K);
  out.d.resize(K);

  auto sat_beam = [&](int j) -> const CVec& { return j == 0 ? vars.w_sat_common : vars.w_sat[j - 1]; };

  for (int k = 0; k < K; ++k) {
    std::vector<CVec> Gw(K + 1);
    for (int j = 0; j <= K; ++j) Gw[j] = ch.G[k] * sat_beam(j);
    auto x_of = [&](const CVec& r, int j) { CVec x = r.conjugate().cwiseProduct(Gw[j]); return x; };

    // ES k.
    const double aw = s.weights(k, 0) * wm.omega(k, 0);
    const double kap = aw * std::norm(wm.mu(k, 0));
    for (int j = 1; j <= K; ++j) {
      const Complex a = p.hw(k, j);
      const CVec x = x_of(ch.g[k], j);
      out.c[k].push_back(std::sqrt(kap) * x);
      out.d[k].push_back(2.0 * kap * std::conj(a) * x);
      out.m += kap * std::norm(a);
    }
    double bs = 0.0;
    for (int j = 0; j <= L; ++j) bs += std::norm(p.uw(k, j));
    out.m += kap * bs;
    out.m += -2.0 * aw * std::real(wm.mu(k, 0) * p.hw(k, k + 1));
    out.d[k].push_back(-2.0 * aw * wm.mu(k, 0) * x_of(ch.g[k], k + 1));

    // UEs of cell k.
    for (int l = 0; l < L; ++l) {
      const double awu = s.weights(k, l + 1) * wm.omega(k, l + 1);
      const double ku = awu * std::norm(wm.mu(k, l + 1));
      for (int j = 0; j <= K; ++j) {
        const Complex a = p.fw[k](l, j);
        const CVec x = x_of(ch.q[k][l], j);
        out.c[k].push_back(std::sqrt(ku) * x);
        out.d[k].push_back(2.0 * ku * std::conj(a) * x);
        out.m += ku * std::norm(a);
      }
      double b = 0.0;
      for (int j = 1; j <= L; ++j) b += std::norm(p.vw[k](l, j));
      out.m += ku * b - 2.0 * awu * std::real(wm.mu(k, l + 1) * p.vw[k](l, l + 1));
    }
  }
  return out;
}

double phase_objective(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars, const WmmseState& wm,
                       const std::vector<CVec>& zeta) {
  return beam_objective(s, ch, effective_channels_zeta(ch, zeta), vars, wm);
}

namespace {

double taylor_rhs(Complex a_t, const CVec& x_t, const CVec& zeta, const CVec& anchor) {
  const Complex zs = a_t + tdot(anchor, x_t);
  const Complex z = a_t + tdot(zeta, x_t);
  return 2.0 * std::real(std::conj(zs) * z) - std::norm(zs);
}

}  // namespace

double PhaseConstraint::slack(const CVec& zeta, const CVec& anchor) const {
  double lhs = fixed;
  for (std::size_t i = 0; i < a.size(); ++i) lhs += std::norm(a[i] + tdot(zeta, x[i]));
  const double rhs = taylor ? taylor_rhs(a_t, x_t, zeta, anchor) : rhs_const;
  return gamma * lhs - rhs;
}

double PhaseConstraint::true_slack(const CVec& zeta) const {
  double lhs = fixed;
  for (std::size_t i = 0; i < a.size(); ++i) lhs += std::norm(a[i] + tdot(zeta, x[i]));
  const double rhs = taylor ? std::norm(a_t + tdot(zeta, x_t)) : rhs_const;
  return gamma * lhs - rhs;
}

std::vector<PhaseConstraint> phase_constraints(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars,
                                               const RatePlan& plan, int k) {
  const int K = s.K(), L = s.L();
  const EffectiveChannels plain{ch.h, ch.f};
  const LinkProducts p = link_products(ch, plain, vars);
  const RsmaGammas G = rsma_gammas(s, plan);
  auto sat_beam = [&](int j) -> const CVec& { return j == 0 ? vars.w_sat_common : vars.w_sat[j - 1]; };
  std::vector<CVec> xe(K + 1);
  for (int j = 0; j <= K; ++j) xe[j] = ch.g[k].conjugate().cwiseProduct(ch.G[k] * sat_beam(j));

  std::vector<PhaseConstraint> out;
  double es_bs = s.noise_es[k];
  for (int j = 0; j <= L; ++j) es_bs += std::norm(p.uw(k, j));

  if (G.es_common > 0) {
    PhaseConstraint c;
    c.gamma = G.es_common;
    c.fixed = es_bs;
    for (int j = 1; j <= K; ++j) {
      c.a.push_back(p.hw(k, j));
      c.x.push_back(xe[j]);
    }
    c.taylor = true;
    c.a_t = p.hw(k, 0);
    c.x_t = xe[0];
    out.push_back(std::move(c));
  }
  if (G.es(k) > 0) {
    PhaseConstraint c;
    c.gamma = G.es(k);
    c.fixed = es_bs;
    for (int j = 1; j <= K; ++j)
      if (j != k + 1) {
        c.a.push_back(p.hw(k, j));
        c.x.push_back(xe[j]);
      }
    c.taylor = true;
    c.a_t = p.hw(k, k + 1);
    c.x_t = xe[k + 1];
    out.push_back(std::move(c));
  }
  for (int l = 0; l < L; ++l) {
    std::vector<CVec> xu(K + 1);
    for (int j = 0; j <= K; ++j) xu[j] = ch.q[k][l].conjugate().cwiseProduct(ch.G[k] * sat_beam(j));
    auto sat_terms = [&](PhaseConstraint& c) {
      for (int j = 0; j <= K; ++j) {
        c.a.push_back(p.fw[k](l, j));
        c.x.push_back(xu[j]);
      }
    };
    if (G.ue_common(k) > 0) {
      PhaseConstraint c;
      c.gamma = G.ue_common(k);
      c.fixed = s.noise_ue[k][l];
      for (int j = 1; j <= L; ++j) c.fixed += std::norm(p.vw[k](l, j));
      sat_terms(c);
      c.rhs_const = std::norm(p.vw[k](l, 0));
      out.push_back(std::move(c));
    }
    if (G.ue(k, l) > 0) {
      PhaseConstraint c;
      c.gamma = G.ue(k, l);
      c.fixed = s.noise_ue[k][l];
      for (int j = 1; j <= L; ++j)
        if (j != l + 1) c.fixed += std::norm(p.vw[k](l, j));
      sat_terms(c);
      c.rhs_const = std::norm(p.vw[k](l, l + 1));
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

/// Cell subproblem restricted to the span that the form and the constraints see.
/// With zeta = zeta_perp + U s, every x^T zeta equals (U^T x)^T s.
struct Reduced {
  CMat U;  // N_R x r
  std::vector<CVec> c;
  CVec d_sum;
  std::vector<PhaseConstraint> cons;  // vectors in reduced coordinates
  CMat Q;                             // sum conj(c) c^T
};

Reduced reduce(const PhaseQuadraticForm& form, int k, const std::vector<PhaseConstraint>& constraints) {
  std::vector<const CVec*> all;
  for (const CVec& v : form.c[k]) all.push_back(&v);
  for (const CVec& v : form.d[k]) all.push_back(&v);
  for (const PhaseConstraint& pc : constraints) {
    for (const CVec& v : pc.x) all.push_back(&v);
    if (pc.taylor) all.push_back(&pc.x_t);
  }
  const Eigen::Index n = all.empty() ? 0 : all.front()->size();
  Reduced r;
  CMat cols(n, static_cast<Eigen::Index>(all.size()));
  for (std::size_t i = 0; i < all.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = all[i]->conjugate();
  if (cols.size() == 0 || cols.norm() == 0.0) {
    r.U = CMat::Zero(n, 0);
  } else {
    Eigen::JacobiSVD<CMat> svd(cols, Eigen::ComputeThinU);
    const RVec& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-9 * sv(0)) ++rank;
    r.U = svd.matrixU().leftCols(rank);
  }
  const CMat Ut = r.U.transpose();
  const Eigen::Index rr = r.U.cols();
  r.Q = CMat::Zero(rr, rr);
  r.d_sum = CVec::Zero(rr);
  for (const CVec& v : form.c[k]) {
    const CVec cr = Ut * v;
    r.Q.noalias() += cr.conjugate() * cr.transpose();
    r.c.push_back(cr);
  }
  for (const CVec& v : form.d[k]) r.d_sum += Ut * v;
  for (const PhaseConstraint& pc : constraints) {
    PhaseConstraint q = pc;
    for (CVec& v : q.x) v = Ut * v;
    if (q.taylor) q.x_t = Ut * q.x_t;
    r.cons.push_back(std::move(q));
  }
  return r;
}

struct Lin {
  RVec re, im;
};

/// t^T s as real rows over [Re s; Im s].
Lin plain_form(const CVec& t) {
  const Eigen::Index r = t.size();
  Lin f{RVec(2 * r), RVec(2 * r)};
  f.re << t.real(), -t.imag();
  f.im << t.imag(), t.real();
  return f;
}

RVec stack(const CVec& s) {
  RVec x(2 * s.size());
  x << s.real(), s.imag();
  return x;
}

CVec unstack(const RVec& x) {
  const Eigen::Index r = x.size() / 2;
  return x.head(r).cast<Complex>() + Complex(0, 1) * x.tail(r).cast<Complex>();
}

CVec solve_reduced(const Reduced& red, double scale, const CVec& target, double rho, const CVec& anchor) {
  const Eigen::Index r = red.U.cols();
  if (r == 0) return target;
  const CVec sv = red.U.adjoint() * target;
  const CVec perp = target - red.U * sv;
  const CVec s_anchor = red.U.adjoint() * anchor;

  // Unconstrained minimizer first.
  CMat A = scale * red.Q;
  A.diagonal().array() += 0.5 * rho;
  const CVec rhs = 0.5 * rho * sv - 0.5 * scale * red.d_sum.conjugate();
  const CVec s0 = A.ldlt().solve(rhs);
  bool ok = true;
  for (const PhaseConstraint& pc : red.cons)
    if (pc.slack(s0, s_anchor) > 0.0) {
      ok = false;
      break;
    }
  if (ok) return perp + red.U * s0;

  const int n = static_cast<int>(2 * r);
  ConvexProblem prob = ConvexProblem::zeros(n);
  for (const CVec& c : red.c) {
    const Lin f = plain_form(c);
    prob.P.noalias() += 2.0 * scale * (f.re * f.re.transpose() + f.im * f.im.transpose());
  }
  prob.P.diagonal().array() += rho;
  prob.P = 0.5 * (prob.P + prob.P.transpose());
  prob.q = scale * plain_form(red.d_sum).re - rho * stack(sv);
  for (const PhaseConstraint& pc : red.cons) {
    const int m = static_cast<int>(2 * pc.a.size() + 1);
    RMat F = RMat::Zero(m, n);
    RVec f = RVec::Zero(m);
    const double sg = std::sqrt(pc.gamma);
    for (std::size_t i = 0; i < pc.a.size(); ++i) {
      const Lin li = plain_form(pc.x[i]);
      F.row(2 * i) = sg * li.re.transpose();
      F.row(2 * i + 1) = sg * li.im.transpose();
      f(2 * i) = sg * pc.a[i].real();
      f(2 * i + 1) = sg * pc.a[i].imag();
    }
    f(m - 1) = std::sqrt(pc.gamma * pc.fixed);
    RVec alin = RVec::Zero(n);
    double a0 = pc.rhs_const;
    if (pc.taylor) {
      const Complex zs = pc.a_t + tdot(s_anchor, pc.x_t);
      const Lin lt = plain_form(pc.x_t);
      alin = 2.0 * (zs.real() * lt.re + zs.imag() * lt.im);
      a0 = 2.0 * std::real(std::conj(zs) * pc.a_t) - std::norm(zs);
    }
    prob.soc.push_back(quadratic_le_affine(F, f, alin, a0, 1.0 / (pc.gamma * pc.fixed)));
  }
  SolveOptions so;
  so.initial_point = stack(s_anchor);
  const ConvexSolution sol = solve(prob, so);
  const bool usable = sol.status == SolveStatus::Optimal ||
                      (sol.status == SolveStatus::MaxIterations && max_soc_violation(prob, sol.x) <= 0.0);
  if (!usable) throw SubproblemInfeasible(std::string("phase restriction: ") + to_string(sol.status));
  return perp + red.U * unstack(sol.x);
}

double gradient_scale(const PhaseQuadraticForm& form, int k, const CVec& zeta) {
  const Eigen::Index n = zeta.size();
  CVec grad = CVec::Zero(n);
  for (const CVec& c : form.c[k]) grad += c.conjugate() * tdot(c, zeta);
  for (const CVec& d : form.d[k]) grad += 0.5 * d.conjugate();
  return n ? 2.0 * grad.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

CVec zeta_update(const PhaseQuadraticForm& form, int cell, double scale, const CVec& target, double rho,
                 const std::vector<PhaseConstraint>& constraints, const CVec& anchor) {
  return solve_reduced(reduce(form, cell, constraints), scale, target, rho, anchor);
}

CVec project_unit_modulus(const CVec& z) {
  CVec out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z(i));
    out(i) = a > 0.0 ? z(i) / a : Complex(1.0, 0.0);
  }
  return out;
}

std::vector<CVec> project_unit_modulus(const std::vector<CVec>& z) {
  std::vector<CVec> out;
  out.reserve(z.size());
  for (const CVec& v : z) out.push_back(project_unit_modulus(v));
  return out;
}

RVec phases_of(const CVec& z) {
  RVec out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double a = std::arg(z(i));
    if (a < 0) a += kTwoPi;
    if (a >= kTwoPi) a -= kTwoPi;
    out(i) = a;
  }
  return out;
}

AdmmResult admm_optimize(const Scenario& s, const ChannelSet& ch, const DesignVariables& vars,
                         const WmmseState& wm, const RatePlan& plan, const AdmmOptions& opt) {
  const int K = s.K();
  const PhaseQuadraticForm form = assemble_form(s, ch, vars, wm);
  AdmmResult res;
  AdmmState& st = res.state;
  st.rho = opt.rho;
  std::vector<Reduced> red;
  std::vector<double> scale(K);
  for (int k = 0; k < K; ++k) {
    const CVec z0 = unit_phasors(vars.phases[k]);
    st.zeta.push_back(z0);
    st.Z.push_back(z0);
    st.Y.push_back(CVec::Zero(z0.size()));
    red.push_back(reduce(form, k, phase_constraints(s, ch, vars, plan, k)));
    const double gs = gradient_scale(form, k, z0);
    scale[k] = gs > 0.0 ? 1.0 / gs : 0.0;
  }

  double best_primal = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (int k = 0; k < K; ++k)
      st.zeta[k] = solve_reduced(red[k], scale[k], st.Z[k] - st.Y[k], st.rho, st.zeta[k]);
    double primal2 = 0.0, dual2 = 0.0;
    for (int k = 0; k < K; ++k) {
      const CVec Zp = st.Z[k];
      st.Z[k] = project_unit_modulus(CVec(st.zeta[k] + st.Y[k]));
      st.Y[k] += st.zeta[k] - st.Z[k];
      primal2 += (st.zeta[k] - st.Z[k]).squaredNorm();
      dual2 += (st.Z[k] - Zp).squaredNorm();
    }
    res.iterations = it;
    res.primal_residual = std::sqrt(primal2);
    res.dual_residual = st.rho * std::sqrt(dual2);
    if (res.primal_residual <= opt.tol_primal && res.dual_residual <= opt.tol_dual) break;

    if (res.primal_residual < 0.99 * best_primal) {
      best_primal = res.primal_residual;
      since_best = 0;
    } else if (++since_best >= opt.stall_window && st.rho < opt.rho * opt.rho_cap_factor) {
      st.rho *= 2.0;
      for (CVec& y : st.Y) y *= 0.5;  // keeps rho * Y fixed
      since_best = 0;
      best_primal = res.primal_residual;
    }
  }
  for (int k = 0; k < K; ++k) res.phases.push_back(phases_of(st.Z[k]));
  return res;
}

}  // namespace sagin
