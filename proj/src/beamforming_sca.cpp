#include "sagin/beamforming_sca.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace sagin {

double TaylorAffine::operator()(const CVec& w) const {
  const Complex z = h.dot(w);
  return 2.0 * std::real(std::conj(anchor_value) * z) - std::norm(anchor_value);
}

TaylorAffine taylor_affine(const CVec& h, const CVec& w_anchor) { return {h, h.dot(w_anchor)}; }

RsmaGammas rsma_gammas(const Scenario& s, const RatePlan& plan) {
  RsmaGammas g;
  g.es = (std::log(2.0) * (s.rmin_es - plan.es.array())).exp() - 1.0;
  g.ue = (std::log(2.0) * (s.rmin_ue - plan.ue.array())).exp() - 1.0;
  g.es_common = std::exp2(plan.es.sum()) - 1.0;
  g.ue_common.resize(s.K());
  for (int k = 0; k < s.K(); ++k) g.ue_common(k) = std::exp2(plan.ue.row(k).sum()) - 1.0;
  return g;
}

namespace {

CMat span_basis(const CMat& columns) {
  const Eigen::Index n = columns.rows();
  if (columns.cols() == 0 || columns.norm() == 0.0) return CMat::Identity(n, 1);
  Eigen::JacobiSVD<CMat> svd(columns, Eigen::ComputeThinU);
  const RVec& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-9 * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Real and imaginary parts of a complex linear functional of the decision vector.
struct Form {
  RVec re, im;
};

Form zero_form(int n) { return {RVec::Zero(n), RVec::Zero(n)}; }

void add_slot(Form& f, int complex_dim, int offset, const CMat& basis, const CVec& a) {
  const CVec at = basis.adjoint() * a;  // conj(at)^T y == a^H B y
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const int c = offset + static_cast<int>(i);
    f.re(c) += at(i).real();
    f.re(complex_dim + c) += at(i).imag();
    f.im(complex_dim + c) += at(i).real();
    f.im(c) -= at(i).imag();
  }
}

struct Builder {
  const BeamLayout& lay;
  int n;

  Form sat(int j, const CVec& a) const {
    Form f = zero_form(n);
    if (j == 0 && !lay.rsma) return f;
    add_slot(f, lay.complex_dim, lay.sat_offset[j], lay.sat_basis, a);
    return f;
  }
  Form bs(int k, int j, const CVec& a) const {
    Form f = zero_form(n);
    if (j == 0 && !lay.rsma) return f;
    add_slot(f, lay.complex_dim, lay.bs_offset[k][j], lay.bs_basis[k], a);
    return f;
  }
};

void add_square(ConvexProblem& p, const Form& f, double weight) {
  p.P.noalias() += 2.0 * weight * (f.re * f.re.transpose() + f.im * f.im.transpose());
}

/// coef * Re{mu z}
void add_linear(ConvexProblem& p, const Form& f, Complex mu, double coef) {
  p.q += coef * (mu.real() * f.re - mu.imag() * f.im);
}

/// gamma (sum |form|^2 + noise) <= T(desired; anchor)
SocConstraint rate_constraint(const std::vector<Form>& interference, double noise, double gamma, const Form& desired,
                              Complex anchor, int n) {
  const int m = static_cast<int>(2 * interference.size() + 1);
  RMat F = RMat::Zero(m, n);
  RVec f = RVec::Zero(m);
  const double sg = std::sqrt(gamma);
  for (std::size_t i = 0; i < interference.size(); ++i) {
    F.row(2 * i) = sg * interference[i].re.transpose();
    F.row(2 * i + 1) = sg * interference[i].im.transpose();
  }
  f(m - 1) = std::sqrt(gamma * noise);
  const RVec a = 2.0 * (anchor.real() * desired.re + anchor.imag() * desired.im);
  return quadratic_le_affine(F, f, a, -std::norm(anchor), 1.0 / (gamma * noise));
}

SocConstraint power_ball(const std::vector<int>& coords, int n, double budget) {
  RMat A = RMat::Zero(static_cast<Eigen::Index>(coords.size()), n);
  for (std::size_t i = 0; i < coords.size(); ++i) A(static_cast<Eigen::Index>(i), coords[i]) = 1.0;
  return SocConstraint{A, RVec::Zero(A.rows()), RVec::Zero(n), std::sqrt(budget)};
}

}  // namespace

RVec BeamLayout::lift(const DesignVariables& v) const {
  CVec y = CVec::Zero(complex_dim);
  const int rs = static_cast<int>(sat_basis.cols());
  for (int j = rsma ? 0 : 1; j <= K; ++j)
    y.segment(sat_offset[j], rs) = sat_basis.adjoint() * (j == 0 ? v.w_sat_common : v.w_sat[j - 1]);
  for (int k = 0; k < K; ++k) {
    const int rb = static_cast<int>(bs_basis[k].cols());
    for (int j = rsma ? 0 : 1; j <= L; ++j)
      y.segment(bs_offset[k][j], rb) = bs_basis[k].adjoint() * (j == 0 ? v.w_bs_common[k] : v.w_bs[k][j - 1]);
  }
  RVec x(2 * complex_dim);
  x << y.real(), y.imag();
  return x;
}

void BeamLayout::unlift(const RVec& x, DesignVariables& v) const {
  const CVec y = x.head(complex_dim).cast<Complex>() + Complex(0, 1) * x.tail(complex_dim).cast<Complex>();
  const int rs = static_cast<int>(sat_basis.cols());
  v.w_sat_common = rsma ? CVec(sat_basis * y.segment(sat_offset[0], rs)) : CVec::Zero(sat_basis.rows());
  for (int j = 1; j <= K; ++j) v.w_sat[j - 1] = sat_basis * y.segment(sat_offset[j], rs);
  for (int k = 0; k < K; ++k) {
    const int rb = static_cast<int>(bs_basis[k].cols());
    v.w_bs_common[k] = rsma ? CVec(bs_basis[k] * y.segment(bs_offset[k][0], rb)) : CVec::Zero(bs_basis[k].rows());
    for (int j = 1; j <= L; ++j) v.w_bs[k][j - 1] = bs_basis[k] * y.segment(bs_offset[k][j], rb);
  }
}

BeamLayout make_layout(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff,
                       const BeamOptions& opt) {
  const int K = s.K(), L = s.L();
  BeamLayout lay;
  lay.K = K;
  lay.L = L;
  lay.rsma = opt.rsma;
  const int NS = static_cast<int>(ch.h[0].size()), NB = static_cast<int>(ch.u[0].size());
  if (opt.reduce) {
    CMat cols(NS, K + K * L);
    int c = 0;
    for (int k = 0; k < K; ++k) cols.col(c++) = eff.h[k];
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < L; ++l) cols.col(c++) = eff.f[k][l];
    lay.sat_basis = span_basis(cols);
    for (int k = 0; k < K; ++k) {
      CMat bc(NB, 1 + L);
      bc.col(0) = ch.u[k];
      for (int l = 0; l < L; ++l) bc.col(l + 1) = ch.v[k][l];
      lay.bs_basis.push_back(span_basis(bc));
    }
  } else {
    lay.sat_basis = CMat::Identity(NS, NS);
    lay.bs_basis.assign(K, CMat::Identity(NB, NB));
  }
  int off = 0;
  const int rs = static_cast<int>(lay.sat_basis.cols());
  lay.sat_offset.assign(K + 1, -1);
  for (int j = opt.rsma ? 0 : 1; j <= K; ++j) {
    lay.sat_offset[j] = off;
    off += rs;
  }
  lay.bs_offset.assign(K, std::vector<int>(L + 1, -1));
  for (int k = 0; k < K; ++k) {
    const int rb = static_cast<int>(lay.bs_basis[k].cols());
    for (int j = opt.rsma ? 0 : 1; j <= L; ++j) {
      lay.bs_offset[k][j] = off;
      off += rb;
    }
  }
  lay.complex_dim = off;
  return lay;
}

BeamSubproblem build_subproblem(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff,
                                const WmmseState& wm, const RatePlan& plan, const DesignVariables& anchor,
                                const BeamOptions& opt) {
  const int K = s.K(), L = s.L();
  BeamSubproblem out;
  out.layout = make_layout(s, ch, eff, opt);
  const BeamLayout& lay = out.layout;
  const int n = lay.dimension();
  const Builder B{lay, n};
  ConvexProblem& p = out.problem;
  p = ConvexProblem::zeros(n);

  // Objective.
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j <= L; ++j) {
      const double aw = s.weights(k, j) * wm.omega(k, j);
      const double kappa = aw * std::norm(wm.mu(k, j));
      if (j == 0) {
        for (int i = 1; i <= K; ++i) add_square(p, B.sat(i, eff.h[k]), kappa);
        for (int i = 0; i <= L; ++i) add_square(p, B.bs(k, i, ch.u[k]), kappa);
        add_linear(p, B.sat(k + 1, eff.h[k]), wm.mu(k, 0), -2.0 * aw);
      } else {
        const int l = j - 1;
        for (int i = 1; i <= L; ++i) add_square(p, B.bs(k, i, ch.v[k][l]), kappa);
        for (int i = 0; i <= K; ++i) add_square(p, B.sat(i, eff.f[k][l]), kappa);
        add_linear(p, B.bs(k, j, ch.v[k][l]), wm.mu(k, j), -2.0 * aw);
      }
    }
  }
  p.P = 0.5 * (p.P + p.P.transpose());

  // Rate constraints, Taylor-anchored at the given beams.
  const LinkProducts a = link_products(ch, eff, anchor);
  const RsmaGammas G = rsma_gammas(s, plan);
  for (int k = 0; k < K; ++k) {
    std::vector<Form> es_bs;
    for (int i = 0; i <= L; ++i) es_bs.push_back(B.bs(k, i, ch.u[k]));
    if (G.es(k) > 0) {
      std::vector<Form> terms = es_bs;
      for (int i = 1; i <= K; ++i)
        if (i != k + 1) terms.push_back(B.sat(i, eff.h[k]));
      p.soc.push_back(rate_constraint(terms, s.noise_es[k], G.es(k), B.sat(k + 1, eff.h[k]), a.hw(k, k + 1), n));
    }
    if (G.es_common > 0 && lay.rsma) {
      std::vector<Form> terms = es_bs;
      for (int i = 1; i <= K; ++i) terms.push_back(B.sat(i, eff.h[k]));
      p.soc.push_back(rate_constraint(terms, s.noise_es[k], G.es_common, B.sat(0, eff.h[k]), a.hw(k, 0), n));
    }
    for (int l = 0; l < L; ++l) {
      std::vector<Form> sat_terms;
      for (int i = 0; i <= K; ++i) sat_terms.push_back(B.sat(i, eff.f[k][l]));
      if (G.ue(k, l) > 0) {
        std::vector<Form> terms = sat_terms;
        for (int i = 1; i <= L; ++i)
          if (i != l + 1) terms.push_back(B.bs(k, i, ch.v[k][l]));
        p.soc.push_back(
            rate_constraint(terms, s.noise_ue[k][l], G.ue(k, l), B.bs(k, l + 1, ch.v[k][l]), a.vw[k](l, l + 1), n));
      }
      if (G.ue_common(k) > 0 && lay.rsma) {
        std::vector<Form> terms = sat_terms;
        for (int i = 1; i <= L; ++i) terms.push_back(B.bs(k, i, ch.v[k][l]));
        p.soc.push_back(
            rate_constraint(terms, s.noise_ue[k][l], G.ue_common(k), B.bs(k, 0, ch.v[k][l]), a.vw[k](l, 0), n));
      }
    }
  }

  // Power budgets. The bases are orthonormal, so ||w|| equals the coordinate norm.
  std::vector<int> sat_coords;
  const int rs = static_cast<int>(lay.sat_basis.cols());
  for (int j = lay.rsma ? 0 : 1; j <= K; ++j)
    for (int i = 0; i < rs; ++i) {
      sat_coords.push_back(lay.sat_offset[j] + i);
      sat_coords.push_back(lay.complex_dim + lay.sat_offset[j] + i);
    }
  p.soc.push_back(power_ball(sat_coords, n, s.p_sat_max));
  for (int k = 0; k < K; ++k) {
    std::vector<int> coords;
    const int rb = static_cast<int>(lay.bs_basis[k].cols());
    for (int j = lay.rsma ? 0 : 1; j <= L; ++j)
      for (int i = 0; i < rb; ++i) {
        coords.push_back(lay.bs_offset[k][j] + i);
        coords.push_back(lay.complex_dim + lay.bs_offset[k][j] + i);
      }
    p.soc.push_back(power_ball(coords, n, s.p_bs_max));
  }
  return out;
}

double beam_objective(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff,
                      const DesignVariables& vars, const WmmseState& wm) {
  const LinkProducts p = link_products(ch, eff, vars);
  const int K = s.K(), L = s.L();
  double f = 0.0;
  for (int k = 0; k < K; ++k) {
    double t = 0.0;
    for (int i = 1; i <= K; ++i) t += std::norm(p.hw(k, i));
    for (int i = 0; i <= L; ++i) t += std::norm(p.uw(k, i));
    const double aw = s.weights(k, 0) * wm.omega(k, 0);
    f += aw * (std::norm(wm.mu(k, 0)) * t - 2.0 * std::real(wm.mu(k, 0) * p.hw(k, k + 1)));
    for (int l = 0; l < L; ++l) {
      double tu = 0.0;
      for (int i = 1; i <= L; ++i) tu += std::norm(p.vw[k](l, i));
      for (int i = 0; i <= K; ++i) tu += std::norm(p.fw[k](l, i));
      const double awu = s.weights(k, l + 1) * wm.omega(k, l + 1);
      f += awu * (std::norm(wm.mu(k, l + 1)) * tu - 2.0 * std::real(wm.mu(k, l + 1) * p.vw[k](l, l + 1)));
    }
  }
  return f;
}

ScaResult sca_optimize(const Scenario& s, const ChannelSet& ch, const EffectiveChannels& eff,
                       const DesignVariables& vars, const WmmseState& wm, const RatePlan& plan, double tol,
                       int max_outer, const BeamOptions& opt) {
  ScaResult res;
  res.vars = vars;
  double f_prev = beam_objective(s, ch, eff, vars, wm);
  res.objective.push_back(f_prev);
  for (int it = 0; it < max_outer; ++it) {
    BeamSubproblem sub = build_subproblem(s, ch, eff, wm, plan, res.vars, opt);
    SolveOptions so;
    so.tolerance = opt.solver_tolerance;
    so.max_iterations = opt.solver_max_iterations;
    so.initial_point = sub.layout.lift(res.vars);
    const ConvexSolution sol = solve(sub.problem, so);
    ++res.solves;
    const bool usable = sol.status == SolveStatus::Optimal ||
                        (sol.status == SolveStatus::MaxIterations && max_soc_violation(sub.problem, sol.x) <= 0.0);
    if (!usable) {
      if (it == 0) throw SubproblemInfeasible(std::string("beamforming restriction: ") + to_string(sol.status));
      break;
    }
    DesignVariables next = res.vars;
    sub.layout.unlift(sol.x, next);
    const double f_new = beam_objective(s, ch, eff, next, wm);
    // Solver noise can leave a marginally worse point; keep the anchor then.
    if (f_new > f_prev + 1e-12 * std::max(1.0, std::abs(f_prev))) break;
    res.vars = std::move(next);
    res.objective.push_back(f_new);
    if (!(f_prev - f_new > tol * std::max(std::abs(f_prev), 1e-300))) break;
    f_prev = f_new;
  }
  return res;
}

}  // namespace sagin
