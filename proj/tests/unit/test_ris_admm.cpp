#include <doctest.h>

#include <random>

#include <Eigen/Cholesky>

#include "../support.hpp"
#include "sagin/ris_admm.hpp"

using namespace sagin;
using namespace testing_support;

namespace {

struct Instance {
  Scenario s;
  ChannelSet ch;
  DesignVariables v;
  WmmseState wm;
};

Instance make(std::mt19937_64& rng, Dims d, bool reflections = true) {
  Instance in;
  in.s = abstract_scenario(rng, d.K, d.L);
  in.ch = random_channels(rng, d, reflections);
  in.v = random_vars(rng, in.s, d);
  in.wm = refresh_wmmse(in.s, in.ch, effective_channels(in.ch, in.v.phases), in.v);
  return in;
}

double direct_g(const Instance& in, const std::vector<CVec>& zeta) {
  std::vector<CVec> ht;
  std::vector<std::vector<CVec>> ft;
  oracle_effective_all(in.ch, zeta, ht, ft);
  return oracle_surrogate(in.s, ht, ft, in.ch, in.v, in.wm);
}

/// Unconstrained zeta step through the dense real normal equations.
CVec kkt_oracle(const PhaseQuadraticForm& form, int k, double scale, const CVec& target, double rho) {
  const int n = static_cast<int>(target.size());
  RMat H = rho * RMat::Identity(2 * n, 2 * n);
  RVec rhs(2 * n);
  rhs << rho * target.real(), rho * target.imag();
  for (const CVec& c : form.c[k]) {
    RVec r1(2 * n), r2(2 * n);
    r1 << c.real(), -c.imag();
    r2 << c.imag(), c.real();
    H += 2.0 * scale * (r1 * r1.transpose() + r2 * r2.transpose());
  }
  for (const CVec& d : form.d[k]) {
    RVec e(2 * n);
    e << d.real(), -d.imag();
    rhs -= scale * e;
  }
  const RVec x = H.ldlt().solve(rhs);
  CVec z(n);
  for (int i = 0; i < n; ++i) z(i) = Complex(x(i), x(n + i));
  return z;
}

}  // namespace

TEST_SUITE("ris_admm") {
  TEST_CASE("form agrees with direct evaluation at random unit-modulus points") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> small(1, 3), ant(1, 4);
    for (int t = 0; t < 10; ++t) {
      const Dims d{small(rng), small(rng), ant(rng), ant(rng), ant(rng)};
      const Instance in = make(rng, d);
      const PhaseQuadraticForm form = assemble_form(in.s, in.ch, in.v, in.wm);
      for (int k = 0; k < d.K; ++k) {
        CHECK(form.c[k].size() == std::size_t(d.K + (d.K + 1) * d.L));
        CHECK(form.d[k].size() == std::size_t((d.K + 1) * (d.L + 1)));
      }
      for (int r = 0; r < 100; ++r) {
        std::vector<CVec> z;
        for (int k = 0; k < d.K; ++k) z.push_back(random_unit_modulus(rng, d.NR));
        CHECK(rel_err(form.evaluate(z), direct_g(in, z)) < 1e-9);
        CHECK(rel_err(phase_objective(in.s, in.ch, in.v, in.wm, z), direct_g(in, z)) < 1e-9);
      }
    }
  }

  TEST_CASE("no reflected paths: the form is constant") {
    std::mt19937_64 rng(2);
    const Instance in = make(rng, {2, 2, 3, 3, 4}, false);
    const PhaseQuadraticForm form = assemble_form(in.s, in.ch, in.v, in.wm);
    for (int k = 0; k < 2; ++k) {
      for (const auto& c : form.c[k]) CHECK(c.isZero());
      for (const auto& d : form.d[k]) CHECK(d.isZero());
    }
    const std::vector<CVec> z{random_unit_modulus(rng, 4), random_unit_modulus(rng, 4)};
    CHECK(form.m == doctest::Approx(direct_g(in, z)).epsilon(1e-12));
  }

  TEST_CASE("scalar instance against hand expansion") {
    std::mt19937_64 rng(3);
    const Instance in = make(rng, {1, 0, 1, 1, 1});
    const PhaseQuadraticForm form = assemble_form(in.s, in.ch, in.v, in.wm);
    const double aw = in.s.weights(0, 0) * in.wm.omega(0, 0);
    const Complex mu = in.wm.mu(0, 0);
    const Complex a = std::conj(in.ch.h[0](0)) * in.v.w_sat[0](0);
    const Complex x = std::conj(in.ch.g[0](0)) * in.ch.G[0](0, 0) * in.v.w_sat[0](0);
    const double bs = std::norm(std::conj(in.ch.u[0](0)) * in.v.w_bs_common[0](0));
    double csum = 0.0;
    for (const auto& c : form.c[0]) csum += std::norm(c(0));
    Complex dsum = 0.0;
    for (const auto& d : form.d[0]) dsum += d(0);
    CHECK(csum == doctest::Approx(aw * std::norm(mu) * std::norm(x)).epsilon(1e-12));
    const Complex dexp = 2.0 * aw * std::norm(mu) * std::conj(a) * x - 2.0 * aw * mu * x;
    CHECK(std::abs(dsum - dexp) <= 1e-12 * std::abs(dexp));
    const double mexp = aw * (std::norm(mu) * (std::norm(a) + bs) - 2.0 * std::real(mu * a));
    CHECK(form.m == doctest::Approx(mexp).epsilon(1e-12));
  }

  TEST_CASE("projection") {
    CVec in(4);
    in << Complex(2, 0), Complex(0, -3), Complex(0, 0), Complex(3, 4);
    const CVec z = project_unit_modulus(in);
    CHECK(z(0) == Complex(1, 0));
    CHECK(std::abs(z(1) - Complex(0, -1)) < 1e-15);
    CHECK(z(2) == Complex(1, 0));
    CHECK(std::abs(z(3) - Complex(0.6, 0.8)) < 1e-15);
  }

  TEST_CASE("zeta step") {
    std::mt19937_64 rng(4);
    PhaseQuadraticForm empty;
    empty.c.resize(1);
    empty.d.resize(1);
    empty.c[0].push_back(CVec::Zero(3));
    empty.d[0].push_back(CVec::Zero(3));
    const CVec target = random_cvec(rng, 3);
    CHECK((zeta_update(empty, 0, 1.0, target, 0.7, {}, target) - target).norm() == doctest::Approx(0.0));

    const Instance in = make(rng, {2, 2, 3, 3, 5});
    const PhaseQuadraticForm form = assemble_form(in.s, in.ch, in.v, in.wm);
    const CVec t5 = random_cvec(rng, 5);
    CHECK((zeta_update(form, 1, 1.0, t5, 1e9, {}, t5) - t5).norm() <= 1e-6);
    for (double rho : {0.1, 1.0, 10.0})
      for (double scale : {0.5, 3.0}) {
        const CVec got = zeta_update(form, 0, scale, t5, rho, {}, t5);
        const CVec ref = kkt_oracle(form, 0, scale, t5, rho);
        CHECK((got - ref).norm() <= 1e-8 * std::max(1.0, ref.norm()));
      }
  }

  TEST_CASE("Taylor-anchored phase constraints are conservative") {
    std::mt19937_64 rng(5);
    Instance in = make(rng, {2, 2, 3, 3, 4});
    in.s.rmin_es = in.s.rmin_ue = 0.3;
    RatePlan plan = RatePlan::zeros(2, 2);
    plan.es << 0.05, 0.02;
    plan.ue.setConstant(0.01);
    for (int k = 0; k < 2; ++k) {
      const auto cons = phase_constraints(in.s, in.ch, in.v, plan, k);
      CHECK(cons.size() == 2u + 2u * 2u);
      for (int t = 0; t < 500; ++t) {
        const CVec z = random_cvec(rng, 4), anchor = random_cvec(rng, 4);
        for (const auto& c : cons) {
          CHECK(c.slack(z, anchor) >= c.true_slack(z) - 1e-12 * std::max(1.0, std::abs(c.true_slack(z))));
          CHECK(c.slack(z, z) == doctest::Approx(c.true_slack(z)).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("zero reflections terminate at once with zero residuals") {
    std::mt19937_64 rng(6);
    const Instance in = make(rng, {2, 1, 3, 3, 4}, false);
    const AdmmResult r = admm_optimize(in.s, in.ch, in.v, in.wm, RatePlan::zeros(2, 1));
    CHECK(r.iterations <= 2);
    CHECK(r.primal_residual == doctest::Approx(0.0));
    CHECK(r.dual_residual == doctest::Approx(0.0));
  }

  TEST_CASE("single element lands on the closed-form minimizer") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
      Instance in = make(rng, {1, 0, 3, 2, 1});
      in.ch.u[0].setZero();
      in.s.rmin_es = 0.0;
      in.v.w_sat_common.setZero();
      in.wm = refresh_wmmse(in.s, in.ch, effective_channels(in.ch, in.v.phases), in.v);
      const AdmmResult r = admm_optimize(in.s, in.ch, in.v, in.wm, RatePlan::zeros(1, 0));
      // g(zeta) is |mu (a + zeta x) - 1|^2 up to constants and a positive factor.
      const Complex mu = in.wm.mu(0, 0);
      const Complex a = ip(in.ch.h[0], in.v.w_sat[0]);
      const Complex x = ip(in.ch.g[0], CVec(in.ch.G[0] * in.v.w_sat[0]));
      const double expect = std::arg(1.0 - mu * a) - std::arg(mu * x);
      CHECK(std::abs(std::remainder(r.phases[0](0) - expect, kTwoPi)) <= 1e-3);
    }
  }

  TEST_CASE("random instances: residual contract and exact unit modulus") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
      Instance in = make(rng, {2, 2, 3, 3, 4});
      in.s.rmin_es = in.s.rmin_ue = 0.0;
      const AdmmResult r = admm_optimize(in.s, in.ch, in.v, in.wm, RatePlan::zeros(2, 2));
      REQUIRE(r.iterations < AdmmOptions{}.max_iter);
      CHECK(r.primal_residual <= 1e-4);
      CHECK(r.dual_residual <= 1e-4);
      for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < 4; ++i) {
          CHECK(std::abs(std::abs(r.state.Z[k](i)) - 1.0) <= 1e-12);
          CHECK(std::abs(std::abs(r.state.zeta[k](i)) - 1.0) <= 1e-4);
          CHECK(r.phases[k](i) >= 0.0);
          CHECK(r.phases[k](i) < kTwoPi);
        }
      }
    }
  }
}
