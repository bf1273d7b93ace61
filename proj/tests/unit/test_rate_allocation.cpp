#include <doctest.h>

#include <random>

#include "../support.hpp"

using namespace sagin;
using namespace testing_support;

namespace {

RateBounds pool_bounds(const std::vector<double>& floors, double cap) {
  RateBounds b;
  b.es_common_capacity = cap;
  b.es_floor = Eigen::Map<const RVec>(floors.data(), floors.size());
  b.ue_common_capacity = RVec::Zero(floors.size());
  b.ue_floor = RMat::Zero(floors.size(), 0);
  return b;
}

RMat es_weights(const std::vector<double>& w) {
  RMat m(w.size(), 1);
  for (std::size_t i = 0; i < w.size(); ++i) m(i, 0) = w[i];
  return m;
}

}  // namespace

TEST_SUITE("rate_allocation") {
  TEST_CASE("bounds") {
    std::mt19937_64 rng(1);
    Scenario s = abstract_scenario(rng, 2, 1);
    s.rmin_es = 1.0;
    SinrSet g{RVec(2), RVec(2), RMat(2, 1), RMat(2, 1)};
    g.es_common << 1.0, 3.0;
    g.es_private << 0.0, 1e9;
    g.ue_common << 7.0, 0.5;
    g.ue_private << 0.0, 0.0;
    const RateBounds b = compute_bounds(g, s);
    CHECK(b.es_common_capacity == doctest::Approx(1.0));
    CHECK(b.es_floor(0) == doctest::Approx(1.0));
    CHECK(b.es_floor(1) == 0.0);
    CHECK(b.ue_common_capacity(0) == doctest::Approx(3.0));
    CHECK(b.ue_common_capacity(1) == doctest::Approx(std::log2(1.5)));
    CHECK(b.ue_floor(0, 0) == doctest::Approx(0.1));
  }

  TEST_CASE("single winner takes the slack") {
    const auto r = greedy_allocate(pool_bounds({0, 0}, 4.0), es_weights({0.7, 0.3}));
    REQUIRE(std::holds_alternative<RatePlan>(r));
    const RatePlan& p = std::get<RatePlan>(r);
    CHECK(p.es(0) == 4.0);
    CHECK(p.es(1) == 0.0);
  }

  TEST_CASE("floors then slack to the heaviest") {
    const auto r = greedy_allocate(pool_bounds({1, 2}, 4.0), es_weights({0.3, 0.7}));
    REQUIRE(std::holds_alternative<RatePlan>(r));
    const RatePlan& p = std::get<RatePlan>(r);
    CHECK(p.es(0) == 1.0);
    CHECK(p.es(1) == 3.0);
    CHECK(0.3 * 1 + 0.7 * 3 == doctest::Approx(lp_pool_oracle({1, 2}, {0.3, 0.7}, 4.0).value));
  }

  TEST_CASE("floors above capacity are infeasible") {
    const auto r = greedy_allocate(pool_bounds({3, 2}, 4.0), es_weights({0.5, 0.5}));
    REQUIRE(std::holds_alternative<Infeasible>(r));
    CHECK(std::get<Infeasible>(r).pool == -1);

    RateBounds b = pool_bounds({0, 0}, 4.0);
    b.ue_common_capacity = RVec::Constant(2, 1.0);
    b.ue_floor = RMat::Zero(2, 2);
    b.ue_floor(1, 0) = 0.6;
    b.ue_floor(1, 1) = 0.6;
    const auto r2 = greedy_allocate(b, RMat::Constant(2, 3, 1.0 / 6));
    REQUIRE(std::holds_alternative<Infeasible>(r2));
    CHECK(std::get<Infeasible>(r2).pool == 1);
  }

  TEST_CASE("ties go to the lowest index") {
    const auto r = greedy_allocate(pool_bounds({0, 0, 0}, 2.0), es_weights({0.2, 0.4, 0.4}));
    const RatePlan& p = std::get<RatePlan>(r);
    CHECK(p.es(1) == 2.0);
    CHECK(p.es(2) == 0.0);
  }

  TEST_CASE("greedy matches the LP oracle on random pools") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> kd(1, 4), ld(1, 3);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    int infeasible = 0;
    for (int t = 0; t < 200; ++t) {
      const int K = kd(rng), L = ld(rng);
      RateBounds b;
      b.es_floor.resize(K);
      b.ue_floor.resize(K, L);
      b.ue_common_capacity.resize(K);
      for (int k = 0; k < K; ++k) {
        b.es_floor(k) = ud(rng) < 0.4 ? 0.0 : ud(rng);
        b.ue_common_capacity(k) = 2.0 * ud(rng);
        for (int l = 0; l < L; ++l) b.ue_floor(k, l) = ud(rng) < 0.4 ? 0.0 : ud(rng);
      }
      b.es_common_capacity = 3.0 * ud(rng);
      RMat w(K, L + 1);
      for (int k = 0; k < K; ++k)
        for (int j = 0; j <= L; ++j) w(k, j) = ud(rng);

      bool feasible = true;
      double best = 0.0;
      std::vector<double> f(b.es_floor.data(), b.es_floor.data() + K), a;
      for (int k = 0; k < K; ++k) a.push_back(w(k, 0));
      const PoolOracle sat = lp_pool_oracle(f, a, b.es_common_capacity);
      feasible = feasible && sat.feasible;
      best += sat.value;
      for (int k = 0; k < K && feasible; ++k) {
        std::vector<double> fk, ak;
        for (int l = 0; l < L; ++l) {
          fk.push_back(b.ue_floor(k, l));
          ak.push_back(w(k, l + 1));
        }
        const PoolOracle o = lp_pool_oracle(fk, ak, b.ue_common_capacity(k));
        feasible = feasible && o.feasible;
        best += o.value;
      }
      const auto r = greedy_allocate(b, w);
      REQUIRE(std::holds_alternative<RatePlan>(r) == feasible);
      if (!feasible) {
        ++infeasible;
        continue;
      }
      const RatePlan& p = std::get<RatePlan>(r);
      double value = 0.0;
      for (int k = 0; k < K; ++k) {
        value += w(k, 0) * p.es(k);
        CHECK(p.es(k) >= b.es_floor(k));
        for (int l = 0; l < L; ++l) {
          value += w(k, l + 1) * p.ue(k, l);
          CHECK(p.ue(k, l) >= b.ue_floor(k, l));
        }
        CHECK(p.ue.row(k).sum() == doctest::Approx(b.ue_common_capacity(k)).epsilon(1e-12));
      }
      CHECK(p.es.sum() == doctest::Approx(b.es_common_capacity).epsilon(1e-12));
      CHECK(std::abs(value - best) <= 1e-9);
    }
    CHECK(infeasible > 0);
    CHECK(infeasible < 200);
  }
}
