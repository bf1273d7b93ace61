#include <doctest.h>

#include <sstream>

#include "sagin/harness.hpp"

using namespace sagin;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.seeds = {0, 1};
  c.schemes = {Scheme::Proposed, Scheme::NoRis};
  c.optimizer.max_outer = 2;
  c.workers = 2;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("sweep parsing") {
    const Sweep p = parse_sweep("bs_power:20,25,30,35");
    CHECK(p.kind == SweepKind::BsPower);
    CHECK(p.values == std::vector<double>{20, 25, 30, 35});
    const Sweep u = parse_sweep("num_ues:1,2,3");
    CHECK(u.kind == SweepKind::NumUes);
    CHECK(u.values.size() == 3u);
    CHECK(parse_sweep("none").kind == SweepKind::None);
    CHECK_THROWS_AS(parse_sweep("bs_power:"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("height:1,2"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("bs_power:20,abc"), ConfigError);
  }

  TEST_CASE("seed parsing") {
    CHECK(parse_seeds("0-3") == std::vector<std::uint64_t>{0, 1, 2, 3});
    CHECK(parse_seeds("1,4,7") == std::vector<std::uint64_t>{1, 4, 7});
    CHECK(parse_seeds("0-1,10") == std::vector<std::uint64_t>{0, 1, 10});
    CHECK_THROWS_AS(parse_seeds("5-2"), ConfigError);
    CHECK_THROWS_AS(parse_seeds("x"), ConfigError);
    CHECK(parse_schemes("proposed,no_rsma").size() == 2u);
    CHECK_THROWS_AS(parse_schemes("proposed,other"), ConfigError);
  }

  TEST_CASE("validation") {
    ExperimentConfig c = tiny();
    CHECK_NOTHROW(c.validate());
    c.seeds.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = tiny();
    c.sweep = {SweepKind::BsPower, {30, 20}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.sweep = {SweepKind::BsPower, {}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.sweep = {SweepKind::NumUes, {1.5, 2}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.sweep = {SweepKind::NumUes, {0, 2}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("configuration keys") {
    const KeyValueConfig kv = KeyValueConfig::parse(
        "bs.power_dbm = 25\n"
        "experiment.seeds = 0-4\n"
        "experiment.scheme = no_rsma,no_ris\n"
        "experiment.sweep = num_ues:1,2\n"
        "experiment.output = out.csv\n"
        "optimizer.max_outer = 7\n"
        "optimizer.grid_angle_step_deg = 90\n");
    const ExperimentConfig c = experiment_from_config(kv);
    CHECK(c.params.bs_power_dbm == 25.0);
    CHECK(c.seeds.size() == 5u);
    CHECK(c.schemes == std::vector<Scheme>{Scheme::NoRsma, Scheme::NoRis});
    CHECK(c.sweep.kind == SweepKind::NumUes);
    CHECK(c.output_path == "out.csv");
    CHECK(c.optimizer.max_outer == 7);
    CHECK(c.optimizer.grid.angle_step == doctest::Approx(kPi / 2));
    CHECK_THROWS_AS(experiment_from_config(KeyValueConfig::parse("bs.powr_dbm = 25\n")), ConfigError);
    CHECK_THROWS_AS(experiment_from_config(KeyValueConfig::parse("optimizer.max_outer = 0\nexperiment.seeds = 1\n"))
                        .validate(),
                    ConfigError);
  }

  TEST_CASE("sweep values reach the scenario") {
    const ScenarioParams p;
    const Scenario a = build_scenario(p, {SweepKind::BsPower, {20, 35}}, 1, 0);
    CHECK(a.p_bs_max == doctest::Approx(dbm_to_watts(35)));
    const Scenario b = build_scenario(p, {SweepKind::NumUes, {1, 3}}, 1, 0);
    CHECK(b.L() == 3);
    CHECK(b.weights.sum() == doctest::Approx(1.0));
  }

  TEST_CASE("CSV quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    ExperimentRecord r;
    r.scheme = "proposed";
    r.sweep = "none";
    r.seed = 3;
    r.final_row = true;
    r.iteration = 4;
    r.weighted_sum_rate = 0.5;
    r.es_rates = {1.0, 2.0};
    r.ue_rates = {0.25};
    r.feasible = true;
    const std::string row = csv_row(r);
    CHECK(row.rfind("proposed,none,,3,final,4,0.5,", 0) == 0);
    CHECK(row.find("1;2") != std::string::npos);
  }

  TEST_CASE("run output: order, schema, determinism") {
    const ExperimentConfig c = tiny();
    std::ostringstream csv1, tim1, diag1, csv2, diag2;
    const RunSummary s1 = run_experiment(c, csv1, &tim1, diag1);
    ExperimentConfig c2 = c;
    c2.workers = 1;
    const RunSummary s2 = run_experiment(c2, csv2, nullptr, diag2);
    CHECK(s1.cells == 4);
    CHECK(s1.failed == 0);
    CHECK(csv1.str() == csv2.str());
    CHECK(s1.rows == s2.rows);

    const auto rows = lines(csv1.str());
    REQUIRE(rows.size() > 1u);
    CHECK(rows[0] == kCsvHeader);
    int finals = 0;
    std::string last_scheme;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].find(",final,") != std::string::npos) {
        ++finals;
        CHECK(rows[i].find(",1,") != std::string::npos);  // feasible flag
      }
      const std::string scheme = rows[i].substr(0, rows[i].find(','));
      if (scheme != last_scheme) {
        CHECK((last_scheme.empty() || (last_scheme == "proposed" && scheme == "no_ris")));
        last_scheme = scheme;
      }
    }
    CHECK(finals == 4);
    const auto t = lines(tim1.str());
    CHECK(t.size() == 5u);
    CHECK(t[0] == kTimingHeader);
  }

  TEST_CASE("empty seed list is a configuration error") {
    ExperimentConfig c = tiny();
    c.seeds.clear();
    std::ostringstream a, b;
    CHECK_THROWS_AS(run_experiment(c, a, nullptr, b), ConfigError);
  }
}
