#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "risim/config.hpp"

using namespace risim;

TEST_CASE("approach names round trip and classify") {
  for (Approach a : kAllApproaches) CHECK(approach_from_string(to_string(a)) == a);
  CHECK_THROWS(approach_from_string("psychic"));
  CHECK(!is_trained(Approach::Random));
  CHECK(is_trained(Approach::ChanFl));
  CHECK(is_federated(Approach::PosFl));
  CHECK(!is_federated(Approach::PosInd));
  CHECK(approach_encoder(Approach::PosFl) == EncoderKind::PosInd);
  CHECK(approach_encoder(Approach::ChanCen) == EncoderKind::ChanCen);
}

TEST_CASE("outage cdf counts the fraction at or below each threshold") {
  const std::vector<double> samples = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> thresholds = {0.5, 1.0, 2.5, 4.0, 9.0};
  const std::vector<double> cdf = outage_cdf(samples, thresholds);
  CHECK(cdf == std::vector<double>{0.0, 0.25, 0.5, 1.0, 1.0});
}

TEST_CASE("outage rate picks the empirical quantile") {
  std::vector<double> samples;
  for (int i = 1; i <= 100; ++i) samples.push_back(static_cast<double>(i));
  CHECK(outage_rate(samples, 0.05) == 5.0);
  CHECK(outage_rate(samples, 0.5) == 50.0);
  const std::vector<double> tiny = {7.0, 3.0};
  CHECK(outage_rate(tiny, 0.05) == 3.0);
  CHECK_THROWS(outage_rate(tiny, 0.0));
}

TEST_CASE("emitted tables reload into the same metrics") {
  // two fake approaches over five samples, exhaustive first
  std::vector<std::pair<Approach, std::vector<double>>> fake = {
      {Approach::Exhaustive, {2.0, 3.0, 4.0, 5.0, 6.0}},
      {Approach::Random, {1.5, 2.5, 4.0, 4.5, 5.0}},
  };
  Metrics metrics;
  {
    // finalize through the public path: write rates.csv by hand, read it back
    const auto dir = std::filesystem::temp_directory_path() / "risim_report_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "rates.csv").string();
    {
      std::ofstream os(path);
      os << "sample,exhaustive,random,exhaustive_ratio,random_ratio\n";
      for (std::size_t i = 0; i < 5; ++i)
        os << i << ',' << fake[0].second[i] << ',' << fake[1].second[i] << ",1,1\n";
    }
    metrics = metrics_from_rates_csv(path);
    std::filesystem::remove_all(dir);
  }
  REQUIRE(metrics.per_approach.size() == 2);
  CHECK(metrics.of(Approach::Exhaustive).mean_rate == doctest::Approx(4.0));
  CHECK(metrics.of(Approach::Exhaustive).normalized == 1.0);
  CHECK(metrics.of(Approach::Random).normalized == doctest::Approx(3.5 / 4.0));
  CHECK(metrics.of(Approach::Random).outage5 == 1.5);
  REQUIRE(metrics.thresholds.size() == 200);
  CHECK(metrics.thresholds.front() == doctest::Approx(1.5));
  CHECK(metrics.thresholds.back() == doctest::Approx(6.0));
  CHECK(metrics.cdf[0].back() == 1.0);

  const auto out = std::filesystem::temp_directory_path() / "risim_emit_test";
  emit_results(metrics, "seed=1\n", out.string());
  const Metrics again = metrics_from_rates_csv((out / "rates.csv").string());
  CHECK(again.of(Approach::Random).mean_rate == metrics.of(Approach::Random).mean_rate);
  CHECK(again.thresholds == metrics.thresholds);
  CHECK(again.cdf == metrics.cdf);
  std::ifstream manifest(out / "manifest.txt");
  std::string line;
  std::getline(manifest, line);
  CHECK(line == "risim 1.0.0");
  std::filesystem::remove_all(out);
}

TEST_CASE("a tiny end to end experiment satisfies the structural invariants") {
  ExperimentConfig cfg;
  apply_config_key(cfg, "setup", "1");
  apply_config_key(cfg, "rows", "2");
  apply_config_key(cfg, "cols", "2");
  apply_config_key(cfg, "groups_per_ris", "2");
  apply_config_key(cfg, "n_train", "18");
  apply_config_key(cfg, "n_test", "10");
  apply_config_key(cfg, "epochs", "4");
  apply_config_key(cfg, "approaches", "exhaustive,random,no_ris,chan_ind,pos_fl");
  apply_config_key(cfg, "fl_rounds", "2");
  apply_config_key(cfg, "fl_local_epochs", "2");
  apply_config_key(cfg, "nn_hidden_ind", "8");
  const RunResult run = run_experiment(cfg);
  REQUIRE(run.trained.size() == 2);
  CHECK(run.metrics.per_approach.size() == 5);
  CHECK(run.metrics.of(Approach::Exhaustive).normalized == 1.0);
  const std::vector<double>& ex = run.metrics.of(Approach::Exhaustive).rates;
  for (const ApproachMetrics& am : run.metrics.per_approach) {
    REQUIRE(am.rates.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(am.rates[i] <= ex[i]);
  }
  // exhaustive cdf dominates pointwise
  for (std::size_t a = 1; a < run.metrics.per_approach.size(); ++a)
    for (std::size_t k = 0; k < run.metrics.thresholds.size(); ++k)
      CHECK(run.metrics.cdf[0][k] <= run.metrics.cdf[a][k]);
}
