#include <catch_amalgamated.hpp>

#include "sosmom/config.hpp"
#include "sosmom/harness.hpp"
#include "sosmom/io.hpp"

#include <random>
#include <sstream>

using namespace sosmom;
using Catch::Approx;

TEST_CASE("median of means in one dimension") {
  CHECK(median_of_means_1d(std::vector<double>(12, 2.5), 4) == 2.5);
  std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(median_of_means_1d(x, 4) == 3.5);
  CHECK(median_of_means_1d(x, 3) == Approx(3.5));  // buckets (1,2) (3,4) (5,6), remainder dropped
  auto y = x;
  y[7] = 1e6;
  // bucket means (1.5, 3.5, 5.5, 500003.5): the lower median is unchanged
  CHECK(median_of_means_1d(y, 4) == 3.5);
  y = x;
  y[0] = 1e6;
  // bucket means (500001, 3.5, 5.5, 7.5): moves by one gap
  CHECK(median_of_means_1d(y, 4) == 5.5);
  CHECK(std::abs(median_of_means_1d(y, 4) - median_of_means_1d(x, 4)) <= 2.0);
  CHECK_THROWS_AS(median_of_means_1d(x, 9), InvalidArgument);
}

TEST_CASE("tail quantile is the ceil((1 - delta) T) order statistic") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  for (int trials : {1, 7, 100, 2000}) {
    std::vector<double> e(trials);
    for (auto& v : e) v = u(rng);
    auto sorted = e;
    std::sort(sorted.begin(), sorted.end());
    for (double delta : {0.002, 0.01, 0.1, 0.5, 0.9}) {
      long idx = static_cast<long>(std::ceil((1.0 - delta) * trials - 1e-9));
      idx = std::max(1L, idx);
      CHECK(tail_quantile(e, delta) == sorted[idx - 1]);
    }
  }
  CHECK(tail_quantile({3.0, 1.0, 2.0, 4.0}, 0.5) == 2.0);
  CHECK(tail_quantile({3.0, 1.0, 2.0, 4.0}, 0.25) == 3.0);
}

TEST_CASE("benchmark bookkeeping and reproducibility") {
  BenchConfig cfg;
  cfg.dist.d = 1;
  cfg.n = 200;
  cfg.deltas = {0.1, 0.01};
  cfg.trials = 1;
  const auto one = run_tail_benchmark(cfg);
  REQUIRE(one.rows.size() == 4);
  for (const auto& r : one.rows) {
    CHECK(r.trials == 1);
    CHECK(r.quantile_error == r.mean_error);
    CHECK(r.quantile_error >= 0.0);
  }
  cfg.trials = 30;
  std::ostringstream a, b;
  write_bench_csv(a, run_tail_benchmark(cfg));
  write_bench_csv(b, run_tail_benchmark(cfg));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind(kBenchCsvHeader, 0) == 0);
  cfg.seed = 2;
  std::ostringstream c;
  write_bench_csv(c, run_tail_benchmark(cfg));
  CHECK(c.str() != a.str());

  BenchConfig bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS(run_tail_benchmark(bad), InvalidArgument);
  bad = cfg;
  bad.deltas = {1.0};
  CHECK_THROWS_AS(run_tail_benchmark(bad), InvalidArgument);
  bad = cfg;
  bad.estimators = {"ols"};
  CHECK_THROWS_AS(run_tail_benchmark(bad), InvalidArgument);
}

TEST_CASE("estimator failures are recorded per row") {
  BenchConfig cfg;
  cfg.task = BenchTask::mean_norm;
  cfg.dist.d = 2;
  cfg.n = 10;
  cfg.deltas = {1e-9};  // needs more buckets than samples
  cfg.trials = 3;
  const auto rep = run_tail_benchmark(cfg);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].failures == 0);
  CHECK(rep.rows[1].failures == 3);
  CHECK(std::isnan(rep.rows[1].quantile_error));
}

TEST_CASE("Gaussian data: both mean estimators are comparable at constant confidence") {
  BenchConfig cfg;
  cfg.dist.d = 1;
  cfg.n = 4000;
  cfg.deltas = {0.5};
  cfg.trials = 500;
  const auto rep = run_tail_benchmark(cfg);
  const double a = rep.rows[0].quantile_error, b = rep.rows[1].quantile_error;
  CHECK(a <= 2.0 * b);
  CHECK(b <= 2.0 * a);
}

TEST_CASE("other benchmark tasks run") {
  BenchConfig cfg;
  cfg.task = BenchTask::cov;
  cfg.dist.d = 2;
  cfg.n = 400;
  cfg.deltas = {0.1};
  cfg.trials = 2;
  auto rep = run_tail_benchmark(cfg);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& r : rep.rows) CHECK(r.failures == 0);
  CHECK(rep.rows[1].quantile_error < 1.0);

  cfg.task = BenchTask::regress;
  rep = run_tail_benchmark(cfg);
  for (const auto& r : rep.rows) CHECK(r.failures == 0);
  CHECK(rep.rows[0].quantile_error < 0.5);

  cfg.task = BenchTask::mean_norm;
  cfg.norm = "linf";
  rep = run_tail_benchmark(cfg);
  for (const auto& r : rep.rows) CHECK(r.failures == 0);
}

TEST_CASE("dataset files") {
  DistSpec s;
  s.d = 3;
  const auto data = sample_dist(s, 20, 5);
  std::stringstream buf;
  write_dataset(buf, data);
  CHECK(read_dataset(buf).samples == data.samples);

  std::istringstream short_row("2 3\n1 2 3\n4 5\n");
  try {
    read_dataset(short_row);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream bad_second("2 3\n1 2\n4 5 6\n");
  try {
    read_dataset(bad_second);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream empty("");
  try {
    read_dataset(empty);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("missing header") != std::string::npos);
  }
}

TEST_CASE("flat config files") {
  std::istringstream in("# run settings\nseed = 7\n--trials=20\n\ndelta = 0.1,0.01  # grid\n");
  const auto kv = read_flat_config(in);
  REQUIRE(kv.size() == 3);
  CHECK(kv[0] == std::make_pair(std::string("seed"), std::string("7")));
  CHECK(kv[1] == std::make_pair(std::string("trials"), std::string("20")));
  CHECK(kv[2].second == "0.1,0.01");
  const auto args = merge_config_args({"bench", "--trials", "5"}, kv);
  CHECK(args == std::vector<std::string>{"bench", "--trials", "5", "--seed=7", "--delta=0.1,0.01"});

  std::istringstream bad("seed = 1\nnot a pair\n");
  try {
    read_flat_config(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream dup("seed = 1\nseed = 2\n");
  CHECK_THROWS_AS(read_flat_config(dup), ParseError);
}
