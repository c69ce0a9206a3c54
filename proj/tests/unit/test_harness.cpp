#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "evobench/errors.hpp"
#include "evobench/harness.hpp"
#include "evobench/rng.hpp"

using namespace evobench;

namespace {

RunRecord rec(std::size_t steps, bool success = true) {
  RunRecord r;
  r.function = "ackley";
  r.dim = 10;
  r.algorithm = "Germany";
  r.steps = steps;
  r.success = success;
  return r;
}

}  // namespace

TEST_CASE("summary arithmetic") {
  const auto s = summarize({rec(100), rec(200), rec(300)});
  CHECK(s.runs == 3);
  CHECK(s.successes == 3);
  CHECK(s.average == 200.0);
  CHECK(s.max == 300.0);
  CHECK(s.min == 100.0);
  CHECK(s.median == 200.0);
  CHECK(s.max_dev_pct == doctest::Approx(50.0));
  CHECK(s.min_dev_pct == doctest::Approx(50.0));
  CHECK(s.std_dev == doctest::Approx(100.0));
  CHECK_FALSE(s.unsolved);

  const auto one = summarize({rec(777)});
  CHECK(one.max == one.min);
  CHECK(one.average == 777.0);
  CHECK(one.max_dev_pct == 0.0);
  CHECK(one.std_dev == 0.0);

  const auto failed = summarize({rec(10, false), rec(20, false)});
  CHECK(failed.unsolved);
  CHECK(failed.successes == 0);

  // failures count as runs but not in the statistics
  const auto mixed = summarize({rec(10), rec(1000000, false), rec(30)});
  CHECK(mixed.runs == 3);
  CHECK(mixed.average == 20.0);
  CHECK(mixed.median == 20.0);
}

TEST_CASE("summary matches an independent recomputation") {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<RunRecord> rs;
    std::vector<double> ok;
    const std::size_t n = 1 + rng.index(12);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t steps = 1 + rng.index(100000);
      const bool success = rng.bernoulli(0.8);
      rs.push_back(rec(steps, success));
      if (success) ok.push_back(double(steps));
    }
    const auto s = summarize(rs);
    if (ok.empty()) {
      CHECK(s.unsolved);
      continue;
    }
    std::sort(ok.begin(), ok.end());
    const double mean = std::accumulate(ok.begin(), ok.end(), 0.0) / ok.size();
    double ss = 0;
    for (double v : ok) ss += (v - mean) * (v - mean);
    const double sd = ok.size() > 1 ? std::sqrt(ss / (ok.size() - 1)) : 0.0;
    const std::size_t m = ok.size();
    const double median = m % 2 ? ok[m / 2] : 0.5 * (ok[m / 2 - 1] + ok[m / 2]);
    CHECK(s.average == doctest::Approx(mean));
    CHECK(s.std_dev == doctest::Approx(sd));
    CHECK(s.median == median);
    CHECK(s.min <= s.average);
    CHECK(s.average <= s.max);
    CHECK(s.max_dev_pct == doctest::Approx((ok.back() - mean) / mean * 100));
    CHECK(s.min_dev_pct == doctest::Approx((mean - ok.front()) / mean * 100));
  }
}

TEST_CASE("power-law fits") {
  const std::vector<double> d{25, 50, 100, 200};
  std::vector<double> s;
  for (double x : d) s.push_back(7 * x);
  auto f = fit_power_law(d, s);
  CHECK(f.ok);
  CHECK(f.exponent == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(f.residual < 1e-12);
  CHECK(f.dim_lo == 25);
  CHECK(f.dim_hi == 200);
  s.clear();
  for (double x : d) s.push_back(3 * x * x);
  CHECK(fit_power_law(d, s).exponent == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_FALSE(fit_power_law({10}, {5}).ok);
  CHECK_FALSE(fit_power_law({10, 10}, {5, 6}).ok);
  CHECK_THROWS_AS(fit_power_law({1, 2}, {1}), ConfigError);
  CHECK_THROWS_AS(fit_power_law({1, 2}, {1, 0}), ConfigError);
}

TEST_CASE("series fits skip unsolved dimensions") {
  ScalingSeries s;
  for (std::size_t d : {10, 20, 40}) {
    SeriesPoint p;
    p.dim = d;
    p.result.records = {rec(5 * d, d != 40)};
    p.result.summary = summarize(p.result.records);
    s.points.push_back(p);
  }
  const auto f = fit_series(s);
  CHECK(f.ok);
  CHECK(f.points == 2);
  CHECK(f.exponent == doctest::Approx(1.0));
  s.points.resize(1);
  CHECK_FALSE(fit_series(s).ok);
}

TEST_CASE("repeat runs and sweeps") {
  ExperimentSpec spec;
  spec.function = "rastrigin";
  spec.dim = 5;
  spec.locopt = true;
  spec.pool.pool_size = 30;
  spec.workers = 3;
  const auto r = repeat_runs(spec, 4, 100);
  REQUIRE(r.records.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.records[i].seed == 101 + i);
  CHECK(r.summary.runs == 4);
  // parallel repeats equal serial ones
  spec.workers = 1;
  const auto serial = repeat_runs(spec, 4, 100);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(serial.records[i].steps == r.records[i].steps);
    CHECK(serial.records[i].best_genes == r.records[i].best_genes);
  }
  CHECK_THROWS_AS(repeat_runs(spec, 0, 1), ConfigError);

  const auto sweep = dimension_sweep(spec, {4, 5, 6}, 2, 0);
  CHECK(sweep.points.size() == 3);
  CHECK(sweep.algorithm == "Germany");
  CHECK(sweep.fit.ok);
  CHECK_THROWS_AS(dimension_sweep(spec, {3, 3}, 2, 0), ConfigError);
  CHECK_THROWS_AS(dimension_sweep(spec, {}, 2, 0), ConfigError);

  spec.function = "nope";
  CHECK_THROWS(repeat_runs(spec, 1, 1));
}

TEST_CASE("records CSV round trip") {
  std::vector<RunRecord> rs;
  for (int i = 0; i < 5; ++i) {
    RunRecord r = rec(1000 + i, i % 2 == 0);
    r.locopt = i % 3 == 0;
    r.niche_cells = i == 2 ? 10 : 0;
    r.mnic = i == 2 ? 50 : 0;
    r.seed = 1ULL << (10 + i);
    r.best_value = 1.0 / (3 + i);
    r.wall_ms = 12.5 * i;
    rs.push_back(r);
  }
  std::stringstream ss;
  write_records_csv(rs, ss, {"function=ackley", "pool_size=1000"});
  const std::string text = ss.str();
  CHECK(text.find("# config: pool_size=1000") != std::string::npos);
  CHECK(text.find("function,dim,algorithm,locopt,niching,mnic,seed,steps,success,best_value,wall_ms") !=
        std::string::npos);
  const auto back = read_records_csv(ss);
  REQUIRE(back.size() == rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) CHECK(back[i] == rs[i]);

  std::stringstream empty;
  write_records_csv({}, empty);
  CHECK(empty.str() == "function,dim,algorithm,locopt,niching,mnic,seed,steps,success,best_value,wall_ms\n");
  CHECK(read_records_csv(empty).empty());

  std::istringstream bad("function,dim\nackley,x\n");
  CHECK_THROWS_AS(read_records_csv(bad), ParseError);
}

TEST_CASE("series CSV and plot script") {
  std::vector<ScalingSeries> all;
  for (const char* alg : {"Holland", "Germany"}) {
    ScalingSeries s;
    s.function = "ackley";
    s.algorithm = alg;
    for (std::size_t d : {10, 20}) {
      SeriesPoint p;
      p.dim = d;
      p.result.records = {rec(d * 10), rec(d * 12)};
      p.result.summary = summarize(p.result.records);
      s.points.push_back(p);
    }
    s.fit = fit_series(s);
    all.push_back(s);
  }
  std::stringstream csv;
  write_series_csv(all, csv);
  const std::string text = csv.str();
  CHECK(text.find("function,algorithm,dim,mean_steps,std_steps,n_success,n_fail") != std::string::npos);
  CHECK(text.find("#fit Holland") != std::string::npos);
  CHECK(text.find("#fit Germany") != std::string::npos);

  std::stringstream plot;
  emit_plot_script(all, plot, "ackley");
  const std::string gp = plot.str();
  CHECK(gp.find("set logscale") != std::string::npos);
  CHECK(gp.find("Holland") != std::string::npos);
  CHECK(gp.find("Germany") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "evobench_empty_plot.gp";
  std::filesystem::remove(path);
  CHECK_THROWS_AS(emit_plot_script(std::vector<ScalingSeries>{}, path), ConfigError);
  CHECK_FALSE(std::filesystem::exists(path));
}

TEST_CASE("summary CSV") {
  std::stringstream ss;
  write_summary_csv({{"ackley", 200, "Germany", summarize({rec(100), rec(300)})}}, ss, {"x=1"});
  CHECK(ss.str().find("ackley,200,Germany,2,2,300,100,200") != std::string::npos);
}

TEST_CASE("experiment description") {
  ExperimentSpec spec;
  spec.niching = {true, 10, 50, true};
  const auto lines = describe(spec);
  auto has = [&](const std::string& l) { return std::find(lines.begin(), lines.end(), l) != lines.end(); };
  CHECK(has("function=ackley"));
  CHECK(has("dim=10"));
  CHECK(has("algorithm=Germany"));
  CHECK(has("pool_size=1000"));
}
