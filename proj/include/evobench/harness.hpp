#pragma once

// Repeated runs, dimension sweeps, scatter statistics and log-log scaling
// fits, plus the CSV / plot-script exports.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evobench/functions.hpp"
#include "evobench/ga.hpp"

namespace evobench {

// Everything needed to reproduce a run except the seed.
struct ExperimentSpec {
  std::string function = "ackley";
  FunctionOptions function_options{};
  std::size_t dim = 10;
  CrossoverKind algorithm = CrossoverKind::germany();
  PoolConfig pool{};
  bool locopt = false;
  LocalOptSettings locopt_settings{};
  NichingConfig niching{};
  // Overrides the function's own target (landscapes take theirs from a catalog).
  std::optional<double> target;
  // Budget for independent runs; each run itself is single-worker.
  unsigned workers = 1;

  FunctionSpec resolve() const;
  RunOptions run_options(std::uint64_t seed) const;
};

// "key=value" pairs describing the spec, one per line, for CSV headers.
std::vector<std::string> describe(const ExperimentSpec& spec);

struct ScatterSummary {
  std::size_t runs = 0;
  std::size_t successes = 0;
  // Step statistics over successful runs only.
  double max = 0.0;
  double min = 0.0;
  double average = 0.0;
  double std_dev = 0.0;  // sample standard deviation; 0 for a single run
  double median = 0.0;
  double max_dev_pct = 0.0;  // |max - average| / average * 100
  double min_dev_pct = 0.0;  // |min - average| / average * 100
  bool unsolved = true;
};

ScatterSummary summarize(const std::vector<RunRecord>& records);

struct RepeatResult {
  std::vector<RunRecord> records;  // in seed order
  ScatterSummary summary;
};

// Runs with seeds master_seed+1 .. master_seed+count.
RepeatResult repeat_runs(const ExperimentSpec& spec, std::size_t count, std::uint64_t master_seed);

struct PowerLawFit {
  bool ok = false;  // needs at least two distinct dimensions
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // RMS of the log-space residuals
  std::size_t points = 0;
  double dim_lo = 0.0;
  double dim_hi = 0.0;
};

// Least squares of log(steps) = log(prefactor) + exponent * log(dim).
PowerLawFit fit_power_law(const std::vector<double>& dims, const std::vector<double>& steps);

struct SeriesPoint {
  std::size_t dim = 0;
  RepeatResult result;
};

struct ScalingSeries {
  std::string function;
  std::string algorithm;
  std::vector<SeriesPoint> points;
  PowerLawFit fit;  // mean steps of dims with at least one success
};

// Refits a series from its points (used after loading or editing).
PowerLawFit fit_series(const ScalingSeries& series);

ScalingSeries dimension_sweep(const ExperimentSpec& spec, const std::vector<std::size_t>& dims,
                              std::size_t repeats, std::uint64_t master_seed);

// ------------------------------------------------------------------ exports

// `config` lines are written as "# config: <line>" before the header.
void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out,
                       const std::vector<std::string>& config = {});
void write_records_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path,
                       const std::vector<std::string>& config = {});
// Reads what write_records_csv wrote (columns only; best_genes etc. stay empty).
std::vector<RunRecord> read_records_csv(std::istream& in);
std::vector<RunRecord> read_records_csv(const std::filesystem::path& path);

void write_series_csv(const std::vector<ScalingSeries>& series, std::ostream& out,
                      const std::vector<std::string>& config = {});
void write_series_csv(const std::vector<ScalingSeries>& series, const std::filesystem::path& path,
                      const std::vector<std::string>& config = {});

struct LabeledSummary {
  std::string function;
  std::size_t dim = 0;
  std::string algorithm;
  ScatterSummary summary;
};

void write_summary_csv(const std::vector<LabeledSummary>& rows, std::ostream& out,
                       const std::vector<std::string>& config = {});
void write_summary_csv(const std::vector<LabeledSummary>& rows, const std::filesystem::path& path,
                       const std::vector<std::string>& config = {});

// gnuplot command file with inline data: steps vs dimension on log axes, one
// curve and one fit line per algorithm. Throws ConfigError (writing nothing)
// when no series has a point.
void emit_plot_script(const std::vector<ScalingSeries>& series, std::ostream& out,
                      const std::string& title = "");
void emit_plot_script(const std::vector<ScalingSeries>& series, const std::filesystem::path& path,
                      const std::string& title = "");

}  // namespace evobench
