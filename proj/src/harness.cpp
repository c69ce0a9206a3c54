#include "evobench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "evobench/errors.hpp"
#include "text_io.hpp"

namespace evobench {

FunctionSpec ExperimentSpec::resolve() const {
  FunctionSpec f = lookup_function(function, dim, function_options);
  if (target) f = f.with_target(*target);
  return f;
}

RunOptions ExperimentSpec::run_options(std::uint64_t seed) const {
  RunOptions o;
  o.locopt = locopt;
  o.locopt_settings = locopt_settings;
  o.niching = niching;
  o.seed = seed;
  o.workers = 1;
  return o;
}

std::vector<std::string> describe(const ExperimentSpec& spec) {
  using text::format_double;
  std::vector<std::string> out;
  out.push_back("function=" + spec.function);
  out.push_back("dim=" + std::to_string(spec.dim));
  out.push_back("algorithm=" + spec.algorithm.name());
  out.push_back("pool_size=" + std::to_string(spec.pool.pool_size));
  out.push_back("fitness_diversity=" + format_double(spec.pool.fitness_diversity));
  out.push_back("mutation_probability=" + format_double(spec.pool.mutation_probability));
  out.push_back("father_rank_shape=" + format_double(spec.pool.father_rank_shape));
  out.push_back("germany_cut_shape=" + format_double(spec.pool.germany_cut_shape));
  out.push_back("termination_epsilon=" + format_double(spec.pool.termination_epsilon));
  out.push_back("max_steps=" + std::to_string(spec.pool.max_steps));
  out.push_back("locopt=" + std::string(spec.locopt ? "on" : "off"));
  if (spec.locopt) {
    const auto& s = spec.locopt_settings;
    out.push_back("locopt_memory=" + std::to_string(s.memory_pairs));
    out.push_back("locopt_fitness_tol=" + format_double(s.fitness_tol));
    out.push_back("locopt_gradient_tol=" + format_double(s.gradient_tol));
    out.push_back("locopt_max_iterations=" + std::to_string(s.max_iterations));
  }
  if (spec.niching.enabled) {
    out.push_back("niche_cells=" + std::to_string(spec.niching.cells_per_dim));
    out.push_back("mnic=" + std::to_string(spec.niching.mnic));
    out.push_back("niche_replace=" + std::string(spec.niching.replace_in_cell ? "on" : "off"));
  } else {
    out.push_back("niching=off");
  }
  if (spec.function == "lunacek") {
    const auto& p = spec.function_options.lunacek;
    out.push_back("lunacek_mu1=" + format_double(p.mu1));
    out.push_back("lunacek_d=" + format_double(p.d));
    out.push_back("lunacek_s=" + format_double(p.s));
  }
  if (spec.function_options.bounds) {
    out.push_back("bounds=" + format_double(spec.function_options.bounds->lower) + ":" +
                  format_double(spec.function_options.bounds->upper));
  }
  if (spec.target) out.push_back("target=" + format_double(*spec.target));
  return out;
}

// ------------------------------------------------------------- statistics

ScatterSummary summarize(const std::vector<RunRecord>& records) {
  ScatterSummary s;
  s.runs = records.size();
  std::vector<double> steps;
  for (const auto& r : records) {
    if (r.success) steps.push_back(static_cast<double>(r.steps));
  }
  s.successes = steps.size();
  if (steps.empty()) return s;
  s.unsolved = false;
  std::sort(steps.begin(), steps.end());
  const double n = static_cast<double>(steps.size());
  s.min = steps.front();
  s.max = steps.back();
  s.average = std::accumulate(steps.begin(), steps.end(), 0.0) / n;
  const std::size_t mid = steps.size() / 2;
  s.median = steps.size() % 2 ? steps[mid] : 0.5 * (steps[mid - 1] + steps[mid]);
  if (steps.size() > 1) {
    double ss = 0.0;
    for (double v : steps) ss += (v - s.average) * (v - s.average);
    s.std_dev = std::sqrt(ss / (n - 1.0));
  }
  if (s.average > 0.0) {
    s.max_dev_pct = std::abs(s.max - s.average) / s.average * 100.0;
    s.min_dev_pct = std::abs(s.min - s.average) / s.average * 100.0;
  }
  return s;
}

RepeatResult repeat_runs(const ExperimentSpec& spec, std::size_t count, std::uint64_t master_seed) {
  if (count < 1) throw ConfigError("repeat_runs: count must be >= 1");
  const FunctionSpec f = spec.resolve();
  RepeatResult result;
  result.records.resize(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, spec.workers), count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      result.records[i] = run(f, spec.algorithm, spec.pool, spec.run_options(master_seed + i + 1));
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto work = [&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          result.records[i] = run(f, spec.algorithm, spec.pool, spec.run_options(master_seed + i + 1));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    {
      std::vector<std::jthread> threads;
      for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work);
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  result.summary = summarize(result.records);
  return result;
}

// -------------------------------------------------------------------- fits

PowerLawFit fit_power_law(const std::vector<double>& dims, const std::vector<double>& steps) {
  if (dims.size() != steps.size()) throw ConfigError("fit_power_law: dims and steps differ in length");
  PowerLawFit fit;
  fit.points = dims.size();
  if (dims.empty()) return fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!(dims[i] > 0.0) || !(steps[i] > 0.0)) throw ConfigError("fit_power_law: values must be positive");
    lx.push_back(std::log(dims[i]));
    ly.push_back(std::log(steps[i]));
  }
  fit.dim_lo = *std::min_element(dims.begin(), dims.end());
  fit.dim_hi = *std::max_element(dims.begin(), dims.end());
  if (!(fit.dim_hi > fit.dim_lo)) return fit;
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + fit.exponent * lx[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  fit.ok = std::isfinite(fit.exponent);
  return fit;
}

PowerLawFit fit_series(const ScalingSeries& series) {
  std::vector<double> dims, steps;
  for (const auto& p : series.points) {
    if (p.result.summary.unsolved) continue;
    dims.push_back(static_cast<double>(p.dim));
    steps.push_back(p.result.summary.average);
  }
  return fit_power_law(dims, steps);
}

ScalingSeries dimension_sweep(const ExperimentSpec& spec, const std::vector<std::size_t>& dims,
                              std::size_t repeats, std::uint64_t master_seed) {
  if (dims.empty()) throw ConfigError("dimension_sweep: no dimensions given");
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] <= dims[i - 1]) throw ConfigError("dimension_sweep: dimensions must be strictly increasing");
  }
  ScalingSeries series;
  series.function = spec.function;
  series.algorithm = spec.algorithm.name();
  for (std::size_t d : dims) {
    ExperimentSpec at = spec;
    at.dim = d;
    series.points.push_back({d, repeat_runs(at, repeats, master_seed)});
  }
  series.fit = fit_series(series);
  return series;
}

// ------------------------------------------------------------------ CSV

namespace {

void write_config(std::ostream& out, const std::vector<std::string>& config) {
  for (const auto& line : config) out << "# config: " << line << '\n';
}

void check_field(const std::string& field) {
  if (field.find_first_of(",\n") != std::string::npos) {
    throw ConfigError("CSV field may not contain commas or newlines: '" + field + "'");
  }
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream buffer;
  writer(buffer);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << buffer.str();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

constexpr std::string_view kRecordsHeader =
    "function,dim,algorithm,locopt,niching,mnic,seed,steps,success,best_value,wall_ms";

bool parse_flag(std::string_view token, std::size_t line) {
  if (token == "1" || token == "true") return true;
  if (token == "0" || token == "false") return false;
  throw ParseError(line, "expected 0/1, got '" + std::string(token) + "'");
}

}  // namespace

void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out,
                       const std::vector<std::string>& config) {
  using text::format_double;
  write_config(out, config);
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    check_field(r.function);
    out << r.function << ',' << r.dim << ',' << r.algorithm << ',' << (r.locopt ? 1 : 0) << ','
        << r.niche_cells << ',' << r.mnic << ',' << r.seed << ',' << r.steps << ',' << (r.success ? 1 : 0)
        << ',' << format_double(r.best_value) << ',' << format_double(r.wall_ms) << '\n';
  }
}

void write_records_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path,
                       const std::vector<std::string>& config) {
  write_file(path, [&](std::ostream& out) { write_records_csv(records, out, config); });
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::vector<RunRecord> records;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kRecordsHeader) throw ParseError(number, "unexpected records header");
      header = true;
      continue;
    }
    const auto f = text::split(line, ',');
    if (f.size() != 11) throw ParseError(number, "expected 11 fields, got " + std::to_string(f.size()));
    RunRecord r;
    r.function = std::string(f[0]);
    r.dim = text::parse_count(f[1], number);
    r.algorithm = CrossoverKind::parse(f[2]).name();
    r.locopt = parse_flag(f[3], number);
    r.niche_cells = text::parse_count(f[4], number);
    r.mnic = text::parse_count(f[5], number);
    r.seed = text::parse_count(f[6], number);
    r.steps = text::parse_count(f[7], number);
    r.success = parse_flag(f[8], number);
    r.best_value = text::parse_double(f[9], number);
    r.wall_ms = text::parse_double(f[10], number);
    records.push_back(std::move(r));
  }
  if (!header) throw ParseError(number, "missing records header");
  return records;
}

std::vector<RunRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_records_csv(in);
}

void write_series_csv(const std::vector<ScalingSeries>& series, std::ostream& out,
                      const std::vector<std::string>& config) {
  using text::format_double;
  write_config(out, config);
  out << "function,algorithm,dim,mean_steps,std_steps,n_success,n_fail\n";
  for (const auto& s : series) {
    check_field(s.function);
    for (const auto& p : s.points) {
      const auto& sum = p.result.summary;
      out << s.function << ',' << s.algorithm << ',' << p.dim << ',' << format_double(sum.average) << ','
          << format_double(sum.std_dev) << ',' << sum.successes << ',' << sum.runs - sum.successes << '\n';
    }
  }
  for (const auto& s : series) {
    if (s.fit.ok) {
      out << "#fit " << s.algorithm << ' ' << format_double(s.fit.exponent) << ' '
          << format_double(s.fit.prefactor) << ' ' << format_double(s.fit.residual) << '\n';
      out << "#range " << s.algorithm << ' ' << format_double(s.fit.dim_lo) << ' '
          << format_double(s.fit.dim_hi) << ' ' << s.fit.points << '\n';
    } else {
      out << "#fit " << s.algorithm << " none\n";
    }
  }
}

void write_series_csv(const std::vector<ScalingSeries>& series, const std::filesystem::path& path,
                      const std::vector<std::string>& config) {
  write_file(path, [&](std::ostream& out) { write_series_csv(series, out, config); });
}

void write_summary_csv(const std::vector<LabeledSummary>& rows, std::ostream& out,
                       const std::vector<std::string>& config) {
  using text::format_double;
  write_config(out, config);
  out << "function,dim,algorithm,runs,successes,max,min,average,std,median,max_dev_pct,min_dev_pct\n";
  for (const auto& row : rows) {
    check_field(row.function);
    const auto& s = row.summary;
    out << row.function << ',' << row.dim << ',' << row.algorithm << ',' << s.runs << ',' << s.successes;
    if (s.unsolved) {
      out << ",,,,,,,\n";
      continue;
    }
    out << ',' << format_double(s.max) << ',' << format_double(s.min) << ',' << format_double(s.average) << ','
        << format_double(s.std_dev) << ',' << format_double(s.median) << ',' << format_double(s.max_dev_pct)
        << ',' << format_double(s.min_dev_pct) << '\n';
  }
}

void write_summary_csv(const std::vector<LabeledSummary>& rows, const std::filesystem::path& path,
                       const std::vector<std::string>& config) {
  write_file(path, [&](std::ostream& out) { write_summary_csv(rows, out, config); });
}

// ------------------------------------------------------------ plot script

void emit_plot_script(const std::vector<ScalingSeries>& series, std::ostream& out, const std::string& title) {
  using text::format_double;
  std::vector<const ScalingSeries*> drawn;
  for (const auto& s : series) {
    if (std::any_of(s.points.begin(), s.points.end(), [](const SeriesPoint& p) { return !p.result.summary.unsolved; })) {
      drawn.push_back(&s);
    }
  }
  if (drawn.empty()) throw ConfigError("emit_plot_script: no series has a solved point");

  out << "# gnuplot script: steps to solution vs dimension\n";
  out << "set logscale xy\n";
  out << "set xlabel 'dimension'\n";
  out << "set ylabel 'global optimization steps'\n";
  out << "set key top left\n";
  if (!title.empty()) out << "set title '" << title << "'\n";
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    out << "$data" << i << " << EOD\n";
    for (const auto& p : drawn[i]->points) {
      if (p.result.summary.unsolved) continue;
      out << p.dim << ' ' << format_double(p.result.summary.average) << ' '
          << format_double(p.result.summary.std_dev) << '\n';
    }
    out << "EOD\n";
    if (drawn[i]->fit.ok) {
      out << "f" << i << "(x) = " << format_double(drawn[i]->fit.prefactor) << " * x**"
          << format_double(drawn[i]->fit.exponent) << '\n';
    }
  }
  out << "plot ";
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    if (i) out << ", \\\n     ";
    const auto& s = *drawn[i];
    out << "$data" << i << " using 1:2:3 with yerrorlines title '" << s.algorithm << "'";
    if (s.fit.ok) {
      out << ", f" << i << "(x) with lines dashtype 2 title '" << s.algorithm << " fit (exp "
          << format_double(std::round(s.fit.exponent * 100.0) / 100.0) << ")'";
    }
  }
  out << '\n';
}

void emit_plot_script(const std::vector<ScalingSeries>& series, const std::filesystem::path& path,
                      const std::string& title) {
  // Render first so a failure leaves no file behind.
  std::ostringstream buffer;
  emit_plot_script(series, buffer, title);
  write_file(path, [&](std::ostream& out) { out << buffer.str(); });
}

}  // namespace evobench
