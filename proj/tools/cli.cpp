#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "evobench/errors.hpp"
#include "evobench/ga.hpp"
#include "evobench/grunge.hpp"
#include "evobench/harness.hpp"
#include "evobench/validation.hpp"

namespace evobench::cli {

namespace {

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Options shared by every subcommand that runs the GA.
struct GaOptions {
  std::string algo = "germany";
  bool locopt = false;
  PoolConfig pool{};
  LocalOptSettings lbfgs{};
  std::size_t niche_cells = 0;
  std::size_t mnic = 100;
  bool niche_reject = false;
  bool no_fill_diversity = false;
  unsigned workers = default_workers();

  void add(CLI::App* app, bool with_algo = true) {
    if (with_algo) {
      app->add_option("--algo", algo, "crossover: holland, germany, portugal:<k>");
    }
    app->add_flag("--locopt", locopt, "locally optimize every new individual (L-BFGS)");
    app->add_option("--pool-size", pool.pool_size, "individuals in the pool")->check(CLI::Range(2, 100000000));
    app->add_option("--diversity", pool.fitness_diversity, "minimum fitness gap between pool members");
    app->add_option("--mutation", pool.mutation_probability, "per-child one-gene mutation probability")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--father-shape", pool.father_rank_shape, "father rank = |g| * shape * pool size");
    app->add_option("--germany-shape", pool.germany_cut_shape, "Germany cut sd as a fraction of the genome");
    app->add_option("--epsilon", pool.termination_epsilon, "success when best <= target + epsilon");
    app->add_option("--max-steps", pool.max_steps, "give up after this many global steps");
    app->add_option("--fill-draws", pool.max_fill_draws_per_slot, "initial-fill draw budget per pool slot");
    app->add_flag("--no-fill-diversity", no_fill_diversity, "skip the fitness-gap rule while filling the pool");
    app->add_option("--lbfgs-memory", lbfgs.memory_pairs, "L-BFGS correction pairs");
    app->add_option("--lbfgs-ftol", lbfgs.fitness_tol, "L-BFGS stop on |f_k - f_k-1| below this");
    app->add_option("--lbfgs-gtol", lbfgs.gradient_tol, "L-BFGS stop on max |g_i| below this");
    app->add_option("--lbfgs-maxit", lbfgs.max_iterations, "L-BFGS iteration cap");
    app->add_option("--niche-cells", niche_cells, "grid cells per dimension for niching (0 = off)");
    app->add_option("--mnic", mnic, "maximum individuals per niche cell");
    app->add_flag("--niche-reject", niche_reject, "full cells reject instead of replacing their worst member");
    app->add_option("--workers", workers, "worker threads (1 = bitwise reproducible)")->check(CLI::PositiveNumber);
  }

  void apply(ExperimentSpec& spec) const {
    spec.algorithm = CrossoverKind::parse(algo);
    spec.pool = pool;
    spec.pool.fill_diversity = !no_fill_diversity;
    spec.locopt = locopt;
    spec.locopt_settings = lbfgs;
    spec.niching.enabled = niche_cells > 0;
    if (spec.niching.enabled) {
      spec.niching.cells_per_dim = niche_cells;
      spec.niching.mnic = mnic;
      spec.niching.replace_in_cell = !niche_reject;
    }
    spec.workers = workers;
    spec.pool.validate();
    spec.niching.validate();
    if (locopt) lbfgs.validate();
  }
};

struct FunctionChoice {
  std::string function = "ackley";
  std::size_t dim = 10;
  double lunacek_mu1 = LunacekParams{}.mu1;
  double lunacek_d = LunacekParams{}.d;
  double lunacek_s = LunacekParams{}.s;
  std::vector<double> bounds;
  double target = 0.0;
  std::string catalog;
  CLI::Option* target_opt = nullptr;
  CLI::Option* dim_opt = nullptr;

  void add(CLI::App* app, bool with_dim = true) {
    app->add_option("--function,-f", function,
                    "ackley, ackley-simplified-grad, rastrigin, schwefel, schafferf7, schafferf6, lunacek "
                    "or grunge:<landscape file>");
    if (with_dim) dim_opt = app->add_option("--dim,-n", dim, "dimension (GRUNGE: taken from the file)");
    app->add_option("--lunacek-mu1", lunacek_mu1, "Lunacek first funnel center");
    app->add_option("--lunacek-d", lunacek_d, "Lunacek second funnel depth offset");
    app->add_option("--lunacek-s", lunacek_s, "Lunacek second funnel steepness");
    app->add_option("--bounds", bounds, "override the search box: LOWER UPPER")->expected(2);
    target_opt = app->add_option("--target", target, "override the global-minimum value");
    app->add_option("--catalog", catalog, "minima catalog supplying the target (GRUNGE)");
  }

  void apply(ExperimentSpec& spec) const {
    spec.function = function;
    spec.dim = dim;
    if (function.starts_with("grunge:") && !(dim_opt && dim_opt->count() > 0)) spec.dim = 0;
    spec.function_options.lunacek = {lunacek_mu1, lunacek_d, lunacek_s};
    spec.function_options.lunacek.validate();
    if (!bounds.empty()) {
      Bounds b{bounds[0], bounds[1]};
      b.validate();
      spec.function_options.bounds = b;
    }
    if (!catalog.empty()) spec.target = load_catalog(std::filesystem::path(catalog)).best().value;
    if (target_opt && target_opt->count() > 0) spec.target = target;
  }
};

void print_record(std::ostream& out, const RunRecord& r) {
  out << r.function << " " << r.dim << "-D " << r.algorithm << (r.locopt ? " locopt" : "")
      << (r.niche_cells ? " niching " + std::to_string(r.niche_cells) + "/" + std::to_string(r.mnic) : "")
      << " seed " << r.seed << ": " << (r.success ? "solved" : "NOT solved") << " after " << r.steps
      << " steps, best " << std::setprecision(12) << r.best_value << " (target " << r.target_value << ")\n";
}

// Portugal:k needs k distinct cuts in 1..dim-1; the default set silently
// shrinks to what fits, explicit requests that do not fit are errors.
std::vector<std::string> parse_algorithms(const std::vector<std::string>& names, std::size_t dim,
                                          std::ostream& err) {
  std::vector<std::string> out;
  if (names.empty()) {
    for (const auto& k : standard_algorithms()) {
      if (k.family == CrossoverFamily::Portugal && dim != 0 && k.cuts + 1 > dim) {
        err << "note: skipping " << k.name() << ", too many cuts for " << dim << " dimensions\n";
        continue;
      }
      out.push_back(k.name());
    }
    return out;
  }
  for (const auto& n : names) out.push_back(CrossoverKind::parse(n).name());
  return out;
}

int print_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    out << std::left << std::setw(10) << c.suite << std::setw(36) << c.subject << (c.pass ? "PASS  " : "FAIL  ")
        << c.detail << '\n';
    all = all && c.pass;
  }
  out << (all ? "all checks passed\n" : "some checks FAILED\n");
  return all ? kOk : kValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"evobench: pool-based genetic algorithm benchmarking toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  std::function<int()> action;

  // ---- solve
  FunctionChoice solve_f;
  GaOptions solve_ga;
  std::uint64_t solve_seed = 1;
  std::string solve_records;
  auto* solve = app.add_subcommand("solve", "one GA run; prints steps to solution");
  solve_f.add(solve);
  solve_ga.add(solve);
  solve->add_option("--seed", solve_seed, "random seed");
  solve->add_option("--records", solve_records, "write the run record as CSV");
  solve->callback([&] {
    action = [&] {
      ExperimentSpec spec;
      solve_f.apply(spec);
      solve_ga.apply(spec);
      const FunctionSpec f = spec.resolve();
      RunOptions options = spec.run_options(solve_seed);
      options.workers = solve_ga.workers;
      const RunRecord r = evobench::run(f, spec.algorithm, spec.pool, options);
      print_record(out, r);
      if (!solve_records.empty()) write_records_csv({r}, std::filesystem::path(solve_records), describe(spec));
      return r.success ? kOk : kRunFailure;
    };
  });

  // ---- sweep
  FunctionChoice sweep_f;
  GaOptions sweep_ga;
  std::vector<std::size_t> sweep_dims{25, 50, 100, 200};
  std::vector<std::string> sweep_algos;
  std::size_t sweep_repeats = 5;
  std::uint64_t sweep_seed = 0;
  std::string sweep_records, sweep_series, sweep_plot;
  auto* sweep = app.add_subcommand("sweep", "dimension sweep with log-log scaling fits");
  sweep_f.add(sweep, false);
  sweep_ga.add(sweep, false);
  sweep->add_option("--dims", sweep_dims, "dimensions (strictly increasing)")->delimiter(',');
  sweep->add_option("--algos", sweep_algos, "algorithms (default: all six)")->delimiter(',');
  sweep->add_option("--repeats", sweep_repeats, "runs per dimension")->check(CLI::PositiveNumber);
  sweep->add_option("--master-seed", sweep_seed, "runs use seeds master+1 .. master+repeats");
  sweep->add_option("--records", sweep_records, "records CSV");
  sweep->add_option("--series", sweep_series, "series CSV with fitted exponents");
  sweep->add_option("--plot", sweep_plot, "gnuplot script");
  sweep->callback([&] {
    action = [&] {
      std::vector<ScalingSeries> all;
      std::vector<RunRecord> records;
      ExperimentSpec spec;
      sweep_f.apply(spec);
      sweep_ga.apply(spec);
      std::size_t solved = 0;
      for (const auto& name : parse_algorithms(sweep_algos, sweep_dims.empty() ? 0 : sweep_dims.front(), err)) {
        spec.algorithm = CrossoverKind::parse(name);
        ScalingSeries s = dimension_sweep(spec, sweep_dims, sweep_repeats, sweep_seed);
        for (const auto& p : s.points) {
          const auto& sum = p.result.summary;
          solved += sum.successes;
          out << name << " " << p.dim << "-D: " << sum.successes << "/" << sum.runs << " solved";
          if (!sum.unsolved) out << ", mean steps " << sum.average << " +- " << sum.std_dev;
          out << '\n';
          records.insert(records.end(), p.result.records.begin(), p.result.records.end());
        }
        if (s.fit.ok) {
          out << name << ": exponent " << s.fit.exponent << ", prefactor " << s.fit.prefactor << ", residual "
              << s.fit.residual << " over dims " << s.fit.dim_lo << ".." << s.fit.dim_hi << '\n';
        } else {
          err << "warning: " << name << ": fewer than two solved dimensions, no fit\n";
        }
        all.push_back(std::move(s));
      }
      auto config = describe(spec);
      config.erase(std::remove_if(config.begin(), config.end(),
                                  [](const std::string& l) { return l.starts_with("dim=") || l.starts_with("algorithm="); }),
                   config.end());
      std::ostringstream dims;
      for (std::size_t i = 0; i < sweep_dims.size(); ++i) dims << (i ? "," : "") << sweep_dims[i];
      config.push_back("dims=" + dims.str());
      config.push_back("repeats=" + std::to_string(sweep_repeats));
      config.push_back("master_seed=" + std::to_string(sweep_seed));
      if (!sweep_records.empty()) write_records_csv(records, std::filesystem::path(sweep_records), config);
      if (!sweep_series.empty()) write_series_csv(all, std::filesystem::path(sweep_series), config);
      if (!sweep_plot.empty()) {
        if (solved > 0) {
          emit_plot_script(all, std::filesystem::path(sweep_plot), sweep_f.function);
        } else {
          err << "warning: nothing solved, no plot written\n";
        }
      }
      return solved > 0 ? kOk : kRunFailure;
    };
  });

  // ---- scatter
  FunctionChoice scatter_f;
  GaOptions scatter_ga;
  std::vector<std::string> scatter_algos;
  std::size_t scatter_repeats = 10;
  std::uint64_t scatter_seed = 0;
  std::string scatter_summary, scatter_records;
  auto* scatter = app.add_subcommand("scatter", "repeated runs per algorithm with scatter statistics");
  scatter_f.add(scatter);
  scatter_ga.add(scatter, false);
  scatter->add_option("--algos", scatter_algos, "algorithms (default: all six)")->delimiter(',');
  scatter->add_option("--repeats", scatter_repeats, "runs per algorithm (5 and 10 are the usual protocols)")
      ->check(CLI::PositiveNumber);
  scatter->add_option("--master-seed", scatter_seed, "runs use seeds master+1 .. master+repeats");
  scatter->add_option("--summary", scatter_summary, "summary CSV");
  scatter->add_option("--records", scatter_records, "records CSV");
  scatter->callback([&] {
    action = [&] {
      ExperimentSpec spec;
      scatter_f.apply(spec);
      scatter_ga.apply(spec);
      std::vector<LabeledSummary> rows;
      std::vector<RunRecord> records;
      out << std::left << std::setw(12) << "algorithm" << std::right << std::setw(8) << "solved" << std::setw(12)
          << "max" << std::setw(9) << "(%dev)" << std::setw(12) << "min" << std::setw(9) << "(%dev)"
          << std::setw(14) << "average" << std::setw(12) << "median" << '\n';
      for (const auto& name : parse_algorithms(scatter_algos, spec.resolve().dimension(), err)) {
        spec.algorithm = CrossoverKind::parse(name);
        RepeatResult r = repeat_runs(spec, scatter_repeats, scatter_seed);
        const auto& s = r.summary;
        out << std::left << std::setw(12) << name << std::right << std::setw(8)
            << (std::to_string(s.successes) + "/" + std::to_string(s.runs));
        if (s.unsolved) {
          out << "  unsolved\n";
        } else {
          out << std::fixed << std::setprecision(0) << std::setw(12) << s.max << std::setprecision(1)
              << std::setw(9) << s.max_dev_pct << std::setprecision(0) << std::setw(12) << s.min
              << std::setprecision(1) << std::setw(9) << s.min_dev_pct << std::setprecision(0) << std::setw(14)
              << s.average << std::setw(12) << s.median << std::defaultfloat << '\n';
        }
        rows.push_back({spec.function, spec.dim, name, s});
        records.insert(records.end(), r.records.begin(), r.records.end());
      }
      auto config = describe(spec);
      config.push_back("repeats=" + std::to_string(scatter_repeats));
      config.push_back("master_seed=" + std::to_string(scatter_seed));
      if (!scatter_summary.empty()) write_summary_csv(rows, std::filesystem::path(scatter_summary), config);
      if (!scatter_records.empty()) write_records_csv(records, std::filesystem::path(scatter_records), config);
      const bool any = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.summary.unsolved; });
      return any ? kOk : kRunFailure;
    };
  });

  // ---- grunge
  auto* grunge = app.add_subcommand("grunge", "randomized-Gaussian landscapes");
  grunge->require_subcommand(1);

  std::size_t gen_m = 2, gen_n = 20;
  std::uint64_t gen_seed = 1;
  GrungeRanges gen_ranges;
  std::vector<double> gen_bounds{gen_ranges.bounds.lower, gen_ranges.bounds.upper};
  std::string gen_out;
  auto* gen = grunge->add_subcommand("gen", "generate a landscape file");
  gen->add_option("--m", gen_m, "dimensions")->check(CLI::PositiveNumber);
  gen->add_option("--n", gen_n, "Gaussians")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--depth-lo", gen_ranges.depth_lo, "weight range lower end");
  gen->add_option("--depth-hi", gen_ranges.depth_hi, "weight range upper end");
  gen->add_option("--width-lo", gen_ranges.width_lo, "exponent range lower end");
  gen->add_option("--width-hi", gen_ranges.width_hi, "exponent range upper end");
  gen->add_flag("--mixed-sign", gen_ranges.mixed_sign, "draw each weight's sign at random");
  gen->add_option("--bounds", gen_bounds, "box: LOWER UPPER")->expected(2);
  gen->add_option("--out,-o", gen_out, "landscape file")->required();
  gen->callback([&] {
    action = [&] {
      gen_ranges.bounds = {gen_bounds[0], gen_bounds[1]};
      const GrungeLandscape l = grunge_generate(gen_m, gen_n, gen_seed, gen_ranges);
      grunge_save(l, std::filesystem::path(gen_out));
      out << "wrote " << l.name() << " to " << gen_out << '\n';
      return kOk;
    };
  });

  std::string enum_landscape, enum_out;
  std::size_t enum_grid = 10;
  EnumerateOptions enum_options;
  enum_options.workers = default_workers();
  auto* en = grunge->add_subcommand("enum", "enumerate local minima from a start grid");
  en->add_option("--landscape,-l", enum_landscape, "landscape file")->required();
  en->add_option("--grid", enum_grid, "grid points per dimension (endpoints included)")->check(CLI::Range(2, 100000000));
  en->add_option("--merge-tol", enum_options.merge_tol, "minima closer than this are merged");
  en->add_option("--max-starts", enum_options.max_starts, "refuse grids with more starts than this");
  en->add_option("--workers", enum_options.workers, "worker threads")->check(CLI::PositiveNumber);
  en->add_option("--out,-o", enum_out, "minima catalog file")->required();
  en->callback([&] {
    action = [&] {
      const GrungeLandscape l = grunge_load(std::filesystem::path(enum_landscape));
      l.validate();
      const MinimaCatalog c = grunge_enumerate(l, enum_grid, enum_options);
      save_catalog(c, std::filesystem::path(enum_out));
      out << l.name() << ": " << c.entries.size() << " minima from " << c.starts << " starts ("
          << c.nonconvergent << " not converged, " << c.not_minimum << " not minima, " << c.out_of_bounds
          << " out of bounds)\n";
      if (!c.entries.empty()) out << "global minimum " << std::setprecision(17) << c.best().value << '\n';
      return c.entries.empty() ? kRunFailure : kOk;
    };
  });

  std::string gsolve_landscape, gsolve_catalog, gsolve_records;
  double gsolve_target = 0.0;
  GaOptions gsolve_ga;
  std::uint64_t gsolve_seed = 1;
  auto* gs = grunge->add_subcommand("solve", "GA run on a landscape, target from its catalog");
  gs->add_option("--landscape,-l", gsolve_landscape, "landscape file")->required();
  gs->add_option("--catalog,-c", gsolve_catalog, "minima catalog from `grunge enum`");
  auto* gs_target = gs->add_option("--target", gsolve_target, "global-minimum value, instead of a catalog");
  gsolve_ga.add(gs);
  gs->add_option("--seed", gsolve_seed, "random seed");
  gs->add_option("--records", gsolve_records, "write the run record as CSV");
  gs->callback([&] {
    action = [&] {
      ExperimentSpec spec;
      spec.function = "grunge:" + gsolve_landscape;
      spec.dim = 0;
      if (!gsolve_catalog.empty()) {
        spec.target = load_catalog(std::filesystem::path(gsolve_catalog)).best().value;
      } else if (gs_target->count() > 0) {
        spec.target = gsolve_target;
      } else {
        throw ConfigError("grunge solve needs --catalog or --target; run `grunge enum` on the landscape first");
      }
      gsolve_ga.apply(spec);
      const FunctionSpec f = spec.resolve();
      RunOptions options = spec.run_options(gsolve_seed);
      options.workers = gsolve_ga.workers;
      const RunRecord r = evobench::run(f, spec.algorithm, spec.pool, options);
      print_record(out, r);
      if (!gsolve_records.empty()) write_records_csv({r}, std::filesystem::path(gsolve_records), describe(spec));
      return r.success ? kOk : kRunFailure;
    };
  });

  // ---- validate
  std::vector<std::string> val_functions;
  std::vector<std::string> val_landscapes;
  std::size_t val_points = 100, val_steps = 2000;
  std::uint64_t val_seed = 1;
  auto* val = app.add_subcommand("validate", "gradient, known-minimum and pool-invariant checks");
  val->add_option("--function,-f", val_functions, "restrict to these functions (default: all built-ins)");
  val->add_option("--landscape,-l", val_landscapes, "also validate these landscape files");
  val->add_option("--points", val_points, "random points per gradient check");
  val->add_option("--steps", val_steps, "GA steps per pool-invariant check");
  val->add_option("--seed", val_seed, "random seed");
  val->callback([&] {
    action = [&] {
      std::vector<CheckResult> checks;
      std::vector<std::string> names = val_functions;
      if (names.empty() && val_landscapes.empty()) names = builtin_function_names();
      for (const auto& name : names) {
        const FunctionSpec f = lookup_function(name, default_check_dimension(name));
        if (name == "ackley-simplified-grad") {
          // The simplified gradient is deliberately not the derivative.
          checks.push_back({"gradient", f.name() + " 5-D", true, "simplified by design, finite differences not applicable"});
        } else {
          checks.push_back(check_gradient(f, val_points, val_seed));
        }
        if (f.target_point()) checks.push_back(check_known_minimum(f));
        checks.push_back(check_pool_invariants(f, CrossoverKind::germany(), val_steps, val_seed, false));
      }
      if (!names.empty()) {
        const FunctionSpec f = lookup_function(names.front(), default_check_dimension(names.front()));
        NichingConfig niching{true, 2, 20, true};
        checks.push_back(check_pool_invariants(f, CrossoverKind::portugal(1), val_steps / 10, val_seed, true, niching));
      }
      for (const auto& path : val_landscapes) {
        CheckResult c = check_landscape_file(path);
        checks.push_back(c);
        if (c.pass) {
          FunctionSpec f = lookup_function("grunge:" + path, 0);
          checks.push_back(check_gradient(f, val_points, val_seed));
        }
      }
      return print_checks(out, checks);
    };
  });

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return action ? action() : kConfigError;
  } catch (const std::invalid_argument& e) {  // config, dimension, parameter, operator errors
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InitializationError& e) {
    err << "run failed: " << e.what() << '\n';
    return kRunFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRunFailure;
  }
}

}  // namespace evobench::cli
