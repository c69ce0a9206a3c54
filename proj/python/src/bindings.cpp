#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "evobench/errors.hpp"
#include "evobench/functions.hpp"
#include "evobench/ga.hpp"
#include "evobench/grunge.hpp"
#include "evobench/harness.hpp"
#include "evobench/local_opt.hpp"

namespace py = pybind11;
using namespace evobench;

namespace {

FunctionSpec resolve(const std::string& name, std::size_t dim, std::optional<double> target) {
  FunctionSpec f = lookup_function(name, dim);
  return target ? f.with_target(*target) : f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pool-based genetic algorithm benchmarks";

  py::register_exception<InitializationError>(m, "InitializationError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_RuntimeError);

  m.def("function_names", &builtin_function_names);
  m.def(
      "value",
      [](const std::string& name, const std::vector<double>& x) { return lookup_function(name, x.size()).value(x); },
      py::arg("function"), py::arg("x"));
  m.def(
      "gradient",
      [](const std::string& name, const std::vector<double>& x) {
        return lookup_function(name, x.size()).gradient(x);
      },
      py::arg("function"), py::arg("x"));

  py::class_<LocalOptResult>(m, "LocalOptResult")
      .def_readonly("x", &LocalOptResult::x)
      .def_readonly("value", &LocalOptResult::value)
      .def_readonly("iterations", &LocalOptResult::iterations)
      .def_readonly("evaluations", &LocalOptResult::evaluations)
      .def_property_readonly("status", [](const LocalOptResult& r) { return std::string(to_string(r.status)); });
  m.def(
      "minimize",
      [](const std::string& name, const std::vector<double>& x0, std::size_t max_iterations) {
        LocalOptSettings s;
        s.max_iterations = max_iterations;
        return minimize(lookup_function(name, x0.size()), x0, s);
      },
      py::arg("function"), py::arg("x0"), py::arg("max_iterations") = 5000);

  py::class_<InitStats>(m, "InitStats")
      .def_readonly("draws", &InitStats::draws)
      .def_readonly("locopt_calls", &InitStats::locopt_calls)
      .def_readonly("locopt_iterations", &InitStats::locopt_iterations);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("function", &RunRecord::function)
      .def_readonly("dim", &RunRecord::dim)
      .def_readonly("algorithm", &RunRecord::algorithm)
      .def_readonly("seed", &RunRecord::seed)
      .def_readonly("steps", &RunRecord::steps)
      .def_readonly("success", &RunRecord::success)
      .def_readonly("best_value", &RunRecord::best_value)
      .def_readonly("best_genes", &RunRecord::best_genes)
      .def_readonly("accepted_steps", &RunRecord::accepted_steps)
      .def_readonly("init", &RunRecord::init)
      .def("__repr__", [](const RunRecord& r) {
        return "<RunRecord " + r.function + " " + std::to_string(r.dim) + "-D " + r.algorithm +
               (r.success ? " solved" : " unsolved") + " steps=" + std::to_string(r.steps) + ">";
      });

  m.def(
      "run",
      [](const std::string& function, std::size_t dim, const std::string& algorithm, bool locopt,
         std::uint64_t seed, std::size_t pool_size, double epsilon, std::size_t max_steps, bool fill_diversity,
         std::size_t niche_cells, std::size_t mnic, std::optional<double> target) {
        PoolConfig config;
        config.pool_size = pool_size;
        config.termination_epsilon = epsilon;
        config.max_steps = max_steps;
        config.fill_diversity = fill_diversity;
        RunOptions o;
        o.locopt = locopt;
        o.seed = seed;
        if (niche_cells > 0) o.niching = {true, niche_cells, mnic, true};
        py::gil_scoped_release release;
        return run(resolve(function, dim, target), CrossoverKind::parse(algorithm), config, o);
      },
      py::arg("function"), py::arg("dim"), py::arg("algorithm") = "Germany", py::arg("locopt") = false,
      py::arg("seed") = 1, py::arg("pool_size") = 1000, py::arg("epsilon") = 1e-6,
      py::arg("max_steps") = 10'000'000, py::arg("fill_diversity") = true, py::arg("niche_cells") = 0,
      py::arg("mnic") = 100, py::arg("target") = py::none());

  py::class_<PowerLawFit>(m, "PowerLawFit")
      .def_readonly("ok", &PowerLawFit::ok)
      .def_readonly("exponent", &PowerLawFit::exponent)
      .def_readonly("prefactor", &PowerLawFit::prefactor)
      .def_readonly("residual", &PowerLawFit::residual);
  m.def("fit_power_law", &fit_power_law, py::arg("dims"), py::arg("steps"));

  py::class_<MinimumEntry>(m, "Minimum")
      .def_readonly("location", &MinimumEntry::location)
      .def_readonly("value", &MinimumEntry::value)
      .def_readonly("hits", &MinimumEntry::hits);
  py::class_<MinimaCatalog>(m, "MinimaCatalog")
      .def_readonly("entries", &MinimaCatalog::entries)
      .def_readonly("starts", &MinimaCatalog::starts)
      .def_property_readonly("best", &MinimaCatalog::best);

  py::class_<GrungeLandscape>(m, "GrungeLandscape")
      .def_property_readonly("dims", &GrungeLandscape::dimension)
      .def_property_readonly("gaussians", &GrungeLandscape::gaussians)
      .def_property_readonly("name", &GrungeLandscape::name)
      .def("value", [](const GrungeLandscape& l, const std::vector<double>& x) { return l.value(x); })
      .def("gradient",
           [](const GrungeLandscape& l, const std::vector<double>& x) { return l.gradient(std::span(x)); })
      .def("save", [](const GrungeLandscape& l, const std::filesystem::path& p) { grunge_save(l, p); });
  m.def(
      "grunge_generate", [](std::size_t m, std::size_t n, std::uint64_t seed) { return grunge_generate(m, n, seed); },
      py::arg("dims"), py::arg("gaussians"), py::arg("seed"));
  m.def("grunge_load", py::overload_cast<const std::filesystem::path&>(&grunge_load));
  m.def(
      "grunge_enumerate",
      [](const GrungeLandscape& l, std::size_t grid, unsigned workers) {
        EnumerateOptions o;
        o.workers = workers;
        py::gil_scoped_release release;
        return grunge_enumerate(l, grid, o);
      },
      py::arg("landscape"), py::arg("grid"), py::arg("workers") = 1);
}
