#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "evobench/harness.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "evobench");
  std::ostringstream out, err;
  const int code = evobench::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

using namespace evobench::cli;

TEST_CASE("help lists the tunables with defaults") {
  const auto r = cli({"solve", "--help"});
  CHECK(r.code == kOk);
  for (const char* s : {"--pool-size", "[1000]", "--diversity", "[1e-08]", "--mutation", "[0.05]", "--locopt",
                        "--niche-cells", "--mnic", "--workers", "--epsilon", "--max-steps"}) {
    CAPTURE(s);
    CHECK(r.out.find(s) != std::string::npos);
  }
}

TEST_CASE("solve") {
  auto ok = cli({"solve", "-f", "ackley", "-n", "50", "--algo", "germany", "--locopt", "--seed", "7", "--workers", "1"});
  CHECK(ok.code == kOk);
  CHECK(ok.out.find("solved after") != std::string::npos);

  CHECK(cli({"solve", "-f", "schafferf6", "-n", "5"}).code == kConfigError);
  CHECK(cli({"solve", "--algo", "spain"}).code == kConfigError);
  CHECK(cli({"solve", "--pool-size", "1"}).code == kConfigError);
  CHECK(cli({"solve", "--bogus"}).code == kConfigError);
  CHECK(cli({}).code == kConfigError);

  const auto fail = cli({"solve", "-f", "schwefel", "-n", "20", "--max-steps", "50", "--pool-size", "20"});
  CHECK(fail.code == kRunFailure);
  CHECK(fail.out.find("NOT solved") != std::string::npos);
}

TEST_CASE("solve writes a re-runnable record") {
  const auto path = tmp("evobench_cli_solve.csv");
  const auto r = cli({"solve", "-f", "rastrigin", "-n", "5", "--locopt", "--pool-size", "30", "--seed", "5",
                      "--workers", "1", "--records", path.string()});
  REQUIRE(r.code == kOk);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("# config: pool_size=30") != std::string::npos);
  const auto recs = evobench::read_records_csv(path);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].seed == 5);
  CHECK(recs[0].success);
  std::filesystem::remove(path);
}

TEST_CASE("sweep and scatter") {
  const auto series = tmp("evobench_cli_series.csv"), plot = tmp("evobench_cli_plot.gp");
  auto r = cli({"sweep", "-f", "rastrigin", "--dims", "4,5", "--algos", "germany,holland", "--locopt",
                "--pool-size", "20", "--repeats", "2", "--series", series.string(), "--plot", plot.string()});
  CHECK(r.code == kOk);
  CHECK(std::filesystem::exists(series));
  CHECK(std::filesystem::exists(plot));
  r = cli({"sweep", "-f", "rastrigin", "--dims", "5", "--locopt", "--algos", "germany", "--pool-size", "20",
           "--repeats", "1"});
  CHECK(r.code == kOk);
  CHECK(r.err.find("no fit") != std::string::npos);
  r = cli({"sweep", "-f", "schwefel", "--dims", "5,6", "--algos", "germany", "--pool-size", "20", "--repeats",
           "1", "--max-steps", "10"});
  CHECK(r.code == kRunFailure);
  r = cli({"scatter", "-f", "rastrigin", "-n", "5", "--locopt", "--pool-size", "20", "--repeats", "2"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("Portugal:1") != std::string::npos);
  std::filesystem::remove(series);
  std::filesystem::remove(plot);
}

TEST_CASE("grunge pipeline") {
  const auto land = tmp("evobench_cli_land.txt"), cat = tmp("evobench_cli_cat.txt");
  CHECK(cli({"grunge", "gen", "--m", "2", "--n", "10", "--seed", "3", "-o", land.string()}).code == kOk);
  CHECK(cli({"grunge", "enum", "-l", land.string(), "--grid", "25", "-o", cat.string()}).code == kOk);
  const auto missing = cli({"grunge", "solve", "-l", land.string()});
  CHECK(missing.code == kConfigError);
  CHECK(missing.err.find("grunge enum") != std::string::npos);
  CHECK(cli({"grunge", "solve", "-l", land.string(), "-c", cat.string(), "--locopt", "--pool-size", "3",
             "--no-fill-diversity", "--epsilon", "1e-8"})
            .code == kOk);
  CHECK(cli({"grunge", "enum", "-l", land.string(), "--grid", "100", "--max-starts", "10", "-o", cat.string()})
            .code == kConfigError);
  std::filesystem::remove(land);
  std::filesystem::remove(cat);
}

TEST_CASE("validate") {
  auto r = cli({"validate", "--function", "schwefel", "--points", "20", "--steps", "100"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("schwefel") != std::string::npos);
  CHECK(r.out.find("rastrigin") == std::string::npos);
  const auto bad = tmp("evobench_cli_bad.txt");
  {
    std::ofstream out(bad);
    out << "GRUNGE 1\n1 1\n-1 1 50\nBOUNDS 0 10\n";
  }
  r = cli({"validate", "-l", bad.string()});
  CHECK(r.code == kValidationFailure);
  CHECK(r.out.find("FAIL") != std::string::npos);
  std::filesystem::remove(bad);
}
