#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "evobench/functions.hpp"
#include "evobench/grunge.hpp"
#include "evobench/validation.hpp"

using namespace evobench;

TEST_CASE("gradient check flags a wrong gradient") {
  const FunctionSpec good = lookup_function("ackley", 5);
  CHECK(check_gradient(good, 50, 1).pass);
  // the simplified gradient is not the derivative of the value
  const FunctionSpec simplified = lookup_function("ackley-simplified-grad", 5);
  CHECK_FALSE(check_gradient(simplified, 50, 1).pass);
}

TEST_CASE("known minimum and pool checks") {
  for (const auto& name : builtin_function_names()) {
    const FunctionSpec f = lookup_function(name, default_check_dimension(name));
    CAPTURE(name);
    CHECK(check_known_minimum(f).pass);
  }
  const FunctionSpec f = lookup_function("rastrigin", 4);
  CHECK(check_pool_invariants(f, CrossoverKind::portugal(1), 500, 1, false).pass);
  CHECK(check_pool_invariants(f, CrossoverKind::germany(), 50, 1, true, {true, 3, 10, true}).pass);
}

TEST_CASE("landscape file check") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto good = dir / "evobench_good.txt", bad = dir / "evobench_bad.txt";
  grunge_save(grunge_generate(2, 4, 1), good);
  {
    std::ofstream out(bad);
    out << "GRUNGE 1\n2 1\n-1 0 5 5\nBOUNDS 0 10\n";  // zeta = 0
  }
  CHECK(check_landscape_file(good).pass);
  const auto r = check_landscape_file(bad);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.detail.empty());
  CHECK_FALSE(check_landscape_file(dir / "evobench_missing.txt").pass);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}
