#include <doctest.h>

#include <cmath>
#include <sstream>

#include "evobench/errors.hpp"
#include "evobench/grunge.hpp"
#include "evobench/local_opt.hpp"
#include "evobench/rng.hpp"
#include "oracles.hpp"

using namespace evobench;

namespace {

double direct_value(const GrungeLandscape& l, std::span<const double> x) {
  long double f = 0;
  for (std::size_t i = 0; i < l.gaussians(); ++i) {
    long double r2 = 0;
    const auto c = l.center(i);
    for (std::size_t j = 0; j < x.size(); ++j) r2 += ((long double)x[j] - c[j]) * (x[j] - c[j]);
    f += l.weights()[i] * std::exp(-(long double)l.widths()[i] * r2);
  }
  return static_cast<double>(f);
}

GrungeLandscape single_well(double depth, std::vector<double> center) {
  const std::size_t m = center.size();
  return GrungeLandscape(m, {-depth}, {1.0}, std::move(center), {0.0, 10.0});
}

}  // namespace

TEST_CASE("generation is seeded and respects the ranges") {
  GrungeRanges r;
  const auto a = grunge_generate(4, 50, 9, r);
  const auto b = grunge_generate(4, 50, 9, r);
  const auto c = grunge_generate(4, 50, 10, r);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.name() == "GRUNGE[4,50]");
  for (std::size_t i = 0; i < a.gaussians(); ++i) {
    CHECK(a.weights()[i] >= r.depth_lo);
    CHECK(a.weights()[i] <= r.depth_hi);
    CHECK(a.widths()[i] >= r.width_lo);
    CHECK(a.widths()[i] <= r.width_hi);
    for (double v : a.center(i)) CHECK(r.bounds.contains(v));
  }
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("mixed-sign weights") {
  GrungeRanges r;
  r.mixed_sign = true;
  const auto l = grunge_generate(3, 400, 2, r);
  int pos = 0;
  for (double w : l.weights()) pos += w > 0;
  CHECK(pos > 100);
  CHECK(pos < 300);
}

TEST_CASE("value, gradient and Hessian") {
  const auto l = grunge_generate(3, 30, 4);
  Rng rng(1);
  auto fv = [&](std::span<const double> x) { return l.value(x); };
  for (int k = 0; k < 100; ++k) {
    std::vector<double> x(3);
    for (double& v : x) v = rng.uniform(0.0, 10.0);
    CHECK(l.value(x) == doctest::Approx(direct_value(l, x)).epsilon(1e-12));
    const auto g = l.gradient(x);
    std::vector<double> g2(3);
    CHECK(l.value_and_gradient(x, g2) == l.value(x));
    const auto h = l.hessian(x);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(g2[i] == doctest::Approx(g[i]).epsilon(1e-14));
      const double fd = oracle::derivative(fv, x, i, 1e-4);
      CHECK(std::abs(g[i] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      for (std::size_t j = 0; j < 3; ++j) {
        auto gj = [&](std::span<const double> y) { return l.gradient(y)[j]; };
        const double fdh = oracle::derivative(gj, x, i, 1e-4);
        CHECK(std::abs(h[i * 3 + j] - fdh) <= 1e-5 * std::max(1.0, std::abs(fdh)));
        CHECK(h[i * 3 + j] == doctest::Approx(h[j * 3 + i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("save / load round trip is exact") {
  const auto l = grunge_generate(5, 40, 77);
  std::stringstream ss;
  grunge_save(l, ss);
  const auto back = grunge_load(ss);
  CHECK(back == l);
}

TEST_CASE("malformed landscape files") {
  auto load = [](const std::string& text) {
    std::istringstream in(text);
    return grunge_load(in);
  };
  CHECK_THROWS_AS(load("NOPE 1\n"), ParseError);
  CHECK_THROWS_AS(load("GRUNGE 2\n1 1\n-1 1 5\nBOUNDS 0 10\n"), ParseError);
  CHECK_THROWS_AS(load("GRUNGE 1\n2 1\n-1 1 5\nBOUNDS 0 10\n"), ParseError);
  CHECK_THROWS_AS(load("GRUNGE 1\n1 1\n-1 x 5\nBOUNDS 0 10\n"), ParseError);
  CHECK_THROWS_AS(load("GRUNGE 1\n1 2\n-1 1 5\n"), ParseError);
  try {
    load("GRUNGE 1\n1 1\n-1 1 5 6\nBOUNDS 0 10\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  // well-formed but invalid contents
  CHECK_THROWS_AS(load("GRUNGE 1\n1 1\n-1 -2 5\nBOUNDS 0 10\n"), ValidationError);
  CHECK_THROWS_AS(load("GRUNGE 1\n1 1\n-1 1 50\nBOUNDS 0 10\n"), ValidationError);
  CHECK_NOTHROW(load("GRUNGE 1\n1 1\n-1 1 5\nBOUNDS 0 10\n"));
}

TEST_CASE("enumeration of a single well") {
  const auto l = single_well(3.0, {4.0, 6.0});
  const auto c = grunge_enumerate(l, 11);
  REQUIRE(c.entries.size() >= 1);
  CHECK(c.best().value == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(c.best().location[0] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(c.best().location[1] == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(c.starts == 121);
}

TEST_CASE("enumeration finds both wells and sorts them") {
  GrungeLandscape l(1, {-1.0, -2.0}, {4.0, 4.0}, {2.0, 8.0}, {0.0, 10.0});
  const auto c = grunge_enumerate(l, 50);
  REQUIRE(c.entries.size() == 2);
  CHECK(c.entries[0].value < c.entries[1].value);
  CHECK(c.best().location[0] == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(c.entries[1].location[0] == doctest::Approx(2.0).epsilon(1e-6));
  std::size_t hits = 0;
  for (const auto& e : c.entries) hits += e.hits;
  CHECK(hits + c.nonconvergent + c.not_minimum + c.out_of_bounds == c.starts);
}

TEST_CASE("enumeration guard") {
  const auto l = grunge_generate(6, 10, 1);
  EnumerateOptions o;
  o.max_starts = 1000;
  CHECK_THROWS_AS(grunge_enumerate(l, 10, o), ParameterError);
  CHECK_THROWS_AS(grunge_enumerate(l, 1), ParameterError);
}

TEST_CASE("collector merges within the tolerance") {
  MinimaCollector c(1e-4);
  c.add(std::vector<double>{1.0, 1.0}, -2.0);
  c.add(std::vector<double>{1.0 + 5e-5, 1.0}, -2.0);
  c.add(std::vector<double>{3.0, 1.0}, -5.0);
  const auto cat = std::move(c).finish();
  REQUIRE(cat.entries.size() == 2);
  CHECK(cat.entries[0].value == -5.0);
  CHECK(cat.entries[1].hits == 2);
  CHECK_THROWS_AS(MinimaCollector(0.0), ParameterError);
}

TEST_CASE("catalog round trip") {
  const auto l = grunge_generate(2, 8, 3);
  const auto c = grunge_enumerate(l, 15);
  std::stringstream ss;
  save_catalog(c, ss);
  const auto back = load_catalog(ss);
  REQUIRE(back.entries.size() == c.entries.size());
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    CHECK(back.entries[i].value == c.entries[i].value);
    CHECK(back.entries[i].location == c.entries[i].location);
    CHECK(back.entries[i].hits == c.entries[i].hits);
  }
  std::istringstream bad("MINIMA 2\n-1 0.5 0.5 1\n");
  CHECK_THROWS_AS(load_catalog(bad), ParseError);
}

TEST_CASE("endpoint classification") {
  const auto l = single_well(1.0, {5.0});
  LocalOptResult r;
  r.x = {5.0};
  r.value = l.value(r.x);
  CHECK(classify_endpoint(l, r, 1e-8) == EndpointKind::Minimum);
  // judged by the gradient at the endpoint, not by the optimizer's status
  r.x = {5.5};
  r.value = l.value(r.x);
  CHECK(classify_endpoint(l, r, 1e-8) == EndpointKind::NotConverged);
  r.x = {9.9};  // flat far tail: gradient tiny but curvature not resolvable
  r.value = l.value(r.x);
  CHECK(classify_endpoint(l, r, 1e-8) != EndpointKind::Minimum);
  r.x = {12.0};
  r.value = l.value(r.x);
  CHECK(classify_endpoint(l, r, 1e-8) != EndpointKind::Minimum);
}

TEST_CASE("generation parameter checks") {
  GrungeRanges r;
  r.width_lo = -1.0;
  CHECK_THROWS_AS(r.validate(), ParameterError);
  r = {};
  r.depth_lo = 1.0;  // above depth_hi
  CHECK_THROWS_AS(r.validate(), ParameterError);
  CHECK_THROWS_AS(grunge_generate(0, 5, 1), ParameterError);
}
