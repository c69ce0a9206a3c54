#include "evobench/functions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

#include "evobench/errors.hpp"
#include "evobench/grunge.hpp"

namespace evobench {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kE = std::numbers::e;

constexpr double kRastriginEdge = 5.12;
constexpr double kSchwefelEdge = 500.0;
constexpr double kSchwefelOffset = 418.9829;
constexpr double kSchwefelPaperArgmin = 420.9687;

void require_nonempty(std::span<const double> x, const char* who) {
  if (x.empty()) throw DimensionError(std::string(who) + ": empty input vector");
}

void require_same_size(std::span<const double> x, std::span<double> out, const char* who) {
  if (out.size() != x.size()) {
    throw DimensionError(std::string(who) + ": gradient buffer has " +
                         std::to_string(out.size()) + " elements, expected " +
                         std::to_string(x.size()));
  }
}

// sin^2(pi*x) == (1 - cos(2*pi*x)) / 2 without the cancellation near integers.
double half_one_minus_cos(double x) {
  const double s = std::sin(kPi * x);
  return s * s;
}

std::vector<double> with_size(std::span<const double> x) { return std::vector<double>(x.size()); }

}  // namespace

void Bounds::validate() const {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw ParameterError("bounds require finite lower < upper, got [" + std::to_string(lower) +
                         ", " + std::to_string(upper) + "]");
  }
}

// ---------------------------------------------------------------- Ackley

double ackley_value(std::span<const double> x) {
  require_nonempty(x, "ackley");
  const double n = static_cast<double>(x.size());
  double sum_sq = 0.0;
  double sum_cos_minus_one = 0.0;
  for (double v : x) {
    sum_sq += v * v;
    sum_cos_minus_one -= 2.0 * half_one_minus_cos(v);
  }
  // -20 exp(-0.2 sqrt(a)) + 20  and  -exp(b) + e, written with expm1 so the
  // origin gives exactly zero and small values keep their digits.
  return -20.0 * std::expm1(-0.2 * std::sqrt(sum_sq / n)) -
         kE * std::expm1(sum_cos_minus_one / n);
}

void ackley_gradient(std::span<const double> x, std::span<double> out) {
  require_nonempty(x, "ackley");
  require_same_size(x, out, "ackley");
  const double n = static_cast<double>(x.size());
  double sum_sq = 0.0;
  double sum_cos = 0.0;
  for (double v : x) {
    sum_sq += v * v;
    sum_cos += std::cos(kTwoPi * v);
  }
  const double root_a = std::sqrt(sum_sq / n);
  const double radial = root_a > 0.0 ? 4.0 * std::exp(-0.2 * root_a) / (n * root_a) : 0.0;
  const double angular = kTwoPi * std::exp(sum_cos / n) / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = radial * x[i] + angular * std::sin(kTwoPi * x[i]);
  }
}

std::vector<double> ackley_gradient(std::span<const double> x) {
  auto g = with_size(x);
  ackley_gradient(x, g);
  return g;
}

void ackley_gradient_simplified(std::span<const double> x, std::span<double> out) {
  require_nonempty(x, "ackley");
  require_same_size(x, out, "ackley");
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    const double root_a = std::abs(v) / std::sqrt(n);
    const double radial = root_a > 0.0 ? 4.0 * v * std::exp(-0.2 * root_a) / (n * root_a) : 0.0;
    out[i] = radial + kTwoPi * std::sin(kTwoPi * v) * std::exp(std::cos(kTwoPi * v) / n) / n;
  }
}

std::vector<double> ackley_gradient_simplified(std::span<const double> x) {
  auto g = with_size(x);
  ackley_gradient_simplified(x, g);
  return g;
}

// ------------------------------------------------------------- Rastrigin

double rastrigin_value(std::span<const double> x) {
  require_nonempty(x, "rastrigin");
  // 10n + sum(x^2 - 10 cos) regrouped per element as x^2 + 20 sin^2(pi x).
  double total = 0.0;
  for (double v : x) {
    if (std::abs(v) > kRastriginEdge) {
      total += 10.0 + 10.0 * v * v;
    } else {
      total += v * v + 20.0 * half_one_minus_cos(v);
    }
  }
  return total;
}

void rastrigin_gradient(std::span<const double> x, std::span<double> out) {
  require_nonempty(x, "rastrigin");
  require_same_size(x, out, "rastrigin");
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    out[i] = std::abs(v) > kRastriginEdge ? 20.0 * v : 2.0 * v + 20.0 * kPi * std::sin(kTwoPi * v);
  }
}

std::vector<double> rastrigin_gradient(std::span<const double> x) {
  auto g = with_size(x);
  rastrigin_gradient(x, g);
  return g;
}

// -------------------------------------------------------------- Schwefel

double schwefel_value(std::span<const double> x) {
  require_nonempty(x, "schwefel");
  double total = kSchwefelOffset * static_cast<double>(x.size());
  for (double v : x) {
    if (std::abs(v) > kSchwefelEdge) {
      total += 0.02 * v * v;
    } else {
      total -= v * std::sin(std::sqrt(std::abs(v)));
    }
  }
  return total;
}

void schwefel_gradient(std::span<const double> x, std::span<double> out) {
  require_nonempty(x, "schwefel");
  require_same_size(x, out, "schwefel");
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    if (std::abs(v) > kSchwefelEdge) {
      out[i] = 0.04 * v;
    } else if (v == 0.0) {
      out[i] = 0.0;
    } else {
      // -x sin(sqrt|x|) is odd, so its derivative is even in x.
      const double r = std::sqrt(std::abs(v));
      out[i] = -std::sin(r) - 0.5 * r * std::cos(r);
    }
  }
}

std::vector<double> schwefel_gradient(std::span<const double> x) {
  auto g = with_size(x);
  schwefel_gradient(x, g);
  return g;
}

double schwefel_argmin() {
  // Stationary point of x sin(sqrt x): with t = sqrt x, sin t + (t/2) cos t = 0.
  static const double argmin = [] {
    double t = std::sqrt(kSchwefelPaperArgmin);
    for (int it = 0; it < 50; ++it) {
      const double phi = std::sin(t) + 0.5 * t * std::cos(t);
      const double dphi = 1.5 * std::cos(t) - 0.5 * t * std::sin(t);
      const double step = phi / dphi;
      t -= step;
      if (std::abs(step) < 1e-15 * t) break;
    }
    return t * t;
  }();
  return argmin;
}

double schwefel_min_per_dimension() {
  const double x = schwefel_argmin();
  return kSchwefelOffset - x * std::sin(std::sqrt(x));
}

// ----------------------------------------------------------- Schaffer F7

double schafferf7_value(std::span<const double> x) {
  if (x.size() < 2) throw DimensionError("schafferf7: needs at least 2 dimensions");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double s = std::hypot(x[i], x[i + 1]);
    total += std::sqrt(s) * (std::sin(50.0 * std::pow(s, 0.2)) + 1.0);
  }
  const double mean = total / static_cast<double>(x.size() - 1);
  return mean * mean;
}

void schafferf7_gradient(std::span<const double> x, std::span<double> out) {
  if (x.size() < 2) throw DimensionError("schafferf7: needs at least 2 dimensions");
  require_same_size(x, out, "schafferf7");
  const double scale = 1.0 / static_cast<double>(x.size() - 1);
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double s = std::hypot(x[i], x[i + 1]);
    if (s == 0.0) continue;
    const double root = std::sqrt(s);
    const double phase = 50.0 * std::pow(s, 0.2);
    total += root * (std::sin(phase) + 1.0);
    // d/ds [sqrt(s) (sin(50 s^0.2) + 1)]
    const double dt_ds = (std::sin(phase) + 1.0) / (2.0 * root) + 10.0 * std::cos(phase) * std::pow(s, -0.3);
    out[i] += dt_ds * x[i] / s;
    out[i + 1] += dt_ds * x[i + 1] / s;
  }
  const double outer = 2.0 * total * scale * scale;
  for (double& g : out) g *= outer;
}

std::vector<double> schafferf7_gradient(std::span<const double> x) {
  auto g = with_size(x);
  schafferf7_gradient(x, g);
  return g;
}

// ----------------------------------------------------------- Schaffer F6

double schafferf6_value(std::span<const double> x) {
  if (x.size() != 2) throw DimensionError("schafferf6: needs exactly 2 dimensions");
  const double q = x[0] * x[0] + x[1] * x[1];
  const double sr = std::sin(std::sqrt(q));
  const double denom = 1.0 + 0.001 * q;
  return 0.5 + (sr * sr - 0.5) / (denom * denom);
}

void schafferf6_gradient(std::span<const double> x, std::span<double> out) {
  if (x.size() != 2) throw DimensionError("schafferf6: needs exactly 2 dimensions");
  require_same_size(x, out, "schafferf6");
  const double q = x[0] * x[0] + x[1] * x[1];
  if (q == 0.0) {
    out[0] = out[1] = 0.0;
    return;
  }
  const double r = std::sqrt(q);
  const double sr = std::sin(r);
  const double denom = 1.0 + 0.001 * q;
  // d/dq of the value; d sin^2(sqrt q)/dq = sin(2r) / (2r)
  const double df_dq =
      std::sin(2.0 * r) / (2.0 * r) / (denom * denom) - 0.002 * (sr * sr - 0.5) / (denom * denom * denom);
  out[0] = 2.0 * x[0] * df_dq;
  out[1] = 2.0 * x[1] * df_dq;
}

std::vector<double> schafferf6_gradient(std::span<const double> x) {
  auto g = with_size(x);
  schafferf6_gradient(x, g);
  return g;
}

// --------------------------------------------------------------- Lunacek

double LunacekParams::mu2() const {
  validate();
  return -std::sqrt((mu1 * mu1 - d) / s);
}

void LunacekParams::validate() const {
  if (!(s > 0.0)) throw ParameterError("lunacek: s must be positive");
  if ((mu1 * mu1 - d) / s < 0.0) {
    throw ParameterError("lunacek: (mu1^2 - d) / s is negative, mu2 is not real");
  }
}

namespace {

struct LunacekBranches {
  double first = 0.0;   // sum (x - mu1)^2
  double second = 0.0;  // d*N + s * sum (x - mu2)^2
  double ripple = 0.0;  // 10 * sum (1 - cos 2 pi (x - mu1))
};

LunacekBranches lunacek_branches(std::span<const double> x, const LunacekParams& p, double mu2) {
  LunacekBranches b;
  double second_sum = 0.0;
  for (double v : x) {
    const double a = v - p.mu1;
    const double c = v - mu2;
    b.first += a * a;
    second_sum += c * c;
    b.ripple += 20.0 * half_one_minus_cos(a);
  }
  b.second = p.d * static_cast<double>(x.size()) + p.s * second_sum;
  return b;
}

}  // namespace

double lunacek_value(std::span<const double> x, const LunacekParams& p) {
  require_nonempty(x, "lunacek");
  const auto b = lunacek_branches(x, p, p.mu2());
  return std::min(b.first, b.second) + b.ripple;
}

void lunacek_gradient(std::span<const double> x, std::span<double> out, const LunacekParams& p) {
  require_nonempty(x, "lunacek");
  require_same_size(x, out, "lunacek");
  const double mu2 = p.mu2();
  const auto b = lunacek_branches(x, p, mu2);
  const bool first_branch = b.first <= b.second;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double sphere = first_branch ? 2.0 * (x[i] - p.mu1) : 2.0 * p.s * (x[i] - mu2);
    out[i] = sphere + 20.0 * kPi * std::sin(kTwoPi * (x[i] - p.mu1));
  }
}

std::vector<double> lunacek_gradient(std::span<const double> x, const LunacekParams& p) {
  auto g = with_size(x);
  lunacek_gradient(x, g, p);
  return g;
}

// ---------------------------------------------------------- FunctionSpec

FunctionSpec::FunctionSpec(std::string name, std::size_t dim, DimRule rule, Bounds bounds,
                           std::optional<double> target_value,
                           std::optional<std::vector<double>> target_point,
                           double target_tolerance, std::shared_ptr<const Objective> impl)
    : name_(std::move(name)),
      dim_(dim),
      rule_(rule),
      bounds_(bounds),
      target_value_(target_value),
      target_point_(std::move(target_point)),
      target_tolerance_(target_tolerance),
      impl_(std::move(impl)) {
  bounds_.validate();
  if (!impl_) throw ParameterError("FunctionSpec: missing objective");
  if (target_point_ && target_point_->size() != dim_) {
    throw DimensionError("FunctionSpec: target point dimension mismatch");
  }
}

FunctionSpec FunctionSpec::with_target(double value) const {
  FunctionSpec copy = *this;
  copy.target_value_ = value;
  return copy;
}

FunctionSpec FunctionSpec::with_bounds(Bounds bounds) const {
  bounds.validate();
  FunctionSpec copy = *this;
  copy.bounds_ = bounds;
  return copy;
}

void FunctionSpec::check_dim(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw DimensionError(name_ + ": expected " + std::to_string(dim_) + " coordinates, got " +
                         std::to_string(x.size()));
  }
}

double FunctionSpec::value(std::span<const double> x) const {
  check_dim(x);
  return impl_->value(x);
}

void FunctionSpec::gradient(std::span<const double> x, std::span<double> out) const {
  check_dim(x);
  impl_->gradient(x, out);
}

double FunctionSpec::value_and_gradient(std::span<const double> x, std::span<double> out) const {
  check_dim(x);
  return impl_->value_and_gradient(x, out);
}

std::vector<double> FunctionSpec::gradient(std::span<const double> x) const {
  std::vector<double> g(x.size());
  gradient(x, g);
  return g;
}

// ---------------------------------------------------------------- lookup

namespace {

using ValueFn = std::function<double(std::span<const double>)>;
using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

class ClosedForm final : public Objective {
 public:
  ClosedForm(std::size_t dim, ValueFn value, GradFn grad)
      : dim_(dim), value_(std::move(value)), grad_(std::move(grad)) {}

  std::size_t dimension() const override { return dim_; }
  double value(std::span<const double> x) const override { return value_(x); }
  void gradient(std::span<const double> x, std::span<double> out) const override { grad_(x, out); }

 private:
  std::size_t dim_;
  ValueFn value_;
  GradFn grad_;
};

FunctionSpec closed_form(std::string name, std::size_t dim, DimRule rule, Bounds bounds,
                         double target, std::vector<double> point, double tol, ValueFn v, GradFn g) {
  return FunctionSpec(std::move(name), dim, rule, bounds, target, std::move(point), tol,
                      std::make_shared<ClosedForm>(dim, std::move(v), std::move(g)));
}

constexpr double kKnownMinimumTolerance = 1e-9;

}  // namespace

std::vector<std::string> builtin_function_names() {
  return {"ackley", "ackley-simplified-grad", "rastrigin", "schwefel",
          "schafferf7", "schafferf6", "lunacek"};
}

FunctionSpec lookup_function(std::string_view name, std::size_t dim, const FunctionOptions& options) {
  constexpr std::string_view kGrungePrefix = "grunge:";
  if (name.starts_with(kGrungePrefix)) {
    const std::string path(name.substr(kGrungePrefix.size()));
    auto landscape = std::make_shared<GrungeLandscape>(grunge_load(path));
    if (dim != 0 && dim != landscape->dimension()) {
      throw DimensionError("grunge: landscape has " + std::to_string(landscape->dimension()) +
                           " dimensions, requested " + std::to_string(dim));
    }
    FunctionSpec spec(landscape->name(), landscape->dimension(), DimRule::AnyN,
                      options.bounds.value_or(landscape->bounds()), std::nullopt, std::nullopt,
                      kKnownMinimumTolerance, landscape);
    return spec;
  }

  if (dim == 0) throw DimensionError(std::string(name) + ": dimension must be positive");
  const auto zeros = std::vector<double>(dim, 0.0);
  std::optional<FunctionSpec> spec;

  if (name == "ackley") {
    spec = closed_form("ackley", dim, DimRule::AnyN, {-32.768, 32.768}, 0.0, zeros,
                       kKnownMinimumTolerance, ackley_value,
                       [](std::span<const double> x, std::span<double> g) { ackley_gradient(x, g); });
  } else if (name == "ackley-simplified-grad") {
    spec = closed_form("ackley-simplified-grad", dim, DimRule::AnyN, {-32.768, 32.768}, 0.0, zeros,
                       kKnownMinimumTolerance, ackley_value,
                       [](std::span<const double> x, std::span<double> g) {
                         ackley_gradient_simplified(x, g);
                       });
  } else if (name == "rastrigin") {
    spec = closed_form("rastrigin", dim, DimRule::AnyN, {-5.12, 5.12}, 0.0, zeros,
                       kKnownMinimumTolerance, rastrigin_value,
                       [](std::span<const double> x, std::span<double> g) { rastrigin_gradient(x, g); });
  } else if (name == "schwefel") {
    const double n = static_cast<double>(dim);
    spec = closed_form("schwefel", dim, DimRule::AnyN, {-500.0, 500.0},
                       n * schwefel_min_per_dimension(),
                       std::vector<double>(dim, kSchwefelPaperArgmin), 1e-3 * n, schwefel_value,
                       [](std::span<const double> x, std::span<double> g) { schwefel_gradient(x, g); });
  } else if (name == "schafferf7") {
    if (dim < 2) throw DimensionError("schafferf7: needs at least 2 dimensions");
    spec = closed_form("schafferf7", dim, DimRule::PairsOverN, {-100.0, 100.0}, 0.0, zeros,
                       kKnownMinimumTolerance, schafferf7_value,
                       [](std::span<const double> x, std::span<double> g) { schafferf7_gradient(x, g); });
  } else if (name == "schafferf6") {
    if (dim != 2) {
      throw DimensionError("schafferf6: fixed to 2 dimensions, requested " + std::to_string(dim));
    }
    spec = closed_form("schafferf6", dim, DimRule::Fixed2, {-100.0, 100.0}, 0.0, zeros,
                       kKnownMinimumTolerance, schafferf6_value,
                       [](std::span<const double> x, std::span<double> g) { schafferf6_gradient(x, g); });
  } else if (name == "lunacek") {
    const LunacekParams p = options.lunacek;
    p.validate();
    spec = closed_form("lunacek", dim, DimRule::AnyN, {-5.0, 5.0}, 0.0,
                       std::vector<double>(dim, p.mu1), kKnownMinimumTolerance,
                       [p](std::span<const double> x) { return lunacek_value(x, p); },
                       [p](std::span<const double> x, std::span<double> g) { lunacek_gradient(x, g, p); });
  } else {
    throw ParameterError("unknown function '" + std::string(name) + "'");
  }

  if (options.bounds) return spec->with_bounds(*options.bounds);
  return *spec;
}

}  // namespace evobench
