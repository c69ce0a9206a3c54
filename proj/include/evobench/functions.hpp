#pragma once

// Closed-form benchmark objectives with analytic gradients.
//
// Every gradient has two overloads: one writing into a caller-provided span
// (used by the optimizer hot loops) and one returning a fresh vector.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evobench/objective.hpp"

namespace evobench {

struct LunacekParams {
  double mu1 = 2.5;
  double d = 1.0;
  double s = 0.7;

  // Center of the deceptive funnel, -sqrt((mu1^2 - d) / s).
  double mu2() const;
  void validate() const;
};

double ackley_value(std::span<const double> x);
void ackley_gradient(std::span<const double> x, std::span<double> out);
std::vector<double> ackley_gradient(std::span<const double> x);

// Per-element variant where the two means inside the exponentials only see
// the element's own coordinate. Decouples the dimensions; not the true
// gradient of ackley_value for n > 1.
void ackley_gradient_simplified(std::span<const double> x, std::span<double> out);
std::vector<double> ackley_gradient_simplified(std::span<const double> x);

// Rastrigin with a harmonic wall 10*x^2 outside |x| <= 5.12.
double rastrigin_value(std::span<const double> x);
void rastrigin_gradient(std::span<const double> x, std::span<double> out);
std::vector<double> rastrigin_gradient(std::span<const double> x);

// Schwefel with a harmonic wall 0.02*x^2 outside |x| <= 500.
double schwefel_value(std::span<const double> x);
void schwefel_gradient(std::span<const double> x, std::span<double> out);
std::vector<double> schwefel_gradient(std::span<const double> x);

// Minimum of the one-dimensional Schwefel term (argmin ~420.9687), offset
// included: 418.9829 - max_x x*sin(sqrt(x)).
double schwefel_min_per_dimension();
double schwefel_argmin();

// Needs n >= 2; pairs (x_i, x_{i+1}) for i = 1..n-1.
double schafferf7_value(std::span<const double> x);
void schafferf7_gradient(std::span<const double> x, std::span<double> out);
std::vector<double> schafferf7_gradient(std::span<const double> x);

// Exactly two dimensions.
double schafferf6_value(std::span<const double> x);
void schafferf6_gradient(std::span<const double> x, std::span<double> out);
std::vector<double> schafferf6_gradient(std::span<const double> x);

double lunacek_value(std::span<const double> x, const LunacekParams& p = {});
void lunacek_gradient(std::span<const double> x, std::span<double> out,
                      const LunacekParams& p = {});
std::vector<double> lunacek_gradient(std::span<const double> x, const LunacekParams& p = {});

enum class DimRule { AnyN, Fixed2, PairsOverN };

// A named objective of fixed dimension with its search box and known optimum.
class FunctionSpec final : public Objective {
 public:
  FunctionSpec(std::string name, std::size_t dim, DimRule rule, Bounds bounds,
               std::optional<double> target_value, std::optional<std::vector<double>> target_point,
               double target_tolerance, std::shared_ptr<const Objective> impl);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const override { return dim_; }
  DimRule dim_rule() const noexcept { return rule_; }
  const Bounds& bounds() const noexcept { return bounds_; }

  // Global-minimum value; empty for landscapes that have not been enumerated.
  const std::optional<double>& target_value() const noexcept { return target_value_; }
  const std::optional<std::vector<double>>& target_point() const noexcept { return target_point_; }
  // |value(target_point) - target_value| is guaranteed below this.
  double target_tolerance() const noexcept { return target_tolerance_; }

  FunctionSpec with_target(double value) const;
  FunctionSpec with_bounds(Bounds bounds) const;

  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double value_and_gradient(std::span<const double> x, std::span<double> out) const override;
  std::vector<double> gradient(std::span<const double> x) const;

  const Objective& objective() const noexcept { return *impl_; }

 private:
  void check_dim(std::span<const double> x) const;

  std::string name_;
  std::size_t dim_;
  DimRule rule_;
  Bounds bounds_;
  std::optional<double> target_value_;
  std::optional<std::vector<double>> target_point_;
  double target_tolerance_;
  std::shared_ptr<const Objective> impl_;
};

struct FunctionOptions {
  LunacekParams lunacek{};
  std::optional<Bounds> bounds;  // overrides the function's default box
};

// Names: ackley, ackley-simplified-grad, rastrigin, schwefel, schafferf7,
// schafferf6, lunacek, grunge:<landscape file>. GRUNGE specs come back
// without a target value; attach one with FunctionSpec::with_target.
FunctionSpec lookup_function(std::string_view name, std::size_t dim,
                             const FunctionOptions& options = {});

std::vector<std::string> builtin_function_names();

}  // namespace evobench
