#pragma once

#include <cstddef>
#include <span>

namespace evobench {

// Per-dimension search interval. All built-in objectives use the same
// interval in every dimension.
struct Bounds {
  double lower = 0.0;
  double upper = 1.0;

  double width() const noexcept { return upper - lower; }
  bool contains(double v) const noexcept { return v >= lower && v <= upper; }
  void validate() const;
  bool operator==(const Bounds&) const = default;
};

// A differentiable scalar objective over R^n. Lower is better.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;

  // Override when value and gradient share intermediates.
  virtual double value_and_gradient(std::span<const double> x, std::span<double> out) const {
    gradient(x, out);
    return value(x);
  }
};

}  // namespace evobench
