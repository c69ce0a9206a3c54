#include "evobench/local_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evobench/errors.hpp"

namespace evobench {

void LocalOptSettings::validate() const {
  if (memory_pairs < 1) throw ConfigError("local optimizer: memory_pairs must be >= 1");
  if (!(fitness_tol > 0.0) || !(gradient_tol > 0.0)) {
    throw ConfigError("local optimizer: tolerances must be positive");
  }
  if (max_iterations < 1) throw ConfigError("local optimizer: max_iterations must be >= 1");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < curvature && curvature < 1.0)) {
    throw ConfigError("local optimizer: need 0 < sufficient_decrease < curvature < 1");
  }
  if (max_line_search_evals < 2) throw ConfigError("local optimizer: max_line_search_evals must be >= 2");
}

std::string_view to_string(LocalOptStatus status) {
  switch (status) {
    case LocalOptStatus::Converged: return "converged";
    case LocalOptStatus::MaxIterations: return "max-iter";
    case LocalOptStatus::LineSearchFailure: return "line-search-failure";
  }
  return "unknown";
}

namespace {

constexpr double kBracketTolerance = 1e-1;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// Ring buffer of correction pairs for the two-loop recursion.
class CorrectionHistory {
 public:
  CorrectionHistory(std::size_t capacity, std::size_t dim)
      : s_(capacity, std::vector<double>(dim)),
        y_(capacity, std::vector<double>(dim)),
        rho_(capacity),
        alpha_(capacity) {}

  bool empty() const { return count_ == 0; }
  void clear() { count_ = 0; }

  void push(std::span<const double> s, std::span<const double> y, double sy) {
    const std::size_t slot = (head_ + count_) % s_.size();
    std::copy(s.begin(), s.end(), s_[slot].begin());
    std::copy(y.begin(), y.end(), y_[slot].begin());
    rho_[slot] = 1.0 / sy;
    if (count_ < s_.size()) {
      ++count_;
    } else {
      head_ = (head_ + 1) % s_.size();
    }
  }

  // direction = -H * g
  void apply(std::span<const double> g, std::span<double> direction) {
    std::copy(g.begin(), g.end(), direction.begin());
    if (count_ == 0) {
      for (double& v : direction) v = -v;
      return;
    }
    const std::size_t cap = s_.size();
    for (std::size_t k = count_; k-- > 0;) {
      const std::size_t slot = (head_ + k) % cap;
      alpha_[slot] = rho_[slot] * dot(s_[slot], direction);
      for (std::size_t i = 0; i < direction.size(); ++i) direction[i] -= alpha_[slot] * y_[slot][i];
    }
    const std::size_t newest = (head_ + count_ - 1) % cap;
    const double gamma = 1.0 / (rho_[newest] * dot(y_[newest], y_[newest]));
    for (double& v : direction) v *= gamma;
    for (std::size_t k = 0; k < count_; ++k) {
      const std::size_t slot = (head_ + k) % cap;
      const double beta = rho_[slot] * dot(y_[slot], direction);
      for (std::size_t i = 0; i < direction.size(); ++i) {
        direction[i] += s_[slot][i] * (alpha_[slot] - beta);
      }
    }
    for (double& v : direction) v = -v;
  }

 private:
  std::vector<std::vector<double>> s_, y_;
  std::vector<double> rho_, alpha_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
};

struct TrialPoint {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;  // g(x + alpha d) . d
  std::vector<double> x;
  std::vector<double> g;
};

class LineSearch {
 public:
  LineSearch(const Objective& f, const LocalOptSettings& s, std::size_t dim)
      : f_(f), settings_(s), trial_x_(dim), trial_g_(dim) {}

  // Returns true when a point with sufficient decrease was found; `best` then
  // holds it (strong-Wolfe point if one was reached within the budget).
  bool search(std::span<const double> x, double f0, double slope0, std::span<const double> d,
              double initial_step, TrialPoint& best, std::size_t& evaluations) {
    x_ = x;
    d_ = d;
    f0_ = f0;
    slope0_ = slope0;
    evals_ = 0;
    have_best_ = false;
    best_ = &best;

    const double step_scale = max_abs(d);
    const double alpha_max = step_scale > 0.0 ? 1e10 / step_scale : 1e10;

    double alpha_prev = 0.0, f_prev = f0, slope_prev = slope0;
    double alpha = initial_step;
    bool done = false;
    for (std::size_t i = 0; !done && evals_ < settings_.max_line_search_evals; ++i) {
      double fa, slope_a;
      evaluate(alpha, fa, slope_a);
      if (fa > f0_ + settings_.sufficient_decrease * alpha * slope0_ || (i > 0 && fa >= f_prev)) {
        zoom(alpha_prev, f_prev, slope_prev, alpha, fa, slope_a);
        done = true;
      } else if (std::abs(slope_a) <= -settings_.curvature * slope0_) {
        take_current(alpha, fa, slope_a);
        done = true;
      } else if (slope_a >= 0.0) {
        zoom(alpha, fa, slope_a, alpha_prev, f_prev, slope_prev);
        done = true;
      } else {
        alpha_prev = alpha;
        f_prev = fa;
        slope_prev = slope_a;
        if (alpha >= alpha_max) break;
        alpha = std::min(4.0 * alpha, alpha_max);
      }
    }
    evaluations += evals_;
    return have_best_;
  }

 private:
  void evaluate(double alpha, double& value, double& slope) {
    for (std::size_t i = 0; i < x_.size(); ++i) trial_x_[i] = x_[i] + alpha * d_[i];
    value = f_.value_and_gradient(trial_x_, trial_g_);
    ++evals_;
    if (!std::isfinite(value) || !all_finite(trial_g_)) {
      throw NonFiniteError("local optimizer: non-finite value or gradient", trial_x_);
    }
    slope = dot(trial_g_, d_);
    const bool armijo = value <= f0_ + settings_.sufficient_decrease * alpha * slope0_ && value < f0_;
    if (armijo && (!have_best_ || value < best_->value)) take_current(alpha, value, slope);
  }

  // The most recently evaluated point satisfied strong Wolfe; prefer it.
  void take_current(double alpha, double value, double slope) {
    have_best_ = true;
    best_->alpha = alpha;
    best_->value = value;
    best_->slope = slope;
    best_->x.assign(trial_x_.begin(), trial_x_.end());
    best_->g.assign(trial_g_.begin(), trial_g_.end());
  }

  // Safeguarded cubic interpolation between two bracketing trial steps.
  static double interpolate(double a, double fa, double da, double b, double fb, double db) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    double t = 0.5 * (a + b);
    if (disc >= 0.0) {
      const double d2 = std::copysign(std::sqrt(disc), b - a);
      const double denom = db - da + 2.0 * d2;
      if (denom != 0.0) {
        const double cand = b - (b - a) * (db + d2 - d1) / denom;
        if (std::isfinite(cand)) t = cand;
      }
    }
    const double margin = 0.1 * (hi - lo);
    if (t < lo + margin || t > hi - margin) t = 0.5 * (lo + hi);
    return t;
  }

  void zoom(double lo, double f_lo, double slope_lo, double hi, double f_hi, double slope_hi) {
    while (evals_ < settings_.max_line_search_evals) {
      if (std::abs(hi - lo) * max_abs(d_) <= 1e-16 * (1.0 + max_abs(x_))) return;
      // Kinked objectives may have no curvature point at all; once a
      // sufficient-decrease point exists, a tight bracket is good enough.
      if (have_best_ && std::abs(hi - lo) <= kBracketTolerance * std::max(lo, hi)) return;
      const double alpha = interpolate(lo, f_lo, slope_lo, hi, f_hi, slope_hi);
      double fa, slope_a;
      evaluate(alpha, fa, slope_a);
      if (fa > f0_ + settings_.sufficient_decrease * alpha * slope0_ || fa >= f_lo) {
        hi = alpha;
        f_hi = fa;
        slope_hi = slope_a;
      } else {
        if (std::abs(slope_a) <= -settings_.curvature * slope0_) {
          take_current(alpha, fa, slope_a);
          return;
        }
        if (slope_a * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
          slope_hi = slope_lo;
        }
        lo = alpha;
        f_lo = fa;
        slope_lo = slope_a;
      }
    }
  }

  const Objective& f_;
  const LocalOptSettings& settings_;
  std::vector<double> trial_x_, trial_g_;
  std::span<const double> x_, d_;
  double f0_ = 0.0, slope0_ = 0.0;
  std::size_t evals_ = 0;
  bool have_best_ = false;
  TrialPoint* best_ = nullptr;
};

// Without curvature pairs the direction is the raw gradient, whose length
// carries no step information; the first trial then moves unit distance.
double initial_step(bool steepest, std::span<const double> direction) {
  if (!steepest) return 1.0;
  const double norm = std::sqrt(dot(direction, direction));
  return norm > 0.0 ? 1.0 / norm : 1.0;
}

}  // namespace

LocalOptResult minimize(const Objective& f, std::span<const double> x0,
                        const LocalOptSettings& settings, const IterationObserver& observer) {
  settings.validate();
  const std::size_t n = x0.size();
  if (n != f.dimension()) {
    throw DimensionError("minimize: start point has " + std::to_string(n) +
                         " coordinates, objective expects " + std::to_string(f.dimension()));
  }

  LocalOptResult result;
  result.x.assign(x0.begin(), x0.end());
  std::vector<double> g(n), direction(n), s(n), y(n);
  result.value = f.value_and_gradient(result.x, g);
  result.evaluations = 1;
  if (!std::isfinite(result.value) || !all_finite(g)) {
    throw NonFiniteError("local optimizer: non-finite value or gradient at start point", result.x);
  }
  if (observer) observer({0, result.value, result.value, 0.0, 0.0, result.x});
  if (max_abs(g) < settings.gradient_tol) return result;

  CorrectionHistory history(settings.memory_pairs, n);
  LineSearch line_search(f, settings, n);
  TrialPoint accepted;
  result.status = LocalOptStatus::MaxIterations;

  for (std::size_t iter = 1; iter <= settings.max_iterations; ++iter) {
    const bool steepest = history.empty();
    history.apply(g, direction);
    double slope = dot(g, direction);
    if (!(slope < 0.0)) {
      history.clear();
      history.apply(g, direction);
      slope = dot(g, direction);
    }

    bool found = line_search.search(result.x, result.value, slope, direction,
                                    initial_step(steepest, direction), accepted, result.evaluations);
    if (!found && !history.empty()) {
      // Stale curvature information; retry once along steepest descent.
      history.clear();
      history.apply(g, direction);
      slope = dot(g, direction);
      found = line_search.search(result.x, result.value, slope, direction, initial_step(true, direction),
                                 accepted, result.evaluations);
    }
    if (!found) {
      result.status = LocalOptStatus::LineSearchFailure;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      s[i] = accepted.x[i] - result.x[i];
      y[i] = accepted.g[i] - g[i];
    }
    const double sy = dot(s, y);
    // Pairs violating the curvature condition are dropped, not fatal.
    if (sy > std::numeric_limits<double>::epsilon() * dot(y, y)) history.push(s, y, sy);

    const double previous = result.value;
    result.x.swap(accepted.x);
    g.swap(accepted.g);
    result.value = accepted.value;
    result.iterations = iter;
    if (observer) observer({iter, result.value, previous, accepted.alpha, slope, result.x});

    if (max_abs(g) < settings.gradient_tol) {
      result.status = LocalOptStatus::Converged;
      break;
    }
    if (std::abs(previous - result.value) < settings.fitness_tol) {
      // A stall along a quasi-Newton direction may just be stale curvature
      // pairs; only a stall along steepest descent counts as converged.
      if (steepest) {
        result.status = LocalOptStatus::Converged;
        break;
      }
      history.clear();
    }
  }
  return result;
}

}  // namespace evobench
