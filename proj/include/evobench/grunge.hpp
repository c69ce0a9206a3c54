#pragma once

// Randomized-Gaussian landscapes: f(x) = sum_i xi_i * exp(-zeta_i * |x - kappa_i|^2).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evobench/local_opt.hpp"
#include "evobench/objective.hpp"

namespace evobench {

struct GrungeRanges {
  double depth_lo = -10.0;
  double depth_hi = -0.1;
  double width_lo = 0.5;
  double width_hi = 5.0;
  bool mixed_sign = false;  // when set, each weight's sign is drawn at random
  Bounds bounds{0.0, 10.0};

  void validate() const;
};

class GrungeLandscape final : public Objective {
 public:
  GrungeLandscape(std::size_t dims, std::vector<double> weights, std::vector<double> widths,
                  std::vector<double> centers, Bounds bounds);

  std::size_t dimension() const override { return dims_; }
  std::size_t gaussians() const noexcept { return weights_.size(); }
  const Bounds& bounds() const noexcept { return bounds_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> widths() const noexcept { return widths_; }
  std::span<const double> center(std::size_t i) const {
    return std::span<const double>(centers_).subspan(i * dims_, dims_);
  }
  // "GRUNGE[M,N]"
  std::string name() const;

  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double value_and_gradient(std::span<const double> x, std::span<double> out) const override;
  std::vector<double> gradient(std::span<const double> x) const;
  // Row-major M x M.
  std::vector<double> hessian(std::span<const double> x) const;

  // Throws ValidationError on zeta <= 0, centers outside bounds, non-finite data.
  void validate() const;

  bool operator==(const GrungeLandscape& other) const;

 private:
  void check_dim(std::span<const double> x) const;

  std::size_t dims_;
  std::vector<double> weights_;
  std::vector<double> widths_;
  std::vector<double> centers_;  // N x M row-major
  Bounds bounds_;
};

GrungeLandscape grunge_generate(std::size_t dims, std::size_t gaussians, std::uint64_t seed,
                                const GrungeRanges& ranges = {});

// Text format: "GRUNGE 1" / "M N" / N lines "xi zeta kappa_1 .. kappa_M" /
// "BOUNDS lo hi", numbers in shortest round-trip form.
void grunge_save(const GrungeLandscape& landscape, std::ostream& out);
void grunge_save(const GrungeLandscape& landscape, const std::filesystem::path& path);
GrungeLandscape grunge_load(std::istream& in);
GrungeLandscape grunge_load(const std::filesystem::path& path);

struct MinimumEntry {
  std::vector<double> location;
  double value = 0.0;
  std::size_t hits = 0;
};

struct MinimaCatalog {
  std::vector<MinimumEntry> entries;  // ascending by value
  std::size_t global_min = 0;
  std::size_t starts = 0;
  std::size_t nonconvergent = 0;  // starts whose local optimization did not converge
  std::size_t not_minimum = 0;    // converged on a flat region or saddle
  std::size_t out_of_bounds = 0;  // converged outside the search box

  const MinimumEntry& best() const { return entries.at(global_min); }
};

struct EnumerateOptions {
  double merge_tol = 1e-4;
  // Smallest Hessian Cholesky pivot accepted as a strict minimum.
  double curvature_tol = 1e-8;
  std::size_t max_starts = 100'000'000;
  unsigned workers = 1;
  LocalOptSettings locopt = tight_locopt();

  static LocalOptSettings tight_locopt();
};

// Local optimization from every node of a regular grid (endpoints included)
// over the landscape's box; converged strict minima are merged within
// merge_tol (Euclidean) and returned sorted by value.
MinimaCatalog grunge_enumerate(const GrungeLandscape& landscape, std::size_t grid_points_per_dim,
                               const EnumerateOptions& options = {});

// Merge one converged point into a catalog under construction. Exposed for
// oracles that enumerate from other start sets.
class MinimaCollector {
 public:
  explicit MinimaCollector(double merge_tol);
  void add(std::span<const double> location, double value);
  // Sorted catalog (ties keep insertion order).
  MinimaCatalog finish() &&;

 private:
  double merge_tol_;
  std::vector<MinimumEntry> entries_;
  std::vector<std::size_t> by_value_;  // indices into entries_, ordered by value
};

// Decides whether a local optimization endpoint is a strict minimum inside the box.
enum class EndpointKind { Minimum, NotConverged, NotMinimum, OutOfBounds };
EndpointKind classify_endpoint(const GrungeLandscape& landscape, const LocalOptResult& result,
                               double curvature_tol);

// "MINIMA <count>" then "value x_1 .. x_M hits" per line.
void save_catalog(const MinimaCatalog& catalog, std::ostream& out);
void save_catalog(const MinimaCatalog& catalog, const std::filesystem::path& path);
MinimaCatalog load_catalog(std::istream& in);
MinimaCatalog load_catalog(const std::filesystem::path& path);

}  // namespace evobench
