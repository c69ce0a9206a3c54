#include "evobench/grunge.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include "evobench/errors.hpp"
#include "evobench/rng.hpp"
#include "text_io.hpp"

namespace evobench {

namespace {

// exp(-t) is exactly zero in double precision beyond this.
constexpr double kUnderflowExponent = 746.0;

constexpr double kEndpointGradientTol = 1e-7;

}  // namespace

void GrungeRanges::validate() const {
  if (!(depth_lo <= depth_hi) || !(depth_hi < 0.0)) {
    throw ParameterError("grunge: depth range must be negative with lo <= hi");
  }
  if (!(width_lo <= width_hi) || !(width_lo > 0.0)) {
    throw ParameterError("grunge: width range must be positive with lo <= hi");
  }
  bounds.validate();
}

GrungeLandscape::GrungeLandscape(std::size_t dims, std::vector<double> weights,
                                 std::vector<double> widths, std::vector<double> centers,
                                 Bounds bounds)
    : dims_(dims),
      weights_(std::move(weights)),
      widths_(std::move(widths)),
      centers_(std::move(centers)),
      bounds_(bounds) {
  if (dims_ == 0) throw DimensionError("grunge: dimension must be positive");
  if (weights_.empty()) throw DimensionError("grunge: need at least one Gaussian");
  if (widths_.size() != weights_.size() || centers_.size() != weights_.size() * dims_) {
    throw DimensionError("grunge: inconsistent parameter array sizes");
  }
}

std::string GrungeLandscape::name() const {
  return "GRUNGE[" + std::to_string(dims_) + "," + std::to_string(weights_.size()) + "]";
}

void GrungeLandscape::validate() const {
  bounds_.validate();
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i])) {
      throw ValidationError("grunge: weight " + std::to_string(i) + " is not finite");
    }
    if (!(widths_[i] > 0.0) || !std::isfinite(widths_[i])) {
      throw ValidationError("grunge: width " + std::to_string(i) + " must be positive, got " +
                            text::format_double(widths_[i]));
    }
    for (double c : center(i)) {
      if (!bounds_.contains(c)) {
        throw ValidationError("grunge: center of Gaussian " + std::to_string(i) +
                              " lies outside the bounds");
      }
    }
  }
}

void GrungeLandscape::check_dim(std::span<const double> x) const {
  if (x.size() != dims_) {
    throw DimensionError(name() + ": expected " + std::to_string(dims_) + " coordinates, got " +
                         std::to_string(x.size()));
  }
}

double GrungeLandscape::value(std::span<const double> x) const {
  check_dim(x);
  double total = 0.0;
  const double* c = centers_.data();
  for (std::size_t i = 0; i < weights_.size(); ++i, c += dims_) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < dims_; ++j) {
      const double d = x[j] - c[j];
      r2 += d * d;
    }
    const double t = widths_[i] * r2;
    if (t < kUnderflowExponent) total += weights_[i] * std::exp(-t);
  }
  return total;
}

double GrungeLandscape::value_and_gradient(std::span<const double> x, std::span<double> out) const {
  check_dim(x);
  if (out.size() != dims_) throw DimensionError(name() + ": gradient buffer size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  const double* c = centers_.data();
  for (std::size_t i = 0; i < weights_.size(); ++i, c += dims_) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < dims_; ++j) {
      const double d = x[j] - c[j];
      r2 += d * d;
    }
    const double t = widths_[i] * r2;
    if (t >= kUnderflowExponent) continue;
    const double term = weights_[i] * std::exp(-t);
    total += term;
    const double k = -2.0 * widths_[i] * term;
    for (std::size_t j = 0; j < dims_; ++j) out[j] += k * (x[j] - c[j]);
  }
  return total;
}

void GrungeLandscape::gradient(std::span<const double> x, std::span<double> out) const {
  value_and_gradient(x, out);
}

std::vector<double> GrungeLandscape::gradient(std::span<const double> x) const {
  std::vector<double> g(dims_);
  value_and_gradient(x, g);
  return g;
}

std::vector<double> GrungeLandscape::hessian(std::span<const double> x) const {
  check_dim(x);
  std::vector<double> h(dims_ * dims_, 0.0);
  std::vector<double> d(dims_);
  const double* c = centers_.data();
  for (std::size_t i = 0; i < weights_.size(); ++i, c += dims_) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < dims_; ++j) {
      d[j] = x[j] - c[j];
      r2 += d[j] * d[j];
    }
    const double t = widths_[i] * r2;
    if (t >= kUnderflowExponent) continue;
    const double term = weights_[i] * std::exp(-t);
    const double z = widths_[i];
    for (std::size_t j = 0; j < dims_; ++j) {
      for (std::size_t k = 0; k < dims_; ++k) {
        h[j * dims_ + k] += term * (4.0 * z * z * d[j] * d[k] - (j == k ? 2.0 * z : 0.0));
      }
    }
  }
  return h;
}

bool GrungeLandscape::operator==(const GrungeLandscape& other) const {
  return dims_ == other.dims_ && weights_ == other.weights_ && widths_ == other.widths_ &&
         centers_ == other.centers_ && bounds_ == other.bounds_;
}

GrungeLandscape grunge_generate(std::size_t dims, std::size_t gaussians, std::uint64_t seed,
                                const GrungeRanges& ranges) {
  if (dims < 1 || gaussians < 1) throw ParameterError("grunge: need M >= 1 and N >= 1");
  ranges.validate();
  Rng rng(seed);
  std::vector<double> weights(gaussians), widths(gaussians), centers(gaussians * dims);
  for (std::size_t i = 0; i < gaussians; ++i) {
    weights[i] = rng.uniform(ranges.depth_lo, ranges.depth_hi);
    if (ranges.mixed_sign && rng.bernoulli(0.5)) weights[i] = -weights[i];
    widths[i] = rng.uniform(ranges.width_lo, ranges.width_hi);
    for (std::size_t j = 0; j < dims; ++j) {
      centers[i * dims + j] = rng.uniform(ranges.bounds.lower, ranges.bounds.upper);
    }
  }
  return GrungeLandscape(dims, std::move(weights), std::move(widths), std::move(centers),
                         ranges.bounds);
}

// ------------------------------------------------------------ file format

void grunge_save(const GrungeLandscape& landscape, std::ostream& out) {
  out << "GRUNGE 1\n" << landscape.dimension() << ' ' << landscape.gaussians() << '\n';
  for (std::size_t i = 0; i < landscape.gaussians(); ++i) {
    out << text::format_double(landscape.weights()[i]) << ' '
        << text::format_double(landscape.widths()[i]);
    for (double c : landscape.center(i)) out << ' ' << text::format_double(c);
    out << '\n';
  }
  out << "BOUNDS " << text::format_double(landscape.bounds().lower) << ' '
      << text::format_double(landscape.bounds().upper) << '\n';
}

void grunge_save(const GrungeLandscape& landscape, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  grunge_save(landscape, out);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line split into tokens; throws naming `what` at end of input.
  std::vector<std::string_view> next(const std::string& what) {
    if (!std::getline(in_, buffer_)) throw ParseError(line_ + 1, "unexpected end of input, expected " + what);
    ++line_;
    return text::split_ws(buffer_);
  }
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string buffer_;
  std::size_t line_ = 0;
};

}  // namespace

GrungeLandscape grunge_load(std::istream& in) {
  LineReader reader(in);
  auto header = reader.next("'GRUNGE 1' header");
  if (header.size() != 2 || header[0] != "GRUNGE") {
    throw ParseError(reader.line(), "missing 'GRUNGE <version>' header");
  }
  if (header[1] != "1") {
    throw ParseError(reader.line(), "unsupported landscape format version " + std::string(header[1]));
  }
  auto sizes = reader.next("'M N' line");
  if (sizes.size() != 2) throw ParseError(reader.line(), "expected 'M N'");
  const auto dims = static_cast<std::size_t>(text::parse_count(sizes[0], reader.line()));
  const auto count = static_cast<std::size_t>(text::parse_count(sizes[1], reader.line()));
  if (dims == 0 || count == 0) throw ParseError(reader.line(), "M and N must be positive");

  std::vector<double> weights(count), widths(count), centers;
  centers.reserve(count * dims);
  for (std::size_t i = 0; i < count; ++i) {
    auto tokens = reader.next("Gaussian " + std::to_string(i + 1) + " of " + std::to_string(count));
    if (tokens.size() != dims + 2) {
      throw ParseError(reader.line(), "expected " + std::to_string(dims + 2) + " numbers, got " +
                                          std::to_string(tokens.size()));
    }
    weights[i] = text::parse_double(tokens[0], reader.line());
    widths[i] = text::parse_double(tokens[1], reader.line());
    for (std::size_t j = 0; j < dims; ++j) centers.push_back(text::parse_double(tokens[j + 2], reader.line()));
  }
  auto bounds_line = reader.next("BOUNDS line");
  if (bounds_line.size() != 3 || bounds_line[0] != "BOUNDS") {
    throw ParseError(reader.line(), "expected 'BOUNDS lo hi'");
  }
  const Bounds bounds{text::parse_double(bounds_line[1], reader.line()),
                      text::parse_double(bounds_line[2], reader.line())};
  GrungeLandscape landscape(dims, std::move(weights), std::move(widths), std::move(centers), bounds);
  landscape.validate();
  return landscape;
}

GrungeLandscape grunge_load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open landscape file '" + path.string() + "'");
  return grunge_load(in);
}

// ------------------------------------------------------------ enumeration

LocalOptSettings EnumerateOptions::tight_locopt() {
  LocalOptSettings s;
  // Only the gradient criterion (or exhausted line search) ends the descent.
  s.fitness_tol = std::numeric_limits<double>::min();
  s.gradient_tol = 1e-10;
  s.max_iterations = 2000;
  return s;
}

MinimaCollector::MinimaCollector(double merge_tol) : merge_tol_(merge_tol) {
  if (!(merge_tol > 0.0)) throw ParameterError("merge tolerance must be positive");
}

void MinimaCollector::add(std::span<const double> location, double value) {
  // Two endpoints of the same minimum agree in value far more tightly than
  // this window, so only entries inside it need a distance check.
  const double window = 1e-6 * std::max(1.0, std::abs(value));
  auto lo = std::lower_bound(by_value_.begin(), by_value_.end(), value - window,
                             [&](std::size_t idx, double v) { return entries_[idx].value < v; });
  const double tol2 = merge_tol_ * merge_tol_;
  for (auto it = lo; it != by_value_.end() && entries_[*it].value <= value + window; ++it) {
    MinimumEntry& e = entries_[*it];
    double d2 = 0.0;
    for (std::size_t j = 0; j < location.size(); ++j) {
      const double d = e.location[j] - location[j];
      d2 += d * d;
    }
    if (d2 <= tol2) {
      ++e.hits;
      if (value < e.value) {
        // Keep the deepest representative; re-seat it in the value order.
        const std::size_t idx = *it;
        by_value_.erase(it);
        e.value = value;
        e.location.assign(location.begin(), location.end());
        auto pos = std::upper_bound(by_value_.begin(), by_value_.end(), value,
                                    [&](double v, std::size_t k) { return v < entries_[k].value; });
        by_value_.insert(pos, idx);
      }
      return;
    }
  }
  entries_.push_back({std::vector<double>(location.begin(), location.end()), value, 1});
  auto pos = std::upper_bound(by_value_.begin(), by_value_.end(), value,
                              [&](double v, std::size_t k) { return v < entries_[k].value; });
  by_value_.insert(pos, entries_.size() - 1);
}

MinimaCatalog MinimaCollector::finish() && {
  MinimaCatalog catalog;
  std::vector<std::size_t> order(entries_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return entries_[a].value < entries_[b].value; });
  catalog.entries.reserve(order.size());
  for (std::size_t idx : order) catalog.entries.push_back(std::move(entries_[idx]));
  catalog.global_min = 0;
  return catalog;
}

namespace {

// Cholesky of a symmetric matrix; false when any pivot falls below `tol`.
bool positive_definite(std::vector<double> h, std::size_t n, double tol) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = h[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= h[j * n + k] * h[j * n + k];
    if (!(diag > tol)) return false;
    const double root = std::sqrt(diag);
    h[j * n + j] = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = h[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= h[i * n + k] * h[j * n + k];
      h[i * n + j] = v / root;
    }
  }
  return true;
}

}  // namespace

EndpointKind classify_endpoint(const GrungeLandscape& landscape, const LocalOptResult& result,
                               double curvature_tol) {
  const auto g = landscape.gradient(result.x);
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  if (gmax > kEndpointGradientTol) return EndpointKind::NotConverged;
  for (double v : result.x) {
    if (!landscape.bounds().contains(v)) return EndpointKind::OutOfBounds;
  }
  const auto h = landscape.hessian(result.x);
  const std::size_t n = landscape.dimension();
  // Symmetrize before factoring.
  std::vector<double> sym(h.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sym[i * n + j] = 0.5 * (h[i * n + j] + h[j * n + i]);
  return positive_definite(std::move(sym), n, curvature_tol) ? EndpointKind::Minimum
                                                             : EndpointKind::NotMinimum;
}

MinimaCatalog grunge_enumerate(const GrungeLandscape& landscape, std::size_t grid_points_per_dim,
                               const EnumerateOptions& options) {
  if (grid_points_per_dim < 2) throw ParameterError("grunge_enumerate: need >= 2 grid points per dimension");
  if (!(options.merge_tol > 0.0)) throw ParameterError("grunge_enumerate: merge tolerance must be positive");
  options.locopt.validate();
  const std::size_t dims = landscape.dimension();

  // Grid explosion guard, computed without overflow.
  std::size_t total = 1;
  for (std::size_t j = 0; j < dims; ++j) {
    if (total > options.max_starts / grid_points_per_dim) {
      throw ParameterError("grunge_enumerate: grid of " + std::to_string(grid_points_per_dim) + "^" +
                           std::to_string(dims) + " starts exceeds the limit of " +
                           std::to_string(options.max_starts));
    }
    total *= grid_points_per_dim;
  }

  const Bounds b = landscape.bounds();
  const double spacing = b.width() / static_cast<double>(grid_points_per_dim - 1);
  auto grid_point = [&](std::size_t index, std::vector<double>& x) {
    for (std::size_t j = 0; j < dims; ++j) {
      const std::size_t k = index % grid_points_per_dim;
      index /= grid_points_per_dim;
      x[j] = k + 1 == grid_points_per_dim ? b.upper : b.lower + spacing * static_cast<double>(k);
    }
  };

  struct Endpoint {
    EndpointKind kind = EndpointKind::NotConverged;
    double value = 0.0;
    std::vector<double> x;
  };

  MinimaCollector collector(options.merge_tol);
  MinimaCatalog tallies;
  const std::size_t chunk = 1 << 14;
  std::vector<Endpoint> endpoints(std::min(chunk, total));
  const unsigned workers = std::max(1u, options.workers);

  for (std::size_t base = 0; base < total; base += chunk) {
    const std::size_t len = std::min(chunk, total - base);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      std::vector<double> x(dims);
      for (std::size_t i = next++; i < len; i = next++) {
        grid_point(base + i, x);
        Endpoint& ep = endpoints[i];
        try {
          auto r = minimize(landscape, x, options.locopt);
          ep.kind = classify_endpoint(landscape, r, options.curvature_tol);
          ep.value = r.value;
          ep.x = std::move(r.x);
        } catch (const NonFiniteError&) {
          ep.kind = EndpointKind::NotConverged;
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    // Serial reduction in grid order keeps the catalog deterministic.
    for (std::size_t i = 0; i < len; ++i) {
      const Endpoint& ep = endpoints[i];
      switch (ep.kind) {
        case EndpointKind::Minimum: collector.add(ep.x, ep.value); break;
        case EndpointKind::NotConverged: ++tallies.nonconvergent; break;
        case EndpointKind::NotMinimum: ++tallies.not_minimum; break;
        case EndpointKind::OutOfBounds: ++tallies.out_of_bounds; break;
      }
    }
  }

  MinimaCatalog catalog = std::move(collector).finish();
  catalog.starts = total;
  catalog.nonconvergent = tallies.nonconvergent;
  catalog.not_minimum = tallies.not_minimum;
  catalog.out_of_bounds = tallies.out_of_bounds;
  return catalog;
}

// ---------------------------------------------------------- catalog files

void save_catalog(const MinimaCatalog& catalog, std::ostream& out) {
  out << "MINIMA " << catalog.entries.size() << '\n';
  for (const auto& e : catalog.entries) {
    out << text::format_double(e.value);
    for (double v : e.location) out << ' ' << text::format_double(v);
    out << ' ' << e.hits << '\n';
  }
}

void save_catalog(const MinimaCatalog& catalog, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  save_catalog(catalog, out);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

MinimaCatalog load_catalog(std::istream& in) {
  LineReader reader(in);
  auto header = reader.next("'MINIMA <count>' header");
  if (header.size() != 2 || header[0] != "MINIMA") throw ParseError(reader.line(), "missing 'MINIMA <count>' header");
  const auto count = static_cast<std::size_t>(text::parse_count(header[1], reader.line()));
  MinimaCatalog catalog;
  std::size_t dims = 0;
  for (std::size_t i = 0; i < count; ++i) {
    auto tokens = reader.next("catalog entry " + std::to_string(i + 1) + " of " + std::to_string(count));
    if (tokens.size() < 3) throw ParseError(reader.line(), "expected 'value x_1 .. x_M hits'");
    if (i == 0) dims = tokens.size() - 2;
    if (tokens.size() != dims + 2) throw ParseError(reader.line(), "inconsistent entry dimension");
    MinimumEntry e;
    e.value = text::parse_double(tokens[0], reader.line());
    for (std::size_t j = 0; j < dims; ++j) e.location.push_back(text::parse_double(tokens[j + 1], reader.line()));
    e.hits = static_cast<std::size_t>(text::parse_count(tokens.back(), reader.line()));
    if (!catalog.entries.empty() && e.value < catalog.entries.back().value) {
      throw ParseError(reader.line(), "catalog entries must be sorted by value");
    }
    catalog.entries.push_back(std::move(e));
  }
  if (catalog.entries.empty()) throw ValidationError("catalog contains no minima");
  catalog.global_min = 0;
  return catalog;
}

MinimaCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog file '" + path.string() + "'");
  return load_catalog(in);
}

}  // namespace evobench
