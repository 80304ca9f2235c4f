#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pmlab {

/// A real function sampled on a uniform grid x_i = left + i * spacing.
///
/// At least three samples are required so that second differences exist.
class SampledFunction {
 public:
  SampledFunction(double left, double spacing, std::vector<double> values);

  /// Samples `fn` at `count` equispaced nodes covering [left, right].
  static SampledFunction sample(double left, double right, std::size_t count,
                                const std::function<double(double)>& fn);

  double left() const noexcept { return left_; }
  double right() const noexcept { return left_ + spacing_ * double(values_.size() - 1); }
  double spacing() const noexcept { return spacing_; }
  double length() const noexcept { return right() - left_; }
  std::size_t size() const noexcept { return values_.size(); }
  double x(std::size_t i) const noexcept { return left_ + spacing_ * double(i); }

  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Piecewise-linear interpolation; clamps to the end values outside the grid.
  double interpolate(double x) const noexcept;

  /// True when both functions live on the same nodes (up to rounding).
  bool same_grid(const SampledFunction& other) const noexcept;

 private:
  double left_;
  double spacing_;
  std::vector<double> values_;
};

}  // namespace pmlab
