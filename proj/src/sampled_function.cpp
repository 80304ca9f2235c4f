#include "pmlab/sampled_function.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pmlab/error.hpp"

namespace pmlab {

SampledFunction::SampledFunction(double left, double spacing, std::vector<double> values)
    : left_(left), spacing_(spacing), values_(std::move(values)) {
  require(spacing_ > 0.0 && std::isfinite(spacing_), ErrorKind::domain,
          "SampledFunction: spacing must be positive");
  require(values_.size() >= 3, ErrorKind::shape, "SampledFunction: need at least 3 samples");
}

SampledFunction SampledFunction::sample(double left, double right, std::size_t count,
                                        const std::function<double(double)>& fn) {
  require(right > left, ErrorKind::domain, "SampledFunction: empty interval");
  require(count >= 3, ErrorKind::shape, "SampledFunction: need at least 3 samples");
  const double h = (right - left) / double(count - 1);
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = fn(left + h * double(i));
  return SampledFunction(left, h, std::move(v));
}

double SampledFunction::interpolate(double x) const noexcept {
  const double t = (x - left_) / spacing_;
  if (t <= 0.0) return values_.front();
  const double last = double(values_.size() - 1);
  if (t >= last) return values_.back();
  const std::size_t i = std::size_t(t);
  const double r = t - double(i);
  if (i + 1 >= values_.size()) return values_.back();
  return values_[i] + r * (values_[i + 1] - values_[i]);
}

bool SampledFunction::same_grid(const SampledFunction& other) const noexcept {
  if (other.size() != size()) return false;
  const double tol = 1e-12 * std::max({1.0, std::fabs(left_), length()});
  return std::fabs(other.left_ - left_) <= tol &&
         std::fabs(other.spacing_ - spacing_) <= 1e-12 * spacing_;
}

}  // namespace pmlab
