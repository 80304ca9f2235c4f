#include "pmlab/banded.hpp"

#include <algorithm>
#include <cmath>

namespace pmlab {

SymmetricBandedMatrix::SymmetricBandedMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), p_(bandwidth), band_((bandwidth + 1) * n, 0.0) {}

void SymmetricBandedMatrix::set_zero() { std::fill(band_.begin(), band_.end(), 0.0); }

void SymmetricBandedMatrix::add(std::size_t i, std::size_t j, double v) noexcept {
  if (i < j) std::swap(i, j);
  at(i - j, i) += v;
}

double SymmetricBandedMatrix::get(std::size_t i, std::size_t j) const noexcept {
  if (i < j) std::swap(i, j);
  if (i - j > p_) return 0.0;
  return at(i - j, i);
}

void SymmetricBandedMatrix::pin(std::size_t i) {
  for (std::size_t k = 1; k <= p_; ++k) {
    if (i >= k) at(k, i) = 0.0;
    if (i + k < n_) at(k, i + k) = 0.0;
  }
  at(0, i) = 1.0;
}

bool SymmetricBandedMatrix::factorize() {
  // L is stored in place of the lower band: at(k, i) = L(i, i - k).
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t kmax = std::min(p_, i);
    for (std::size_t k = kmax; k >= 1; --k) {
      const std::size_t j = i - k;
      double s = at(k, i);
      // sum over m < j with both L(i, m) and L(j, m) inside the band
      for (std::size_t q = k + 1; q <= kmax; ++q) {
        const std::size_t m = i - q;
        if (j - m > p_) break;
        s -= at(q, i) * at(j - m, j);
      }
      at(k, i) = s / at(0, j);
    }
    double d = at(0, i);
    for (std::size_t q = 1; q <= kmax; ++q) d -= at(q, i) * at(q, i);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    at(0, i) = std::sqrt(d);
  }
  return true;
}

void SymmetricBandedMatrix::solve(std::span<double> x) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = x[i];
    const std::size_t kmax = std::min(p_, i);
    for (std::size_t k = 1; k <= kmax; ++k) s -= at(k, i) * x[i - k];
    x[i] = s / at(0, i);
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = 1; k <= p_ && ii + k < n_; ++k) s -= at(k, ii + k) * x[ii + k];
    x[ii] = s / at(0, ii);
  }
}

void SymmetricBandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) y[i] = at(0, i) * x[i];
  for (std::size_t k = 1; k <= p_; ++k) {
    for (std::size_t i = k; i < n_; ++i) {
      const double a = at(k, i);
      y[i] += a * x[i - k];
      y[i - k] += a * x[i];
    }
  }
}

}  // namespace pmlab
