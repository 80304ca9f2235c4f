#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pmlab {

/// Symmetric banded matrix stored by lower diagonals: band(k, i) = A(i, i - k).
class SymmetricBandedMatrix {
 public:
  SymmetricBandedMatrix(std::size_t n, std::size_t bandwidth);

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return p_; }

  void set_zero();
  /// Adds v to A(i, j) (and implicitly A(j, i)); requires |i - j| <= bandwidth.
  void add(std::size_t i, std::size_t j, double v) noexcept;
  double get(std::size_t i, std::size_t j) const noexcept;

  /// Replaces row and column i by the identity.
  void pin(std::size_t i);

  /// In-place Cholesky factorization. Returns false if the matrix is not
  /// numerically positive definite; the contents are then unspecified.
  bool factorize();
  /// Solves A x = rhs after a successful factorize(); x overwrites rhs.
  void solve(std::span<double> rhs) const;

  void multiply(std::span<const double> x, std::span<double> y) const;

 private:
  double& at(std::size_t k, std::size_t i) noexcept { return band_[k * n_ + i]; }
  double at(std::size_t k, std::size_t i) const noexcept { return band_[k * n_ + i]; }

  std::size_t n_;
  std::size_t p_;
  std::vector<double> band_;
};

}  // namespace pmlab
