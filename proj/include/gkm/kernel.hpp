#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gkm/sparse.hpp"

namespace gkm {

/// Squared-exponential kernel K(x, y) = sigma_f² exp(−‖x − y‖² / (2 sigma_l²)).
///
/// sigma_f is the output scale and also the feature-space radius:
/// ‖Φ(x)‖ = K(x, x)^½ = sigma_f for every x.
class KernelSpec {
 public:
  /// Throws Error(InvalidArgument) unless both parameters are finite and > 0.
  KernelSpec(double sigma_f, double sigma_l);

  /// exp(−gamma ‖x − y‖²), i.e. sigma_f = 1 and sigma_l = (2 gamma)^-½.
  static KernelSpec from_gamma(double gamma);

  double sigma_f() const noexcept { return sigma_f_; }
  double sigma_l() const noexcept { return sigma_l_; }
  double gamma() const noexcept { return 0.5 / (sigma_l_ * sigma_l_); }

  /// Kernel value from a precomputed squared distance.
  double from_squared_distance(double d2) const noexcept;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  double sigma_f_;
  double sigma_l_;
};

double eval_kernel(const KernelSpec& spec, const SparseVector& x,
                   const SparseVector& y) noexcept;

/// ‖Φ(x)‖, which for the SE kernel is sigma_f regardless of x.
double feature_norm(const KernelSpec& spec, const SparseVector& x) noexcept;

struct WeightedPoint {
  const SparseVector* point;
  double coefficient;
};

/// Σ αᵢ K(xᵢ, x). The bias is not modelled.
double decision_value(const KernelSpec& spec,
                      std::span<const WeightedPoint> coefficients,
                      const SparseVector& x) noexcept;

/// Kernel values between points of one set, addressed by index.
///
/// Evaluates on demand by default. cached() materialises the dense n×n
/// matrix; only worth it for small n and many repeated evaluations.
class PointKernel {
 public:
  PointKernel(KernelSpec spec, std::span<const SparseVector> points)
      : spec_(spec), points_(points) {}

  static PointKernel cached(KernelSpec spec, std::span<const SparseVector> points);

  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (!matrix_.empty()) return matrix_[i * points_.size() + j];
    if (i == j) return spec_.sigma_f() * spec_.sigma_f();
    return eval_kernel(spec_, points_[i], points_[j]);
  }

  /// K(x_i, x) for an arbitrary query point.
  double against(std::size_t i, const SparseVector& x) const noexcept {
    return eval_kernel(spec_, points_[i], x);
  }

  const KernelSpec& spec() const noexcept { return spec_; }
  std::span<const SparseVector> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool is_cached() const noexcept { return !matrix_.empty(); }

 private:
  KernelSpec spec_;
  std::span<const SparseVector> points_;
  std::vector<double> matrix_;
};

}  // namespace gkm
