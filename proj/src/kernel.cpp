#include "gkm/kernel.hpp"

#include <cmath>

#include "gkm/error.hpp"

namespace gkm {

KernelSpec::KernelSpec(double sigma_f, double sigma_l) : sigma_f_(sigma_f), sigma_l_(sigma_l) {
  if (!(std::isfinite(sigma_f) && sigma_f > 0.0))
    throw Error(ErrorKind::InvalidArgument, "sigma_f must be positive");
  if (!(std::isfinite(sigma_l) && sigma_l > 0.0))
    throw Error(ErrorKind::InvalidArgument, "sigma_l must be positive");
}

KernelSpec KernelSpec::from_gamma(double gamma) {
  if (!(std::isfinite(gamma) && gamma > 0.0))
    throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
  return KernelSpec(1.0, std::sqrt(0.5 / gamma));
}

double KernelSpec::from_squared_distance(double d2) const noexcept {
  return sigma_f_ * sigma_f_ * std::exp(-d2 / (2.0 * sigma_l_ * sigma_l_));
}

double eval_kernel(const KernelSpec& spec, const SparseVector& x, const SparseVector& y) noexcept {
  return spec.from_squared_distance(squared_distance(x, y));
}

double feature_norm(const KernelSpec& spec, const SparseVector&) noexcept {
  return spec.sigma_f();
}

double decision_value(const KernelSpec& spec, std::span<const WeightedPoint> coefficients,
                      const SparseVector& x) noexcept {
  double sum = 0.0;
  for (const auto& [point, alpha] : coefficients)
    if (alpha != 0.0) sum += alpha * eval_kernel(spec, *point, x);
  return sum;
}

PointKernel PointKernel::cached(KernelSpec spec, std::span<const SparseVector> points) {
  PointKernel k(spec, points);
  const std::size_t n = points.size();
  k.matrix_.resize(n * n);
  const double diag = spec.sigma_f() * spec.sigma_f();
  for (std::size_t i = 0; i < n; ++i) {
    k.matrix_[i * n + i] = diag;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = eval_kernel(spec, points[i], points[j]);
      k.matrix_[i * n + j] = v;
      k.matrix_[j * n + i] = v;
    }
  }
  return k;
}

}  // namespace gkm
