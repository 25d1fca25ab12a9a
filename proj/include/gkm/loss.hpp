#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace gkm {

struct Hinge {};
struct SmoothHinge {
  double tau = 0.5;
};
struct Logistic {};
struct L1 {};
struct EpsInsensitive {
  double epsilon = 0.1;
};

/// Loss on a decision value o = wᵀΦ(x). Every kind has gradient
/// s·Φ(x) with |s| <= 1, so ‖∇l‖ <= ‖Φ(x)‖ <= R.
struct LossSpec {
  std::variant<Hinge, SmoothHinge, Logistic, L1, EpsInsensitive> kind = Hinge{};

  /// tau in (0, 1], epsilon >= 0.
  void validate() const;
  bool is_classification() const noexcept;
  /// Differentiable everywhere in o (Logistic, SmoothHinge).
  bool is_smooth() const noexcept;
};

/// Tokens: hinge | smooth-hinge | logistic | l1 | eps-insensitive. The
/// parameter fills tau or epsilon for the kinds that take one.
LossSpec parse_loss(std::string_view token, double parameter);
LossSpec parse_loss(std::string_view token);
std::string loss_token(const LossSpec& spec);
/// tau or epsilon, 0 for kinds without a parameter.
double loss_parameter(const LossSpec& spec) noexcept;

/// Throws Error(InvalidLabel) for a classification loss with y not ±1.
double loss_value(const LossSpec& spec, double o, double y);

/// Scalar s with ∇_w l = s·Φ(x). At kinks returns a valid subgradient.
double loss_grad_scalar(const LossSpec& spec, double o, double y);

/// A = R for every supported loss.
double gradient_bound_A(const LossSpec& spec, double R);

/// Edge penalty l_p(t) = |t|^p, p >= 1.
struct SmoothnessSpec {
  double p = 2.0;

  void validate() const;
};

double lp_value(const SmoothnessSpec& spec, double t) noexcept;

/// p·sign(t)·|t|^(p−1), with sign(0) = 0.
double lp_grad_scalar(const SmoothnessSpec& spec, double t) noexcept;

}  // namespace gkm
