#include "gkm/loss.hpp"

#include <cmath>

#include "gkm/error.hpp"

namespace gkm {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sign(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_label(const LossSpec& spec, double y) {
  if (spec.is_classification() && y != 1.0 && y != -1.0)
    throw Error(ErrorKind::InvalidLabel, "classification losses need labels in {-1, +1}");
  if (!std::isfinite(y)) throw Error(ErrorKind::InvalidLabel, "label must be finite");
}

}  // namespace

void LossSpec::validate() const {
  if (const auto* s = std::get_if<SmoothHinge>(&kind); s && !(s->tau > 0.0 && s->tau <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "smooth hinge tau must lie in (0, 1]");
  if (const auto* e = std::get_if<EpsInsensitive>(&kind); e && !(e->epsilon >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "epsilon-insensitive epsilon must be >= 0");
}

bool LossSpec::is_classification() const noexcept {
  return std::holds_alternative<Hinge>(kind) || std::holds_alternative<SmoothHinge>(kind) ||
         std::holds_alternative<Logistic>(kind);
}

bool LossSpec::is_smooth() const noexcept {
  return std::holds_alternative<SmoothHinge>(kind) || std::holds_alternative<Logistic>(kind);
}

LossSpec parse_loss(std::string_view token, double parameter) {
  LossSpec spec;
  if (token == "hinge") spec.kind = Hinge{};
  else if (token == "smooth-hinge") spec.kind = SmoothHinge{parameter};
  else if (token == "logistic") spec.kind = Logistic{};
  else if (token == "l1") spec.kind = L1{};
  else if (token == "eps-insensitive") spec.kind = EpsInsensitive{parameter};
  else throw Error(ErrorKind::InvalidArgument, "unknown loss '" + std::string(token) + "'");
  spec.validate();
  return spec;
}

LossSpec parse_loss(std::string_view token) {
  if (token == "eps-insensitive") return parse_loss(token, EpsInsensitive{}.epsilon);
  return parse_loss(token, SmoothHinge{}.tau);
}

std::string loss_token(const LossSpec& spec) {
  return std::visit(Overloaded{
                        [](const Hinge&) { return "hinge"; },
                        [](const SmoothHinge&) { return "smooth-hinge"; },
                        [](const Logistic&) { return "logistic"; },
                        [](const L1&) { return "l1"; },
                        [](const EpsInsensitive&) { return "eps-insensitive"; },
                    },
                    spec.kind);
}

double loss_parameter(const LossSpec& spec) noexcept {
  if (const auto* s = std::get_if<SmoothHinge>(&spec.kind)) return s->tau;
  if (const auto* e = std::get_if<EpsInsensitive>(&spec.kind)) return e->epsilon;
  return 0.0;
}

double loss_value(const LossSpec& spec, double o, double y) {
  check_label(spec, y);
  return std::visit(
      Overloaded{
          [&](const Hinge&) { return std::max(0.0, 1.0 - y * o); },
          [&](const SmoothHinge& s) {
            const double yo = y * o;
            if (yo > 1.0) return 0.0;
            if (yo < 1.0 - s.tau) return 1.0 - yo - s.tau / 2.0;
            return (1.0 - yo) * (1.0 - yo) / (2.0 * s.tau);
          },
          [&](const Logistic&) {
            // log(1 + e^z) without overflow.
            const double z = -y * o;
            return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
          },
          [&](const L1&) { return std::abs(y - o); },
          [&](const EpsInsensitive& e) { return std::max(0.0, std::abs(y - o) - e.epsilon); },
      },
      spec.kind);
}

double loss_grad_scalar(const LossSpec& spec, double o, double y) {
  check_label(spec, y);
  return std::visit(
      Overloaded{
          [&](const Hinge&) { return y * o <= 1.0 ? -y : 0.0; },
          [&](const SmoothHinge& s) {
            const double yo = y * o;
            if (yo < 1.0 - s.tau) return -y;
            if (yo <= 1.0) return (yo - 1.0) * y / s.tau;
            return 0.0;
          },
          [&](const Logistic&) {
            // −y e^{−yo}/(1 + e^{−yo}) = −y / (1 + e^{yo})
            const double yo = y * o;
            if (yo > 0.0) {
              const double e = std::exp(-yo);
              return -y * e / (1.0 + e);
            }
            return -y / (1.0 + std::exp(yo));
          },
          [&](const L1&) { return sign(o - y); },
          [&](const EpsInsensitive& e) {
            return std::abs(y - o) > e.epsilon ? sign(o - y) : 0.0;
          },
      },
      spec.kind);
}

double gradient_bound_A(const LossSpec&, double R) {
  if (!(R > 0.0)) throw Error(ErrorKind::InvalidArgument, "R must be positive");
  return R;
}

void SmoothnessSpec::validate() const {
  if (!(std::isfinite(p) && p >= 1.0))
    throw Error(ErrorKind::InvalidArgument, "smoothness exponent p must be >= 1");
}

double lp_value(const SmoothnessSpec& spec, double t) noexcept {
  const double a = std::abs(t);
  if (spec.p == 1.0) return a;
  if (spec.p == 2.0) return a * a;
  return std::pow(a, spec.p);
}

double lp_grad_scalar(const SmoothnessSpec& spec, double t) noexcept {
  if (t == 0.0) return 0.0;
  const double a = std::abs(t);
  double magnitude;
  if (spec.p == 1.0) magnitude = 1.0;
  else if (spec.p == 2.0) magnitude = 2.0 * a;
  else magnitude = spec.p * std::pow(a, spec.p - 1.0);
  return t > 0.0 ? magnitude : -magnitude;
}

}  // namespace gkm
