#include <doctest.h>

#include <array>
#include <cmath>
#include <variant>
#include <vector>

#include "gkm/error.hpp"
#include "gkm/loss.hpp"
#include "gkm/random.hpp"

using namespace gkm;

namespace {

const std::vector<LossSpec>& all_losses() {
  static const std::vector<LossSpec> losses{
      {Hinge{}}, {SmoothHinge{0.5}}, {SmoothHinge{1.0}}, {SmoothHinge{0.2}}, {Logistic{}},
      {L1{}},    {EpsInsensitive{0.1}}, {EpsInsensitive{0.0}}};
  return losses;
}

// Kinks of the loss as a function of o for label y.
std::vector<double> kinks(const LossSpec& spec, double y) {
  return std::visit(
      [&](const auto& k) -> std::vector<double> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Hinge>) return {y};  // yo = 1
        if constexpr (std::is_same_v<K, SmoothHinge>) return {y, y * (1 - k.tau)};
        if constexpr (std::is_same_v<K, Logistic>) return {};
        if constexpr (std::is_same_v<K, L1>) return {y};
        if constexpr (std::is_same_v<K, EpsInsensitive>) return {y - k.epsilon, y + k.epsilon};
      },
      spec.kind);
}

double draw_label(const LossSpec& spec, Rng& rng) {
  if (spec.is_classification()) return rng.uniform01() < 0.5 ? -1.0 : 1.0;
  return rng.uniform(-3, 3);
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("loss value examples") {
  CHECK(loss_value({Hinge{}}, 0, 1) == 1.0);
  CHECK(loss_value({Logistic{}}, 0, 1) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(loss_value({SmoothHinge{0.5}}, 0.75, 1) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(loss_value({EpsInsensitive{0.1}}, 1.95, 2) == 0.0);
}

TEST_CASE("loss gradient examples") {
  CHECK(loss_grad_scalar({Hinge{}}, 0, 1) == -1.0);
  CHECK(loss_grad_scalar({Hinge{}}, 2, 1) == 0.0);
  CHECK(loss_grad_scalar({Logistic{}}, 0, 1) == -0.5);
  CHECK(loss_grad_scalar({L1{}}, 0, 0) == 0.0);
  // The margin indicator includes yo = 1.
  CHECK(loss_grad_scalar({Hinge{}}, 1, 1) == -1.0);
  CHECK(loss_grad_scalar({Hinge{}}, -1, -1) == 1.0);
}

TEST_CASE("lp examples") {
  CHECK(lp_value({2}, -3) == 9.0);
  CHECK(lp_value({1}, 0) == 0.0);
  CHECK(lp_value({3}, 0.5) == 0.125);
  CHECK(lp_grad_scalar({2}, -3) == -6.0);
  CHECK(lp_grad_scalar({1}, 0) == 0.0);
  CHECK(lp_grad_scalar({3}, 2) == 12.0);
  for (double p : {1.0, 1.5, 2.0, 3.0}) CHECK(lp_grad_scalar({p}, 0) == 0.0);
}

TEST_CASE("gradient bound A equals R") {
  CHECK(gradient_bound_A({Hinge{}}, 1) == 1.0);
  CHECK(gradient_bound_A({Logistic{}}, 2) == 2.0);
  CHECK(gradient_bound_A({EpsInsensitive{0.1}}, 0.5) == 0.5);
}

TEST_CASE("classification losses reject other labels") {
  for (const LossSpec& spec : all_losses()) {
    if (spec.is_classification()) {
      CHECK_THROWS_AS(loss_value(spec, 0, 0.5), Error);
      CHECK_THROWS_AS(loss_grad_scalar(spec, 0, 0), Error);
    } else {
      CHECK_NOTHROW(loss_value(spec, 0, 0.5));
    }
  }
}

TEST_CASE("loss spec validation and tokens") {
  CHECK_THROWS_AS((LossSpec{SmoothHinge{0.0}}.validate()), Error);
  CHECK_THROWS_AS((LossSpec{SmoothHinge{1.5}}.validate()), Error);
  CHECK_THROWS_AS((LossSpec{EpsInsensitive{-0.1}}.validate()), Error);
  CHECK_THROWS_AS((SmoothnessSpec{0.5}.validate()), Error);
  for (const char* token : {"hinge", "smooth-hinge", "logistic", "l1", "eps-insensitive"})
    CHECK(loss_token(parse_loss(token)) == token);
  CHECK(loss_parameter(parse_loss("smooth-hinge", 0.3)) == 0.3);
  CHECK(loss_parameter(parse_loss("eps-insensitive", 0.2)) == 0.2);
  CHECK_THROWS_AS(parse_loss("squared-hinge"), Error);
}

TEST_CASE("gradient scalar magnitude is at most one") {
  Rng rng(1);
  for (const LossSpec& spec : all_losses()) {
    for (int k = 0; k < 5000; ++k) {
      const double y = draw_label(spec, rng);
      const double o = rng.uniform(-6, 6);
      CHECK(std::abs(loss_grad_scalar(spec, o, y)) <= 1.0);
    }
    for (const double y : {-1.0, 1.0})
      for (const double o : kinks(spec, y)) CHECK(std::abs(loss_grad_scalar(spec, o, y)) <= 1.0);
  }
}

TEST_CASE("loss gradients match central differences away from kinks") {
  Rng rng(2);
  const double h = 1e-6;
  for (const LossSpec& spec : all_losses()) {
    int checked = 0;
    while (checked < 1000) {
      const double y = draw_label(spec, rng);
      const double o = rng.uniform(-4, 4);
      bool near_kink = false;
      for (double k : kinks(spec, y)) near_kink = near_kink || std::abs(o - k) <= 1e-3;
      if (near_kink) continue;
      const double fd = (loss_value(spec, o + h, y) - loss_value(spec, o - h, y)) / (2 * h);
      CHECK(relative_error(fd, loss_grad_scalar(spec, o, y)) <= 1e-5);
      ++checked;
    }
  }
}

TEST_CASE("lp gradients match central differences") {
  Rng rng(3);
  const double h = 1e-6;
  for (const double p : {1.5, 2.0, 2.5, 3.0}) {
    const SmoothnessSpec spec{p};
    int checked = 0;
    while (checked < 1000) {
      const double t = rng.uniform(-3, 3);
      if (std::abs(t) <= 1e-3) continue;
      const double fd = (lp_value(spec, t + h) - lp_value(spec, t - h)) / (2 * h);
      CHECK(relative_error(fd, lp_grad_scalar(spec, t)) <= 1e-5);
      ++checked;
    }
  }
}

TEST_CASE("losses are convex in the decision value") {
  Rng rng(4);
  for (const LossSpec& spec : all_losses()) {
    for (int k = 0; k < 10000; ++k) {
      const double y = draw_label(spec, rng);
      const double a = rng.uniform(-5, 5);
      const double b = rng.uniform(-5, 5);
      const double lambda = rng.uniform01();
      const double mid = loss_value(spec, lambda * a + (1 - lambda) * b, y);
      const double chord = lambda * loss_value(spec, a, y) + (1 - lambda) * loss_value(spec, b, y);
      CHECK(mid <= chord + 1e-12);
      CHECK(loss_value(spec, a, y) >= 0.0);
    }
  }
}

TEST_CASE("smooth hinge branches meet") {
  for (const double tau : {0.1, 0.5, 1.0}) {
    const LossSpec spec{SmoothHinge{tau}};
    for (const double y : {-1.0, 1.0}) {
      const double eps = 1e-13;
      for (const double m : {1.0, 1.0 - tau}) {
        const double o = y * m;
        CHECK(std::abs(loss_value(spec, o + eps, y) - loss_value(spec, o - eps, y)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("lp gradient is odd") {
  Rng rng(5);
  for (const double p : {1.0, 1.5, 2.0, 2.5, 3.0})
    for (int k = 0; k < 1000; ++k) {
      const double t = rng.uniform(-10, 10);
      CHECK(lp_grad_scalar({p}, -t) == -lp_grad_scalar({p}, t));
      CHECK(lp_value({p}, -t) == lp_value({p}, t));
    }
}
