#include "gkm/bounds.hpp"

#include <cmath>
#include <limits>

#include "gkm/error.hpp"

namespace gkm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxFiniteM = std::numeric_limits<double>::max() / 4.0;

void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0))
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive");
}

void require_p(double p) {
  if (!(std::isfinite(p) && p >= 1.0))
    throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
}

// log of (p−2)^(p−2) / (p−1)^(p−1), for p > 2.
double log_product_threshold(double p) {
  return (p - 2.0) * std::log(p - 2.0) - (p - 1.0) * std::log(p - 1.0);
}

}  // namespace

std::string_view to_string(BoundCase c) noexcept {
  switch (c) {
    case BoundCase::PLessThan2: return "PLessThan2";
    case BoundCase::PEq2aLt1: return "PEq2aLt1";
    case BoundCase::PGt2Product: return "PGt2Product";
    case BoundCase::Violated: return "Violated";
  }
  return "Unknown";
}

BoundsReport compute_bounds(double C, double C_prime, double p, double R, double A) {
  require_positive(C, "C");
  require_positive(C_prime, "C'");
  require_positive(R, "R");
  require_positive(A, "A");
  require_p(p);

  BoundsReport r{C, C_prime, R, A, p, C_prime * std::pow(2.0 * R, p) * p, C * A,
                 std::nullopt, std::nullopt, false, BoundCase::Violated};
  if (p < 2.0) {
    // (a+b)^(1/(2−p)) in log space; the exponent is unbounded as p → 2.
    const double log_m = std::log(r.a + r.b) / (2.0 - p);
    r.M = log_m <= 0.0 ? 1.0 : std::exp(log_m);
    r.reason = BoundCase::PLessThan2;
  } else if (p == 2.0) {
    if (r.a < 1.0) {
      r.M = r.b / (1.0 - r.a);
      r.reason = BoundCase::PEq2aLt1;
    }
  } else {
    if (std::log(r.a) + (p - 2.0) * std::log(r.b) <= log_product_threshold(p)) {
      // ((p−1)a)^(−1/(p−2)) overflows as p → 2+. Below that point
      // a·M^(p−2) < 1/(p−1), so f(M) < b − M(p−2)/(p−1), which is negative
      // for any M this large. Clamp to a finite value that leaves room for G.
      const double log_m = -std::log((p - 1.0) * r.a) / (p - 2.0);
      r.M = log_m < std::log(kMaxFiniteM) ? std::pow(1.0 / ((p - 1.0) * r.a), 1.0 / (p - 2.0))
                                          : kMaxFiniteM;
      r.reason = BoundCase::PGt2Product;
    }
  }
  if (r.M) {
    r.condition_holds = true;
    r.G = *r.M + r.b + r.a * std::pow(*r.M, p - 1.0);
  }
  return r;
}

double lemma_f(double M, double a, double b, double p) noexcept {
  if (std::isinf(M)) {
    if (p < 2.0) return -kInf;
    if (p == 2.0) return a < 1.0 ? -kInf : (a > 1.0 ? kInf : b);
    return kInf;
  }
  if (M == 0.0) return a * std::pow(0.0, p - 1.0) + b;
  // Factored as M(a·M^(p−2) − 1) + b: for p = 2 this is (a − 1)M + b, which
  // keeps the cancellation against b small when M = b/(1 − a) is large.
  return M * (a * std::pow(M, p - 2.0) - 1.0) + b;
}

std::uint64_t min_iterations(double epsilon, double delta, double G) {
  require_positive(epsilon, "epsilon");
  require_positive(G, "G");
  if (!(delta > 0.0 && delta <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1]");
  const double q = 2.0 * G * G / (epsilon * delta);
  if (!(q < 1.8e19)) throw Error(ErrorKind::InvalidArgument, "T0 exceeds the 64-bit range");
  // Absorb rounding noise so exact quotients such as 200/0.005 stay exact.
  const double nearest = std::nearbyint(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q))
    return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(q));
}

double expected_gap_bound(double G, std::uint64_t T) noexcept {
  return 2.0 * G * G / static_cast<double>(T);
}

double expected_distance_bound(double G, std::uint64_t T) noexcept {
  return 4.0 * G * G / static_cast<double>(T);
}

double max_cprime(double p, double C, double R) {
  require_p(p);
  require_positive(C, "C");
  require_positive(R, "R");
  if (p < 2.0) return kInf;
  const double edge_scale = std::pow(2.0 * R, p) * p;  // a = C′·edge_scale
  if (p == 2.0) return 1.0 / edge_scale;
  // a·b^(p−2) <= threshold with b = C·R.
  return std::exp(log_product_threshold(p)) / (edge_scale * std::pow(C * R, p - 2.0));
}

bool cprime_certified(double p, double C, double C_prime, double R) {
  return compute_bounds(C, C_prime, p, R, R).condition_holds;
}

double recommended_sigma_f(double p, double C, double C_prime, std::optional<double> rho) {
  require_p(p);
  require_positive(C, "C");
  require_positive(C_prime, "C'");
  if (p < 2.0)
    throw Error(ErrorKind::InvalidArgument, "every sigma_f is certified for p < 2");
  double base;
  if (p == 2.0) {
    base = 0.5 * std::pow(p * C_prime, -1.0 / p);
  } else {
    const double log_value = log_product_threshold(p) - p * std::log(2.0) -
                             (p - 2.0) * std::log(C) - std::log(C_prime) - std::log(p);
    base = std::exp(log_value / (2.0 * p - 2.0));
  }
  const double margin = rho.value_or(1e-3 * base);
  if (margin < 0.0) throw Error(ErrorKind::InvalidArgument, "rho must be non-negative");
  const double sigma_f = base - margin;
  if (!(sigma_f > 0.0))
    throw Error(ErrorKind::InfeasibleSigma, "no positive sigma_f certifies these parameters");
  return sigma_f;
}

}  // namespace gkm
