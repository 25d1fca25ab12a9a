#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace gkm {

/// Which case of the norm bound applies.
enum class BoundCase {
  PLessThan2,   // 1 <= p < 2: always certified
  PEq2aLt1,     // p = 2 and a < 1
  PGt2Product,  // p > 2 and a·b^(p−2) <= (p−2)^(p−2) / (p−1)^(p−1)
  Violated,
};

std::string_view to_string(BoundCase c) noexcept;

/// Constants of the convergence analysis for one (C, C′, p, R, A).
///
/// a = C′(2R)^p·p and b = C·A. When the configuration is certified, every
/// iterate satisfies ‖w_t‖ <= M, every stochastic gradient ‖g_t‖ <= G, and
/// E[J(w̄_{T+1})] − J(w*) <= 2G²/T.
struct BoundsReport {
  double C;
  double C_prime;
  double R;
  double A;
  double p;
  double a;
  double b;
  std::optional<double> M;
  std::optional<double> G;
  bool condition_holds;
  BoundCase reason;
};

/// Never throws on a violated condition; that is a report state. Throws
/// Error(InvalidArgument) on non-positive inputs or p < 1.
BoundsReport compute_bounds(double C, double C_prime, double p, double R, double A);

/// f(M; a, b, p) = a·M^(p−1) − M + b. An infinite M yields the limit.
double lemma_f(double M, double a, double b, double p) noexcept;

/// ⌈2G²/(ε·δ)⌉, with δ in (0, 1].
std::uint64_t min_iterations(double epsilon, double delta, double G);

/// E[J(w̄_{T+1})] − J(w*) bound 2G²/T and E‖w̄_{T+1} − w*‖² bound 4G²/T.
double expected_gap_bound(double G, std::uint64_t T) noexcept;
double expected_distance_bound(double G, std::uint64_t T) noexcept;

/// Largest C′ keeping the configuration certified for A = R: strict for
/// p = 2 (C′ must be below the value), inclusive for p > 2. +∞ for p < 2.
double max_cprime(double p, double C, double R);

/// True if C′ lies inside the certified region returned by max_cprime.
bool cprime_certified(double p, double C, double C_prime, double R);

/// σ_f (= R = A) that certifies (C, C′, p) for p >= 2, less a margin rho.
/// rho defaults to 10⁻³ of the uncorrected value. InfeasibleSigma if the
/// result is not positive; InvalidArgument for p < 2.
double recommended_sigma_f(double p, double C, double C_prime,
                           std::optional<double> rho = std::nullopt);

}  // namespace gkm
