// Deterministic minimiser of the primal objective, used as the w* oracle.
//
// The iterate is a kernel expansion α over the training points. With
// f = Kα, the functional gradient of J is Σ γ_j Φ(x_j) where
//   γ = α + (C/l) Σ_i l'(f_i) e_i + (C′/|E|) Σ_e μ_e l_p'(f_u − f_v)(e_u − e_v),
// and a Newton step Δ = Σ δ_j Φ(x_j) solves (I + M K) δ = −γ with M the
// weighted curvature of the data terms in coefficient form.

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "gkm/error.hpp"
#include "gkm/harness.hpp"

namespace gkm {
namespace {

struct Piece {
  double value;
  double slope;
  double curvature;
};

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Piece huber(double r, double s) {
  const double a = std::abs(r);
  if (s > 0.0 && a <= s) return {r * r / (2.0 * s), r / s, 1.0 / s};
  return {a - s / 2.0, sgn(r), 0.0};
}

// Smooth hinge in the margin m = y·o with parameter tau, as a function of o.
Piece smooth_hinge(double o, double y, double tau) {
  const double m = y * o;
  if (m > 1.0) return {0.0, 0.0, 0.0};
  if (m < 1.0 - tau) return {1.0 - m - tau / 2.0, -y, 0.0};
  return {(1.0 - m) * (1.0 - m) / (2.0 * tau), -y * (1.0 - m) / tau, 1.0 / tau};
}

// Every smoothed piece lies below its exact loss by at most s/2.
Piece loss_piece(const LossSpec& spec, double o, double y, double s) {
  if (std::holds_alternative<Hinge>(spec.kind)) {
    if (s > 0.0) return smooth_hinge(o, y, s);
    return {std::max(0.0, 1.0 - y * o), y * o <= 1.0 ? -y : 0.0, 0.0};
  }
  if (const auto* sh = std::get_if<SmoothHinge>(&spec.kind)) return smooth_hinge(o, y, sh->tau);
  if (std::holds_alternative<Logistic>(spec.kind)) {
    const double m = y * o;
    const double value = loss_value(spec, o, y);
    const double p_minus = 1.0 / (1.0 + std::exp(m));  // σ(−m)
    return {value, -y * p_minus, p_minus * (1.0 - p_minus)};
  }
  if (std::holds_alternative<L1>(spec.kind)) return huber(o - y, s);
  const double eps = std::get<EpsInsensitive>(spec.kind).epsilon;
  const double r = o - y;
  const double d = std::abs(r) - eps;
  if (d <= 0.0) return {0.0, 0.0, 0.0};
  if (s > 0.0 && d <= s) return {d * d / (2.0 * s), sgn(r) * d / s, 1.0 / s};
  return {d - s / 2.0, sgn(r), 0.0};
}

Piece edge_piece(double p, double t, double s) {
  if (p == 1.0) return huber(t, s);
  const double a = std::abs(t);
  if (p == 2.0) return {a * a, 2.0 * t, 2.0};
  const double value = std::pow(a, p);
  const double slope = t == 0.0 ? 0.0 : sgn(t) * p * std::pow(a, p - 1.0);
  // For p < 2 the exact curvature is unbounded at 0; cap it for the Newton model.
  const double curvature = p * (p - 1.0) * std::pow(p < 2.0 ? std::max(a, 1e-6) : a, p - 2.0);
  return {value, slope, curvature};
}

struct Problem {
  const Dataset& data;
  const TrainConfig& config;
  Eigen::MatrixXd K;
  std::vector<Edge> edges;
  std::size_t l;

  struct Eval {
    double J;
    Eigen::VectorXd gamma;  // functional gradient coefficients
    double grad_norm;       // Hilbert norm of the gradient
    Eigen::VectorXd curvature_diag;
    std::vector<double> edge_curvature;
  };

  double value(const Eigen::VectorXd& alpha, double s) const {
    const Eigen::VectorXd f = K * alpha;
    double J = 0.5 * alpha.dot(f);
    if (l > 0) {
      double sum = 0.0;
      for (std::size_t i = 0; i < l; ++i)
        sum += loss_piece(config.loss, f(i), data.labels[i], s).value;
      J += config.C / static_cast<double>(l) * sum;
    }
    if (!edges.empty()) {
      double sum = 0.0;
      for (const Edge& e : edges)
        sum += e.weight * edge_piece(config.smoothness.p, f(e.u) - f(e.v), s).value;
      J += config.C_prime / static_cast<double>(edges.size()) * sum;
    }
    return J;
  }

  Eval evaluate(const Eigen::VectorXd& alpha, double s) const {
    const Eigen::VectorXd f = K * alpha;
    const Eigen::Index n = alpha.size();
    Eval out{0.5 * alpha.dot(f), alpha, 0.0, Eigen::VectorXd::Zero(n), {}};
    if (l > 0) {
      const double w = config.C / static_cast<double>(l);
      for (std::size_t i = 0; i < l; ++i) {
        const Piece piece = loss_piece(config.loss, f(i), data.labels[i], s);
        out.J += w * piece.value;
        out.gamma(i) += w * piece.slope;
        out.curvature_diag(i) += w * piece.curvature;
      }
    }
    if (!edges.empty()) {
      const double w = config.C_prime / static_cast<double>(edges.size());
      out.edge_curvature.resize(edges.size());
      for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        const Piece piece = edge_piece(config.smoothness.p, f(e.u) - f(e.v), s);
        out.J += w * e.weight * piece.value;
        out.gamma(e.u) += w * e.weight * piece.slope;
        out.gamma(e.v) -= w * e.weight * piece.slope;
        out.edge_curvature[k] = w * e.weight * piece.curvature;
      }
    }
    out.grad_norm = std::sqrt(std::max(0.0, out.gamma.dot(K * out.gamma)));
    return out;
  }

  Eigen::VectorXd newton_direction(const Eval& ev) const {
    const Eigen::Index n = K.rows();
    Eigen::MatrixXd M = ev.curvature_diag.asDiagonal();
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const double c = ev.edge_curvature[k];
      if (c == 0.0) continue;
      const Edge& e = edges[k];
      M(e.u, e.u) += c;
      M(e.v, e.v) += c;
      M(e.u, e.v) -= c;
      M(e.v, e.u) -= c;
    }
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) + M * K;
    return system.partialPivLu().solve(-ev.gamma);
  }

  // Damped Newton on the s-smoothed objective until the gradient norm
  // reaches `tol` or no further decrease is possible.
  Eval minimize(Eigen::VectorXd& alpha, double s, double tol, std::uint64_t& steps) const {
    Eval ev = evaluate(alpha, s);
    for (int iter = 0; iter < 200 && ev.grad_norm > tol; ++iter) {
      Eigen::VectorXd delta = newton_direction(ev);
      double slope = ev.gamma.dot(K * delta);
      if (!std::isfinite(slope) || slope >= 0.0) {
        delta = -ev.gamma;
        slope = -ev.grad_norm * ev.grad_norm;
      }
      double step = 1.0;
      bool accepted = false;
      for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
        const Eigen::VectorXd trial = alpha + step * delta;
        const double J = value(trial, s);
        if (J <= ev.J + 1e-4 * step * slope) {
          alpha = trial;
          accepted = true;
          break;
        }
      }
      ++steps;
      if (!accepted) break;
      ev = evaluate(alpha, s);
    }
    return ev;
  }
};

}  // namespace

ReferenceOptimum solve_reference_optimum(const Dataset& data, const EdgeSet& edges,
                                         const TrainConfig& config, const KernelSpec& kernel) {
  const std::size_t n = data.size();
  if (n > kReferenceOptimumMaxPoints)
    throw Error(ErrorKind::InvalidArgument, "reference optimum is limited to " +
                                                std::to_string(kReferenceOptimumMaxPoints) +
                                                " points");
  if (edges.vertex_count() != n)
    throw Error(ErrorKind::InvalidArgument, "edges must index the dataset points");
  config.loss.validate();
  config.smoothness.validate();

  Problem problem{data, config, Eigen::MatrixXd(n, n), {}, data.labeled()};
  const PointKernel gram(kernel, data.points);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) problem.K(i, j) = gram(i, j);
  edges.for_each([&](const Edge& e) { problem.edges.push_back(e); });

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  ReferenceOptimum out;
  const bool differentiable = config.loss.is_smooth() && config.smoothness.p > 1.0;
  if (differentiable) {
    const auto ev = problem.minimize(alpha, 0.0, 1e-9, out.newton_steps);
    if (!(ev.grad_norm <= 1e-6))
      throw Error(ErrorKind::NotConverged,
                  "gradient norm " + std::to_string(ev.grad_norm) + " above 1e-6");
    out.residual = 0.5 * ev.grad_norm * ev.grad_norm;
  } else {
    // J_s <= J <= J_s + O(s), and J_s is 1-strongly convex, so
    // J* >= J_s(α) − ‖∇J_s(α)‖²/2 bounds the optimum from below.
    double lower = -std::numeric_limits<double>::infinity();
    for (double s = 1e-1; s >= 1e-10 * 0.99; s *= 0.1) {
      const auto ev = problem.minimize(alpha, s, 1e-12, out.newton_steps);
      lower = ev.J - 0.5 * ev.grad_norm * ev.grad_norm;
    }
    out.residual = std::max(0.0, problem.value(alpha, 0.0) - lower);
    if (!(out.residual <= 1e-8))
      throw Error(ErrorKind::NotConverged,
                  "optimality certificate gap " + std::to_string(out.residual) + " above 1e-8");
  }

  out.coefficients.coef.assign(alpha.data(), alpha.data() + alpha.size());
  out.coefficients.scale = 1.0;
  out.J_star = problem.value(alpha, 0.0);
  return out;
}

}  // namespace gkm
