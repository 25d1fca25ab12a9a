#include "gkm/labelprop.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <string>

#include "gkm/error.hpp"

namespace gkm {

std::vector<double> solve_exact(const PropagationProblem& problem) {
  const std::size_t n = problem.vertex_count;
  if (problem.labels.size() != n)
    throw Error(ErrorKind::InvalidArgument, "one label slot per vertex required");
  if (n > kMaxPropagationVertices)
    throw Error(ErrorKind::InvalidArgument, "exact propagation is limited to " +
                                                std::to_string(kMaxPropagationVertices) +
                                                " vertices");
  std::vector<long> slot(n, -1);  // position among unlabeled vertices
  std::vector<double> f(n, 0.0);
  long unlabeled = 0;
  bool any_label = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (problem.labels[i]) {
      f[i] = *problem.labels[i];
      any_label = true;
    } else {
      slot[i] = unlabeled++;
    }
  }
  if (!any_label) throw Error(ErrorKind::InvalidArgument, "at least one vertex must be labeled");
  if (unlabeled == 0) return f;

  std::vector<std::vector<std::size_t>> adjacency(n);
  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(unlabeled, unlabeled);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unlabeled);
  for (const Edge& e : problem.edges) {
    if (e.u >= n || e.v >= n || e.u == e.v)
      throw Error(ErrorKind::InvalidArgument, "edge endpoint out of range or self-loop");
    if (!(e.weight > 0.0)) continue;
    adjacency[e.u].push_back(e.v);
    adjacency[e.v].push_back(e.u);
    const long su = slot[e.u];
    const long sv = slot[e.v];
    if (su >= 0) laplacian(su, su) += e.weight;
    if (sv >= 0) laplacian(sv, sv) += e.weight;
    if (su >= 0 && sv >= 0) {
      laplacian(su, sv) -= e.weight;
      laplacian(sv, su) -= e.weight;
    } else if (su >= 0) {
      rhs(su) += e.weight * f[e.v];
    } else if (sv >= 0) {
      rhs(sv) += e.weight * f[e.u];
    }
  }

  // Every unlabeled vertex must reach a label, else its value is free.
  std::vector<char> reached(n, 0);
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i)
    if (problem.labels[i]) {
      reached[i] = 1;
      frontier.push_back(i);
    }
  while (!frontier.empty()) {
    const std::size_t i = frontier.back();
    frontier.pop_back();
    for (std::size_t j : adjacency[i])
      if (!reached[j]) {
        reached[j] = 1;
        frontier.push_back(j);
      }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!reached[i])
      throw Error(ErrorKind::DisconnectedUnlabeled,
                  "vertex " + std::to_string(i + 1) + " is not connected to any labeled vertex");

  const Eigen::LLT<Eigen::MatrixXd> cholesky(laplacian);
  if (cholesky.info() != Eigen::Success)
    throw Error(ErrorKind::SingularSystem, "restricted Laplacian is not positive definite");
  const Eigen::VectorXd solution = cholesky.solve(rhs);
  const double residual = (laplacian * solution - rhs).norm();
  const double scale = laplacian.norm() * solution.norm() + rhs.norm();
  if (!(residual <= 1e-10 * std::max(scale, 1e-300)))
    throw Error(ErrorKind::SingularSystem, "linear solve residual too large");
  for (std::size_t i = 0; i < n; ++i)
    if (slot[i] >= 0) f[i] = solution(slot[i]);
  return f;
}

double propagation_objective(const PropagationProblem& problem, std::span<const double> f) {
  double sum = 0.0;
  for (const Edge& e : problem.edges) {
    const double d = f[e.u] - f[e.v];
    sum += e.weight * d * d;
  }
  return sum;
}

std::vector<int> threshold_labels(std::span<const double> f) {
  std::vector<int> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] >= 0.0 ? 1 : -1;
  return out;
}

std::vector<std::optional<double>> read_vertex_labels(std::istream& in) {
  std::vector<std::optional<double>> labels;
  std::string token;
  while (in >> token) {
    if (token == "+1" || token == "1") labels.emplace_back(1.0);
    else if (token == "-1") labels.emplace_back(-1.0);
    else if (token == "?" || token == "0") labels.emplace_back(std::nullopt);
    else throw Error(ErrorKind::ParseError, "bad vertex label '" + token + "'");
  }
  return labels;
}

}  // namespace gkm
