#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gkm/graph.hpp"

namespace gkm {

/// Clamped-label smoothing on a weighted graph:
///   min Σ_(i,j) μ_ij (f_i − f_j)²  subject to f_i = y_i on labeled vertices.
struct PropagationProblem {
  std::size_t vertex_count = 0;
  std::vector<Edge> edges;                    // any order, u != v
  std::vector<std::optional<double>> labels;  // size vertex_count
};

/// Largest system solve_exact accepts.
inline constexpr std::size_t kMaxPropagationVertices = 2000;

/// Harmonic solution: labeled entries copied, unlabeled entries from
/// L_uu f_u = W_ul y_l by dense Cholesky.
///
/// Errors: InvalidArgument (no labels, bad sizes, too many vertices),
/// DisconnectedUnlabeled, SingularSystem.
std::vector<double> solve_exact(const PropagationProblem& problem);

/// Σ μ_ij (f_i − f_j)².
double propagation_objective(const PropagationProblem& problem, std::span<const double> f);

/// +1 iff f >= 0.
std::vector<int> threshold_labels(std::span<const double> f);

/// Labels file: one token per vertex line, `+1`, `-1` or `?`/`0` for
/// unlabeled.
std::vector<std::optional<double>> read_vertex_labels(std::istream& in);

}  // namespace gkm
