#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "gkm/dataset.hpp"
#include "gkm/random.hpp"

namespace gkm {

struct FullyConnected {};
struct Knn {
  std::size_t k;
};
struct EpsNn {
  double epsilon;
};

struct GraphSpec {
  std::variant<FullyConnected, Knn, EpsNn> kind = FullyConnected{};
  double sigma_s = 1.0;

  /// Throws Error(InvalidArgument) on k = 0, epsilon <= 0 or sigma_s <= 0.
  void validate() const;
};

/// μ = exp(−‖x_i − x_j‖² / (2 sigma_s²)), in (0, 1].
double edge_weight(const SparseVector& xi, const SparseVector& xj, double sigma_s) noexcept;

struct Edge {
  std::uint32_t u;  // 0-based, u < v
  std::uint32_t v;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Edge universe E. Never contains a pair of labeled vertices (vertices
/// [0, labeled) are the labeled ones), a self-loop, or a repeated pair.
///
/// The fully connected graph is kept implicit: an edge (u, v) with u < v is
/// in E iff v >= labeled, and its weight is computed from the points when
/// needed. The implicit form references the points; they must outlive it.
class EdgeSet {
 public:
  static EdgeSet implicit(std::span<const SparseVector> points, std::size_t labeled,
                          double sigma_s);
  /// Edges are canonicalised to u < v and sorted. Throws
  /// Error(InvalidArgument) on self-loops, duplicates, weights outside
  /// (0, 1] or out-of-range endpoints.
  static EdgeSet explicit_edges(std::size_t vertex_count, std::vector<Edge> edges,
                                double sigma_s = 0.0);

  bool is_implicit() const noexcept { return implicit_; }
  std::size_t vertex_count() const noexcept { return vertex_count_; }
  /// Weight bandwidth the set was built with (0 when read from a file).
  double sigma_s() const noexcept { return sigma_s_; }
  std::uint64_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }

  /// Explicit edges only (empty for the implicit form).
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// The k-th edge in canonical order, k < size(). For the implicit form the
  /// order is by v, then u.
  Edge at(std::uint64_t k) const;

  /// Visits every edge in canonical order.
  template <typename F>
  void for_each(F&& visit) const {
    if (!implicit_) {
      for (const Edge& e : edges_) visit(e);
      return;
    }
    for (std::size_t v = labeled_; v < vertex_count_; ++v)
      for (std::size_t u = 0; u < v; ++u)
        visit(Edge{static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v),
                   edge_weight(points_[u], points_[v], sigma_s_)});
  }

 private:
  EdgeSet() = default;

  bool implicit_ = false;
  std::size_t vertex_count_ = 0;
  std::size_t labeled_ = 0;
  double sigma_s_ = 0.0;
  std::span<const SparseVector> points_;
  std::vector<Edge> edges_;
};

/// |E| = n(n−1)/2 − l(l−1)/2. EmptyEdgeSet when every pair is labeled-labeled.
EdgeSet build_fully_connected(const Dataset& data, const GraphSpec& spec);

/// Union-symmetrised k-NN graph; distance ties go to the lower index.
/// InvalidK unless 1 <= k < n.
EdgeSet build_knn(const Dataset& data, const GraphSpec& spec);

/// All pairs with ‖x_i − x_j‖ <= epsilon. May be empty.
EdgeSet build_eps(const Dataset& data, const GraphSpec& spec);

/// Dispatches on spec.kind.
EdgeSet build_graph(const Dataset& data, const GraphSpec& spec);

/// Exactly uniform draw from E. EmptyEdgeSet if E is empty.
Edge sample_edge(const EdgeSet& edges, Rng& rng);

/// Text form: one `u v weight` line per edge, 1-based, weight with 17
/// significant digits.
void write_edges(std::ostream& out, const EdgeSet& edges);
/// Inverse of write_edges. vertex_count is inferred as the largest endpoint
/// when zero.
EdgeSet read_edges(std::istream& in, std::size_t vertex_count = 0);

}  // namespace gkm
