#include "gkm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "gkm/error.hpp"

namespace gkm {
namespace {

std::uint64_t pairs_below(std::uint64_t v) { return v * (v - (v > 0 ? 1 : 0)) / 2; }

// Largest v with v(v−1)/2 <= g.
std::uint64_t triangular_root(std::uint64_t g) {
  auto v = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(g))) / 2.0);
  while (v > 1 && pairs_below(v) > g) --v;
  while (pairs_below(v + 1) <= g) ++v;
  return v;
}

void require_positive_sigma(double sigma_s) {
  if (!(std::isfinite(sigma_s) && sigma_s > 0.0))
    throw Error(ErrorKind::InvalidArgument, "sigma_s must be positive");
}

std::vector<Edge> weighted(const Dataset& data, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                           double sigma_s) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs)
    edges.push_back({u, v, edge_weight(data.points[u], data.points[v], sigma_s)});
  return edges;
}

}  // namespace

void GraphSpec::validate() const {
  require_positive_sigma(sigma_s);
  if (const auto* knn = std::get_if<Knn>(&kind); knn && knn->k < 1)
    throw Error(ErrorKind::InvalidK, "k must be at least 1");
  if (const auto* eps = std::get_if<EpsNn>(&kind); eps && !(eps->epsilon > 0.0))
    throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
}

double edge_weight(const SparseVector& xi, const SparseVector& xj, double sigma_s) noexcept {
  return std::exp(-squared_distance(xi, xj) / (2.0 * sigma_s * sigma_s));
}

EdgeSet EdgeSet::implicit(std::span<const SparseVector> points, std::size_t labeled,
                          double sigma_s) {
  require_positive_sigma(sigma_s);
  if (labeled > points.size())
    throw Error(ErrorKind::InvalidArgument, "labeled count exceeds point count");
  EdgeSet e;
  e.implicit_ = true;
  e.vertex_count_ = points.size();
  e.labeled_ = labeled;
  e.sigma_s_ = sigma_s;
  e.points_ = points;
  return e;
}

EdgeSet EdgeSet::explicit_edges(std::size_t vertex_count, std::vector<Edge> edges,
                                double sigma_s) {
  for (Edge& e : edges) {
    if (e.u == e.v) throw Error(ErrorKind::InvalidArgument, "self-loop in edge list");
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.v >= vertex_count) throw Error(ErrorKind::InvalidArgument, "edge endpoint out of range");
    if (!(e.weight > 0.0 && e.weight <= 1.0))
      throw Error(ErrorKind::InvalidArgument, "edge weights must lie in (0, 1]");
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (edges[k].u == edges[k - 1].u && edges[k].v == edges[k - 1].v)
      throw Error(ErrorKind::InvalidArgument, "duplicate edge");
  EdgeSet set;
  set.vertex_count_ = vertex_count;
  set.sigma_s_ = sigma_s;
  set.edges_ = std::move(edges);
  return set;
}

std::uint64_t EdgeSet::size() const noexcept {
  if (!implicit_) return edges_.size();
  return pairs_below(vertex_count_) - pairs_below(labeled_);
}

Edge EdgeSet::at(std::uint64_t k) const {
  if (k >= size()) throw Error(ErrorKind::InvalidArgument, "edge index out of range");
  if (!implicit_) return edges_[k];
  // Edges with v >= labeled are exactly the pairs ranked from l(l−1)/2 on
  // in the (v, u) enumeration of all pairs.
  const std::uint64_t g = pairs_below(labeled_) + k;
  const std::uint64_t v = triangular_root(g);
  const std::uint64_t u = g - pairs_below(v);
  return Edge{static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v),
              edge_weight(points_[u], points_[v], sigma_s_)};
}

EdgeSet build_fully_connected(const Dataset& data, const GraphSpec& spec) {
  spec.validate();
  EdgeSet e = EdgeSet::implicit(data.points, data.labeled(), spec.sigma_s);
  if (e.empty())
    throw Error(ErrorKind::EmptyEdgeSet, "every pair of points is labeled-labeled");
  return e;
}

EdgeSet build_knn(const Dataset& data, const GraphSpec& spec) {
  spec.validate();
  const auto* knn = std::get_if<Knn>(&spec.kind);
  if (!knn) throw Error(ErrorKind::InvalidArgument, "graph spec is not k-NN");
  const std::size_t n = data.size();
  const std::size_t k = knn->k;
  if (k >= n) throw Error(ErrorKind::InvalidK, "k must be smaller than the number of points");
  const std::size_t l = data.labeled();

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(n * k);
  std::vector<std::pair<double, std::uint32_t>> candidates(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i)
        candidates[c++] = {squared_distance(data.points[i], data.points[j]),
                           static_cast<std::uint32_t>(j)};
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                      candidates.end());
    for (std::size_t r = 0; r < k; ++r) {
      auto a = static_cast<std::uint32_t>(i);
      auto b = candidates[r].second;
      if (a > b) std::swap(a, b);
      if (b < l) continue;  // both labeled
      pairs.emplace_back(a, b);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return EdgeSet::explicit_edges(n, weighted(data, pairs, spec.sigma_s), spec.sigma_s);
}

EdgeSet build_eps(const Dataset& data, const GraphSpec& spec) {
  spec.validate();
  const auto* eps = std::get_if<EpsNn>(&spec.kind);
  if (!eps) throw Error(ErrorKind::InvalidArgument, "graph spec is not epsilon-NN");
  const std::size_t n = data.size();
  const std::size_t l = data.labeled();
  const double limit = eps->epsilon * eps->epsilon;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = std::max(u + 1, l); v < n; ++v)
      if (squared_distance(data.points[u], data.points[v]) <= limit)
        pairs.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
  return EdgeSet::explicit_edges(n, weighted(data, pairs, spec.sigma_s), spec.sigma_s);
}

EdgeSet build_graph(const Dataset& data, const GraphSpec& spec) {
  if (std::holds_alternative<FullyConnected>(spec.kind)) return build_fully_connected(data, spec);
  if (std::holds_alternative<Knn>(spec.kind)) return build_knn(data, spec);
  return build_eps(data, spec);
}

Edge sample_edge(const EdgeSet& edges, Rng& rng) {
  const std::uint64_t count = edges.size();
  if (count == 0) throw Error(ErrorKind::EmptyEdgeSet, "cannot sample from an empty edge set");
  return edges.at(rng.uniform_index(count));
}

void write_edges(std::ostream& out, const EdgeSet& edges) {
  char buf[32];
  edges.for_each([&](const Edge& e) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << e.u + 1 << ' ' << e.v + 1 << ' ' << buf << '\n';
  });
}

EdgeSet read_edges(std::istream& in, std::size_t vertex_count) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  std::size_t largest = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream fields(line);
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    double w = 0.0;
    std::string extra;
    if (!(fields >> u >> v >> w) || (fields >> extra) || u == 0 || v == 0)
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": expected `u v weight` with 1-based u, v");
    largest = std::max<std::size_t>({largest, u, v});
    edges.push_back({static_cast<std::uint32_t>(u - 1), static_cast<std::uint32_t>(v - 1), w});
  }
  return EdgeSet::explicit_edges(vertex_count == 0 ? largest : vertex_count, std::move(edges));
}

}  // namespace gkm
