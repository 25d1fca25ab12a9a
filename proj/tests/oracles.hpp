#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "gkm/graph.hpp"
#include "gkm/labelprop.hpp"
#include "gkm/random.hpp"

namespace gkm::test {

// Upper 0.1% points of the chi-square law (scipy.stats.chi2.ppf(0.999, df)).
inline constexpr double kChi2Crit59 = 98.32423413474163;
inline constexpr double kChi2Crit65 = 105.98814308961282;

/// Pearson statistic of `draws` samples against the uniform law on E.
/// Returns -1 if some edge was never drawn or an edge outside E showed up.
inline double edge_chi_square(const EdgeSet& edges, std::uint64_t draws, std::uint64_t seed) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> counts;
  edges.for_each([&](const Edge& e) { counts[{e.u, e.v}] = 0; });
  Rng rng(seed);
  for (std::uint64_t k = 0; k < draws; ++k) {
    const Edge e = sample_edge(edges, rng);
    auto it = counts.find({e.u, e.v});
    if (it == counts.end()) return -1;
    ++it->second;
  }
  const double expected = static_cast<double>(draws) / static_cast<double>(edges.size());
  double stat = 0;
  for (const auto& [key, c] : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

/// Random connected weighted graph on 2..20 vertices with at least one label.
inline PropagationProblem random_propagation_problem(Rng& rng) {
  PropagationProblem p;
  const std::size_t n = 2 + rng.uniform_index(19);
  p.vertex_count = n;
  std::vector<std::vector<char>> used(n, std::vector<char>(n, 0));
  auto add = [&](std::size_t u, std::size_t v) {
    if (u == v || used[u][v]) return;
    used[u][v] = used[v][u] = 1;
    p.edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v),
                       rng.uniform(0.05, 1.0)});
  };
  for (std::size_t v = 1; v < n; ++v) add(rng.uniform_index(v), v);  // spanning tree
  const std::size_t extra = rng.uniform_index(2 * n);
  for (std::size_t k = 0; k < extra; ++k) add(rng.uniform_index(n), rng.uniform_index(n));
  p.labels.resize(n);
  const std::size_t labeled = 1 + rng.uniform_index(n - 1);
  for (std::size_t k = 0; k < labeled; ++k)
    p.labels[rng.uniform_index(n)] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  return p;
}

/// Minimises Σ μ_ij (f_i − f_j)² over the unlabeled entries by exact
/// coordinate sweeps until the gradient norm is at most 1e-9.
inline std::vector<double> brute_force_propagation(const PropagationProblem& p) {
  const std::size_t n = p.vertex_count;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const Edge& e : p.edges) {
    adj[e.u].push_back({e.v, e.weight});
    adj[e.v].push_back({e.u, e.weight});
  }
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (p.labels[i]) f[i] = *p.labels[i];
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      if (p.labels[i]) continue;
      double num = 0, den = 0;
      for (auto [j, w] : adj[i]) {
        num += w * f[j];
        den += w;
      }
      f[i] = num / den;
    }
    double grad_sq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p.labels[i]) continue;
      double g = 0;
      for (auto [j, w] : adj[i]) g += 2 * w * (f[i] - f[j]);
      grad_sq += g * g;
    }
    if (std::sqrt(grad_sq) <= 1e-9) break;
  }
  return f;
}

inline PropagationProblem unit_chain(std::size_t n) {
  PropagationProblem p;
  p.vertex_count = n;
  for (std::uint32_t k = 0; k + 1 < n; ++k) p.edges.push_back({k, k + 1, 1.0});
  p.labels.resize(n);
  p.labels.front() = 1.0;
  p.labels.back() = -1.0;
  return p;
}

}  // namespace gkm::test
