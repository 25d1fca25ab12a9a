#include "gkm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "gkm/error.hpp"

namespace gkm {
namespace {

constexpr double kRenormalizeBelow = 1e-6;
constexpr std::uint64_t kRenormalizeEvery = 100'000;
constexpr std::size_t kExactNormResyncLimit = 2048;
constexpr std::uint64_t kAutoExactEdgeLimit = 100'000;
constexpr std::uint64_t kAutoSampledEdges = 10'000;

std::vector<std::size_t> nonzero_indices(const Expansion& w) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < w.coef.size(); ++k)
    if (w.coef[k] != 0.0) idx.push_back(k);
  return idx;
}

double quadratic_form(const std::vector<double>& coef, const std::vector<std::size_t>& support,
                      const PointKernel& kernel) {
  double sum = 0.0;
  for (std::size_t a = 0; a < support.size(); ++a) {
    const std::size_t i = support[a];
    double row = 0.5 * coef[i] * kernel(i, i);
    for (std::size_t b = a + 1; b < support.size(); ++b) row += coef[support[b]] * kernel(i, support[b]);
    sum += 2.0 * coef[i] * row;
  }
  return std::max(0.0, sum);
}

std::vector<double> all_decision_values(const Expansion& w, const PointKernel& kernel) {
  const auto support = nonzero_indices(w);
  std::vector<double> f(kernel.size(), 0.0);
  for (std::size_t j = 0; j < f.size(); ++j) {
    double sum = 0.0;
    for (std::size_t k : support) sum += w.coef[k] * kernel(k, j);
    f[j] = w.scale * sum;
  }
  return f;
}

ObjectiveMode resolve_mode(const TrainConfig& config, const EdgeSet& edges) {
  if (config.objective_mode) return *config.objective_mode;
  return edges.size() <= kAutoExactEdgeLimit ? ObjectiveMode::exact()
                                             : ObjectiveMode::sampled(kAutoSampledEdges);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(std::isfinite(C) && C > 0.0)) throw Error(ErrorKind::InvalidArgument, "C must be positive");
  if (!(std::isfinite(C_prime) && C_prime > 0.0))
    throw Error(ErrorKind::InvalidArgument, "C' must be positive");
  if (iterations < 1) throw Error(ErrorKind::InvalidArgument, "T must be at least 1");
  if (objective_mode && objective_mode->kind == ObjectiveMode::Kind::Sampled &&
      objective_mode->samples < 1)
    throw Error(ErrorKind::InvalidArgument, "sampled objective needs at least one draw");
  loss.validate();
  smoothness.validate();
}

std::uint64_t default_iterations(std::size_t n) noexcept {
  if (n <= 5000) return std::max<std::uint64_t>(n, 1);
  return static_cast<std::uint64_t>(std::llround(0.2 * static_cast<double>(n)));
}

std::vector<double> Expansion::folded() const {
  std::vector<double> out(coef.size());
  for (std::size_t k = 0; k < coef.size(); ++k) out[k] = scale * coef[k];
  return out;
}

double hilbert_norm(const Expansion& w, const PointKernel& kernel) {
  return std::abs(w.scale) * std::sqrt(quadratic_form(w.coef, nonzero_indices(w), kernel));
}

double decision_at(const Expansion& w, const PointKernel& kernel, std::size_t i) {
  double sum = 0.0;
  for (std::size_t k = 0; k < w.coef.size(); ++k)
    if (w.coef[k] != 0.0) sum += w.coef[k] * kernel(k, i);
  return w.scale * sum;
}

ObjectiveTerms objective_terms(const Expansion& w, const Dataset& data, const EdgeSet& edges,
                               const TrainConfig& config, const PointKernel& kernel,
                               ObjectiveMode mode, std::uint64_t seed, std::uint64_t edge_cap) {
  const std::size_t n = data.size();
  if (w.size() != n || kernel.size() != n || edges.vertex_count() != n)
    throw Error(ErrorKind::InvalidArgument, "expansion, kernel and edges must cover the dataset");
  ObjectiveTerms terms;
  const double norm = hilbert_norm(w, kernel);
  terms.regularizer = 0.5 * norm * norm;

  const std::size_t l = data.labeled();
  if (l > 0) {
    double sum = 0.0;
    for (std::size_t i = 0; i < l; ++i)
      sum += loss_value(config.loss, decision_at(w, kernel, i), data.labels[i]);
    terms.labeled = config.C / static_cast<double>(l) * sum;
  }

  const std::uint64_t edge_count = edges.size();
  if (edge_count == 0) return terms;
  if (mode.kind == ObjectiveMode::Kind::Exact) {
    if (edge_count > edge_cap)
      throw Error(ErrorKind::EdgeEnumerationTooLarge,
                  std::to_string(edge_count) + " edges exceed the enumeration cap");
    const auto f = all_decision_values(w, kernel);
    double sum = 0.0;
    edges.for_each([&](const Edge& e) {
      sum += e.weight * lp_value(config.smoothness, f[e.u] - f[e.v]);
    });
    terms.smoothness = config.C_prime / static_cast<double>(edge_count) * sum;
  } else {
    Rng rng(seed);
    std::vector<double> f;
    if (n <= 2 * mode.samples) f = all_decision_values(w, kernel);
    auto value_at = [&](std::size_t i) { return f.empty() ? decision_at(w, kernel, i) : f[i]; };
    double sum = 0.0;
    for (std::uint64_t s = 0; s < mode.samples; ++s) {
      const Edge e = sample_edge(edges, rng);
      sum += e.weight * lp_value(config.smoothness, value_at(e.u) - value_at(e.v));
    }
    terms.smoothness = config.C_prime * sum / static_cast<double>(mode.samples);
  }
  return terms;
}

double objective(const Expansion& w, const Dataset& data, const EdgeSet& edges,
                 const TrainConfig& config, const PointKernel& kernel, ObjectiveMode mode,
                 std::uint64_t seed, std::uint64_t edge_cap) {
  return objective_terms(w, data, edges, config, kernel, mode, seed, edge_cap).total();
}

void write_trace_csv(std::ostream& out, const Diagnostics& diagnostics) {
  out << "t,J_avg,norm_w,norm_g\n";
  char buf[128];
  for (const auto& row : diagnostics.trace) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(row.t), row.J_avg, row.norm_w, row.norm_g);
    out << buf;
  }
}

double decision_value(const ModelState& model, const SparseVector& x, Iterate which) {
  const Expansion& w = which == Iterate::Averaged ? model.averaged : model.current;
  double sum = 0.0;
  for (std::size_t k = 0; k < w.coef.size(); ++k)
    if (w.coef[k] != 0.0) sum += w.coef[k] * eval_kernel(model.kernel, model.points[k], x);
  return w.scale * sum;
}

int predict(const ModelState& model, const SparseVector& x, Iterate which) {
  return decision_value(model, x, which) >= 0.0 ? 1 : -1;
}

double hilbert_norm(const ModelState& model, Iterate which) {
  const PointKernel kernel(model.kernel, model.points);
  return hilbert_norm(which == Iterate::Averaged ? model.averaged : model.current, kernel);
}

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(const Dataset& data, const EdgeSet& edges, const TrainConfig& config,
                 const PointKernel& kernel)
    : data_(data), edges_(edges), config_(config), kernel_(kernel), rng_(config.seed) {
  config_.validate();
  data_.validate();
  const std::size_t n = data_.size();
  if (data_.labeled() == 0) throw Error(ErrorKind::NoLabeledData, "training needs labeled points");
  if (edges_.empty()) throw Error(ErrorKind::EmptyEdgeSet, "training needs at least one edge");
  if (edges_.vertex_count() != n || kernel_.size() != n)
    throw Error(ErrorKind::InvalidArgument, "edges and kernel must index the dataset points");
  for (double y : data_.labels) (void)loss_value(config_.loss, 0.0, y);  // label check
  alpha_.assign(n, 0.0);
  avg_offset_.assign(n, 0.0);
  in_support_.assign(n, 0);
}

void Trainer::add_to_current(std::size_t i, double delta) {
  if (delta == 0.0) return;
  alpha_[i] += delta;
  avg_offset_[i] -= avg_weight_ * delta;
  if (!in_support_[i]) {
    in_support_[i] = 1;
    support_.push_back(i);
  }
  if (!std::isfinite(alpha_[i]) || !std::isfinite(avg_offset_[i]))
    throw Error(ErrorKind::NonFiniteState,
                "coefficient became non-finite at t=" + std::to_string(t_));
}

void Trainer::accumulate_average() {
  avg_weight_ += static_cast<double>(t_) * scale_;
}

void Trainer::renormalize() {
  for (std::size_t k : support_) alpha_[k] *= scale_;
  avg_weight_ /= scale_;
  scale_ = 1.0;
  since_renorm_ = 0;
  if (support_.size() <= kExactNormResyncLimit) norm_sq_ = quadratic_form(alpha_, support_, kernel_);
}

StepInfo Trainer::step() {
  const std::uint64_t t = t_;
  const std::size_t i = rng_.uniform_index(data_.labeled());
  const Edge e = sample_edge(edges_, rng_);

  double f_i = 0.0;
  double f_u = 0.0;
  double f_v = 0.0;
  for (std::size_t k : support_) {
    const double a = alpha_[k];
    f_i += a * kernel_(k, i);
    f_u += a * kernel_(k, e.u);
    f_v += a * kernel_(k, e.v);
  }
  const double o_label = scale_ * f_i;
  const double o_edge = scale_ * (f_u - f_v);

  const double loss_coef = config_.C * loss_grad_scalar(config_.loss, o_label, data_.labels[i]);
  const double edge_coef =
      config_.C_prime * e.weight * lp_grad_scalar(config_.smoothness, o_edge);

  // d = loss_coef·Φ(x_i) + edge_coef·(Φ(x_u) − Φ(x_v)), g_t = w_t + d.
  const double k_ii = kernel_(i, i);
  const double k_uu = kernel_(e.u, e.u);
  const double k_vv = kernel_(e.v, e.v);
  const double k_uv = kernel_(e.u, e.v);
  const double k_iu = kernel_(i, e.u);
  const double k_iv = kernel_(i, e.v);
  const double d_sq = std::max(0.0, loss_coef * loss_coef * k_ii +
                                        edge_coef * edge_coef * (k_uu + k_vv - 2.0 * k_uv) +
                                        2.0 * loss_coef * edge_coef * (k_iu - k_iv));
  const double w_dot_d = loss_coef * o_label + edge_coef * o_edge;
  const double g_sq = std::max(0.0, norm_sq_ + 2.0 * w_dot_d + d_sq);

  StepInfo info{t, i, e, o_label, o_edge, loss_coef, edge_coef, std::sqrt(norm_sq_),
                std::sqrt(g_sq)};

  if (config_.averaging == AveragingRule::PreUpdate) accumulate_average();

  const double td = static_cast<double>(t);
  const double shrink = (td - 1.0) / (td + 1.0);
  const double eta = 2.0 / (td + 1.0);
  norm_sq_ = std::max(0.0, shrink * shrink * norm_sq_ - 2.0 * shrink * eta * w_dot_d +
                               eta * eta * d_sq);
  if (t == 1) {
    // w_1 = 0, so the shrink factor 0 leaves nothing to scale.
    scale_ = 1.0;
  } else {
    scale_ *= shrink;
  }
  // One increment per distinct index, so an index first touched now stays
  // exactly out of the running average.
  const double d_label = -eta * loss_coef / scale_;
  const double d_edge = -eta * edge_coef / scale_;
  if (i == e.u) {
    add_to_current(i, d_label + d_edge);
    add_to_current(e.v, -d_edge);
  } else if (i == e.v) {
    add_to_current(i, d_label - d_edge);
    add_to_current(e.u, d_edge);
  } else {
    add_to_current(i, d_label);
    add_to_current(e.u, d_edge);
    add_to_current(e.v, -d_edge);
  }

  if (config_.averaging == AveragingRule::PostUpdate) accumulate_average();

  ++t_;
  ++since_renorm_;
  if (std::abs(scale_) < kRenormalizeBelow || since_renorm_ >= kRenormalizeEvery) renormalize();
  if (!std::isfinite(scale_) || !std::isfinite(avg_weight_) || !std::isfinite(norm_sq_))
    throw Error(ErrorKind::NonFiniteState, "iterate became non-finite at t=" + std::to_string(t));
  return info;
}

Expansion Trainer::current() const { return Expansion{alpha_, scale_}; }

Expansion Trainer::averaged() const {
  const double m = static_cast<double>(t_ - 1);
  Expansion w{std::vector<double>(alpha_.size(), 0.0), 0.0};
  if (t_ == 1) return w;
  for (std::size_t k : support_) w.coef[k] = avg_offset_[k] + avg_weight_ * alpha_[k];
  w.scale = 2.0 / (m * (m + 1.0));
  return w;
}

ModelState Trainer::model() const {
  ModelState m;
  m.kernel = kernel_.spec();
  m.config = config_;
  m.sigma_s = edges_.sigma_s();
  m.points = data_.points;
  m.current = current();
  m.averaged = averaged();
  m.iterations = t_ - 1;
  return m;
}

TrainResult train(const Dataset& data, const EdgeSet& edges, const TrainConfig& config,
                  const KernelSpec& kernel, const StepObserver& observer) {
  return train(data, edges, config, PointKernel(kernel, data.points), observer);
}

TrainResult train(const Dataset& data, const EdgeSet& edges, const TrainConfig& config,
                  const PointKernel& kernel, const StepObserver& observer) {
  Trainer trainer(data, edges, config, kernel);
  Diagnostics diagnostics;
  const ObjectiveMode mode = resolve_mode(config, edges);
  for (std::uint64_t step = 1; step <= config.iterations; ++step) {
    const StepInfo info = trainer.step();
    if (observer) observer(trainer, info);
    if (config.diagnostics_every > 0 &&
        (step % config.diagnostics_every == 0 || step == config.iterations)) {
      const double J = objective(trainer.averaged(), data, edges, config, kernel, mode,
                                 config.seed ^ (0x9e3779b97f4a7c15ULL * step));
      diagnostics.trace.push_back({step, J, hilbert_norm(trainer.current(), kernel), info.norm_g});
    }
  }
  return {trainer.model(), std::move(diagnostics)};
}

}  // namespace gkm
