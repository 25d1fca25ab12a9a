// gkm command-line interface.
//
// Exit codes: 0 success, 1 `bounds` found the condition violated,
// 2 invalid input, 3 reference optimum did not converge.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gkm/bounds.hpp"
#include "gkm/dataset.hpp"
#include "gkm/error.hpp"
#include "gkm/graph.hpp"
#include "gkm/harness.hpp"
#include "gkm/labelprop.hpp"
#include "gkm/loss.hpp"
#include "gkm/optimizer.hpp"
#include "gkm/random.hpp"

namespace {

using namespace gkm;

constexpr int kExitViolated = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;

struct KernelFlags {
  double sigma_f = 1.0;
  double sigma_l = 1.0;
  std::optional<double> sigma_s;  // defaults to sigma_l

  void add(CLI::App& app) {
    app.add_option("--sigma-f", sigma_f, "Kernel output scale (also the feature radius R)")
        ->capture_default_str();
    app.add_option("--sigma-l", sigma_l, "Kernel length scale")->capture_default_str();
    app.add_option("--sigma-s", sigma_s, "Edge-weight bandwidth (default: sigma-l)");
  }
  KernelSpec kernel() const { return KernelSpec(sigma_f, sigma_l); }
  double bandwidth() const { return sigma_s.value_or(sigma_l); }
};

struct GraphFlags {
  std::string kind = "full";
  std::size_t k = 10;
  double epsilon = 1.0;

  void add(CLI::App& app) {
    app.add_option("--graph", kind, "Graph: full, knn or eps")
        ->check(CLI::IsMember({"full", "knn", "eps"}))
        ->capture_default_str();
    app.add_option("--knn-k", k, "Neighbours per vertex for --graph knn")->capture_default_str();
    app.add_option("--eps-radius", epsilon, "Radius for --graph eps")->capture_default_str();
  }
  GraphSpec spec(double sigma_s) const {
    GraphSpec g;
    g.sigma_s = sigma_s;
    if (kind == "knn") g.kind = Knn{k};
    else if (kind == "eps") g.kind = EpsNn{epsilon};
    return g;
  }
};

struct DataFlags {
  std::string path;
  double hide_fraction = 0.0;
  std::string mask;

  void add(CLI::App& app, bool required = true) {
    auto* opt = app.add_option("--data", path, "LIBSVM file (label 0 marks unlabeled points)");
    if (required) opt->required();
    app.add_option("--hide-fraction", hide_fraction,
                   "Hide this fraction of labels at random (needs a fully labeled file)")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--mask", mask, "File of 1-based point positions whose labels are hidden");
  }
  Dataset load(std::uint64_t seed) const {
    Dataset d = load_libsvm(path);
    if (!mask.empty()) {
      std::ifstream in(mask);
      if (!in) throw Error(ErrorKind::Io, "cannot open " + mask);
      d = apply_mask(d, read_mask(in));
    }
    if (hide_fraction > 0.0) d = hide_labels(d, hide_fraction, seed);
    return d;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return in;
}

std::optional<ObjectiveMode> parse_objective_mode(const std::string& text) {
  if (text == "auto") return std::nullopt;
  if (text == "exact") return ObjectiveMode::exact();
  if (text == "sampled") return ObjectiveMode::sampled(10'000);
  if (text.rfind("sampled:", 0) == 0) {
    const auto m = std::stoull(text.substr(8));
    if (m == 0) throw Error(ErrorKind::InvalidArgument, "sampled objective needs m >= 1");
    return ObjectiveMode::sampled(m);
  }
  throw Error(ErrorKind::InvalidArgument, "objective mode must be auto, exact or sampled[:m]");
}

void print_bounds(const BoundsReport& r, std::ostream& out) {
  out << "C=" << r.C << "\nC_prime=" << r.C_prime << "\np=" << r.p << "\nR=" << r.R
      << "\nA=" << r.A << "\na=" << r.a << "\nb=" << r.b << "\n";
  out << "M=" << (r.M ? std::to_string(*r.M) : "undefined") << "\n";
  out << "G=" << (r.G ? std::to_string(*r.G) : "undefined") << "\n";
  out << "condition_holds=" << (r.condition_holds ? "true" : "false") << "\n";
  out << "reason=" << to_string(r.reason) << "\n";
}

void warn_if_uncertified(const TrainConfig& c, double sigma_f) {
  const auto r = compute_bounds(c.C, c.C_prime, c.smoothness.p, sigma_f,
                                gradient_bound_A(c.loss, sigma_f));
  if (!r.condition_holds)
    std::cerr << "warning: (C, C', p, sigma_f) is outside the certified region; the O(1/T) "
                 "guarantee does not apply\n";
}

struct TrainFlags {
  std::string loss = "hinge";
  std::optional<double> loss_param;
  double p = 2.0;
  double C = 1.0;
  double C_prime = 0.05;
  std::optional<std::uint64_t> T;
  std::uint64_t seed = 1;
  std::string objective_mode = "auto";
  std::uint64_t diagnostics_every = 0;
  std::string averaging = "pre";

  void add(CLI::App& app) {
    app.add_option("--loss", loss, "hinge, smooth-hinge, logistic, l1 or eps-insensitive")
        ->capture_default_str();
    app.add_option("--loss-param", loss_param, "tau for smooth-hinge, epsilon for eps-insensitive");
    app.add_option("--p", p, "Smoothness exponent (>= 1)")->capture_default_str();
    app.add_option("--C", C, "Labeled-loss trade-off")->capture_default_str();
    app.add_option("--C-prime", C_prime, "Smoothness trade-off")->capture_default_str();
    app.add_option("--T", T, "Iterations (default: n, or 0.2n above 5000 points)");
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--objective-mode", objective_mode, "auto, exact or sampled[:m]")
        ->capture_default_str();
    app.add_option("--diagnostics-every", diagnostics_every, "Trace interval (0: final row only)");
    app.add_option("--averaging", averaging, "pre (average w_t) or post (average w_{t+1})")
        ->check(CLI::IsMember({"pre", "post"}))
        ->capture_default_str();
  }
  TrainConfig config(std::size_t n) const {
    TrainConfig c;
    c.loss = loss_param ? parse_loss(loss, *loss_param) : parse_loss(loss);
    c.smoothness.p = p;
    c.C = C;
    c.C_prime = C_prime;
    c.iterations = T.value_or(default_iterations(n));
    c.seed = seed;
    c.objective_mode = parse_objective_mode(objective_mode);
    c.diagnostics_every = diagnostics_every;
    c.averaging = averaging == "post" ? AveragingRule::PostUpdate : AveragingRule::PreUpdate;
    c.validate();
    return c;
  }
};

int run_train(const DataFlags& data_flags, const KernelFlags& kf, const GraphFlags& gf,
              const TrainFlags& tf, const std::string& model_out, const std::string& trace_out) {
  const Dataset data = data_flags.load(tf.seed);
  TrainConfig config = tf.config(data.size());
  if (!trace_out.empty() && config.diagnostics_every == 0)
    config.diagnostics_every = config.iterations;
  warn_if_uncertified(config, kf.sigma_f);
  const EdgeSet edges = build_graph(data, gf.spec(kf.bandwidth()));
  const TrainResult result = train(data, edges, config, kf.kernel());
  if (!model_out.empty()) {
    auto out = open_out(model_out);
    save_model(out, result.model);
  }
  if (!trace_out.empty()) {
    auto out = open_out(trace_out);
    write_trace_csv(out, result.diagnostics);
  }
  std::printf("points=%zu labeled=%zu edges=%llu iterations=%llu\n", data.size(), data.labeled(),
              static_cast<unsigned long long>(edges.size()),
              static_cast<unsigned long long>(config.iterations));
  std::printf("norm_avg=%.10g norm_current=%.10g\n", hilbert_norm(result.model, Iterate::Averaged),
              hilbert_norm(result.model, Iterate::Current));
  const Dataset held_out = revealed_unlabeled(data);
  if (held_out.size() > 0) {
    const EvalReport r = evaluate(result.model, held_out);
    std::printf("unlabeled_accuracy=%.6f unlabeled_f1=%.6f\n", r.accuracy, r.f1);
  }
  return 0;
}

ModelState read_model(const std::string& path) {
  auto in = open_in(path);
  return load_model(in);
}

int run_predict(const std::string& model_in, const std::string& data_path,
                const std::string& out_path, bool current) {
  const ModelState model = read_model(model_in);
  const Dataset data = load_libsvm(data_path);
  std::ofstream file;
  if (!out_path.empty()) file = open_out(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;
  const Iterate which = current ? Iterate::Current : Iterate::Averaged;
  // Rows follow the input file order.
  std::vector<std::size_t> order(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) order[data.source_index[k]] = k;
  char buf[64];
  for (std::size_t k : order) {
    const double f = decision_value(model, data.points[k], which);
    std::snprintf(buf, sizeof buf, "%+d %.17g\n", f >= 0 ? 1 : -1, f);
    out << buf;
  }
  return 0;
}

int run_eval(const std::string& model_in, const std::string& data_path) {
  const ModelState model = read_model(model_in);
  const EvalReport r = evaluate(model, load_libsvm(data_path));
  std::printf("accuracy=%.6f\nprecision=%.6f\nrecall=%.6f\nf1=%.6f\n", r.accuracy, r.precision,
              r.recall, r.f1);
  std::printf("tp=%llu\nfp=%llu\ntn=%llu\nfn=%llu\nwall_time=%.6f\n",
              static_cast<unsigned long long>(r.confusion.tp),
              static_cast<unsigned long long>(r.confusion.fp),
              static_cast<unsigned long long>(r.confusion.tn),
              static_cast<unsigned long long>(r.confusion.fn), r.wall_time);
  return 0;
}

int run_labelprop(const std::string& edges_path, const std::string& labels_path,
                  const std::string& out_path) {
  auto labels_in = open_in(labels_path);
  PropagationProblem problem;
  problem.labels = read_vertex_labels(labels_in);
  problem.vertex_count = problem.labels.size();
  auto edges_in = open_in(edges_path);
  const EdgeSet edges = read_edges(edges_in, problem.vertex_count);
  problem.edges.assign(edges.edges().begin(), edges.edges().end());
  const auto f = solve_exact(problem);
  const auto y = threshold_labels(f);
  std::ofstream file;
  if (!out_path.empty()) file = open_out(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;
  char buf[64];
  for (std::size_t k = 0; k < f.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %+d\n", k + 1, f[k], y[k]);
    out << buf;
  }
  return 0;
}

int run_converge(const DataFlags& data_flags, const KernelFlags& kf, const GraphFlags& gf,
                 const std::vector<std::string>& losses, const std::vector<double>& ps,
                 double C, std::optional<double> C_prime, const std::vector<std::uint64_t>& T_grid,
                 std::uint64_t seed_count, std::uint64_t data_seed, const std::string& out_path) {
  Dataset data;
  if (data_flags.path.empty()) {
    data = hide_labels(synth_two_gaussians(30, 2, 3.2897072539029444, data_seed), 0.8, data_seed);
  } else {
    data = data_flags.load(data_seed);
  }
  std::vector<ConvergenceConfig> configs;
  for (const auto& loss : losses) {
    for (double p : ps) {
      ConvergenceConfig c;
      c.name = loss + "-p" + CLI::detail::to_string(p);
      c.train.loss = parse_loss(loss);
      c.train.smoothness.p = p;
      c.train.C = C;
      // Without an explicit C', stay inside the certified region.
      const double cap = max_cprime(p, C, kf.sigma_f);
      c.train.C_prime = C_prime.value_or(std::isinf(cap) ? 0.05 : std::min(0.05, 0.9 * cap));
      c.kernel = kf.kernel();
      configs.push_back(c);
    }
  }
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= seed_count; ++s) seeds.push_back(s);
  const ConvergenceRun run =
      run_convergence_experiment(data, gf.spec(kf.bandwidth()), configs, T_grid, seeds);
  if (!out_path.empty()) {
    auto out = open_out(out_path);
    write_convergence_csv(out, run);
  }
  for (const auto& s : run.series) {
    std::printf("%s J*=%.10g", s.config.name.c_str(), s.J_star);
    for (std::size_t k = 0; k < T_grid.size(); ++k)
      std::printf(" T=%llu:%.6g", static_cast<unsigned long long>(T_grid[k]), s.median_delta_jt(k));
    if (s.G) std::printf(" 2G^2=%.6g", 2 * *s.G * *s.G);
    std::printf("\n");
  }
  return 0;
}

int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::NotConverged ? kExitNotConverged : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based semi-supervised kernel machine"};
  app.require_subcommand(1);
  int status = 0;

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  DataFlags train_data;
  KernelFlags train_kernel;
  GraphFlags train_graph;
  TrainFlags train_flags;
  std::string model_out, trace_out;
  train_data.add(*train_cmd);
  train_kernel.add(*train_cmd);
  train_graph.add(*train_cmd);
  train_flags.add(*train_cmd);
  train_cmd->add_option("--model-out", model_out, "Write the trained model here");
  train_cmd->add_option("--trace-out", trace_out, "Write the diagnostics trace CSV here");
  train_cmd->callback([&] {
    status = run_train(train_data, train_kernel, train_graph, train_flags, model_out, trace_out);
  });

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict labels for a LIBSVM file");
  std::string predict_model, predict_data, predict_out;
  bool predict_current = false;
  predict_cmd->add_option("--model-in", predict_model, "Model file")->required();
  predict_cmd->add_option("--data", predict_data, "LIBSVM file (labels ignored)")->required();
  predict_cmd->add_option("--out", predict_out, "Output file (default: stdout)");
  predict_cmd->add_flag("--current", predict_current, "Use w_{T+1} instead of the average");
  predict_cmd->callback(
      [&] { status = run_predict(predict_model, predict_data, predict_out, predict_current); });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score a model on a fully labeled file");
  std::string eval_model, eval_data;
  eval_cmd->add_option("--model-in", eval_model, "Model file")->required();
  eval_cmd->add_option("--data", eval_data, "Fully labeled LIBSVM file")->required();
  eval_cmd->callback([&] { status = run_eval(eval_model, eval_data); });

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "Report the convergence constants");
  double b_C = 1.0, b_Cp = 0.05, b_p = 2.0, b_sigma_f = 1.0;
  std::optional<double> b_A, b_eps, b_delta;
  bool b_recommend = false;
  bounds_cmd->add_option("--C", b_C, "Labeled-loss trade-off")->capture_default_str();
  bounds_cmd->add_option("--C-prime", b_Cp, "Smoothness trade-off")->capture_default_str();
  bounds_cmd->add_option("--p", b_p, "Smoothness exponent")->capture_default_str();
  bounds_cmd->add_option("--sigma-f", b_sigma_f, "Kernel output scale R")->capture_default_str();
  bounds_cmd->add_option("--A", b_A, "Loss gradient bound (default: R)");
  bounds_cmd->add_option("--epsilon", b_eps, "Target gap for the high-probability T0");
  bounds_cmd->add_option("--delta", b_delta, "Failure probability for T0")->needs("--epsilon");
  bounds_cmd->add_flag("--recommend", b_recommend, "Also print max C' and the sigma_f rule");
  bounds_cmd->callback([&] {
    const auto r = compute_bounds(b_C, b_Cp, b_p, b_sigma_f, b_A.value_or(b_sigma_f));
    print_bounds(r, std::cout);
    if (b_eps && r.G)
      std::cout << "T0=" << min_iterations(*b_eps, b_delta.value_or(0.05), *r.G) << "\n";
    if (b_recommend) {
      std::cout << "max_C_prime=" << max_cprime(b_p, b_C, b_sigma_f) << "\n";
      if (b_p >= 2.0) std::cout << "recommended_sigma_f=" << recommended_sigma_f(b_p, b_C, b_Cp) << "\n";
    }
    if (!r.condition_holds) {
      std::cerr << "condition violated\n";
      status = kExitViolated;
    }
  });

  // labelprop
  auto* lp_cmd = app.add_subcommand("labelprop", "Exact label propagation on an edge list");
  std::string lp_edges, lp_labels, lp_out;
  lp_cmd->add_option("--edges", lp_edges, "Edge list: `u v weight` per line, 1-based")->required();
  lp_cmd->add_option("--labels", lp_labels, "One of +1, -1, ? per vertex line")->required();
  lp_cmd->add_option("--out", lp_out, "Output file (default: stdout)");
  lp_cmd->callback([&] { status = run_labelprop(lp_edges, lp_labels, lp_out); });

  // graph export
  auto* graph_cmd = app.add_subcommand("graph", "Graph utilities");
  graph_cmd->require_subcommand(1);
  auto* export_cmd = graph_cmd->add_subcommand("export", "Write the edge list of a dataset");
  DataFlags export_data;
  KernelFlags export_kernel;
  GraphFlags export_graph;
  std::string export_out;
  std::uint64_t export_seed = 1;
  export_data.add(*export_cmd);
  export_kernel.add(*export_cmd);
  export_graph.add(*export_cmd);
  export_cmd->add_option("--seed", export_seed, "Seed for --hide-fraction")->capture_default_str();
  export_cmd->add_option("--out", export_out, "Output file (default: stdout)");
  export_cmd->callback([&] {
    const Dataset data = export_data.load(export_seed);
    const EdgeSet edges = build_graph(data, export_graph.spec(export_kernel.bandwidth()));
    if (edges.size() > kDefaultEdgeCap)
      throw Error(ErrorKind::EdgeEnumerationTooLarge, "graph too large to export");
    if (edges.empty()) std::cerr << "warning: no edges (labeled-labeled pairs are excluded)\n";
    std::ofstream file;
    if (!export_out.empty()) file = open_out(export_out);
    write_edges(export_out.empty() ? std::cout : file, edges);
  });

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a two-Gaussian dataset");
  std::size_t s_n = 550, s_dim = 50;
  double s_sep = 3.2897072539029444, s_hide = 0.0;
  std::uint64_t s_seed = 1;
  std::string s_out;
  synth_cmd->add_option("--n", s_n, "Points")->capture_default_str();
  synth_cmd->add_option("--dim", s_dim, "Dimensions")->capture_default_str();
  synth_cmd->add_option("--separation", s_sep, "Distance between the class means")
      ->capture_default_str();
  synth_cmd->add_option("--seed", s_seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--hide-fraction", s_hide, "Write this fraction of labels as 0")
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--out", s_out, "Output file (default: stdout)");
  synth_cmd->callback([&] {
    Dataset d = synth_two_gaussians(s_n, s_dim, s_sep, s_seed);
    if (s_hide > 0.0) d = hide_labels(d, s_hide, s_seed);
    std::ofstream file;
    if (!s_out.empty()) file = open_out(s_out);
    write_libsvm(s_out.empty() ? std::cout : file, d);
  });

  // converge
  auto* conv_cmd = app.add_subcommand("converge", "Measure (J(w_avg) - J*)·T over a T grid");
  DataFlags conv_data;
  KernelFlags conv_kernel;
  GraphFlags conv_graph;
  std::vector<std::string> conv_losses{"hinge", "logistic"};
  std::vector<double> conv_ps{1, 2, 3};
  std::vector<std::uint64_t> conv_T{500, 2000, 8000};
  std::uint64_t conv_seeds = 10, conv_data_seed = 1;
  double conv_C = 1.0;
  std::optional<double> conv_Cp;
  std::string conv_out;
  conv_data.add(*conv_cmd, false);
  conv_kernel.add(*conv_cmd);
  conv_graph.add(*conv_cmd);
  conv_cmd->add_option("--loss", conv_losses, "Losses to compare")->capture_default_str();
  conv_cmd->add_option("--p", conv_ps, "Smoothness exponents")->capture_default_str();
  conv_cmd->add_option("--T", conv_T, "Iteration grid")->capture_default_str();
  conv_cmd->add_option("--seeds", conv_seeds, "Training seeds 1..n")->capture_default_str();
  conv_cmd->add_option("--data-seed", conv_data_seed, "Seed for the data and label split")
      ->capture_default_str();
  conv_cmd->add_option("--C", conv_C, "Labeled-loss trade-off")->capture_default_str();
  conv_cmd->add_option("--C-prime", conv_Cp, "Smoothness trade-off (default: certified)");
  conv_cmd->add_option("--out", conv_out, "Long-format CSV output");
  conv_cmd->callback([&] {
    status = run_converge(conv_data, conv_kernel, conv_graph, conv_losses, conv_ps, conv_C,
                          conv_Cp, conv_T, conv_seeds, conv_data_seed, conv_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "gkm: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "gkm: " << e.what() << "\n";
    return kExitInvalid;
  }
  return status;
}
