#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "sgfl/design.hpp"
#include "sgfl/graph.hpp"
#include "sgfl/laplacian.hpp"

namespace sgfl::cli {

namespace {

std::optional<std::string> env_seed() {
  if (const char* s = std::getenv("SGFL_SEED"); s && *s) return std::string(s);
  return std::nullopt;
}

struct RunArgs {
  std::string config;
  std::string out;
  std::string seed;
  int threads = 0;
  std::vector<std::string> sets;
};

int cmd_run(const RunArgs& a) {
  std::vector<std::pair<std::string, std::string>> overrides;
  if (!a.config.empty()) {
    std::ifstream in(a.config, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + a.config + "'");
    std::ostringstream os;
    os << in.rdbuf();
    overrides = parse_key_values(os.str());
  }
  for (const std::string& s : a.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!a.seed.empty()) overrides.emplace_back("seed", a.seed);
  if (!a.out.empty()) overrides.emplace_back("output_dir", a.out);
  const ExperimentConfig cfg = resolve_config(overrides, env_seed());
  const RunOutput out = execute_preset(cfg, a.threads);
  write_run_output(cfg.str("output_dir"), cfg, out);
  std::cout << "wrote " << cfg.str("output_dir") << "/results.csv\n";
  return kExitOk;
}

struct DesignArgs {
  std::string target;
  std::string filter;
  int order = -1;
  double w = 0.5;
  std::string kind = "translated_normalized";
  std::string graph;
  std::optional<double> cutoff;
  double pole_factor = 1.2;
  int grid = kDefaultGridSize;
  std::string out;
};

// Scaling and spectral interval of the design operator. Without a graph only
// kinds whose interval does not depend on the graph are available.
LaplacianSpec design_spec(const DesignArgs& a, bool needs_scale) {
  LaplacianKind kind;
  try {
    kind = parse_laplacian_kind(a.kind);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!a.graph.empty()) {
    Graph g;
    try {
      g = load_graph(a.graph);
    } catch (const Error& e) {
      throw ConfigError("graph file '" + a.graph + "': " + e.what());
    }
    return build_laplacian(g, kind);
  }
  LaplacianSpec s;
  s.kind = kind;
  switch (kind) {
    case LaplacianKind::TranslatedNormalized:
      s.edge_scale = 1.0, s.shift = 1.0, s.lambda_min = -1.0, s.lambda_max = 1.0, s.rho = 1.0;
      return s;
    case LaplacianKind::Normalized:
      s.edge_scale = 1.0, s.shift = 0.0, s.lambda_min = 0.0, s.lambda_max = 2.0, s.rho = 2.0;
      return s;
    case LaplacianKind::ScaledTranslatedDiscrete:
      if (needs_scale) break;
      s.shift = 0.5, s.lambda_min = -0.5, s.lambda_max = 0.5, s.rho = 0.5;
      return s;
    default: break;
  }
  throw ConfigError("--kind " + a.kind + " needs --graph for this design");
}

int cmd_design(const DesignArgs& a) {
  std::string filter = a.filter;
  if (filter.empty()) filter = a.target == "tikhonov" ? "arma" : "fir";
  const bool tikhonov_arma = a.target == "tikhonov" && filter == "arma";
  const LaplacianSpec spec = design_spec(a, a.target == "tikhonov");
  const double range = std::max(std::abs(spec.lambda_min), std::abs(spec.lambda_max));

  int order = a.order;
  if (order < 0) order = tikhonov_arma ? 1 : 3;
  if (tikhonov_arma && order != 1) throw ConfigError("the Tikhonov ARMA design has order 1");
  if (filter == "arma" && order < 1) throw ConfigError("ARMA order must be >= 1");

  ResponseTarget target = ResponseTarget::function([](double) { return 1.0; }, spec.lambda_min,
                                                   spec.lambda_max);
  if (a.target == "tikhonov") {
    if (!(a.w > 0.0)) throw ConfigError("--w must be positive");
    target = ResponseTarget::tikhonov(a.w, spec.lambda_min, spec.lambda_max, spec.edge_scale, spec.shift);
  } else if (a.target == "lowpass") {
    const double c = a.cutoff.value_or(0.5 * (spec.lambda_min + spec.lambda_max));
    if (c < spec.lambda_min || c > spec.lambda_max) throw ConfigError("--cutoff outside the spectral interval");
    target = ResponseTarget::ideal_lowpass(c, spec.lambda_min, spec.lambda_max);
  }

  FilterCoeffs coeffs;
  if (tikhonov_arma) {
    coeffs = design_arma1_tikhonov(a.w, spec);
  } else if (filter == "fir") {
    coeffs = design_fir_ls(target, order, a.grid);
  } else {
    if (!(a.pole_factor > 1.0)) throw ConfigError("--pole-factor must exceed 1");
    coeffs = design_arma_ls(target, order, a.pole_factor * range, a.grid);
  }
  const double err = max_fit_error(coeffs, target, a.grid);

  std::vector<std::string> comments = {
      std::string(kToolName) + " " + kToolVersion + " design",
      "target = " + a.target,
      "kind = " + a.kind,
      "interval = [" + fmt(spec.lambda_min) + ", " + fmt(spec.lambda_max) + "]",
      "max_fit_error = " + fmt(err),
  };
  if (a.target == "tikhonov") comments.push_back("w = " + fmt(a.w));
  try {
    save_coeffs(a.out, coeffs, comments);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  std::cout << "max_fit_error = " << fmt(err) << "\n";
  return kExitOk;
}

struct GraphArgs {
  int n = 0;
  double radius = 0.15;
  std::string seed;
  double p = 1.0;
  std::string out;
};

int cmd_graph(const GraphArgs& a) {
  if (a.n < 1) throw ConfigError("--n must be >= 1");
  if (!(a.radius > 0.0) || a.radius > 1.0) throw ConfigError("--radius must be in (0, 1]");
  if (!(a.p > 0.0) || a.p > 1.0) throw ConfigError("--p must be in (0, 1]");
  std::string seed_text = a.seed;
  if (seed_text.empty()) seed_text = env_seed().value_or("1");
  std::uint64_t seed = 0;
  try {
    std::size_t used = 0;
    seed = std::stoull(seed_text, &used);
    if (used != seed_text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("invalid seed '" + seed_text + "'");
  }
  GeometricGraph gg = generate_geometric_graph(a.n, a.radius, seed);
  gg.graph.set_uniform_probability(a.p);
  const std::vector<std::string> comments = {
      std::string(kToolName) + " " + kToolVersion + " graph",
      "n = " + std::to_string(a.n),
      "radius = " + fmt(a.radius),
      "seed = " + std::to_string(seed),
      "p = " + fmt(a.p),
      std::string("connected = ") + (gg.connected ? "true" : "false"),
  };
  try {
    save_graph(a.out, gg.graph, comments);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  std::cout << "edges = " << gg.graph.n_edges() << " connected = " << (gg.connected ? "true" : "false")
            << "\n";
  return kExitOk;
}

}  // namespace

std::string run_help() {
  return R"(Config: 'key = value' lines, '#' comments. Keys:
  preset        fig1_variance_grid | table1_bounds | fig2_denoising | fig3to5_sparsify | custom
  n_nodes, radius, graph_seed, graph_file   graph (geometric in the unit square unless graph_file)
  seed, n_runs  Monte Carlo master seed and run count (SGFL_SEED is the seed fallback)
  p_grid, sigma_grid, K_list, filters (fir,arma,tikhonov), lap_kind, horizon (0 = steady state)
  pole_factor   ARMA pole radius over the spectral bound
  w, algorithms, inner_iters, exp_rate      denoising
  corrected     sparsification with compensated coefficients or operator
  coeffs_file   custom preset: run this filter instead of designing
  output_dir    where results.csv, summary.txt and meta.txt go

results.csv columns (after a '#' comment block):
  fig1_variance_grid, table1_bounds, custom:
    filter,order,p,sigma2,t,sigma_e,sigma_e_lo,sigma_e_hi,var_bar,var_bar_ci,bound,sqrt_bound,mean_abs_error
    sigma_e is the error std vs the expected-graph output with a 99% interval;
    var_bar is tr(S)/N of the output sample covariance; bound is empty when undefined.
  fig2_denoising:
    t,algorithm,sigma_e,sigma_e_lo,sigma_e_hi,w,sigma2
  fig3to5_sparsify:
    p,filter,order,kind,corrected,mean_abs_error,sigma_e,bound
    mean_abs_error is the node average of |mean error|.
Exit codes: 0 success, 2 configuration error, 3 numerical error.)";
}

int main(int argc, char** argv) {
  CLI::App app{"Graph filters on random time-varying graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run an experiment preset");
  run->add_option("--config", run_args.config, "config file");
  run->add_option("--out", run_args.out, "output directory (overrides output_dir)");
  run->add_option("--seed", run_args.seed, "master seed (overrides seed)");
  run->add_option("--threads", run_args.threads, "worker cap, 0 = all cores")->check(CLI::NonNegativeNumber);
  run->add_option("--set", run_args.sets, "key=value override, repeatable");
  run->footer(run_help());

  DesignArgs design_args;
  CLI::App* design = app.add_subcommand("design", "design filter coefficients");
  design->add_option("--target", design_args.target, "desired response")
      ->required()
      ->check(CLI::IsMember({"tikhonov", "lowpass", "constant1"}));
  design->add_option("--filter", design_args.filter, "fir or arma (default: arma for tikhonov)")
      ->check(CLI::IsMember({"fir", "arma"}));
  design->add_option("--order", design_args.order, "filter order K");
  design->add_option("--w", design_args.w, "Tikhonov weight");
  design->add_option("--kind", design_args.kind, "Laplacian kind of the operator");
  design->add_option("--graph", design_args.graph, "graph file, needed by discrete kinds");
  design->add_option("--cutoff", design_args.cutoff, "low-pass cut-off (default: interval midpoint)");
  design->add_option("--pole-factor", design_args.pole_factor, "ARMA pole radius over the spectral bound");
  design->add_option("--grid", design_args.grid, "fitting grid size")->check(CLI::PositiveNumber);
  design->add_option("--out", design_args.out, "coefficient file")->required();

  GraphArgs graph_args;
  CLI::App* graph = app.add_subcommand("graph", "generate a random geometric graph");
  graph->add_option("--n", graph_args.n, "number of nodes")->required();
  graph->add_option("--radius", graph_args.radius, "neighbour threshold as a fraction of the diagonal");
  graph->add_option("--seed", graph_args.seed, "placement seed (default SGFL_SEED, then 1)");
  graph->add_option("--p", graph_args.p, "edge activation probability");
  graph->add_option("--out", graph_args.out, "graph file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*design) return cmd_design(design_args);
    if (*graph) return cmd_graph(graph_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace sgfl::cli
