#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "sgfl/denoise.hpp"
#include "sgfl/design.hpp"
#include "sgfl/moments.hpp"
#include "sgfl/montecarlo.hpp"
#include "sgfl/sparsify.hpp"
#include "sgfl/spectrum.hpp"

namespace sgfl::cli {

namespace {

std::string short_fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string("cannot read ") + what + " '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct GraphSetup {
  Graph graph;
  std::string text;
  std::string origin;
};

// A generated graph must be connected (normalized kinds reject isolated
// nodes); successive seeds are tried from graph_seed on.
GraphSetup make_graph(const ExperimentConfig& cfg) {
  GraphSetup out;
  if (const std::string& path = cfg.str("graph_file"); !path.empty()) {
    out.text = read_file(path, "graph file");
    std::istringstream in(out.text);
    try {
      out.graph = read_graph(in);
    } catch (const Error& e) {
      throw ConfigError("graph file '" + path + "': " + e.what());
    }
    out.origin = "graph = file " + path;
    return out;
  }
  const int n = cfg.integer("n_nodes");
  const double radius = cfg.real("radius");
  constexpr int kMaxTries = 1000;
  std::uint64_t s = std::stoull(cfg.str("graph_seed"));
  for (int attempt = 0; attempt < kMaxTries; ++attempt, ++s) {
    GeometricGraph gg = generate_geometric_graph(n, radius, s);
    if (!gg.connected) continue;
    out.graph = std::move(gg.graph);
    std::ostringstream os;
    write_graph(os, out.graph);
    out.text = os.str();
    out.origin = "graph = geometric n=" + std::to_string(n) + " radius=" + fmt(radius) +
                 " seed=" + std::to_string(s);
    return out;
  }
  throw ConfigError("no connected geometric graph found for n_nodes and radius; increase 'radius'");
}

struct NamedFilter {
  std::string name;
  int order = 0;
  FilterCoeffs coeffs;
};

int steady_horizon(const FilterCoeffs& c) {
  const int k = filter_order(c);
  return std::holds_alternative<FirCoeffs>(c) ? std::max(k, 1) : arma_steady_iterations(k);
}

int horizon_for(const ExperimentConfig& cfg, const FilterCoeffs& c) {
  const int h = cfg.integer("horizon");
  return h > 0 ? h : steady_horizon(c);
}

std::vector<NamedFilter> design_filters(const ExperimentConfig& cfg, const LaplacianSpec& spec,
                                        double cutoff) {
  std::vector<NamedFilter> out;
  if (const std::string& path = cfg.str("coeffs_file"); !path.empty()) {
    const std::string text = read_file(path, "coefficient file");
    std::istringstream in(text);
    FilterCoeffs c;
    try {
      c = read_coeffs(in);
    } catch (const Error& e) {
      throw ConfigError("coefficient file '" + path + "': " + e.what());
    }
    out.push_back({filter_name(c), filter_order(c), c});
    return out;
  }
  const ResponseTarget target = ResponseTarget::ideal_lowpass(cutoff, spec.lambda_min, spec.lambda_max);
  const double range = std::max(std::abs(spec.lambda_min), std::abs(spec.lambda_max));
  for (const std::string& f : cfg.words("filters")) {
    if (f == "tikhonov") {
      if (spec.kind != LaplacianKind::TranslatedNormalized &&
          spec.kind != LaplacianKind::ScaledTranslatedDiscrete)
        throw ConfigError("filter 'tikhonov' needs lap_kind translated_normalized or scaled_translated_discrete");
      out.push_back({"tikhonov", 1, design_arma1_tikhonov(cfg.real("w"), spec)});
      continue;
    }
    for (int k : cfg.integers("K_list")) {
      if (f == "fir") {
        out.push_back({"fir", k, design_fir_ls(target, k)});
      } else {
        if (k < 1) throw ConfigError("ARMA filters need K >= 1 in 'K_list'");
        out.push_back({"arma", k, design_arma_ls(target, k, cfg.real("pole_factor") * range)});
      }
    }
  }
  return out;
}

double lowpass_cutoff(const LaplacianSpec& spec, const Spectrum& spectrum) {
  // Normalized kinds split the spectrum at lambda_n = 1; discrete kinds have
  // no natural split, so the median eigenvalue is used.
  if (!is_discrete_family(spec.kind)) return spec.edge_scale * 1.0 - spec.shift;
  return median_eigenvalue(spectrum);
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

// ---------------------------------------------------------------------------

RunOutput run_filter_grid(const ExperimentConfig& cfg, int threads) {
  RunOutput out;
  const GraphSetup gs = make_graph(cfg);
  out.inputs["graph"] = gs.text;
  out.notes.push_back(gs.origin);
  const LaplacianKind kind = parse_laplacian_kind(cfg.str("lap_kind"));
  const LaplacianSpec spec = build_laplacian(gs.graph, kind);
  const Spectrum spectrum = symmetric_eigen(spec.matrix);
  const double cutoff = lowpass_cutoff(spec, spectrum);
  const Vector x_bar = synth_lowpass_mean(spectrum, cutoff);
  const double n = static_cast<double>(x_bar.size());
  const double mean_sq = x_bar.squaredNorm() / n;
  const std::vector<NamedFilter> filters = design_filters(cfg, spec, cutoff);
  if (!cfg.str("coeffs_file").empty())
    out.inputs["coeffs"] = read_file(cfg.str("coeffs_file"), "coefficient file");
  out.notes.push_back("cutoff = " + fmt(cutoff));
  out.notes.push_back("rho = " + fmt(spec.rho));

  out.csv_header = {"filter", "order", "p", "sigma2", "t", "sigma_e", "sigma_e_lo", "sigma_e_hi",
                    "var_bar", "var_bar_ci", "bound", "sqrt_bound", "mean_abs_error"};
  struct Cell {
    std::string filter;
    int order;
    double p, sigma2, sigma_e, sqrt_bound;
    bool has_bound;
  };
  std::vector<Cell> cells;
  for (const NamedFilter& f : filters) {
    const int horizon = horizon_for(cfg, f.coeffs);
    for (double p : cfg.reals("p_grid")) {
      for (double s2 : cfg.reals("sigma_grid")) {
        Scenario s;
        s.graph = gs.graph;
        s.graph.set_uniform_probability(p);
        s.lap_kind = kind;
        s.coeffs = f.coeffs;
        s.signal = SignalProcess::white_noise(x_bar, s2);
        s.horizon = horizon;
        s.n_runs = cfg.integer("n_runs");
        s.master_seed = cfg.seed();
        s.reference = ReferenceKind::ExpectedGraph;
        const auto trajs = run_scenario(s, threads);
        const ErrorStats es = error_stats(trajs, scenario_reference(s));
        const OutputMoments om = output_moments(trajs);
        std::optional<double> bound;
        try {
          bound = variance_bound(f.coeffs, spec.rho, s2, mean_sq);
        } catch (const NumericalError&) {
          throw;
        } catch (const Error&) {
          // undefined for unstable designs
        }
        const double sqrt_bound = bound ? std::sqrt(*bound) : 0.0;
        out.csv_rows.push_back({f.name, std::to_string(f.order), fmt(p), fmt(s2),
                                std::to_string(horizon), fmt(es.sigma_e[0]), fmt(es.sigma_e_lo[0]),
                                fmt(es.sigma_e_hi[0]), fmt(om.var_bar[0]), fmt(om.var_bar_ci[0]),
                                opt_fmt(bound), bound ? fmt(sqrt_bound) : std::string(),
                                fmt(es.mean_error[0].cwiseAbs().mean())});
        cells.push_back({f.name, f.order, p, s2, es.sigma_e[0], sqrt_bound,
                         bound.has_value()});
      }
    }
  }

  if (cfg.preset() == "table1_bounds") {
    out.summary.push_back("square roots of the variance bounds and empirical sigma_e");
    out.summary.push_back("filter order sigma2 sqrt_bound p sigma_e");
  } else {
    out.summary.push_back("empirical average error standard deviation sigma_e vs the expected-graph output");
    out.summary.push_back("filter order sigma2 sqrt_bound p sigma_e");
  }
  for (const Cell& c : cells) {
    out.summary.push_back(c.filter + " " + std::to_string(c.order) + " " + short_fmt(c.sigma2) + " " +
                          (c.has_bound ? short_fmt(c.sqrt_bound) : std::string("undefined")) + " " +
                          short_fmt(c.p) + " " + short_fmt(c.sigma_e));
  }
  return out;
}

// ---------------------------------------------------------------------------

DenoiseAlgorithm parse_algorithm(const std::string& name) {
  for (DenoiseAlgorithm a : {DenoiseAlgorithm::LA, DenoiseAlgorithm::DAD, DenoiseAlgorithm::JDMIA,
                             DenoiseAlgorithm::JDMIOA, DenoiseAlgorithm::JDMOA})
    if (name == to_string(a)) return a;
  throw ConfigError("unknown algorithm '" + name + "'");
}

RunOutput run_denoising(const ExperimentConfig& cfg, int threads) {
  RunOutput out;
  GraphSetup gs = make_graph(cfg);
  gs.graph.set_uniform_probability(1.0);
  out.inputs["graph"] = gs.text;
  out.notes.push_back(gs.origin);
  const LaplacianKind kind = parse_laplacian_kind(cfg.str("lap_kind"));
  if (kind != LaplacianKind::TranslatedNormalized && kind != LaplacianKind::ScaledTranslatedDiscrete)
    throw ConfigError("fig2_denoising needs lap_kind translated_normalized or scaled_translated_discrete");
  const LaplacianSpec spec = build_laplacian(gs.graph, kind);
  const int n = spec.size();
  // Regularizer: the untranslated base of the operator.
  const Matrix base = (spec.matrix + spec.shift * Matrix::Identity(n, n)) / spec.edge_scale;
  const Vector u = synth_exp_decay_mean(symmetric_eigen(base), cfg.real("exp_rate"));
  const double w = cfg.real("w");
  const DenoiseSetup setup = make_denoise_setup(spec, w, cfg.integer("inner_iters"));
  const int horizon = std::max(cfg.integer("horizon"), 1);
  std::vector<DenoiseAlgorithm> algs;
  for (const std::string& a : cfg.words("algorithms")) algs.push_back(parse_algorithm(a));
  const int n_runs = cfg.integer("n_runs");
  const std::size_t steps = static_cast<std::size_t>(horizon) * algs.size();

  out.csv_header = {"t", "algorithm", "sigma_e", "sigma_e_lo", "sigma_e_hi", "w", "sigma2"};
  out.summary.push_back("error standard deviation of the denoised signal vs the clean signal");
  out.summary.push_back("sigma2 algorithm t sigma_e");
  for (double s2 : cfg.reals("sigma_grid")) {
    const SignalProcess noisy = SignalProcess::white_noise(u, s2);
    // One run records ||y_t - u||^2 / N for every algorithm and time. All
    // algorithms see the same noise.
    const auto trajs = run_parallel(n_runs, cfg.seed(), threads, [&](int, Stream& rng) {
      Trajectory tr;
      tr.times.assign(1, 0);
      Vector q(static_cast<Eigen::Index>(steps));
      for (std::size_t a = 0; a < algs.size(); ++a) {
        Stream draw = rng;
        DenoiseState st = make_denoise_state(setup);
        for (int t = 1; t <= horizon; ++t) {
          const Vector y = denoise_step(algs[a], st, setup, noisy.sample(t - 1, draw));
          q(static_cast<Eigen::Index>(a * horizon + t - 1)) = (y - u).squaredNorm() / n;
        }
      }
      tr.z.push_back(std::move(q));
      return tr;
    });
    for (std::size_t a = 0; a < algs.size(); ++a) {
      for (int t = 1; t <= horizon; ++t) {
        std::vector<double> q(trajs.size());
        for (std::size_t r = 0; r < trajs.size(); ++r)
          q[r] = trajs[r].z[0](static_cast<Eigen::Index>(a * horizon + t - 1));
        const SigmaEstimate est = sigma_from_run_errors(q);
        out.csv_rows.push_back({std::to_string(t), to_string(algs[a]), fmt(est.sigma_e), fmt(est.lo),
                                fmt(est.hi), fmt(w), fmt(s2)});
        if (t == 1 || t == 10 || t == horizon || (t % 100 == 0))
          out.summary.push_back(short_fmt(s2) + " " + to_string(algs[a]) + " " + std::to_string(t) +
                                " " + short_fmt(est.sigma_e));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

RunOutput run_sparsify(const ExperimentConfig& cfg, int threads) {
  RunOutput out;
  GraphSetup gs = make_graph(cfg);
  gs.graph.set_uniform_probability(1.0);
  out.inputs["graph"] = gs.text;
  out.notes.push_back(gs.origin);
  const LaplacianKind kind = parse_laplacian_kind(cfg.str("lap_kind"));
  const bool corrected = cfg.boolean("corrected");
  if (corrected && !is_discrete_family(kind))
    throw ConfigError("'corrected' needs a discrete-family lap_kind");
  const LaplacianSpec spec = build_laplacian(gs.graph, kind);
  const Spectrum spectrum = symmetric_eigen(spec.matrix);
  // White unit spectrum; low-pass cut-off at half the bandwidth.
  const Vector x = inverse_gft(spectrum, Vector::Ones(spectrum.size()));
  const double cutoff = median_eigenvalue(spectrum);
  const double x_sq = x.squaredNorm() / static_cast<double>(x.size());
  const std::vector<NamedFilter> filters = design_filters(cfg, spec, cutoff);
  if (!cfg.str("coeffs_file").empty())
    out.inputs["coeffs"] = read_file(cfg.str("coeffs_file"), "coefficient file");
  out.notes.push_back("cutoff = " + fmt(cutoff));

  out.csv_header = {"p", "filter", "order", "kind", "corrected", "mean_abs_error", "sigma_e", "bound"};
  out.summary.push_back("sparsified vs full-graph filter output");
  out.summary.push_back("filter order p cost_saving mean_abs_error sigma_e");
  for (const NamedFilter& f : filters) {
    const int horizon = horizon_for(cfg, f.coeffs);
    const Vector reference = sparsify_reference(f.coeffs, gs.graph, kind, x, horizon).back();
    for (double p : cfg.reals("p_grid")) {
      const SparsifyConfig sc{p, corrected, kind};
      const auto trajs = run_parallel(cfg.integer("n_runs"), cfg.seed(), threads, [&](int, Stream& rng) {
        Trajectory tr;
        tr.times = {horizon};
        tr.z.push_back(run_sparsified(f.coeffs, gs.graph, x, sc, horizon, rng).back());
        return tr;
      });
      std::vector<Vector> last;
      last.reserve(trajs.size());
      for (const Trajectory& tr : trajs) last.push_back(tr.z[0]);
      const SparsifyReport rep = sparsify_report(last, reference, p);
      // The closed-form bounds cover coefficient rescaling only.
      std::optional<double> bound;
      if (corrected && spec.shift == 0.0) bound = sparsified_bound(f.coeffs, spec.rho, p, x_sq);
      const double mae = rep.mean_error.cwiseAbs().mean();
      out.csv_rows.push_back({fmt(p), f.name, std::to_string(f.order), std::string(to_string(kind)),
                              corrected ? "true" : "false", fmt(mae), fmt(rep.sigma_e), opt_fmt(bound)});
      out.summary.push_back(f.name + " " + std::to_string(f.order) + " " + short_fmt(p) + " " +
                            short_fmt(rep.cost_saving) + " " + short_fmt(mae) + " " +
                            short_fmt(rep.sigma_e));
    }
  }
  return out;
}

std::vector<std::string> comment_block(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back(std::string("# ") + kToolName + " " + kToolVersion);
  lines.push_back("# seed = " + cfg.str("seed"));
  // output_dir is left out so relocated runs stay byte-identical.
  for (const auto& [k, v] : cfg.values)
    if (k != "seed" && k != "output_dir") lines.push_back("# " + k + " = " + v);
  return lines;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
}

}  // namespace

RunOutput execute_preset(const ExperimentConfig& cfg, int threads) {
  const std::string& preset = cfg.preset();
  RunOutput out;
  if (preset == "fig2_denoising") {
    out = run_denoising(cfg, threads);
  } else if (preset == "fig3to5_sparsify") {
    out = run_sparsify(cfg, threads);
  } else {
    out = run_filter_grid(cfg, threads);
  }
  std::string config_text;
  for (const std::string& l : cfg.lines()) config_text += l + "\n";
  out.inputs["config"] = config_text;
  return out;
}

void write_run_output(const std::string& dir, const ExperimentConfig& cfg, const RunOutput& out) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const std::filesystem::path root(dir);
  std::string head;
  for (const std::string& l : comment_block(cfg)) head += l + "\n";

  std::string csv = head + csv_line(out.csv_header);
  for (const auto& row : out.csv_rows) csv += csv_line(row);
  write_text(root / "results.csv", csv);

  std::string summary = head;
  for (const std::string& l : out.summary) summary += l + "\n";
  write_text(root / "summary.txt", summary);

  std::string meta = head;
  meta += std::string("tool = ") + kToolName + " " + kToolVersion + "\n";
  meta += "seed = " + cfg.str("seed") + "\n";
  for (const std::string& l : cfg.lines()) meta += "config." + l + "\n";
  for (const std::string& n : out.notes) meta += "resolved." + n + "\n";
  std::string bundle;
  for (const auto& [name, content] : out.inputs) {
    meta += "input." + name + ".sha1 = " + git_blob_sha1(content) + "\n";
    bundle += name + "\n" + git_blob_sha1(content) + "\n";
  }
  meta += "inputs.sha1 = " + git_blob_sha1(bundle) + "\n";
  write_text(root / "meta.txt", meta);
}

}  // namespace sgfl::cli
