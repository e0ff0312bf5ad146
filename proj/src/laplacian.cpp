#include "sgfl/laplacian.hpp"

#include <cmath>

#include "sgfl/spectrum.hpp"

namespace sgfl {

std::string_view to_string(LaplacianKind kind) {
  switch (kind) {
    case LaplacianKind::Discrete: return "discrete";
    case LaplacianKind::Normalized: return "normalized";
    case LaplacianKind::TranslatedDiscrete: return "translated_discrete";
    case LaplacianKind::TranslatedNormalized: return "translated_normalized";
    case LaplacianKind::ScaledTranslatedDiscrete: return "scaled_translated_discrete";
  }
  return "unknown";
}

LaplacianKind parse_laplacian_kind(std::string_view name) {
  for (LaplacianKind k :
       {LaplacianKind::Discrete, LaplacianKind::Normalized, LaplacianKind::TranslatedDiscrete,
        LaplacianKind::TranslatedNormalized, LaplacianKind::ScaledTranslatedDiscrete}) {
    if (to_string(k) == name) return k;
  }
  throw Error("unknown Laplacian kind '" + std::string(name) + "'");
}

bool is_discrete_family(LaplacianKind kind) {
  return kind == LaplacianKind::Discrete || kind == LaplacianKind::TranslatedDiscrete ||
         kind == LaplacianKind::ScaledTranslatedDiscrete;
}

namespace {

void discrete_base_into(Matrix& out, const Graph& g, const std::vector<char>* active) {
  out.setZero(g.n_nodes(), g.n_nodes());
  const auto& edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (active && !(*active)[k]) continue;
    const Edge& e = edges[k];
    out(e.i, e.i) += e.weight;
    out(e.j, e.j) += e.weight;
    out(e.i, e.j) -= e.weight;
    out(e.j, e.i) -= e.weight;
  }
}

void normalized_base_into(Matrix& out, const Graph& g, const std::vector<char>* active) {
  const int n = g.n_nodes();
  out.setZero(n, n);
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  const auto& edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (active && !(*active)[k]) continue;
    degree[edges[k].i] += edges[k].weight;
    degree[edges[k].j] += edges[k].weight;
  }
  for (int i = 0; i < n; ++i)
    if (degree[i] > 0.0) out(i, i) = 1.0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (active && !(*active)[k]) continue;
    const Edge& e = edges[k];
    const double v = e.weight / std::sqrt(degree[e.i] * degree[e.j]);
    out(e.i, e.j) -= v;
    out(e.j, e.i) -= v;
  }
}

void apply_affine(Matrix& m, double scale, double shift) {
  if (scale != 1.0) m *= scale;
  if (shift != 0.0) m.diagonal().array() -= shift;
}


struct Incident {
  double weight;
  double p;
};

// E[f(w0 + S)] where S is the active weight of the edges in `others`.
double expect_over_subsets(const std::vector<Incident>& others, double w0,
                           double (*f)(double), int max_degree) {
  bool equal = true;
  for (const Incident& e : others) equal = equal && e.weight == others.front().weight;
  if (others.empty()) return f(w0);
  if (equal) {
    // Poisson-binomial distribution of the active count.
    std::vector<double> prob(others.size() + 1, 0.0);
    prob[0] = 1.0;
    for (std::size_t k = 0; k < others.size(); ++k) {
      const double p = others[k].p;
      for (std::size_t c = k + 1; c-- > 0;) {
        prob[c + 1] += prob[c] * p;
        prob[c] *= 1.0 - p;
      }
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < prob.size(); ++c)
      sum += prob[c] * f(w0 + static_cast<double>(c) * others.front().weight);
    return sum;
  }
  if (static_cast<int>(others.size()) > max_degree)
    throw Error("node degree too large for enumerated expectation");
  double sum = 0.0;
  const std::uint64_t count = std::uint64_t{1} << others.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double prob = 1.0, w = w0;
    for (std::size_t k = 0; k < others.size(); ++k) {
      if (mask >> k & 1U) {
        prob *= others[k].p;
        w += others[k].weight;
      } else {
        prob *= 1.0 - others[k].p;
      }
    }
    sum += prob * f(w);
  }
  return sum;
}

double inv_sqrt(double v) { return 1.0 / std::sqrt(v); }

Matrix enumerated_normalized(const Graph& g, const LaplacianSpec& reference, int max_degree) {
  const int n = g.n_nodes();
  const auto& edges = g.edges();
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    incident[edges[k].i].push_back(static_cast<int>(k));
    incident[edges[k].j].push_back(static_cast<int>(k));
  }
  // E[1 / sqrt(d_v)] given that edge k is active, for endpoint v.
  auto conditional = [&](int v, int k) {
    std::vector<Incident> others;
    for (int m : incident[v])
      if (m != k) others.push_back({edges[m].weight, edges[m].p});
    return expect_over_subsets(others, edges[k].weight, inv_sqrt, max_degree);
  };
  Matrix out = Matrix::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    double none = 1.0;
    for (int k : incident[v]) none *= 1.0 - edges[k].p;
    out(v, v) = 1.0 - none;
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    const double v = e.p * e.weight * conditional(e.i, static_cast<int>(k)) *
                     conditional(e.j, static_cast<int>(k));
    out(e.i, e.j) -= v;
    out(e.j, e.i) -= v;
  }
  apply_affine(out, reference.edge_scale, reference.shift);
  return out;
}

}  // namespace

LaplacianSpec build_laplacian(const Graph& g, LaplacianKind kind) {
  if (g.n_edges() < 1) throw Error("Laplacian needs at least one edge");
  LaplacianSpec spec;
  spec.kind = kind;
  const bool discrete = is_discrete_family(kind);
  if (!discrete) {
    for (double d : g.degrees())
      if (d <= 0.0) throw Error("isolated node");
  }

  Matrix base;
  if (discrete) {
    discrete_base_into(base, g, nullptr);
    spec.discrete_lambda_max = symmetric_eigen(base).eigenvalues.maxCoeff();
  } else {
    normalized_base_into(base, g, nullptr);
  }
  const double lmax = spec.discrete_lambda_max;

  switch (kind) {
    case LaplacianKind::Discrete:
      spec.lambda_min = 0.0;
      spec.lambda_max = lmax;
      break;
    case LaplacianKind::Normalized:
      spec.lambda_min = 0.0;
      spec.lambda_max = 2.0;
      break;
    case LaplacianKind::TranslatedDiscrete:
      spec.shift = lmax / 2.0;
      spec.lambda_min = -lmax / 2.0;
      spec.lambda_max = lmax / 2.0;
      break;
    case LaplacianKind::TranslatedNormalized:
      spec.shift = 1.0;
      spec.lambda_min = -1.0;
      spec.lambda_max = 1.0;
      break;
    case LaplacianKind::ScaledTranslatedDiscrete:
      spec.edge_scale = 1.0 / lmax;
      spec.shift = 0.5;
      spec.lambda_min = -0.5;
      spec.lambda_max = 0.5;
      break;
  }
  spec.rho = std::max(std::abs(spec.lambda_min), std::abs(spec.lambda_max));
  apply_affine(base, spec.edge_scale, spec.shift);
  spec.matrix = std::move(base);
  return spec;
}

void realization_laplacian_into(Matrix& out, const LaplacianSpec& reference, const Graph& g,
                                const std::vector<char>& active) {
  if (active.size() != g.edges().size()) throw Error("edge mask size mismatch");
  if (is_discrete_family(reference.kind))
    discrete_base_into(out, g, &active);
  else
    normalized_base_into(out, g, &active);
  apply_affine(out, reference.edge_scale, reference.shift);
}

Matrix realization_laplacian(const LaplacianSpec& reference, const Graph& g,
                             const std::vector<char>& active) {
  Matrix out;
  realization_laplacian_into(out, reference, g, active);
  return out;
}

Matrix expected_laplacian(const Graph& g, const LaplacianSpec& reference,
                          const ExpectationMode& mode) {
  if (std::holds_alternative<AnalyticExpectation>(mode)) {
    if (!is_discrete_family(reference.kind))
      throw Error("no closed form for the expected normalized Laplacian");
    Matrix out = Matrix::Zero(g.n_nodes(), g.n_nodes());
    for (const Edge& e : g.edges()) {
      const double v = e.p * e.weight;
      out(e.i, e.i) += v;
      out(e.j, e.j) += v;
      out(e.i, e.j) -= v;
      out(e.j, e.i) -= v;
    }
    apply_affine(out, reference.edge_scale, reference.shift);
    return out;
  }
  if (const auto* en = std::get_if<EnumeratedExpectation>(&mode)) {
    if (is_discrete_family(reference.kind))
      return expected_laplacian(g, reference, AnalyticExpectation{});
    return enumerated_normalized(g, reference, en->max_degree);
  }
  const auto& mc = std::get<MonteCarloExpectation>(mode);
  if (mc.n_samples < 1) throw Error("Monte Carlo expectation needs at least one sample");
  bool deterministic = true;
  for (const Edge& e : g.edges()) deterministic = deterministic && e.p >= 1.0;
  if (deterministic)
    return realization_laplacian(reference, g, std::vector<char>(g.edges().size(), 1));

  Matrix sum = Matrix::Zero(g.n_nodes(), g.n_nodes());
  Matrix realization;
  for (int s = 0; s < mc.n_samples; ++s) {
    Stream rng(mc.seed, static_cast<std::uint64_t>(s));
    realization_laplacian_into(realization, reference, g, sample_edge_mask(g, rng));
    sum += realization;
  }
  return sum / static_cast<double>(mc.n_samples);
}

Matrix expected_laplacian(const Graph& g, LaplacianKind kind, const ExpectationMode& mode) {
  return expected_laplacian(g, build_laplacian(g, kind), mode);
}

}  // namespace sgfl
