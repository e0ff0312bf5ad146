#include "sgfl/sparsify.hpp"

#include <cmath>

namespace sgfl {

namespace {

void check_p(double p) {
  if (!(p > 0.0) || p > 1.0) throw Error("activation probability must be in (0, 1]");
}

Graph with_probability(const Graph& g, double p) {
  Graph out = g;
  out.set_uniform_probability(p);
  return out;
}

template <class StepFn>
std::vector<Vector> run_filter(const FilterCoeffs& c, const Vector& x, int horizon, StepFn next_op) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(std::max(horizon, 0)));
  if (const auto* fir = std::get_if<FirCoeffs>(&c)) {
    FirRunState state = make_fir_state(*fir, x);
    for (int t = 0; t < horizon; ++t) out.push_back(fir_step_time_varying(state, *fir, next_op(), x));
  } else {
    const auto& arma = std::get<ArmaCoeffs>(c);
    ArmaRunState state = make_arma_state(arma, static_cast<int>(x.size()));
    for (int t = 0; t < horizon; ++t) out.push_back(arma_step(state, arma, next_op(), x));
  }
  return out;
}

}  // namespace

void validate(const SparsifyConfig& cfg) {
  check_p(cfg.p);
  if (cfg.corrected && !is_discrete_family(cfg.lap_kind))
    throw Error("corrected sparsification needs a discrete-family Laplacian");
}

FilterCoeffs rescale_fir(const FilterCoeffs& c, double p) {
  check_p(p);
  const auto* fir = std::get_if<FirCoeffs>(&c);
  if (!fir) throw Error("rescale_fir needs an FIR filter");
  FirCoeffs out = *fir;
  for (std::size_t k = 0; k < out.phi.size(); ++k) out.phi[k] *= std::pow(p, -static_cast<double>(k));
  return out;
}

FilterCoeffs rescale_arma(const FilterCoeffs& c, double p) {
  check_p(p);
  const auto* arma = std::get_if<ArmaCoeffs>(&c);
  if (!arma) throw Error("rescale_arma needs an ARMA filter");
  ArmaCoeffs out = *arma;
  for (cplx& psi : out.psi) psi /= p;
  return out;
}

std::vector<Vector> sparsify_reference(const FilterCoeffs& c, const Graph& g, LaplacianKind kind,
                                       const Vector& x, int horizon) {
  if (x.size() != g.n_nodes()) throw Error("signal dimension does not match graph");
  const LaplacianSpec lap = build_laplacian(g, kind);
  return run_filter(c, x, horizon, [&]() -> const Matrix& { return lap.matrix; });
}

std::vector<Vector> run_sparsified(const FilterCoeffs& c, const Graph& g, const Vector& x,
                                   const SparsifyConfig& cfg, int horizon, Stream& rng) {
  validate(cfg);
  if (x.size() != g.n_nodes()) throw Error("signal dimension does not match graph");
  const Graph thinned = with_probability(g, cfg.p);
  LaplacianSpec op_spec = build_laplacian(g, cfg.lap_kind);
  FilterCoeffs coeffs = c;
  if (cfg.corrected) {
    if (op_spec.shift == 0.0) {
      coeffs = std::holds_alternative<FirCoeffs>(c) ? rescale_fir(c, cfg.p) : rescale_arma(c, cfg.p);
    } else {
      op_spec.edge_scale /= cfg.p;
    }
  }
  Matrix lap_t;
  return run_filter(coeffs, x, horizon, [&]() -> const Matrix& {
    realization_laplacian_into(lap_t, op_spec, thinned, sample_edge_mask(thinned, rng));
    return lap_t;
  });
}

SparsifyReport sparsify_report(const std::vector<Vector>& outputs, const Vector& reference,
                               double p) {
  check_p(p);
  if (outputs.empty()) throw Error("no trajectories");
  SparsifyReport r;
  r.mean_error = Vector::Zero(reference.size());
  double sq = 0.0;
  for (const Vector& z : outputs) {
    if (z.size() != reference.size()) throw Error("trajectory dimension mismatch");
    const Vector e = z - reference;
    r.mean_error += e;
    sq += e.squaredNorm();
  }
  const double runs = static_cast<double>(outputs.size());
  r.mean_error /= runs;
  r.sigma_e = std::sqrt(sq / (runs * reference.size()));
  r.cost_saving = 1.0 - p;
  return r;
}

}  // namespace sgfl
