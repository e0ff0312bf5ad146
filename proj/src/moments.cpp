#include "sgfl/moments.hpp"

#include <cmath>

namespace sgfl {

namespace {

double fir_rho_sum(const FirCoeffs& c, double rho) {
  double sum = 0.0, power = 1.0;
  for (double phi : c.phi) {
    sum += std::abs(phi) * power;
    power *= rho;
  }
  return sum;
}

double phi_norm_sq(const ArmaCoeffs& c) {
  double s = 0.0;
  for (cplx phi : c.phi) s += std::norm(phi);
  return s;
}

// Adds sum_e coeff var_e (d_e^T R d_e) d_e d_e^T into out.
template <class Mat>
void add_edge_sandwich(Mat& out, const std::vector<EdgeFluctuation>& edges, const Mat& r,
                       typename Mat::Scalar coeff) {
  for (const EdgeFluctuation& e : edges) {
    const auto s = coeff * e.variance * (r(e.i, e.i) - r(e.i, e.j) - r(e.j, e.i) + r(e.j, e.j));
    out(e.i, e.i) += s;
    out(e.j, e.j) += s;
    out(e.i, e.j) -= s;
    out(e.j, e.i) -= s;
  }
}

void check_psd(const CMatrix& sigma, double scale, const char* what) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sigma, Eigen::EigenvaluesOnly);
  const double lowest = solver.eigenvalues().minCoeff();
  if (lowest < -1e-8 * scale)
    throw NumericalError(std::string(what) + " lost positive semidefiniteness (eigenvalue " +
                         std::to_string(lowest) + ")");
}

}  // namespace

double fir_variance_bound(const FilterCoeffs& c, double rho, double var_bar_x,
                          double mean_norm_sq_over_N) {
  const auto* fir = std::get_if<FirCoeffs>(&c);
  if (!fir) throw Error("fir_variance_bound needs an FIR filter");
  const double s = fir_rho_sum(*fir, rho);
  return s * s * (var_bar_x + mean_norm_sq_over_N);
}

double arma_variance_bound(const FilterCoeffs& c, double rho, double var_bar_x,
                           double mean_norm_sq_over_N) {
  const auto* arma = std::get_if<ArmaCoeffs>(&c);
  if (!arma) throw Error("arma_variance_bound needs an ARMA filter");
  const double margin = 1.0 - rho * arma->max_abs_psi();
  if (!(margin > 0.0)) throw Error("bound undefined (unstable)");
  return arma->order() * phi_norm_sq(*arma) / (margin * margin) *
         (var_bar_x + mean_norm_sq_over_N);
}

double variance_bound(const FilterCoeffs& c, double rho, double var_bar_x,
                      double mean_norm_sq_over_N) {
  if (std::holds_alternative<FirCoeffs>(c))
    return fir_variance_bound(c, rho, var_bar_x, mean_norm_sq_over_N);
  return arma_variance_bound(c, rho, var_bar_x, mean_norm_sq_over_N);
}

std::optional<double> sparsified_bound(const FilterCoeffs& c, double rho, double p,
                                       double x_norm_sq_over_N) {
  if (!(p > 0.0) || p > 1.0) throw Error("activation probability must be in (0, 1]");
  if (const auto* fir = std::get_if<FirCoeffs>(&c)) {
    const double s = fir_rho_sum(*fir, rho / p);
    return s * s * x_norm_sq_over_N;
  }
  const auto& arma = std::get<ArmaCoeffs>(c);
  const double margin = 1.0 - rho * arma.max_abs_psi() / p;
  if (!(margin > 0.0)) return std::nullopt;
  return arma.order() * phi_norm_sq(arma) * x_norm_sq_over_N / (margin * margin);
}

std::vector<EdgeFluctuation> edge_fluctuations(const Graph& g, const LaplacianSpec& lap) {
  if (!is_discrete_family(lap.kind)) throw Error("closed form unavailable");
  std::vector<EdgeFluctuation> out;
  for (const Edge& e : g.edges()) {
    if (e.p >= 1.0) continue;
    const double w = lap.edge_scale * e.weight;
    out.push_back({e.i, e.j, w * w * e.p * (1.0 - e.p)});
  }
  return out;
}

CMatrix edge_sandwich(const std::vector<EdgeFluctuation>& edges, const CMatrix& r) {
  CMatrix out = CMatrix::Zero(r.rows(), r.cols());
  add_edge_sandwich(out, edges, r, cplx(1.0));
  return out;
}

CMatrix StackedArmaSystem::a_bar() const {
  const int nn = n(), kk = order();
  CMatrix a = CMatrix::Zero(nn * kk, nn * kk);
  for (int k = 0; k < kk; ++k) a.block(k * nn, k * nn, nn, nn) = coeffs.psi[k] * lap_bar.cast<cplx>();
  return a;
}

CMatrix StackedArmaSystem::b() const {
  const int nn = n(), kk = order();
  CMatrix out = CMatrix::Zero(nn * kk, nn);
  for (int k = 0; k < kk; ++k)
    out.block(k * nn, 0, nn, nn) = coeffs.phi[k] * CMatrix::Identity(nn, nn);
  return out;
}

Matrix StackedArmaSystem::c() const {
  const int nn = n(), kk = order();
  Matrix out(nn, nn * kk);
  for (int k = 0; k < kk; ++k) out.block(0, k * nn, nn, nn) = Matrix::Identity(nn, nn);
  return out;
}

StackedArmaSystem make_stacked_system(const ArmaCoeffs& c, const Graph& g,
                                      const LaplacianSpec& lap) {
  validate(c);
  StackedArmaSystem s;
  s.coeffs = c;
  s.edges = edge_fluctuations(g, lap);
  s.lap_bar = expected_laplacian(g, lap, AnalyticExpectation{});
  s.closed_form = true;
  return s;
}

StackedArmaSystem make_stacked_system(const ArmaCoeffs& c, Matrix lap_bar) {
  validate(c);
  if (lap_bar.rows() != lap_bar.cols()) throw Error("expected Laplacian must be square");
  StackedArmaSystem s;
  s.coeffs = c;
  s.lap_bar = std::move(lap_bar);
  return s;
}

MomentState make_moment_state(const StackedArmaSystem& sys) {
  const int nk = sys.n() * sys.order();
  return MomentState{CVector::Zero(nk), CMatrix::Zero(nk, nk), 0};
}

MomentState mean_step(const StackedArmaSystem& sys, const MomentState& state,
                      const Vector& x_bar_t) {
  const int nn = sys.n();
  if (x_bar_t.size() != nn) throw Error("input mean has wrong dimension");
  MomentState next = state;
  for (int k = 0; k < sys.order(); ++k) {
    CVector branch = state.y_bar.segment(k * nn, nn);
    arma_branch_update(branch, sys.coeffs.psi[k], sys.coeffs.phi[k], sys.lap_bar, x_bar_t);
    next.y_bar.segment(k * nn, nn) = branch;
  }
  ++next.t;
  return next;
}

Vector output_mean(const StackedArmaSystem& sys, const MomentState& state) {
  const int nn = sys.n();
  CVector z = state.y_bar.segment(0, nn);
  for (int k = 1; k < sys.order(); ++k) z += state.y_bar.segment(k * nn, nn);
  return z.real();
}

CMatrix exact_E_AtildeRAtildeT(const StackedArmaSystem& sys, const CMatrix& r) {
  if (!sys.closed_form) throw Error("closed form unavailable");
  const int nn = sys.n(), kk = sys.order();
  if (r.rows() != nn * kk || r.cols() != nn * kk) throw Error("R has wrong dimension");
  CMatrix out = CMatrix::Zero(nn * kk, nn * kk);
  for (int k1 = 0; k1 < kk; ++k1) {
    for (int k2 = 0; k2 < kk; ++k2) {
      const cplx coeff = sys.coeffs.psi[k1] * std::conj(sys.coeffs.psi[k2]);
      CMatrix blk = CMatrix::Zero(nn, nn);
      add_edge_sandwich(blk, sys.edges, CMatrix(r.block(k1 * nn, k2 * nn, nn, nn)), coeff);
      out.block(k1 * nn, k2 * nn, nn, nn) = blk;
    }
  }
  return out;
}

CMatrix state_covariance(const MomentState& state) {
  return state.r_y - state.y_bar * state.y_bar.adjoint();
}

CovarianceStep covariance_step(const StackedArmaSystem& sys, const MomentState& state,
                               const Vector& x_bar_t, const Matrix& sigma_x_t) {
  const int nn = sys.n(), kk = sys.order();
  if (sigma_x_t.rows() != nn || sigma_x_t.cols() != nn)
    throw Error("input covariance has wrong dimension");
  const CMatrix lap = sys.lap_bar.cast<cplx>();
  const CVector xb = x_bar_t.cast<cplx>();
  const CMatrix second_x = (sigma_x_t + x_bar_t * x_bar_t.transpose()).cast<cplx>();
  const CMatrix fluct = sys.closed_form ? exact_E_AtildeRAtildeT(sys, state.r_y)
                                        : CMatrix::Zero(nn * kk, nn * kk);

  std::vector<CVector> ly(static_cast<std::size_t>(kk));
  for (int k = 0; k < kk; ++k) ly[k] = lap * state.y_bar.segment(k * nn, nn);

  CovarianceStep out;
  out.state = mean_step(sys, state, x_bar_t);
  CMatrix& r = out.state.r_y;
  for (int k1 = 0; k1 < kk; ++k1) {
    const cplx psi1 = sys.coeffs.psi[k1], phi1 = sys.coeffs.phi[k1];
    for (int k2 = 0; k2 < kk; ++k2) {
      const cplx psi2c = std::conj(sys.coeffs.psi[k2]), phi2c = std::conj(sys.coeffs.phi[k2]);
      const CMatrix r12 = state.r_y.block(k1 * nn, k2 * nn, nn, nn);
      CMatrix blk = (psi1 * psi2c) * (lap * r12 * lap);
      blk += (psi1 * phi2c) * (ly[k1] * xb.transpose());
      blk += (phi1 * psi2c) * (xb * ly[k2].adjoint());
      blk += (phi1 * phi2c) * second_x;
      blk += fluct.block(k1 * nn, k2 * nn, nn, nn);
      r.block(k1 * nn, k2 * nn, nn, nn) = blk;
    }
  }
  r = 0.5 * (r + r.adjoint()).eval();

  const CMatrix sigma_y = state_covariance(out.state);
  check_psd(sigma_y, std::max(std::abs(r.trace().real()), 1e-300), "state covariance");

  CMatrix sz = CMatrix::Zero(nn, nn);
  for (int k1 = 0; k1 < kk; ++k1)
    for (int k2 = 0; k2 < kk; ++k2) sz += sigma_y.block(k1 * nn, k2 * nn, nn, nn);
  out.sigma_z = sz.real();
  return out;
}

FirMomentSystem make_fir_moment_system(const FirCoeffs& c, const Graph& g,
                                       const LaplacianSpec& lap) {
  validate(c);
  FirMomentSystem s;
  s.coeffs = c;
  s.edges = edge_fluctuations(g, lap);
  s.lap_bar = expected_laplacian(g, lap, AnalyticExpectation{});
  return s;
}

FirMomentState make_fir_moment_state(const FirMomentSystem& sys, const Vector& x_bar_0,
                                     const Matrix& sigma_x_0) {
  const int nn = sys.n(), blocks = sys.order() + 1;
  if (x_bar_0.size() != nn || sigma_x_0.rows() != nn || sigma_x_0.cols() != nn)
    throw Error("input moments have wrong dimension");
  FirMomentState s;
  s.mean = Vector::Zero(nn * blocks);
  s.second = Matrix::Zero(nn * blocks, nn * blocks);
  s.mean.head(nn) = x_bar_0;
  s.second.topLeftCorner(nn, nn) = sigma_x_0 + x_bar_0 * x_bar_0.transpose();
  return s;
}

FirMomentStep fir_moment_step(const FirMomentSystem& sys, const FirMomentState& state,
                              const Vector& x_bar_next, const Matrix& sigma_x_next) {
  const int nn = sys.n(), kk = sys.order(), blocks = kk + 1;
  if (x_bar_next.size() != nn || sigma_x_next.rows() != nn || sigma_x_next.cols() != nn)
    throw Error("input moments have wrong dimension");
  const Matrix& lap = sys.lap_bar;

  FirMomentStep out;
  FirMomentState& next = out.state;
  next.t = state.t + 1;
  next.mean = Vector::Zero(nn * blocks);
  next.second = Matrix::Zero(nn * blocks, nn * blocks);
  next.mean.head(nn) = x_bar_next;
  next.second.topLeftCorner(nn, nn) = sigma_x_next + x_bar_next * x_bar_next.transpose();

  // New register j (block j) is L_t times old block j - 1.
  for (int j1 = 1; j1 <= kk; ++j1) {
    next.mean.segment(j1 * nn, nn) = lap * state.mean.segment((j1 - 1) * nn, nn);
  }
  for (int j1 = 1; j1 <= kk; ++j1) {
    for (int j2 = 1; j2 <= kk; ++j2) {
      const Matrix u = state.second.block((j1 - 1) * nn, (j2 - 1) * nn, nn, nn);
      Matrix blk = lap * u * lap;
      add_edge_sandwich(blk, sys.edges, u, 1.0);
      next.second.block(j1 * nn, j2 * nn, nn, nn) = blk;
    }
    const Vector m = next.mean.segment(j1 * nn, nn);
    next.second.block(0, j1 * nn, nn, nn) = x_bar_next * m.transpose();
    next.second.block(j1 * nn, 0, nn, nn) = m * x_bar_next.transpose();
  }

  out.z_mean = Vector::Zero(nn);
  for (int a = 0; a < blocks; ++a) out.z_mean += sys.coeffs.phi[a] * next.mean.segment(a * nn, nn);
  out.sigma_z = Matrix::Zero(nn, nn);
  for (int a = 0; a < blocks; ++a) {
    for (int b = 0; b < blocks; ++b) {
      const double coeff = sys.coeffs.phi[a] * sys.coeffs.phi[b];
      if (coeff == 0.0) continue;
      out.sigma_z += coeff * (next.second.block(a * nn, b * nn, nn, nn) -
                              next.mean.segment(a * nn, nn) * next.mean.segment(b * nn, nn).transpose());
    }
  }
  return out;
}

DirichletStats dirichlet_stats(const Graph& g, const Vector& x, const ExpectationMode& mode) {
  if (x.size() != g.n_nodes()) throw Error("signal dimension does not match graph");
  DirichletStats out;
  if (!std::holds_alternative<MonteCarloExpectation>(mode)) {
    for (const Edge& e : g.edges()) {
      const double d2 = (x(e.i) - x(e.j)) * (x(e.i) - x(e.j));
      out.mean += e.p * e.weight * d2;
      out.variance += e.p * (1.0 - e.p) * e.weight * e.weight * d2 * d2;
    }
    return out;
  }
  const auto& mc = std::get<MonteCarloExpectation>(mode);
  if (mc.n_samples < 2) throw Error("Monte Carlo Dirichlet statistics need >= 2 samples");
  double mean = 0.0, m2 = 0.0;
  for (int s = 0; s < mc.n_samples; ++s) {
    Stream rng(mc.seed, static_cast<std::uint64_t>(s));
    const std::vector<char> mask = sample_edge_mask(g, rng);
    double value = 0.0;
    for (int k = 0; k < g.n_edges(); ++k) {
      if (!mask[k]) continue;
      const Edge& e = g.edges()[k];
      value += e.weight * (x(e.i) - x(e.j)) * (x(e.i) - x(e.j));
    }
    const double delta = value - mean;
    mean += delta / (s + 1);
    m2 += delta * (value - mean);
  }
  out.mean = mean;
  out.variance = m2 / (mc.n_samples - 1);
  return out;
}

}  // namespace sgfl
