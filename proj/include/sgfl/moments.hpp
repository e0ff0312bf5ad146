#ifndef SGFL_MOMENTS_HPP
#define SGFL_MOMENTS_HPP

#include <optional>
#include <vector>

#include "sgfl/filters.hpp"
#include "sgfl/graph.hpp"
#include "sgfl/laplacian.hpp"
#include "sgfl/types.hpp"

namespace sgfl {

// ---------------------------------------------------------------------------
// Variance bounds. var_bar_x is tr(Sigma_x)/N, mean_norm_sq_over_N is
// ||x_bar||^2 / N; the bounds are on tr(Sigma_z)/N.

/// (sum_k |phi_k| rho^k)^2 (var_bar_x + ||x_bar||^2/N).
double fir_variance_bound(const FilterCoeffs& c, double rho, double var_bar_x,
                          double mean_norm_sq_over_N);

/// K ||phi||^2 / (1 - rho |psi_max|)^2 (var_bar_x + ||x_bar||^2/N), where
/// psi_max is the branch coefficient of largest magnitude. Throws
/// "bound undefined (unstable)" when rho |psi_max| >= 1.
double arma_variance_bound(const FilterCoeffs& c, double rho, double var_bar_x,
                           double mean_norm_sq_over_N);

/// Dispatches on the filter variant.
double variance_bound(const FilterCoeffs& c, double rho, double var_bar_x,
                      double mean_norm_sq_over_N);

/// Bound for a sparsified run with activation probability p on a
/// deterministic input (already rescaled coefficients are *not* expected;
/// pass the original ones):
///   FIR:  (sum_k |phi_k| (rho/p)^k)^2 ||x||^2/N
///   ARMA: K ||phi||^2 ||x||^2 / (N (1 - rho |psi_max| / p)^2)
/// The ARMA bound is empty when rho |psi_max| / p >= 1.
std::optional<double> sparsified_bound(const FilterCoeffs& c, double rho, double p,
                                       double x_norm_sq_over_N);

// ---------------------------------------------------------------------------
// Independent edge fluctuations of a discrete-family RES Laplacian:
// L_t - L_bar = sum_e (b_e - p_e) a w_e d_e d_e^T with d_e = e_i - e_j.

struct EdgeFluctuation {
  int i = 0;
  int j = 0;
  double variance = 0.0;  ///< (a w_e)^2 p_e (1 - p_e)
};

/// Throws "closed form unavailable" for normalized kinds.
std::vector<EdgeFluctuation> edge_fluctuations(const Graph& g, const LaplacianSpec& lap);

/// E[(L_t - L_bar) R (L_t - L_bar)] = sum_e var_e (d_e^T R d_e) d_e d_e^T.
CMatrix edge_sandwich(const std::vector<EdgeFluctuation>& edges, const CMatrix& r);

// ---------------------------------------------------------------------------
// Stacked ARMA system y_{t+1} = A_t y_t + B x_t, z_t = C y_t with
// A_t = Psi kron L_t, B = phi kron I_N, C = 1^T kron I_N.

struct StackedArmaSystem {
  ArmaCoeffs coeffs;
  Matrix lap_bar;
  std::vector<EdgeFluctuation> edges;
  bool closed_form = false;  ///< edge data available

  int n() const { return static_cast<int>(lap_bar.rows()); }
  int order() const { return coeffs.order(); }
  CMatrix a_bar() const;
  CMatrix b() const;
  Matrix c() const;
};

/// Discrete-family system with the analytic expected Laplacian.
StackedArmaSystem make_stacked_system(const ArmaCoeffs& c, const Graph& g,
                                      const LaplacianSpec& lap);
/// Mean-only system on a given expected Laplacian (no closed-form
/// fluctuation term).
StackedArmaSystem make_stacked_system(const ArmaCoeffs& c, Matrix lap_bar);

struct MomentState {
  CVector y_bar;  ///< E[y_t], NK
  CMatrix r_y;    ///< E[y_t y_t^H], NK x NK, Hermitian
  int t = 0;
};

MomentState make_moment_state(const StackedArmaSystem& sys);

/// y_bar_{t+1} = A_bar y_bar_t + B x_bar_t, branch by branch with the same
/// arithmetic as the time-varying runner. R_y is left untouched.
MomentState mean_step(const StackedArmaSystem& sys, const MomentState& state,
                      const Vector& x_bar_t);

/// z_bar = C y_bar (real part).
Vector output_mean(const StackedArmaSystem& sys, const MomentState& state);

/// E[A_tilde R A_tilde^H] with A_tilde = Psi kron (L_t - L_bar).
CMatrix exact_E_AtildeRAtildeT(const StackedArmaSystem& sys, const CMatrix& r);

struct CovarianceStep {
  MomentState state;
  Matrix sigma_z;  ///< Sigma_z[t+1]
};

/// Advances (y_bar, R_y) by one step with input moments (x_bar_t, Sigma_x[t])
/// and returns Sigma_z[t+1]. Throws NumericalError if Sigma_y loses
/// positive semidefiniteness beyond -1e-8 times its scale.
CovarianceStep covariance_step(const StackedArmaSystem& sys, const MomentState& state,
                               const Vector& x_bar_t, const Matrix& sigma_x_t);

/// Covariance of y from a moment state.
CMatrix state_covariance(const MomentState& state);

// ---------------------------------------------------------------------------
// Exact FIR output moments on a RES graph. The state vector is
// v_t = [x_t; P_1; ...; P_K] with P_j = L_{t-1} ... L_{t-j} x_{t-j}, the
// registers of the time-varying runner.

struct FirMomentSystem {
  FirCoeffs coeffs;
  Matrix lap_bar;
  std::vector<EdgeFluctuation> edges;

  int n() const { return static_cast<int>(lap_bar.rows()); }
  int order() const { return coeffs.order(); }
};

FirMomentSystem make_fir_moment_system(const FirCoeffs& c, const Graph& g,
                                       const LaplacianSpec& lap);

struct FirMomentState {
  Vector mean;    ///< E[v_t]
  Matrix second;  ///< E[v_t v_t^T]
  int t = 0;
};

FirMomentState make_fir_moment_state(const FirMomentSystem& sys, const Vector& x_bar_0,
                                     const Matrix& sigma_x_0);

struct FirMomentStep {
  FirMomentState state;
  Vector z_mean;
  Matrix sigma_z;
};

/// One runner step with new input moments (x_bar_{t+1}, Sigma_x[t+1]).
FirMomentStep fir_moment_step(const FirMomentSystem& sys, const FirMomentState& state,
                              const Vector& x_bar_next, const Matrix& sigma_x_next);

// ---------------------------------------------------------------------------
// 2-Dirichlet form x^T L x of a discrete Laplacian on a RES graph.

struct DirichletStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// Analytic: mean sum_e p_e w_e (x_i - x_j)^2, variance
/// sum_e p_e (1 - p_e) w_e^2 (x_i - x_j)^4. Monte Carlo: sample mean and
/// unbiased sample variance over RES draws, draw s from Stream(seed, s).
DirichletStats dirichlet_stats(const Graph& g, const Vector& x, const ExpectationMode& mode);

}  // namespace sgfl

#endif  // SGFL_MOMENTS_HPP
