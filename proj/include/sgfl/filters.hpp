#ifndef SGFL_FILTERS_HPP
#define SGFL_FILTERS_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "sgfl/spectrum.hpp"
#include "sgfl/types.hpp"

namespace sgfl {

/// Polynomial graph filter: z = sum_k phi_k L^k x, k = 0..K.
struct FirCoeffs {
  std::vector<double> phi;

  int order() const { return static_cast<int>(phi.size()) - 1; }
};

/// Parallel bank of K first-order recursions
///   y^(k) <- psi^(k) L y^(k) + phi^(k) x,   z = sum_k y^(k).
/// Coefficients are complex so conjugate pole pairs can be represented; a
/// conjugate-closed bank produces real outputs.
struct ArmaCoeffs {
  std::vector<cplx> psi;
  std::vector<cplx> phi;

  int order() const { return static_cast<int>(psi.size()); }
  std::vector<cplx> poles() const;     ///< p_k = 1 / psi^(k)
  std::vector<cplx> residues() const;  ///< r_k = -phi^(k) / psi^(k)
  double max_abs_psi() const;
  /// |psi^(k)| * rho < 1 for every branch.
  bool is_stable(double rho) const;
  bool is_real() const;
};

using FilterCoeffs = std::variant<FirCoeffs, ArmaCoeffs>;

int filter_order(const FilterCoeffs& c);
std::string filter_name(const FilterCoeffs& c);  ///< "fir" or "arma"

/// Throws if the coefficient sets are malformed (empty FIR, K < 1 ARMA,
/// psi/phi length mismatch).
void validate(const FirCoeffs& c);
void validate(const ArmaCoeffs& c);

// ---------------------------------------------------------------------------
// Static graph application

/// sum_k phi_k L^k x by repeated products, never forming L^k.
Vector fir_apply_static(const FirCoeffs& c, const Matrix& lap, const Vector& x);

/// Closed-form ARMA steady state sum_k phi^(k) (I - psi^(k) L)^{-1} x (real part).
Vector arma_steady_state(const ArmaCoeffs& c, const Matrix& lap, const Vector& x);

/// Spectral-domain filtering Phi diag(h(lambda_n)) Phi^T x.
Vector spectral_filter(const Spectrum& spectrum, const std::function<cplx(double)>& response,
                       const Vector& x);

// ---------------------------------------------------------------------------
// Time-varying runners

/// Shift-register state of an FIR filter on a sequence of Laplacians.
/// partial[j-1] holds L_{t-1} ... L_{t-j} x_{t-j} (j = 1..K) and last_input
/// holds x_t, so that one more step with L_t and x_{t+1} yields
///   z_{t+1} = phi_0 x_{t+1} + sum_{k>=1} phi_k L_t ... L_{t-k+1} x_{t-k+1}.
/// Registers start at zero, so the first K outputs only contain the taps
/// whose inputs exist.
struct FirRunState {
  Vector last_input;
  std::vector<Vector> partial;
  int t = 0;
};

FirRunState make_fir_state(const FirCoeffs& c, const Vector& x0);

/// Advances with the realization L_t and the new input x_{t+1}; returns z_{t+1}.
Vector fir_step_time_varying(FirRunState& state, const FirCoeffs& c, const Matrix& lap_t,
                             const Vector& x_next);

/// Memory of a parallel ARMA bank.
struct ArmaRunState {
  std::vector<CVector> y;
  int t = 0;
  /// Set when the last step ran with |psi^(k)| * rho >= 1 for some branch.
  bool unstable_warning = false;
};

ArmaRunState make_arma_state(const ArmaCoeffs& c, int n);
ArmaRunState make_arma_state(const ArmaCoeffs& c, std::vector<CVector> y0);

/// y_{t+1}^(k) = psi^(k) L_t y_t^(k) + phi^(k) x_t; returns z_{t+1} =
/// sum_k y_{t+1}^(k) (real part). `rho`, when positive, is used to flag
/// instability on the state.
Vector arma_step(ArmaRunState& state, const ArmaCoeffs& c, const Matrix& lap_t,
                 const Vector& x_t, double rho = 0.0);

/// Bank output sum_k y^(k) as a complex vector.
CVector arma_output(const ArmaRunState& state);

/// Number of iterations treated as the ARMA steady state (20 K).
inline int arma_steady_iterations(int order) { return 20 * order; }

// ---------------------------------------------------------------------------
// Frequency responses

cplx eval_response_fir(const FirCoeffs& c, double lambda);
/// sum_k r_k / (lambda - p_k); throws "pole on evaluation point".
cplx eval_response_arma(const ArmaCoeffs& c, double lambda);
cplx eval_response(const FilterCoeffs& c, double lambda);

/// Joint time-vertex response at temporal frequency z (|z| = 1) and graph
/// frequency lambda.
///   FIR:  sum_k phi_k (lambda / z)^k
///   ARMA: sum_k phi^(k) z^{-1} / (1 - psi^(k) lambda z^{-1})
cplx eval_2d_response_fir(const FirCoeffs& c, cplx z, double lambda);
cplx eval_2d_response_arma(const ArmaCoeffs& c, cplx z, double lambda);
cplx eval_2d_response(const FilterCoeffs& c, cplx z, double lambda);

// ---------------------------------------------------------------------------
// Deterministic mean recursions on the expected graph

using MeanSequence = std::function<Vector(int)>;

/// z_bar_{t+1} = sum_k phi_k L_bar^k x_bar_{t-k+1} for t = 0..t_end-1; entry
/// t-1 of the result is z_bar_t. Taps whose input time is negative are
/// absent, matching the zero-initialised time-varying runner.
std::vector<Vector> mean_recursion_fir(const FirCoeffs& c, const Matrix& lap_bar,
                                       const MeanSequence& mean_seq, int t_end);

struct ArmaMeanTrajectory {
  std::vector<Vector> z;  ///< z[t-1] = z_bar_t, t = 1..t_end
  bool unstable_warning = false;
};

/// y_bar_{t+1} = (Psi kron L_bar) y_bar_t + phi kron x_bar_t from y_bar_0
/// (zero when y0 is empty); z_bar_{t+1} = sum_k y_bar_{t+1}^(k).
ArmaMeanTrajectory mean_recursion_arma(const ArmaCoeffs& c, const Matrix& lap_bar,
                                       const MeanSequence& mean_seq, int t_end,
                                       double rho = 0.0, std::vector<CVector> y0 = {});

/// One branch update y <- psi (L y) + phi x shared by every ARMA code path so
/// the stochastic runner, mean recursion and moment propagation agree bit
/// for bit.
void arma_branch_update(CVector& y, cplx psi, cplx phi, const Matrix& lap, const Vector& x);

// ---------------------------------------------------------------------------
// Text serialization: header "<variant> K", then "phi k value" (FIR) or
// "psi k value" / "phi k value" (ARMA) lines. Complex ARMA coefficients with
// nonzero imaginary part are written "psi k re im". 17 significant digits.

void write_coeffs(std::ostream& out, const FilterCoeffs& c,
                  const std::vector<std::string>& comment_lines = {});
FilterCoeffs read_coeffs(std::istream& in);
void save_coeffs(const std::string& path, const FilterCoeffs& c,
                 const std::vector<std::string>& comment_lines = {});
FilterCoeffs load_coeffs(const std::string& path);

}  // namespace sgfl

#endif  // SGFL_FILTERS_HPP
