#ifndef SGFL_SIGNAL_HPP
#define SGFL_SIGNAL_HPP

#include <functional>
#include <memory>
#include <optional>

#include "sgfl/rng.hpp"
#include "sgfl/spectrum.hpp"
#include "sgfl/types.hpp"

namespace sgfl {

/// Factor C with C C^T = sigma for a symmetric positive semidefinite matrix.
/// Uses Cholesky when it succeeds, otherwise an eigen-based factor with
/// eigenvalues in [-1e-10 * scale, 0) clipped to zero. Throws if some
/// eigenvalue is more negative than that.
Matrix covariance_factor(const Matrix& sigma);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& sym);

/// Gaussian random graph process: independent draws over time with mean
/// x_bar_t and covariance Sigma_x[t], each either constant or time indexed.
class SignalProcess {
 public:
  using MeanFn = std::function<Vector(int)>;
  using CovarianceFn = std::function<Matrix(int)>;

  /// Stationary process with constant moments.
  SignalProcess(Vector mean, Matrix covariance);
  /// Time-varying mean, constant covariance.
  SignalProcess(MeanFn mean, Matrix covariance, int n);
  /// Fully time-varying moments.
  SignalProcess(MeanFn mean, CovarianceFn covariance, int n);

  /// Deterministic signal (zero covariance).
  static SignalProcess deterministic(Vector value);
  /// x_t = mean + n_t with n_t ~ N(0, sigma2 I).
  static SignalProcess white_noise(Vector mean, double sigma2);

  int size() const { return n_; }
  Vector mean(int t) const;
  Matrix covariance(int t) const;
  bool has_constant_covariance() const { return constant_cov_.has_value(); }

  /// Draw x_t = x_bar_t + C_t g with C_t a factor of Sigma_x[t], g ~ N(0, I).
  Vector sample(int t, Stream& rng) const;

 private:
  int n_ = 0;
  std::optional<Vector> constant_mean_;
  MeanFn mean_fn_;
  std::optional<Matrix> constant_cov_;
  CovarianceFn cov_fn_;
  // Cached factor of the constant covariance; empty means zero covariance.
  std::shared_ptr<const Matrix> factor_;
  bool zero_cov_ = false;
  std::optional<double> iid_sigma_;
};

/// Sum of eigenvectors whose eigenvalue lies strictly below `cutoff`.
/// With the spectrum of the normalized Laplacian and cutoff 1 this is the
/// low-pass mean used in the filtering experiments.
Vector synth_lowpass_mean(const Spectrum& spectrum, double cutoff = 1.0);

/// Signal with spectral coefficients exp(-rate * lambda_n).
Vector synth_exp_decay_mean(const Spectrum& spectrum, double rate);

}  // namespace sgfl

#endif  // SGFL_SIGNAL_HPP
