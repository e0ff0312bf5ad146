#include "sgfl/signal.hpp"

#include <cmath>

namespace sgfl {

double min_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Matrix covariance_factor(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols()) throw Error("covariance must be square");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error("covariance must be symmetric");
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma);
  Vector values = solver.eigenvalues();
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values(k) < -1e-10 * scale)
      throw Error("covariance is not positive semidefinite (eigenvalue " +
                  std::to_string(values(k)) + ")");
    values(k) = std::sqrt(std::max(values(k), 0.0));
  }
  return solver.eigenvectors() * values.asDiagonal();
}

SignalProcess::SignalProcess(Vector mean, Matrix covariance)
    : n_(static_cast<int>(mean.size())), constant_mean_(std::move(mean)) {
  if (covariance.rows() != n_ || covariance.cols() != n_)
    throw Error("covariance dimension does not match mean");
  zero_cov_ = covariance.isZero(0.0);
  if (!zero_cov_) factor_ = std::make_shared<const Matrix>(covariance_factor(covariance));
  constant_cov_ = std::move(covariance);
}

SignalProcess::SignalProcess(MeanFn mean, Matrix covariance, int n)
    : SignalProcess(Vector::Zero(n), std::move(covariance)) {
  constant_mean_.reset();
  mean_fn_ = std::move(mean);
}

SignalProcess::SignalProcess(MeanFn mean, CovarianceFn covariance, int n)
    : n_(n), mean_fn_(std::move(mean)), cov_fn_(std::move(covariance)) {
  if (n < 1) throw Error("signal dimension must be positive");
}

SignalProcess SignalProcess::deterministic(Vector value) {
  const Eigen::Index n = value.size();
  return SignalProcess(std::move(value), Matrix::Zero(n, n));
}

SignalProcess SignalProcess::white_noise(Vector mean, double sigma2) {
  if (sigma2 < 0.0) throw Error("noise variance must be nonnegative");
  const Eigen::Index n = mean.size();
  SignalProcess proc(std::move(mean), sigma2 * Matrix::Identity(n, n));
  if (sigma2 > 0.0) proc.iid_sigma_ = std::sqrt(sigma2);
  return proc;
}

Vector SignalProcess::mean(int t) const {
  if (t < 0) throw Error("time index must be nonnegative");
  if (constant_mean_) return *constant_mean_;
  Vector m = mean_fn_(t);
  if (m.size() != n_) throw Error("mean function returned wrong dimension");
  return m;
}

Matrix SignalProcess::covariance(int t) const {
  if (t < 0) throw Error("time index must be nonnegative");
  if (constant_cov_) return *constant_cov_;
  Matrix c = cov_fn_(t);
  if (c.rows() != n_ || c.cols() != n_) throw Error("covariance function returned wrong dimension");
  return c;
}

Vector SignalProcess::sample(int t, Stream& rng) const {
  Vector x = mean(t);
  if (iid_sigma_) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += *iid_sigma_ * rng.normal();
    return x;
  }
  if (constant_cov_ && zero_cov_) return x;
  Vector g(n_);
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
  if (factor_) {
    x.noalias() += *factor_ * g;
  } else {
    x.noalias() += covariance_factor(covariance(t)) * g;
  }
  return x;
}

Vector synth_lowpass_mean(const Spectrum& spectrum, double cutoff) {
  Vector coeffs(spectrum.size());
  for (int k = 0; k < spectrum.size(); ++k)
    coeffs(k) = spectrum.eigenvalues(k) < cutoff ? 1.0 : 0.0;
  return inverse_gft(spectrum, coeffs);
}

Vector synth_exp_decay_mean(const Spectrum& spectrum, double rate) {
  if (!(rate > 0.0)) throw Error("decay rate must be positive");
  Vector coeffs = (-rate * spectrum.eigenvalues.array()).exp().matrix();
  return inverse_gft(spectrum, coeffs);
}

}  // namespace sgfl
