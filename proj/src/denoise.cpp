#include "sgfl/denoise.hpp"

#include "sgfl/design.hpp"

namespace sgfl {

namespace {

// x_bar_t = ((t - 1) x_bar_{t-1} + x_t) / t
void running_average(Vector& avg, int t, const Vector& x) {
  avg = ((t - 1) * avg + x) / static_cast<double>(t);
}

void check_input(const DenoiseState& state, const Vector& x) {
  if (x.size() != state.input_mean.size()) throw Error("sample has wrong dimension");
}

}  // namespace

Vector tikhonov_closed_form(const Matrix& lap, double w, const Vector& x) {
  if (!(w > 0.0)) throw Error("Tikhonov weight must be positive");
  if (lap.rows() != lap.cols() || lap.rows() != x.size()) throw Error("dimension mismatch");
  const Matrix a = Matrix::Identity(lap.rows(), lap.cols()) + w * lap;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError("I + wL is not positive definite");
  return llt.solve(x);
}

DenoiseSetup make_denoise_setup(const LaplacianSpec& lap, double w, int inner_iters) {
  if (inner_iters < 0) throw Error("inner iteration count must be nonnegative");
  DenoiseSetup s;
  s.coeffs = design_arma1_tikhonov(w, lap);
  s.op = lap.matrix;
  s.rho = lap.rho;
  s.inner_iters = inner_iters;
  return s;
}

DenoiseState make_denoise_state(const DenoiseSetup& setup) {
  const auto n = setup.op.rows();
  DenoiseState s;
  s.input_mean = Vector::Zero(n);
  s.output_mean = Vector::Zero(n);
  s.filter = make_arma_state(setup.coeffs, static_cast<int>(n));
  return s;
}

Vector dad_step(DenoiseState& state, const DenoiseSetup& setup, const Vector& x_t) {
  check_input(state, x_t);
  ++state.t;
  running_average(state.input_mean, state.t, x_t);
  ArmaRunState inner = make_arma_state(setup.coeffs, static_cast<int>(x_t.size()));
  Vector y = Vector::Zero(x_t.size());
  for (int it = 0; it < setup.inner_iters; ++it)
    y = arma_step(inner, setup.coeffs, setup.op, state.input_mean);
  state.output_mean = y;
  return y;
}

Vector jdmioa_step(DenoiseState& state, const DenoiseSetup& setup, const Vector& x_t) {
  check_input(state, x_t);
  ++state.t;
  running_average(state.input_mean, state.t, x_t);
  const Vector y = arma_step(state.filter, setup.coeffs, setup.op, state.input_mean);
  running_average(state.output_mean, state.t, y);
  return state.output_mean;
}

Vector jdmia_step(DenoiseState& state, const DenoiseSetup& setup, const Vector& x_t) {
  check_input(state, x_t);
  ++state.t;
  running_average(state.input_mean, state.t, x_t);
  state.output_mean = arma_step(state.filter, setup.coeffs, setup.op, state.input_mean);
  return state.output_mean;
}

Vector jdmoa_step(DenoiseState& state, const DenoiseSetup& setup, const Vector& x_t) {
  check_input(state, x_t);
  ++state.t;
  running_average(state.input_mean, state.t, x_t);
  const Vector y = arma_step(state.filter, setup.coeffs, setup.op, x_t);
  running_average(state.output_mean, state.t, y);
  return state.output_mean;
}

Vector la_step(DenoiseState& state, const Vector& x_t) {
  check_input(state, x_t);
  ++state.t;
  running_average(state.input_mean, state.t, x_t);
  state.output_mean = state.input_mean;
  return state.output_mean;
}

const char* to_string(DenoiseAlgorithm a) {
  switch (a) {
    case DenoiseAlgorithm::LA: return "la";
    case DenoiseAlgorithm::DAD: return "dad";
    case DenoiseAlgorithm::JDMIA: return "jdmia";
    case DenoiseAlgorithm::JDMIOA: return "jdmioa";
    case DenoiseAlgorithm::JDMOA: return "jdmoa";
  }
  return "?";
}

Vector denoise_step(DenoiseAlgorithm a, DenoiseState& state, const DenoiseSetup& setup,
                    const Vector& x_t) {
  switch (a) {
    case DenoiseAlgorithm::LA: return la_step(state, x_t);
    case DenoiseAlgorithm::DAD: return dad_step(state, setup, x_t);
    case DenoiseAlgorithm::JDMIA: return jdmia_step(state, setup, x_t);
    case DenoiseAlgorithm::JDMIOA: return jdmioa_step(state, setup, x_t);
    case DenoiseAlgorithm::JDMOA: return jdmoa_step(state, setup, x_t);
  }
  throw Error("unknown denoising algorithm");
}

}  // namespace sgfl
