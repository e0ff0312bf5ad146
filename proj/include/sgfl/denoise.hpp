#ifndef SGFL_DENOISE_HPP
#define SGFL_DENOISE_HPP

#include "sgfl/filters.hpp"
#include "sgfl/laplacian.hpp"
#include "sgfl/types.hpp"

namespace sgfl {

/// Dense solve of (I + w L) u = x for an untranslated (PSD) Laplacian.
Vector tikhonov_closed_form(const Matrix& lap, double w, const Vector& x);

/// Shared configuration of the online denoisers: the ARMA_1 Tikhonov filter
/// run on the translated operator of `lap`.
struct DenoiseSetup {
  Matrix op;          ///< translated Laplacian the recursion runs on
  ArmaCoeffs coeffs;  ///< ARMA_1 from design_arma1_tikhonov
  double rho = 1.0;
  int inner_iters = 100;  ///< DAD iterations per sample
};

/// `lap` must be a translated kind accepted by design_arma1_tikhonov.
DenoiseSetup make_denoise_setup(const LaplacianSpec& lap, double w, int inner_iters = 100);

struct DenoiseState {
  int t = 0;
  Vector input_mean;   ///< running average of the raw samples
  ArmaRunState filter;
  Vector output_mean;  ///< running average of the filter outputs
};

DenoiseState make_denoise_state(const DenoiseSetup& setup);

/// Disjoint average and denoise: update the input average, then run a fresh
/// ARMA_1 from zero for inner_iters iterations on it.
Vector dad_step(DenoiseState& state, const DenoiseSetup& setup, const Vector& x_t);
/// One filter step on the running input average, output averaged.
Vector jdmioa_step(DenoiseState& state, const DenoiseSetup& setup, const Vector& x_t);
/// One filter step on the running input average.
Vector jdmia_step(DenoiseState& state, const DenoiseSetup& setup, const Vector& x_t);
/// One filter step on the raw sample, output averaged.
Vector jdmoa_step(DenoiseState& state, const DenoiseSetup& setup, const Vector& x_t);
/// Running average of the raw samples.
Vector la_step(DenoiseState& state, const Vector& x_t);

enum class DenoiseAlgorithm { LA, DAD, JDMIA, JDMIOA, JDMOA };

const char* to_string(DenoiseAlgorithm a);
Vector denoise_step(DenoiseAlgorithm a, DenoiseState& state, const DenoiseSetup& setup,
                    const Vector& x_t);

}  // namespace sgfl

#endif  // SGFL_DENOISE_HPP
