#ifndef SGFL_SPARSIFY_HPP
#define SGFL_SPARSIFY_HPP

#include <vector>

#include "sgfl/filters.hpp"
#include "sgfl/graph.hpp"
#include "sgfl/laplacian.hpp"
#include "sgfl/rng.hpp"

namespace sgfl {

struct SparsifyConfig {
  double p = 1.0;
  /// Compensate for the thinned edges so the expected output matches the
  /// filter on the full graph. Discrete-family kinds only.
  bool corrected = false;
  LaplacianKind lap_kind = LaplacianKind::Discrete;
};

void validate(const SparsifyConfig& cfg);

/// phi_k p^{-k}.
FilterCoeffs rescale_fir(const FilterCoeffs& c, double p);
/// psi^(k) / p, phi unchanged.
FilterCoeffs rescale_arma(const FilterCoeffs& c, double p);

/// Filter output z_t, t = 1..horizon, on the full graph g with the original
/// coefficients and a constant input x (registers start at zero).
std::vector<Vector> sparsify_reference(const FilterCoeffs& c, const Graph& g, LaplacianKind kind,
                                       const Vector& x, int horizon);

/// Runs the filter on independent RES realizations of g with all edge
/// probabilities set to cfg.p, for `horizon` steps with constant input x.
/// In corrected mode on the plain discrete Laplacian the coefficients are
/// rescaled; on translated discrete kinds a L_d - s I is replaced by
/// (a / p) L_d,t - s I, which has expectation exactly a L_d - s I.
/// Returns z_t^(s) for t = 1..horizon.
std::vector<Vector> run_sparsified(const FilterCoeffs& c, const Graph& g, const Vector& x,
                                   const SparsifyConfig& cfg, int horizon, Stream& rng);

struct SparsifyReport {
  Vector mean_error;  ///< per node, averaged over runs
  double sigma_e = 0.0;
  double cost_saving = 0.0;  ///< 1 - p
};

/// Statistics of one time step: outputs[r] is run r's z^(s), reference is z^(d).
SparsifyReport sparsify_report(const std::vector<Vector>& outputs, const Vector& reference,
                               double p);

}  // namespace sgfl

#endif  // SGFL_SPARSIFY_HPP
