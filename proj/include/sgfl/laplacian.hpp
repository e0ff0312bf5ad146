#ifndef SGFL_LAPLACIAN_HPP
#define SGFL_LAPLACIAN_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sgfl/graph.hpp"
#include "sgfl/types.hpp"

namespace sgfl {

enum class LaplacianKind {
  Discrete,                  ///< D - W
  Normalized,                ///< I - D^{-1/2} W D^{-1/2}
  TranslatedDiscrete,        ///< L_d - (lambda_max / 2) I
  TranslatedNormalized,      ///< L_n - I
  ScaledTranslatedDiscrete,  ///< L_d / lambda_max - I / 2
};

std::string_view to_string(LaplacianKind kind);
LaplacianKind parse_laplacian_kind(std::string_view name);

/// True for kinds built on D - W, whose expectation under edge sampling has a
/// closed form.
bool is_discrete_family(LaplacianKind kind);

/// Laplacian of a graph together with the spectral interval of the family of
/// admissible Laplacians (the graph and all of its edge-sampled
/// realizations). `matrix == edge_scale * base - shift * I`, where `base` is
/// D - W for discrete kinds and I - D^{-1/2} W D^{-1/2} for normalized kinds;
/// realizations reuse the same edge_scale and shift.
struct LaplacianSpec {
  LaplacianKind kind = LaplacianKind::Discrete;
  Matrix matrix;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double rho = 0.0;
  double edge_scale = 1.0;
  double shift = 0.0;
  /// Largest eigenvalue of D - W of the underlying graph (discrete kinds).
  double discrete_lambda_max = 0.0;

  int size() const { return static_cast<int>(matrix.rows()); }
};

/// Laplacian of `g`. Normalized kinds throw "isolated node" if some node has
/// no edge.
LaplacianSpec build_laplacian(const Graph& g, LaplacianKind kind);

/// Laplacian of the realization of `g` selected by `active`, using the
/// scaling and shift of `reference`. Normalized kinds use the degrees of the
/// realization; nodes isolated in the realization get a zero base row.
Matrix realization_laplacian(const LaplacianSpec& reference, const Graph& g,
                             const std::vector<char>& active);
void realization_laplacian_into(Matrix& out, const LaplacianSpec& reference,
                                const Graph& g, const std::vector<char>& active);

struct AnalyticExpectation {};
struct MonteCarloExpectation {
  int n_samples = 1000;
  std::uint64_t seed = 0;
};
/// Exact expectation for every kind. For normalized kinds each entry factors
/// over the independent edges at its two endpoints and is evaluated by
/// summing over neighbour subsets (Poisson-binomial recursion when a node's
/// incident weights are equal, plain enumeration up to `max_degree`
/// otherwise).
struct EnumeratedExpectation {
  int max_degree = 22;
};
using ExpectationMode =
    std::variant<AnalyticExpectation, MonteCarloExpectation, EnumeratedExpectation>;

/// Entrywise expectation of the realization Laplacian under edge sampling.
/// Analytic mode is only available for discrete kinds ("no closed form"
/// otherwise). Monte Carlo sample s uses Stream(seed, s).
Matrix expected_laplacian(const Graph& g, const LaplacianSpec& reference,
                          const ExpectationMode& mode);
Matrix expected_laplacian(const Graph& g, LaplacianKind kind, const ExpectationMode& mode);

}  // namespace sgfl

#endif  // SGFL_LAPLACIAN_HPP
