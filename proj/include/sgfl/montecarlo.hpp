#ifndef SGFL_MONTECARLO_HPP
#define SGFL_MONTECARLO_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sgfl/filters.hpp"
#include "sgfl/graph.hpp"
#include "sgfl/laplacian.hpp"
#include "sgfl/rng.hpp"
#include "sgfl/signal.hpp"

namespace sgfl {

/// Recorded outputs of one run; z[k] belongs to time times[k].
struct Trajectory {
  std::vector<int> times;
  std::vector<Vector> z;
};

using RunFn = std::function<Trajectory(int run, Stream& rng)>;

/// Calls fn for r = 0..n_runs-1 with Stream(master_seed, r) on up to
/// `threads` workers (0 = hardware concurrency). Results are stored by run
/// index, so the output does not depend on the thread count.
std::vector<Trajectory> run_parallel(int n_runs, std::uint64_t master_seed, int threads,
                                     const RunFn& fn);

enum class ReferenceKind {
  ExpectedGraph,  ///< mean recursion on L_bar with the mean input
  CleanSignal,    ///< a fixed vector u
  FullGraph,      ///< the same filter on the underlying graph (p = 1)
};

/// Filtering a random graph process on a RES graph.
struct Scenario {
  Graph graph;
  LaplacianKind lap_kind = LaplacianKind::Discrete;
  FilterCoeffs coeffs = FirCoeffs{{1.0}};
  SignalProcess signal = SignalProcess::deterministic(Vector::Zero(1));
  int horizon = 1;
  int n_runs = 1;
  std::uint64_t master_seed = 0;
  ReferenceKind reference = ReferenceKind::ExpectedGraph;
  Vector clean_signal;  ///< for ReferenceKind::CleanSignal
  /// Record every k-th step (the last step is always recorded); 0 records
  /// the last step only.
  int record_every = 0;
  /// Expectation used for L_bar with normalized kinds.
  int expectation_samples = 1000;
};

void validate(const Scenario& s);

/// Times recorded by a scenario, ascending.
std::vector<int> recorded_times(const Scenario& s);

/// One trajectory. Edge sampling draws from rng.split(1), the input process
/// from rng.split(2).
Trajectory run_single(const Scenario& s, const LaplacianSpec& lap, Stream& rng);

std::vector<Trajectory> run_scenario(const Scenario& s, int threads = 1);

/// Reference output per recorded time.
std::vector<Vector> scenario_reference(const Scenario& s);

inline constexpr double kZ99 = 2.5758293035489004;

struct ErrorStats {
  std::vector<int> times;
  std::vector<double> sigma_e;          ///< sqrt(mean over runs and nodes of e^2)
  std::vector<double> sigma_e_lo;       ///< 99% interval on sigma_e
  std::vector<double> sigma_e_hi;
  std::vector<double> mean_sq_error;    ///< sigma_e^2
  std::vector<double> mean_sq_error_ci; ///< half width of the 99% interval
  std::vector<Vector> mean_error;       ///< per node, per time
  std::vector<Vector> mean_error_se;    ///< standard error of mean_error
  int n_runs = 0;
};

/// sigma_e with its 99% interval from run-level squared errors
/// q_r = ||e_r||^2 / N; the interval is the normal one on mean(q), mapped
/// through the square root.
struct SigmaEstimate {
  double sigma_e = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double mean_sq_error = 0.0;
  double mean_sq_error_ci = 0.0;
};
SigmaEstimate sigma_from_run_errors(const std::vector<double>& q);

/// Errors of every trajectory against reference[k] at times[k].
ErrorStats error_stats(const std::vector<Trajectory>& trajs, const std::vector<Vector>& reference);

/// Empirical mean, node-averaged variance tr(S)/N with the unbiased sample
/// covariance S, and a 99% half width on that variance, per recorded time.
struct OutputMoments {
  std::vector<int> times;
  std::vector<Vector> mean;
  std::vector<Vector> mean_se;
  std::vector<double> var_bar;
  std::vector<double> var_bar_ci;
  std::vector<double> trace_cov;  ///< tr(S)
};

OutputMoments output_moments(const std::vector<Trajectory>& trajs);

}  // namespace sgfl

#endif  // SGFL_MONTECARLO_HPP
