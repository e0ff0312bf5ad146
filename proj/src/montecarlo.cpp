#include "sgfl/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace sgfl {

std::vector<Trajectory> run_parallel(int n_runs, std::uint64_t master_seed, int threads,
                                     const RunFn& fn) {
  if (n_runs < 1) throw Error("n_runs must be >= 1");
  if (threads <= 0) threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  threads = std::min(threads, n_runs);
  std::vector<Trajectory> out(static_cast<std::size_t>(n_runs));
  auto work = [&](int first, int stride) {
    for (int r = first; r < n_runs; r += stride) {
      Stream rng(master_seed, static_cast<std::uint64_t>(r));
      out[r] = fn(r, rng);
    }
  };
  if (threads == 1) {
    work(0, 1);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        work(w, threads);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

void validate(const Scenario& s) {
  if (s.n_runs < 1) throw Error("n_runs must be >= 1");
  if (s.horizon < 1) throw Error("horizon must be >= 1");
  if (s.record_every < 0) throw Error("record_every must be >= 0");
  if (s.signal.size() != s.graph.n_nodes()) throw Error("signal dimension does not match graph");
  if (s.reference == ReferenceKind::CleanSignal && s.clean_signal.size() != s.graph.n_nodes())
    throw Error("clean signal dimension does not match graph");
}

std::vector<int> recorded_times(const Scenario& s) {
  std::vector<int> times;
  if (s.record_every > 0)
    for (int t = s.record_every; t < s.horizon; t += s.record_every) times.push_back(t);
  times.push_back(s.horizon);
  return times;
}

Trajectory run_single(const Scenario& s, const LaplacianSpec& lap, Stream& rng) {
  Stream edge_rng = rng.split(1);
  Stream signal_rng = rng.split(2);
  Trajectory traj;
  const std::vector<int> times = recorded_times(s);
  traj.times = times;
  traj.z.reserve(times.size());
  std::size_t next = 0;
  Matrix lap_t;
  auto advance_graph = [&]() -> const Matrix& {
    realization_laplacian_into(lap_t, lap, s.graph, sample_edge_mask(s.graph, edge_rng));
    return lap_t;
  };
  auto record = [&](int t, Vector z) {
    if (next < times.size() && times[next] == t) {
      traj.z.push_back(std::move(z));
      ++next;
    }
  };
  if (const auto* fir = std::get_if<FirCoeffs>(&s.coeffs)) {
    FirRunState state = make_fir_state(*fir, s.signal.sample(0, signal_rng));
    for (int t = 0; t < s.horizon; ++t) {
      const Matrix& l = advance_graph();
      record(t + 1, fir_step_time_varying(state, *fir, l, s.signal.sample(t + 1, signal_rng)));
    }
  } else {
    const auto& arma = std::get<ArmaCoeffs>(s.coeffs);
    ArmaRunState state = make_arma_state(arma, s.graph.n_nodes());
    for (int t = 0; t < s.horizon; ++t) {
      const Matrix& l = advance_graph();
      record(t + 1, arma_step(state, arma, l, s.signal.sample(t, signal_rng)));
    }
  }
  return traj;
}

std::vector<Trajectory> run_scenario(const Scenario& s, int threads) {
  validate(s);
  const LaplacianSpec lap = build_laplacian(s.graph, s.lap_kind);
  return run_parallel(s.n_runs, s.master_seed, threads,
                      [&](int, Stream& rng) { return run_single(s, lap, rng); });
}

std::vector<Vector> scenario_reference(const Scenario& s) {
  validate(s);
  const std::vector<int> times = recorded_times(s);
  std::vector<Vector> out;
  if (s.reference == ReferenceKind::CleanSignal) {
    out.assign(times.size(), s.clean_signal);
    return out;
  }
  const LaplacianSpec lap = build_laplacian(s.graph, s.lap_kind);
  Matrix op;
  if (s.reference == ReferenceKind::FullGraph) {
    op = lap.matrix;
  } else {
    op = expected_laplacian(s.graph, lap, EnumeratedExpectation{});
  }
  const MeanSequence mean = [&](int t) { return s.signal.mean(t); };
  std::vector<Vector> full;
  if (const auto* fir = std::get_if<FirCoeffs>(&s.coeffs)) {
    full = mean_recursion_fir(*fir, op, mean, s.horizon);
  } else {
    full = mean_recursion_arma(std::get<ArmaCoeffs>(s.coeffs), op, mean, s.horizon).z;
  }
  for (int t : times) out.push_back(full[static_cast<std::size_t>(t - 1)]);
  return out;
}

namespace {

void check_trajectories(const std::vector<Trajectory>& trajs, std::size_t steps) {
  if (trajs.empty()) throw Error("empty trajectory set");
  for (const Trajectory& t : trajs)
    if (t.z.size() != steps || t.times != trajs.front().times)
      throw Error("trajectories do not share recorded times");
}

}  // namespace

namespace {

SigmaEstimate sigma_from_moments(double q_sum, double q_sq, double runs) {
  const double msq = q_sum / runs;
  const double q_var = runs > 1 ? std::max(q_sq / runs - msq * msq, 0.0) * runs / (runs - 1) : 0.0;
  const double h = kZ99 * std::sqrt(q_var / runs);
  return {std::sqrt(msq), std::sqrt(std::max(msq - h, 0.0)), std::sqrt(msq + h), msq, h};
}

}  // namespace

SigmaEstimate sigma_from_run_errors(const std::vector<double>& q) {
  if (q.empty()) throw Error("no runs");
  double q_sum = 0.0, q_sq = 0.0;
  for (double v : q) {
    q_sum += v;
    q_sq += v * v;
  }
  return sigma_from_moments(q_sum, q_sq, static_cast<double>(q.size()));
}

ErrorStats error_stats(const std::vector<Trajectory>& trajs, const std::vector<Vector>& reference) {
  if (trajs.empty()) throw Error("empty trajectory set");
  check_trajectories(trajs, reference.size());
  const double runs = static_cast<double>(trajs.size());
  ErrorStats st;
  st.times = trajs.front().times;
  st.n_runs = static_cast<int>(trajs.size());
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const auto n = reference[k].size();
    Vector sum = Vector::Zero(n), sum_sq = Vector::Zero(n);
    double q_sum = 0.0, q_sq = 0.0;
    for (const Trajectory& tr : trajs) {
      const Vector e = tr.z[k] - reference[k];
      sum += e;
      sum_sq += e.cwiseProduct(e);
      const double q = e.squaredNorm() / static_cast<double>(n);
      q_sum += q;
      q_sq += q * q;
    }
    const SigmaEstimate est = sigma_from_moments(q_sum, q_sq, runs);
    st.mean_sq_error.push_back(est.mean_sq_error);
    st.mean_sq_error_ci.push_back(est.mean_sq_error_ci);
    st.sigma_e.push_back(est.sigma_e);
    st.sigma_e_lo.push_back(est.lo);
    st.sigma_e_hi.push_back(est.hi);
    const Vector mean = sum / runs;
    st.mean_error.push_back(mean);
    Vector var = (sum_sq / runs - mean.cwiseProduct(mean)).cwiseMax(0.0);
    if (runs > 1) var *= runs / (runs - 1);
    st.mean_error_se.push_back((var / runs).cwiseSqrt());
  }
  return st;
}

OutputMoments output_moments(const std::vector<Trajectory>& trajs) {
  if (trajs.empty()) throw Error("empty trajectory set");
  const std::size_t steps = trajs.front().z.size();
  check_trajectories(trajs, steps);
  if (trajs.size() < 2) throw Error("output moments need at least two runs");
  const double runs = static_cast<double>(trajs.size());
  OutputMoments m;
  m.times = trajs.front().times;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto n = trajs.front().z[k].size();
    Vector mean = Vector::Zero(n);
    for (const Trajectory& tr : trajs) mean += tr.z[k];
    mean /= runs;
    Vector var = Vector::Zero(n);
    double q_sum = 0.0, q_sq = 0.0;
    for (const Trajectory& tr : trajs) {
      const Vector d = tr.z[k] - mean;
      var += d.cwiseProduct(d);
      const double q = d.squaredNorm() / static_cast<double>(n);
      q_sum += q;
      q_sq += q * q;
    }
    var /= runs - 1;
    const double qm = q_sum / runs;
    const double q_var = std::max(q_sq / runs - qm * qm, 0.0) * runs / (runs - 1);
    m.mean.push_back(mean);
    m.mean_se.push_back((var / runs).cwiseSqrt());
    m.trace_cov.push_back(var.sum());
    m.var_bar.push_back(var.sum() / static_cast<double>(n));
    m.var_bar_ci.push_back(kZ99 * std::sqrt(q_var / runs) * runs / (runs - 1));
  }
  return m;
}

}  // namespace sgfl
