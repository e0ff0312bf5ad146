#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "sgfl/design.hpp"
#include "sgfl/moments.hpp"

using namespace sgfl;

namespace {

Graph three_edge_graph() {
  Graph g(3);
  g.add_edge(0, 1, 1.0, 0.5);
  g.add_edge(1, 2, 0.7, 0.3);
  g.add_edge(0, 2, 1.3, 0.8);
  return g;
}

Matrix random_spd(int n, std::uint64_t seed, double scale) {
  Stream rng(seed, 0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return scale * (a * a.transpose() / n + 0.1 * Matrix::Identity(n, n));
}

Vector random_vector(int n, std::uint64_t seed) {
  Stream rng(seed, 1);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

TEST(Bounds, TrivialCases) {
  EXPECT_DOUBLE_EQ(fir_variance_bound(FirCoeffs{{1.0}}, 1.7, 0.3, 0.4), 0.7);
  EXPECT_EQ(fir_variance_bound(FirCoeffs{{0.0, 0.0}}, 1.7, 0.3, 0.4), 0.0);
  EXPECT_DOUBLE_EQ(arma_variance_bound(ArmaCoeffs{{cplx(0)}, {cplx(1)}}, 1.0, 0.3, 0.4), 0.7);
  // Signed coefficients enter through their absolute values.
  EXPECT_DOUBLE_EQ(fir_variance_bound(FirCoeffs{{1.0, -1.0}}, 2.0, 1.0, 0.0), 9.0);
  EXPECT_THROW(fir_variance_bound(ArmaCoeffs{{cplx(0)}, {cplx(1)}}, 1, 0, 0), Error);
  try {
    arma_variance_bound(ArmaCoeffs{{cplx(-1.0)}, {cplx(1)}}, 1.0, 0.1, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("bound undefined (unstable)"), std::string::npos);
  }
}

TEST(Bounds, Monotonicity) {
  double prev = 0.0;
  for (double psi = 0.0; psi < 0.9; psi += 0.1) {
    const double b = arma_variance_bound(ArmaCoeffs{{cplx(psi), cplx(-0.05)}, {cplx(0.3), cplx(0.2)}}, 1.0, 0.1, 0.2);
    EXPECT_GT(b, prev);
    prev = b;
  }
  prev = 0.0;
  for (double rho = 0.1; rho < 1.9; rho += 0.2) {
    const double b = arma_variance_bound(ArmaCoeffs{{cplx(0.5)}, {cplx(0.3)}}, rho, 0.1, 0.2);
    EXPECT_GT(b, prev);
    prev = b;
  }
  // Linear in K for fixed ||phi||^2.
  const double b1 = arma_variance_bound(ArmaCoeffs{{cplx(0.4)}, {cplx(1.0)}}, 1.0, 0.1, 0.2);
  ArmaCoeffs c4;
  for (int k = 0; k < 4; ++k) {
    c4.psi.push_back(0.4);
    c4.phi.push_back(0.5);
  }
  EXPECT_NEAR(arma_variance_bound(c4, 1.0, 0.1, 0.2), 4 * b1, 1e-12);
}

TEST(Bounds, Sparsified) {
  const FilterCoeffs f = FirCoeffs{{0.5, -0.3, 0.2}};
  EXPECT_DOUBLE_EQ(*sparsified_bound(f, 1.2, 1.0, 0.7), fir_variance_bound(f, 1.2, 0.0, 0.7));
  const FilterCoeffs a = ArmaCoeffs{{cplx(0.3), cplx(-0.2)}, {cplx(0.5), cplx(0.4)}};
  EXPECT_DOUBLE_EQ(*sparsified_bound(a, 1.0, 1.0, 0.7), arma_variance_bound(a, 1.0, 0.0, 0.7));
  const FilterCoeffs tap = FirCoeffs{{0.0, 0.0, 0.0, 0.8}};
  EXPECT_NEAR(*sparsified_bound(tap, 1.0, 0.5, 1.0) / *sparsified_bound(tap, 1.0, 1.0, 1.0), std::pow(2.0, 6), 1e-9);
  EXPECT_FALSE(sparsified_bound(a, 1.0, 0.3, 0.7).has_value());
  EXPECT_THROW(sparsified_bound(f, 1.0, 0.0, 1.0), Error);
}

TEST(Bounds, DominateMonteCarlo) {
  Graph g = generate_geometric_graph(8, 0.5, 3).graph;
  g.set_uniform_probability(0.5);
  const LaplacianSpec spec = build_laplacian(g, LaplacianKind::TranslatedNormalized);
  const Vector xbar = random_vector(8, 1);
  const double s2 = 0.1;
  const FilterCoeffs filters[] = {FirCoeffs{{0.4, 0.3, -0.2}},
                                  ArmaCoeffs{{cplx(-0.5)}, {cplx(0.6)}}};
  for (const FilterCoeffs& c : filters) {
    const bool fir = std::holds_alternative<FirCoeffs>(c);
    const int T = fir ? 3 : 30, runs = 20000;
    std::vector<Vector> z(runs);
    Matrix lt;
    for (int r = 0; r < runs; ++r) {
      Stream rng(9, r);
      auto x = [&]() {
        Vector v = xbar;
        for (int i = 0; i < 8; ++i) v(i) += std::sqrt(s2) * rng.normal();
        return v;
      };
      auto lap = [&]() -> const Matrix& {
        realization_laplacian_into(lt, spec, g, sample_edge_mask(g, rng));
        return lt;
      };
      if (fir) {
        FirRunState st = make_fir_state(std::get<FirCoeffs>(c), x());
        for (int t = 0; t < T; ++t) z[r] = fir_step_time_varying(st, std::get<FirCoeffs>(c), lap(), x());
      } else {
        ArmaRunState st = make_arma_state(std::get<ArmaCoeffs>(c), 8);
        for (int t = 0; t < T; ++t) z[r] = arma_step(st, std::get<ArmaCoeffs>(c), lap(), x());
      }
    }
    Vector mean = Vector::Zero(8);
    for (const auto& v : z) mean += v;
    mean /= runs;
    double var = 0;
    for (const auto& v : z) var += (v - mean).squaredNorm();
    var /= (runs - 1) * 8.0;
    EXPECT_LE(var, variance_bound(c, spec.rho, s2, xbar.squaredNorm() / 8));
  }
}

TEST(Stacked, KroneckerStructure) {
  const Graph g = three_edge_graph();
  const LaplacianSpec d = build_laplacian(g, LaplacianKind::Discrete);
  const ArmaCoeffs c{{cplx(0.2, 0.1), cplx(0.2, -0.1)}, {cplx(0.5, 0.3), cplx(0.5, -0.3)}};
  const StackedArmaSystem sys = make_stacked_system(c, g, d);
  const CMatrix a = sys.a_bar();
  EXPECT_EQ(a(0 + 3, 1 + 3), c.psi[1] * sys.lap_bar(0, 1));
  EXPECT_EQ(a(2, 1), c.psi[0] * sys.lap_bar(2, 1));
  EXPECT_EQ(a(0, 4), cplx(0));
  const CMatrix cb = sys.c().cast<cplx>() * sys.b();
  EXPECT_LE((cb - (c.phi[0] + c.phi[1]) * CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MeanStep, MatchesRunnerBitForBit) {
  const Graph g = three_edge_graph();
  const LaplacianSpec d = build_laplacian(g, LaplacianKind::ScaledTranslatedDiscrete);
  const ArmaCoeffs c = design_arma_ls(ResponseTarget::ideal_lowpass(0.0, -0.5, 0.5), 3, 0.9);
  const StackedArmaSystem sys = make_stacked_system(c, g, d);
  const MeanSequence seq = [](int t) { return Vector::Constant(3, std::sin(0.3 * t) + 1.0); };
  const auto traj = mean_recursion_arma(c, sys.lap_bar, seq, 40).z;
  MomentState st = make_moment_state(sys);
  for (int t = 0; t < 40; ++t) {
    st = mean_step(sys, st, seq(t));
    EXPECT_EQ(output_mean(sys, st), traj[t]);
  }
  MomentState zero = make_moment_state(sys);
  for (int t = 0; t < 5; ++t) zero = mean_step(sys, zero, Vector::Zero(3));
  EXPECT_EQ(zero.y_bar, CVector::Zero(9));
  // Constant mean converges to the dense solve.
  MomentState s2 = make_moment_state(sys);
  const Vector x = random_vector(3, 4);
  for (int t = 0; t < 400; ++t) s2 = mean_step(sys, s2, x);
  EXPECT_LE((output_mean(sys, s2) - arma_steady_state(c, sys.lap_bar, x)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Fluctuation, DeterministicGraphIsZero) {
  const Graph g = complete_graph(4);
  const StackedArmaSystem sys = make_stacked_system(ArmaCoeffs{{cplx(0.3)}, {cplx(1)}}, g,
                                                    build_laplacian(g, LaplacianKind::Discrete));
  EXPECT_EQ(exact_E_AtildeRAtildeT(sys, CMatrix::Identity(4, 4)), CMatrix::Zero(4, 4));
}

TEST(Fluctuation, SingleEdgeSymbolic) {
  Graph g(2);
  g.add_edge(0, 1, 2.0, 0.3);
  const ArmaCoeffs c{{cplx(0.4), cplx(-0.25)}, {cplx(1), cplx(1)}};
  const StackedArmaSystem sys = make_stacked_system(c, g, build_laplacian(g, LaplacianKind::Discrete));
  const CMatrix got = exact_E_AtildeRAtildeT(sys, CMatrix::Identity(4, 4));
  // E_e = d d^T with d = (1, -1); E_e I E_e = 2 E_e; var = w^2 p (1 - p).
  Matrix ee(2, 2);
  ee << 1, -1, -1, 1;
  const double v = 4.0 * 0.3 * 0.7;
  for (int k1 = 0; k1 < 2; ++k1)
    for (int k2 = 0; k2 < 2; ++k2) {
      const CMatrix expect = (k1 == k2 ? 1.0 : 0.0) * v * 2.0 * c.psi[k1] * std::conj(c.psi[k2]) * ee.cast<cplx>();
      EXPECT_LE((got.block(2 * k1, 2 * k2, 2, 2) - expect).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Fluctuation, MatchesEnumeration) {
  const Graph g = three_edge_graph();
  const LaplacianSpec d = build_laplacian(g, LaplacianKind::TranslatedDiscrete);
  const ArmaCoeffs c{{cplx(0.2, 0.1), cplx(0.2, -0.1)}, {cplx(0.5, 0.3), cplx(0.5, -0.3)}};
  const StackedArmaSystem sys = make_stacked_system(c, g, d);
  Stream rng(4, 4);
  CMatrix r(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r(i, j) = cplx(rng.normal(), rng.normal());
  CMatrix brute = CMatrix::Zero(6, 6);
  for (std::uint64_t mask = 0; mask < 8; ++mask) {
    const Matrix lt = oracle::dense_laplacian(3, g.edges(), mask, d.edge_scale, d.shift);
    const Matrix lt_tilde = lt - sys.lap_bar;
    CMatrix at = CMatrix::Zero(6, 6);
    for (int k = 0; k < 2; ++k) at.block(3 * k, 3 * k, 3, 3) = c.psi[k] * lt_tilde.cast<cplx>();
    brute += oracle::mask_probability(g.edges(), mask) * at * r * at.adjoint();
  }
  EXPECT_LE((exact_E_AtildeRAtildeT(sys, r) - brute).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Fluctuation, NormalizedUnavailable) {
  const Graph g = three_edge_graph();
  try {
    make_stacked_system(ArmaCoeffs{{cplx(0.3)}, {cplx(1)}}, g, build_laplacian(g, LaplacianKind::TranslatedNormalized));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("closed form unavailable"), std::string::npos);
  }
  const StackedArmaSystem mean_only = make_stacked_system(ArmaCoeffs{{cplx(0.3)}, {cplx(1)}}, Matrix::Identity(3, 3));
  EXPECT_THROW(exact_E_AtildeRAtildeT(mean_only, CMatrix::Identity(3, 3)), Error);
}

TEST(Covariance, DeterministicGraphIsLyapunov) {
  const Graph g = complete_graph(3);
  const ArmaCoeffs c{{cplx(0.3), cplx(-0.2)}, {cplx(0.5), cplx(0.7)}};
  const StackedArmaSystem sys = make_stacked_system(c, g, build_laplacian(g, LaplacianKind::ScaledTranslatedDiscrete));
  const Matrix sx = random_spd(3, 1, 0.5);
  const Vector xb = random_vector(3, 2);
  const CMatrix a = sys.a_bar(), b = sys.b();
  MomentState st = make_moment_state(sys);
  CMatrix sigma_y = CMatrix::Zero(6, 6);
  for (int t = 0; t < 10; ++t) {
    const CovarianceStep step = covariance_step(sys, st, xb, sx);
    st = step.state;
    sigma_y = a * sigma_y * a.adjoint() + b * sx.cast<cplx>() * b.adjoint();
    EXPECT_LE((state_covariance(st) - sigma_y).cwiseAbs().maxCoeff(), 1e-12);
    const Matrix cz = sys.c();
    EXPECT_LE((step.sigma_z - (cz.cast<cplx>() * sigma_y * cz.transpose().cast<cplx>()).real()).cwiseAbs().maxCoeff(), 1e-12);
  }
  MomentState z0 = make_moment_state(sys);
  for (int t = 0; t < 5; ++t) {
    const CovarianceStep step = covariance_step(sys, z0, Vector::Zero(3), Matrix::Zero(3, 3));
    z0 = step.state;
    EXPECT_EQ(step.sigma_z, Matrix::Zero(3, 3));
  }
}

TEST(Covariance, MatchesEnumeration) {
  // M = 4 edges, K = 2, t <= 3.
  Graph g(4);
  g.add_edge(0, 1, 1.0, 0.5);
  g.add_edge(1, 2, 1.0, 0.4);
  g.add_edge(2, 3, 0.8, 0.7);
  g.add_edge(0, 3, 1.2, 0.6);
  const LaplacianSpec spec = build_laplacian(g, LaplacianKind::ScaledTranslatedDiscrete);
  const ArmaCoeffs c{{cplx(0.6, 0.5), cplx(0.6, -0.5)}, {cplx(0.3, -0.2), cplx(0.3, 0.2)}};
  const StackedArmaSystem sys = make_stacked_system(c, g, spec);
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (int t = 0; t <= 3; ++t) {
    means.push_back(random_vector(4, 10 + t));
    covs.push_back(random_spd(4, 20 + t, 0.3));
  }
  MomentState st = make_moment_state(sys);
  for (int T = 1; T <= 3; ++T) {
    const CovarianceStep step = covariance_step(sys, st, means[T - 1], covs[T - 1]);
    st = step.state;
    const auto ex = oracle::enumerate_output(
        4, g.edges(), T, spec.edge_scale, spec.shift, means, covs,
        [&](const std::vector<Matrix>& laps) { return oracle::arma_gains(c, laps); });
    EXPECT_LE((step.sigma_z - ex.cov).cwiseAbs().maxCoeff(), 1e-10) << T;
    EXPECT_LE((output_mean(sys, st) - ex.mean).cwiseAbs().maxCoeff(), 1e-10) << T;
    // PSD of the state covariance.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(state_covariance(st));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(Covariance, TraceMatchesMonteCarlo) {
  Graph g = generate_geometric_graph(5, 0.6, 8).graph;
  g.set_uniform_probability(0.5);
  const LaplacianSpec spec = build_laplacian(g, LaplacianKind::ScaledTranslatedDiscrete);
  const ArmaCoeffs c = design_arma_ls(ResponseTarget::ideal_lowpass(0.0, -0.5, 0.5), 2, 0.8);
  const StackedArmaSystem sys = make_stacked_system(c, g, spec);
  const Vector xb = random_vector(5, 3);
  const double s2 = 0.2;
  const int T = 15, runs = 20000;
  std::vector<double> tr_mc(T + 1, 0.0);
  std::vector<Vector> sum(T + 1, Vector::Zero(5));
  std::vector<Vector> sq(T + 1, Vector::Zero(5));
  Matrix lt;
  for (int r = 0; r < runs; ++r) {
    Stream rng(31, r);
    ArmaRunState st = make_arma_state(c, 5);
    for (int t = 0; t < T; ++t) {
      realization_laplacian_into(lt, spec, g, sample_edge_mask(g, rng));
      Vector x = xb;
      for (int i = 0; i < 5; ++i) x(i) += std::sqrt(s2) * rng.normal();
      const Vector z = arma_step(st, c, lt, x);
      sum[t + 1] += z;
      sq[t + 1] += z.cwiseProduct(z);
    }
  }
  MomentState ms = make_moment_state(sys);
  for (int t = 1; t <= T; ++t) {
    const CovarianceStep step = covariance_step(sys, ms, xb, s2 * Matrix::Identity(5, 5));
    ms = step.state;
    const Vector m = sum[t] / runs;
    const double tr = ((sq[t] / runs - m.cwiseProduct(m)) * runs / (runs - 1)).sum();
    EXPECT_NEAR(tr, step.sigma_z.trace(), 0.05 * step.sigma_z.trace()) << t;
  }
}

TEST(FirMoments, MatchesEnumeration) {
  const Graph g = three_edge_graph();
  const LaplacianSpec spec = build_laplacian(g, LaplacianKind::TranslatedDiscrete);
  const FirCoeffs c{{0.4, -0.3, 0.25}};
  const FirMomentSystem sys = make_fir_moment_system(c, g, spec);
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (int t = 0; t <= 3; ++t) {
    means.push_back(random_vector(3, 40 + t));
    covs.push_back(random_spd(3, 50 + t, 0.4));
  }
  FirMomentState st = make_fir_moment_state(sys, means[0], covs[0]);
  for (int T = 1; T <= 3; ++T) {
    const FirMomentStep step = fir_moment_step(sys, st, means[T], covs[T]);
    st = step.state;
    const auto ex = oracle::enumerate_output(
        3, g.edges(), T, spec.edge_scale, spec.shift, means, covs,
        [&](const std::vector<Matrix>& laps) { return oracle::fir_gains(c, laps); });
    EXPECT_LE((step.z_mean - ex.mean).cwiseAbs().maxCoeff(), 1e-10) << T;
    EXPECT_LE((step.sigma_z - ex.cov).cwiseAbs().maxCoeff(), 1e-10) << T;
  }
}

TEST(Dirichlet, Cases) {
  const Graph k3 = complete_graph(3, 1.0, 0.4);
  const DirichletStats c = dirichlet_stats(k3, Vector::Constant(3, 2.0), AnalyticExpectation{});
  EXPECT_EQ(c.mean, 0.0);
  EXPECT_EQ(c.variance, 0.0);
  Graph e(2);
  e.add_edge(0, 1, 1.0, 0.5);
  Vector x(2);
  x << 1, 0;
  const DirichletStats s = dirichlet_stats(e, x, AnalyticExpectation{});
  EXPECT_DOUBLE_EQ(s.mean, 0.5);
  EXPECT_DOUBLE_EQ(s.variance, 0.25);
  // Enumeration of the single Bernoulli edge: values 0 and 1 each with 1/2.
  EXPECT_DOUBLE_EQ(0.5 * 0 + 0.5 * 1, s.mean);
  EXPECT_DOUBLE_EQ(0.5 * 0.25 + 0.5 * 0.25, s.variance);

  Graph g = generate_geometric_graph(10, 0.5, 2).graph;
  g.set_uniform_probability(0.6);
  const Vector y = random_vector(10, 1);
  const int n = 100000;
  const DirichletStats an = dirichlet_stats(g, y, AnalyticExpectation{});
  const DirichletStats mc = dirichlet_stats(g, y, MonteCarloExpectation{n, 3});
  EXPECT_NEAR(mc.mean, an.mean, 4 * std::sqrt(an.variance / n));
  EXPECT_NEAR(mc.variance, an.variance, 0.03 * an.variance);
}
