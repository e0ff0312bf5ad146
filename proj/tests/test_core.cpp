#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracle.hpp"
#include "sgfl/graph.hpp"
#include "sgfl/laplacian.hpp"
#include "sgfl/rng.hpp"
#include "sgfl/spectrum.hpp"

using namespace sgfl;

// Known-answer vectors for Philox4x32-10.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Stream, ReproducibleAndDistinct) {
  Stream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int k = 0; k < 100; ++k) {
    const auto va = a();
    EXPECT_EQ(va, b());
    EXPECT_NE(va, c());
    EXPECT_NE(va, d());
  }
  Stream s1 = Stream(1, 2).split(3), s2 = Stream(1, 2).split(3), s3 = Stream(1, 2).split(4);
  EXPECT_EQ(s1(), s2());
  EXPECT_NE(s1(), s3());
}

TEST(Stream, UniformAndNormalMoments) {
  Stream rng(5, 0);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double g = rng.normal();
    sn += g;
    sn2 += g * g;
  }
  EXPECT_NEAR(su / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sn / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(sn2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Graph, ValidatesEdges) {
  Graph g(3);
  EXPECT_THROW(g.add_edge(0, 0), Error);
  EXPECT_THROW(g.add_edge(0, 3), Error);
  EXPECT_THROW(g.add_edge(0, 1, 0.0), Error);
  EXPECT_THROW(g.add_edge(0, 1, 1.0, 0.0), Error);
  EXPECT_THROW(g.add_edge(0, 1, 1.0, 1.5), Error);
  g.add_edge(1, 0);
  EXPECT_EQ(g.edges()[0].i, 0);
  EXPECT_THROW(g.add_edge(0, 1), Error);
  EXPECT_FALSE(g.is_connected());
  g.add_edge(1, 2);
  EXPECT_TRUE(g.is_connected());
}

TEST(Graph, RoundTripSerialization) {
  GeometricGraph geo = generate_geometric_graph(12, 0.4, 3);
  geo.graph.set_probability(0, 0.25);
  std::stringstream ss;
  write_graph(ss, geo.graph, {"hello"});
  const Graph back = read_graph(ss);
  ASSERT_EQ(back.n_nodes(), 12);
  ASSERT_EQ(back.n_edges(), geo.graph.n_edges());
  for (int k = 0; k < back.n_edges(); ++k) {
    EXPECT_EQ(back.edges()[k].i, geo.graph.edges()[k].i);
    EXPECT_EQ(back.edges()[k].j, geo.graph.edges()[k].j);
    EXPECT_EQ(back.edges()[k].weight, geo.graph.edges()[k].weight);
    EXPECT_EQ(back.edges()[k].p, geo.graph.edges()[k].p);
  }
  ASSERT_TRUE(back.positions().has_value());
  EXPECT_EQ((*back.positions())[5].x, (*geo.graph.positions())[5].x);
}

TEST(GeometricGraph, TwoNodesAlwaysConnected) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GeometricGraph g = generate_geometric_graph(2, 1.0, seed);
    ASSERT_EQ(g.graph.n_edges(), 1);
    EXPECT_TRUE(g.connected);
  }
}

TEST(GeometricGraph, DeterministicForSeed) {
  const GeometricGraph a = generate_geometric_graph(100, 0.15, 7);
  const GeometricGraph b = generate_geometric_graph(100, 0.15, 7);
  ASSERT_EQ(a.graph.n_edges(), b.graph.n_edges());
  for (int k = 0; k < a.graph.n_edges(); ++k) {
    EXPECT_EQ(a.graph.edges()[k].i, b.graph.edges()[k].i);
    EXPECT_EQ(a.graph.edges()[k].j, b.graph.edges()[k].j);
  }
}

// P(|U - V| <= r) for U, V uniform in the unit square, by quadrature of the
// offset density 4 (1 - a)(1 - b) over the quarter disk.
double close_pair_probability(double r) {
  const int m = 2000;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double a = (i + 0.5) * r / m;
    const double bmax = std::sqrt(r * r - a * a);
    const int mb = 2000;
    for (int j = 0; j < mb; ++j) {
      const double b = (j + 0.5) * bmax / mb;
      sum += 4.0 * (1 - a) * (1 - b) * (r / m) * (bmax / mb);
    }
  }
  return sum;
}

TEST(GeometricGraph, MeanEdgeCountMatchesIntegral) {
  const double r = 0.15 * std::numbers::sqrt2;
  const double expected = 100.0 * 99.0 / 2.0 * close_pair_probability(r);
  double s = 0, s2 = 0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    const double m = generate_geometric_graph(100, 0.15, 1000 + seed).graph.n_edges();
    s += m;
    s2 += m * m;
  }
  const double mean = s / seeds;
  const double sd = std::sqrt((s2 / seeds - mean * mean) * seeds / (seeds - 1));
  EXPECT_NEAR(mean, expected, 2.576 * sd / std::sqrt(seeds));
}

TEST(Res, AllOnesKeepsEverything) {
  const Graph g = complete_graph(5);
  Stream rng(1, 1);
  const Graph r = sample_res(g, rng);
  EXPECT_EQ(r.n_edges(), g.n_edges());
  EXPECT_EQ(r.n_nodes(), g.n_nodes());
}

TEST(Res, BinomialEdgeCount) {
  const Graph g = complete_graph(3, 1.0, 0.5);
  Stream rng(9, 0);
  const int n = 10000;
  double s = 0;
  for (int k = 0; k < n; ++k) s += sample_res(g, rng).n_edges();
  EXPECT_NEAR(s / n, 1.5, 3 * std::sqrt(3 * 0.25 / n));
}

TEST(Res, ReproducibleMasks) {
  const Graph g = generate_geometric_graph(30, 0.3, 1).graph;
  Graph gp = g;
  gp.set_uniform_probability(0.4);
  Stream a(3, 3), b(3, 3);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(sample_edge_mask(gp, a), sample_edge_mask(gp, b));
}

TEST(Laplacian, P2AndK3) {
  const LaplacianSpec d = build_laplacian(path_graph(2), LaplacianKind::Discrete);
  EXPECT_EQ(d.matrix(0, 0), 1.0);
  EXPECT_EQ(d.matrix(0, 1), -1.0);
  EXPECT_NEAR(d.lambda_max, 2.0, 1e-12);
  EXPECT_NEAR(d.rho, 2.0, 1e-12);

  const LaplacianSpec n = build_laplacian(complete_graph(3), LaplacianKind::Normalized);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(n.matrix(i, j), i == j ? 1.0 : -0.5, 1e-15);
  EXPECT_EQ(n.rho, 2.0);

  const LaplacianSpec tn = build_laplacian(complete_graph(3), LaplacianKind::TranslatedNormalized);
  EXPECT_TRUE(tn.matrix.isApprox(n.matrix - Matrix::Identity(3, 3)));
  EXPECT_EQ(tn.rho, 1.0);
  const Spectrum sn = symmetric_eigen(n.matrix), stn = symmetric_eigen(tn.matrix);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(stn.eigenvalues(k), sn.eigenvalues(k) - 1.0, 1e-12);
}

TEST(Laplacian, KindsHaveBoundedNorm) {
  Graph g = generate_geometric_graph(30, 0.3, 4).graph;
  for (auto kind : {LaplacianKind::Discrete, LaplacianKind::Normalized,
                    LaplacianKind::TranslatedDiscrete, LaplacianKind::TranslatedNormalized,
                    LaplacianKind::ScaledTranslatedDiscrete}) {
    const LaplacianSpec s = build_laplacian(g, kind);
    EXPECT_LE((s.matrix - s.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    const Spectrum sp = symmetric_eigen(s.matrix);
    EXPECT_LE(spectral_norm(sp), s.rho + 1e-9) << to_string(kind);
    // Locality: zero off the edge pattern.
    Matrix pattern = Matrix::Zero(30, 30);
    for (const Edge& e : g.edges()) pattern(e.i, e.j) = pattern(e.j, e.i) = 1;
    for (int i = 0; i < 30; ++i)
      for (int j = 0; j < 30; ++j)
        if (i != j && pattern(i, j) == 0) EXPECT_EQ(s.matrix(i, j), 0.0);
    // Realizations never exceed rho.
    Graph gp = g;
    gp.set_uniform_probability(0.5);
    Stream rng(11, 0);
    for (int r = 0; r < 10; ++r) {
      const Matrix lt = realization_laplacian(s, gp, sample_edge_mask(gp, rng));
      EXPECT_LE(spectral_norm(symmetric_eigen(lt)), s.rho + 1e-9) << to_string(kind);
    }
  }
}

TEST(Laplacian, Errors) {
  EXPECT_THROW(build_laplacian(Graph(3), LaplacianKind::Discrete), Error);
  Graph g(3);
  g.add_edge(0, 1);
  try {
    build_laplacian(g, LaplacianKind::Normalized);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("isolated node"), std::string::npos);
  }
  EXPECT_NO_THROW(build_laplacian(g, LaplacianKind::Discrete));
  EXPECT_EQ(parse_laplacian_kind(to_string(LaplacianKind::TranslatedNormalized)),
            LaplacianKind::TranslatedNormalized);
  EXPECT_THROW(parse_laplacian_kind("bogus"), Error);
}

TEST(Laplacian, IsolatedInRealizationGetsZeroRow) {
  const Graph g = path_graph(3);
  const LaplacianSpec tn = build_laplacian(g, LaplacianKind::TranslatedNormalized);
  const Matrix lt = realization_laplacian(tn, g, {1, 0});
  EXPECT_EQ(lt(2, 2), -1.0);
  EXPECT_EQ(lt(2, 1), 0.0);
  EXPECT_NEAR(lt(0, 1), -1.0, 1e-15);
}

TEST(ExpectedLaplacian, UniformPIsScaled) {
  Graph g = generate_geometric_graph(20, 0.35, 2).graph;
  g.set_uniform_probability(0.3);
  const LaplacianSpec d = build_laplacian(g, LaplacianKind::Discrete);
  const Matrix lbar = expected_laplacian(g, d, AnalyticExpectation{});
  EXPECT_LE((lbar - 0.3 * d.matrix).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(expected_laplacian(g, LaplacianKind::Normalized, AnalyticExpectation{}), Error);
}

TEST(ExpectedLaplacian, DeterministicMonteCarloIsExact) {
  const Graph g = generate_geometric_graph(15, 0.4, 2).graph;
  for (auto kind : {LaplacianKind::Discrete, LaplacianKind::TranslatedNormalized}) {
    const LaplacianSpec s = build_laplacian(g, kind);
    EXPECT_EQ(expected_laplacian(g, s, MonteCarloExpectation{50, 1}), s.matrix);
  }
}

TEST(ExpectedLaplacian, MonteCarloMatchesAnalyticMixedP) {
  Graph g = complete_graph(3);
  g.set_probability(0, 0.2);
  g.set_probability(1, 0.5);
  g.set_probability(2, 0.9);
  const LaplacianSpec d = build_laplacian(g, LaplacianKind::Discrete);
  const int n = 100000;
  const Matrix mc = expected_laplacian(g, d, MonteCarloExpectation{n, 5});
  const Matrix an = expected_laplacian(g, d, AnalyticExpectation{});
  for (int k = 0; k < 3; ++k) {
    const double p = g.edges()[k].p;
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(mc(g.edges()[k].i, g.edges()[k].j), an(g.edges()[k].i, g.edges()[k].j), 4 * se);
  }
}

TEST(ExpectedLaplacian, EnumeratedNormalizedMatchesBruteForce) {
  Graph g(4);
  g.add_edge(0, 1, 1.0, 0.3);
  g.add_edge(1, 2, 2.0, 0.6);
  g.add_edge(2, 3, 1.0, 0.8);
  g.add_edge(0, 2, 0.5, 0.4);
  g.add_edge(1, 3, 1.0, 0.7);
  const LaplacianSpec tn = build_laplacian(g, LaplacianKind::TranslatedNormalized);
  Matrix brute = Matrix::Zero(4, 4);
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    std::vector<char> active(5);
    for (int k = 0; k < 5; ++k) active[k] = (mask >> k) & 1U;
    brute += oracle::mask_probability(g.edges(), mask) * realization_laplacian(tn, g, active);
  }
  const Matrix en = expected_laplacian(g, tn, EnumeratedExpectation{});
  EXPECT_LE((en - brute).cwiseAbs().maxCoeff(), 1e-14);
  // Equal weights at every node take the Poisson-binomial path.
  Graph u = cycle_graph(8);
  u.add_edge(0, 4);
  u.add_edge(1, 6);
  u.set_uniform_probability(0.45);
  const LaplacianSpec un = build_laplacian(u, LaplacianKind::Normalized);
  const int m = u.n_edges();
  ASSERT_LE(m, 16);
  ASSERT_GE(m, 6);
  Matrix b2 = Matrix::Zero(8, 8);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<char> active(m);
    for (int k = 0; k < m; ++k) active[k] = (mask >> k) & 1U;
    b2 += oracle::mask_probability(u.edges(), mask) * realization_laplacian(un, u, active);
  }
  EXPECT_LE((expected_laplacian(u, un, EnumeratedExpectation{}) - b2).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Spectrum, KnownSpectra) {
  const Spectrum p2 = symmetric_eigen(build_laplacian(path_graph(2), LaplacianKind::Discrete).matrix);
  EXPECT_NEAR(p2.eigenvalues(0), 0.0, 1e-14);
  EXPECT_NEAR(p2.eigenvalues(1), 2.0, 1e-14);
  const Spectrum k3 = symmetric_eigen(build_laplacian(complete_graph(3), LaplacianKind::Discrete).matrix);
  EXPECT_NEAR(k3.eigenvalues(0), 0.0, 1e-14);
  EXPECT_NEAR(k3.eigenvalues(1), 3.0, 1e-14);
  EXPECT_NEAR(k3.eigenvalues(2), 3.0, 1e-14);
}

TEST(Spectrum, LargeGraphInvariants) {
  const Graph g = generate_geometric_graph(100, 0.15, 7).graph;
  const Matrix l = build_laplacian(g, LaplacianKind::Discrete).matrix;
  const Spectrum s = symmetric_eigen(l);
  const Matrix& phi = s.eigenvectors;
  EXPECT_LE((phi.transpose() * phi - Matrix::Identity(100, 100)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((phi * s.eigenvalues.asDiagonal() * phi.transpose() - l).cwiseAbs().maxCoeff(), 1e-8);
  for (int k = 1; k < 100; ++k) EXPECT_LE(s.eigenvalues(k - 1), s.eigenvalues(k));
  for (int k = 0; k < 100; ++k) {
    for (int i = 0; i < 100; ++i) {
      if (std::abs(phi(i, k)) > 1e-9) {
        EXPECT_GT(phi(i, k), 0.0);
        break;
      }
    }
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> ref(l);
  EXPECT_LE((ref.eigenvalues() - s.eigenvalues).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Spectrum, Gft) {
  const Spectrum s = symmetric_eigen(build_laplacian(complete_graph(3), LaplacianKind::Discrete).matrix);
  const Vector e = gft(s, s.eigenvectors.col(2));
  EXPECT_NEAR(e(2), 1.0, 1e-12);
  EXPECT_NEAR(e(0), 0.0, 1e-12);
  EXPECT_EQ(gft(s, Vector::Zero(3)), Vector::Zero(3));
  Stream rng(2, 2);
  Vector x(3);
  for (int i = 0; i < 3; ++i) x(i) = rng.normal();
  EXPECT_LE((inverse_gft(s, gft(s, x)) - x).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(gft(s, Vector::Zero(4)), Error);
}

TEST(Spectrum, NonConvergenceReportsResidual) {
  Matrix a(3, 3);
  a << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  try {
    symmetric_eigen(a, JacobiOptions{1e-30, 1});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("off-diagonal"), std::string::npos);
  }
}
