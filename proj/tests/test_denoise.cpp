#include <gtest/gtest.h>

#include "sgfl/denoise.hpp"
#include "sgfl/spectrum.hpp"

using namespace sgfl;

namespace {

Vector sample(int n, Stream& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

TEST(ClosedForm, MatchesSpectralOnTriangle) {
  const Graph k3 = complete_graph(3);
  const LaplacianSpec d = build_laplacian(k3, LaplacianKind::Discrete);
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  const double w = 0.7;
  // Eigenvalues 0, 3, 3: the mean passes through, the rest is divided by 1 + 3w.
  const Vector m = Vector::Constant(3, x.mean());
  const Vector expect = m + (x - m) / (1.0 + 3.0 * w);
  EXPECT_LE((tikhonov_closed_form(d.matrix, w, x) - expect).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((tikhonov_closed_form(d.matrix, w, Vector::Constant(3, 4.0)) - Vector::Constant(3, 4.0))
                .cwiseAbs()
                .maxCoeff(),
            1e-14);
  EXPECT_THROW(tikhonov_closed_form(d.matrix, 0.0, x), Error);
}

TEST(Dad, ConvergesToClosedForm) {
  Graph g = generate_geometric_graph(20, 0.4, 5).graph;
  const LaplacianSpec tn = build_laplacian(g, LaplacianKind::TranslatedNormalized);
  const Matrix ln = build_laplacian(g, LaplacianKind::Normalized).matrix;
  Stream rng(2, 0);
  const Vector x = sample(20, rng);
  for (double w : {0.5, 2.0}) {
    const DenoiseSetup setup = make_denoise_setup(tn, w, 400);
    DenoiseState st = make_denoise_state(setup);
    const Vector y = dad_step(st, setup, x);
    EXPECT_LE((y - tikhonov_closed_form(ln, w, x)).norm() / x.norm(), 1e-8) << w;
  }
  const DenoiseSetup none = make_denoise_setup(tn, 1.0, 0);
  DenoiseState st = make_denoise_state(none);
  EXPECT_EQ(dad_step(st, none, x), Vector::Zero(20));
}

TEST(Online, FirstStepIdentities) {
  Graph g = cycle_graph(6);
  const LaplacianSpec tn = build_laplacian(g, LaplacianKind::TranslatedNormalized);
  const DenoiseSetup setup = make_denoise_setup(tn, 1.5);
  Stream rng(3, 0);
  const Vector x = sample(6, rng);
  // One ARMA_1 step from zero gives phi * x.
  const Vector one = setup.coeffs.phi[0].real() * x;
  for (DenoiseAlgorithm a : {DenoiseAlgorithm::JDMIA, DenoiseAlgorithm::JDMIOA, DenoiseAlgorithm::JDMOA}) {
    DenoiseState st = make_denoise_state(setup);
    EXPECT_LE((denoise_step(a, st, setup, x) - one).cwiseAbs().maxCoeff(), 1e-15) << to_string(a);
    EXPECT_EQ(st.t, 1);
  }
  DenoiseState la = make_denoise_state(setup);
  EXPECT_EQ(la_step(la, x), x);
}

TEST(Online, RunningAverages) {
  Graph g = cycle_graph(5);
  const LaplacianSpec tn = build_laplacian(g, LaplacianKind::TranslatedNormalized);
  const DenoiseSetup setup = make_denoise_setup(tn, 1.0);
  Stream rng(4, 0);
  std::vector<Vector> xs;
  for (int t = 0; t < 7; ++t) xs.push_back(sample(5, rng));
  DenoiseState la = make_denoise_state(setup);
  Vector sum = Vector::Zero(5);
  for (int t = 0; t < 7; ++t) {
    sum += xs[t];
    EXPECT_LE((la_step(la, xs[t]) - sum / (t + 1)).cwiseAbs().maxCoeff(), 1e-14);
  }
  // JDMOA averages the outputs of a filter driven by the raw samples.
  DenoiseState st = make_denoise_state(setup);
  ArmaRunState ref = make_arma_state(setup.coeffs, 5);
  Vector ysum = Vector::Zero(5);
  for (int t = 0; t < 7; ++t) {
    ysum += arma_step(ref, setup.coeffs, setup.op, xs[t]);
    EXPECT_LE((jdmoa_step(st, setup, xs[t]) - ysum / (t + 1)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Online, ConstantInputIsFixedPoint) {
  Graph g = generate_geometric_graph(15, 0.5, 6).graph;
  const LaplacianSpec tn = build_laplacian(g, LaplacianKind::TranslatedNormalized);
  const Matrix ln = build_laplacian(g, LaplacianKind::Normalized).matrix;
  const DenoiseSetup setup = make_denoise_setup(tn, 1.0);
  Stream rng(5, 0);
  const Vector x = sample(15, rng);
  const Vector target = tikhonov_closed_form(ln, 1.0, x);
  DenoiseState st = make_denoise_state(setup);
  Vector y;
  for (int t = 0; t < 300; ++t) y = jdmia_step(st, setup, x);
  EXPECT_LE((y - target).norm() / target.norm(), 1e-10);
}

TEST(Online, NoiseAveragesOut) {
  Graph g = generate_geometric_graph(30, 0.4, 7).graph;
  const LaplacianSpec tn = build_laplacian(g, LaplacianKind::TranslatedNormalized);
  const Matrix ln = build_laplacian(g, LaplacianKind::Normalized).matrix;
  const DenoiseSetup setup = make_denoise_setup(tn, 0.5);
  Stream rng(6, 0);
  const Vector u = sample(30, rng);
  const Vector target = tikhonov_closed_form(ln, 0.5, u);
  for (DenoiseAlgorithm a : {DenoiseAlgorithm::JDMIA, DenoiseAlgorithm::JDMIOA, DenoiseAlgorithm::JDMOA}) {
    DenoiseState st = make_denoise_state(setup);
    Stream noise(7, 0);
    double early = 0, late = 0;
    for (int t = 1; t <= 2000; ++t) {
      const Vector y = denoise_step(a, st, setup, u + sample(30, noise));
      if (t == 20) early = (y - target).norm();
      if (t == 2000) late = (y - target).norm();
    }
    EXPECT_LT(late, 0.3 * early) << to_string(a);
  }
}

TEST(Setup, RejectsUntranslated) {
  const Graph g = cycle_graph(4);
  EXPECT_THROW(make_denoise_setup(build_laplacian(g, LaplacianKind::Discrete), 1.0), Error);
  EXPECT_THROW(make_denoise_setup(build_laplacian(g, LaplacianKind::TranslatedNormalized), 1.0, -1), Error);
}
