#include "sgfl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace sgfl {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p), akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k), aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  // Exact zero keeps the sweep from reintroducing rounding noise.
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double vkp = v(k, p), vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

Spectrum Spectrum::shifted(double offset) const {
  Spectrum out = *this;
  out.eigenvalues.array() += offset;
  return out;
}

Spectrum symmetric_eigen(const Matrix& input, const JacobiOptions& options) {
  if (input.rows() != input.cols()) throw Error("eigendecomposition needs a square matrix");
  const Eigen::Index n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);

  double off = off_diagonal_norm(a);
  int sweep = 0;
  while (off > options.tolerance * scale) {
    if (sweep == options.max_sweeps) {
      throw NumericalError("Jacobi eigensolver did not converge; off-diagonal residual " +
                           std::to_string(off));
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
    off = off_diagonal_norm(a);
    ++sweep;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });

  Spectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]);
    Vector col = v.col(order[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > 1e-9) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
    out.eigenvectors.col(k) = col;
  }
  return out;
}

Vector gft(const Spectrum& spectrum, const Vector& x) {
  if (x.size() != spectrum.eigenvectors.rows()) throw Error("gft: dimension mismatch");
  return spectrum.eigenvectors.transpose() * x;
}

Vector inverse_gft(const Spectrum& spectrum, const Vector& coefficients) {
  if (coefficients.size() != spectrum.eigenvectors.cols())
    throw Error("inverse gft: dimension mismatch");
  return spectrum.eigenvectors * coefficients;
}

double spectral_norm(const Spectrum& spectrum) {
  return spectrum.eigenvalues.cwiseAbs().maxCoeff();
}

}  // namespace sgfl
