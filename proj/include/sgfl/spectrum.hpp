#ifndef SGFL_SPECTRUM_HPP
#define SGFL_SPECTRUM_HPP

#include "sgfl/types.hpp"

namespace sgfl {

/// Eigenpairs of a symmetric matrix: ascending eigenvalues, orthonormal
/// eigenvector columns. Each eigenvector's first entry with magnitude above
/// 1e-9 is positive.
struct Spectrum {
  Vector eigenvalues;
  Matrix eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  /// Same eigenvectors, eigenvalues shifted by `offset`.
  Spectrum shifted(double offset) const;
};

struct JacobiOptions {
  double tolerance = 1e-12;  ///< on the off-diagonal Frobenius norm, relative to ||A||_F
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigendecomposition. Throws NumericalError carrying the
/// residual off-diagonal norm if the sweep cap is reached.
Spectrum symmetric_eigen(const Matrix& a, const JacobiOptions& options = {});

/// Graph Fourier transform: coefficients on the eigenvector basis.
Vector gft(const Spectrum& spectrum, const Vector& x);
Vector inverse_gft(const Spectrum& spectrum, const Vector& coefficients);

/// Largest absolute eigenvalue, i.e. the spectral norm of a symmetric matrix.
double spectral_norm(const Spectrum& spectrum);

}  // namespace sgfl

#endif  // SGFL_SPECTRUM_HPP
