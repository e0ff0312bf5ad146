#ifndef SGFL_DESIGN_HPP
#define SGFL_DESIGN_HPP

#include <functional>
#include <utility>
#include <vector>

#include "sgfl/filters.hpp"
#include "sgfl/laplacian.hpp"
#include "sgfl/spectrum.hpp"

namespace sgfl {

/// Desired frequency response H*(lambda) over [lambda_min, lambda_max].
class ResponseTarget {
 public:
  enum class Kind { IdealLowpass, Tikhonov, Tabulated, Function };

  /// 1 below `cutoff`, 0 from `cutoff` on.
  static ResponseTarget ideal_lowpass(double cutoff, double lambda_min, double lambda_max);
  /// 1 / (1 + w * (lambda + shift) / scale): the Tikhonov smoother for the
  /// regularizer L whose translated form is scale * L - shift * I.
  static ResponseTarget tikhonov(double w, double lambda_min, double lambda_max,
                                 double scale = 1.0, double shift = 0.0);
  /// Samples (lambda, H*) sorted by lambda; the fit uses these points.
  static ResponseTarget tabulated(std::vector<std::pair<double, double>> samples);
  static ResponseTarget function(std::function<double(double)> fn, double lambda_min,
                                 double lambda_max);

  Kind kind() const { return kind_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  double cutoff() const { return cutoff_; }
  double value(double lambda) const;

  /// Fitting grid: the tabulated samples, otherwise `grid_size` uniform
  /// points on [lambda_min, lambda_max].
  std::vector<double> grid(int grid_size) const;

 private:
  Kind kind_ = Kind::Function;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
  double cutoff_ = 0.0;
  double w_ = 0.0;
  double scale_ = 1.0;
  double shift_ = 0.0;
  std::vector<std::pair<double, double>> samples_;
  std::function<double(double)> fn_;
};

inline constexpr int kDefaultGridSize = 201;

/// Least-squares polynomial fit of order K on the target grid
/// (column-equilibrated Householder QR on the Vandermonde matrix).
/// Throws NumericalError on rank deficiency.
FirCoeffs design_fir_ls(const ResponseTarget& target, int order,
                        int grid_size = kDefaultGridSize);

/// ARMA_1 whose steady state on the translated Laplacian M = a L - s I
/// equals (I + w L)^{-1}: psi = -w / (a + w s), phi = a / (a + w s).
/// Accepts the translated kinds with rho <= 1 (translated normalized and
/// scaled translated discrete).
ArmaCoeffs design_arma1_tikhonov(double w, const LaplacianSpec& lap);

/// Coefficients with the given poles and residues: psi = 1/p, phi = -r psi.
/// Throws "unstable pole" if some |p_k| <= rho.
ArmaCoeffs arma_from_poles(const std::vector<cplx>& poles, const std::vector<cplx>& residues,
                           double rho);

/// K conjugate-closed poles c * exp(i pi (2k - 1) / K), k = 1..K.
std::vector<cplx> circle_poles(int order, double radius);

/// Residues for fixed conjugate-closed poles minimising the squared error of
/// sum_k r_k / (lambda - p_k) against the target on the grid; conjugate
/// poles get conjugate residues so the response is real.
ArmaCoeffs design_arma_ls_with_poles(const ResponseTarget& target,
                                     const std::vector<cplx>& poles,
                                     int grid_size = kDefaultGridSize);

/// design_arma_ls_with_poles on circle_poles(order, pole_radius); requires
/// pole_radius > max(|lambda_min|, |lambda_max|).
ArmaCoeffs design_arma_ls(const ResponseTarget& target, int order, double pole_radius,
                          int grid_size = kDefaultGridSize);

/// Sum of squared errors of a filter's response on the target grid.
double fit_residual(const FilterCoeffs& c, const ResponseTarget& target,
                    int grid_size = kDefaultGridSize);
/// Largest absolute error on the grid.
double max_fit_error(const FilterCoeffs& c, const ResponseTarget& target,
                     int grid_size = kDefaultGridSize);

/// Median eigenvalue, used as the low-pass cut-off for white-spectrum inputs.
double median_eigenvalue(const Spectrum& spectrum);

}  // namespace sgfl

#endif  // SGFL_DESIGN_HPP
