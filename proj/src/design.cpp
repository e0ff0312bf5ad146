#include "sgfl/design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sgfl {

ResponseTarget ResponseTarget::ideal_lowpass(double cutoff, double lambda_min,
                                             double lambda_max) {
  if (!(lambda_min < lambda_max)) throw Error("target range must be non-empty");
  if (cutoff < lambda_min || cutoff > lambda_max) throw Error("cut-off outside target range");
  ResponseTarget t;
  t.kind_ = Kind::IdealLowpass;
  t.cutoff_ = cutoff;
  t.lambda_min_ = lambda_min;
  t.lambda_max_ = lambda_max;
  return t;
}

ResponseTarget ResponseTarget::tikhonov(double w, double lambda_min, double lambda_max,
                                        double scale, double shift) {
  if (!(w > 0.0)) throw Error("Tikhonov weight must be positive");
  if (!(lambda_min < lambda_max)) throw Error("target range must be non-empty");
  ResponseTarget t;
  t.kind_ = Kind::Tikhonov;
  t.w_ = w;
  t.scale_ = scale;
  t.shift_ = shift;
  t.lambda_min_ = lambda_min;
  t.lambda_max_ = lambda_max;
  return t;
}

ResponseTarget ResponseTarget::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw Error("tabulated target needs at least two samples");
  for (std::size_t k = 1; k < samples.size(); ++k)
    if (!(samples[k - 1].first < samples[k].first))
      throw Error("tabulated target must be strictly sorted");
  ResponseTarget t;
  t.kind_ = Kind::Tabulated;
  t.lambda_min_ = samples.front().first;
  t.lambda_max_ = samples.back().first;
  t.samples_ = std::move(samples);
  return t;
}

ResponseTarget ResponseTarget::function(std::function<double(double)> fn, double lambda_min,
                                        double lambda_max) {
  if (!(lambda_min < lambda_max)) throw Error("target range must be non-empty");
  ResponseTarget t;
  t.kind_ = Kind::Function;
  t.fn_ = std::move(fn);
  t.lambda_min_ = lambda_min;
  t.lambda_max_ = lambda_max;
  return t;
}

double ResponseTarget::value(double lambda) const {
  switch (kind_) {
    case Kind::IdealLowpass: return lambda < cutoff_ ? 1.0 : 0.0;
    case Kind::Tikhonov: return 1.0 / (1.0 + w_ * (lambda + shift_) / scale_);
    case Kind::Function: return fn_(lambda);
    case Kind::Tabulated: {
      if (lambda <= samples_.front().first) return samples_.front().second;
      if (lambda >= samples_.back().first) return samples_.back().second;
      auto hi = std::lower_bound(samples_.begin(), samples_.end(), lambda,
                                 [](const auto& s, double v) { return s.first < v; });
      auto lo = hi - 1;
      const double f = (lambda - lo->first) / (hi->first - lo->first);
      return lo->second + f * (hi->second - lo->second);
    }
  }
  return 0.0;
}

std::vector<double> ResponseTarget::grid(int grid_size) const {
  std::vector<double> g;
  if (kind_ == Kind::Tabulated) {
    for (const auto& s : samples_) g.push_back(s.first);
    return g;
  }
  if (grid_size < 2) throw Error("grid needs at least two points");
  g.resize(static_cast<std::size_t>(grid_size));
  for (int k = 0; k < grid_size; ++k)
    g[k] = lambda_min_ + (lambda_max_ - lambda_min_) * k / (grid_size - 1);
  return g;
}

FirCoeffs design_fir_ls(const ResponseTarget& target, int order, int grid_size) {
  if (order < 0) throw Error("FIR order must be nonnegative");
  const std::vector<double> g = target.grid(grid_size);
  const auto rows = static_cast<Eigen::Index>(g.size());
  const Eigen::Index cols = order + 1;
  if (rows < cols) throw Error("grid needs at least K + 1 points");

  Matrix v(rows, cols);
  Vector h(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double power = 1.0;
    for (Eigen::Index k = 0; k < cols; ++k) {
      v(r, k) = power;
      power *= g[r];
    }
    h(r) = target.value(g[r]);
  }
  // Equilibrate columns; monomials of a wide range span many magnitudes.
  Vector col_scale = v.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < cols; ++k) {
    if (col_scale(k) == 0.0) throw NumericalError("rank-deficient Vandermonde matrix");
    v.col(k) /= col_scale(k);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(v);
  qr.setThreshold(1e-13);
  if (qr.rank() < cols) throw NumericalError("rank-deficient Vandermonde matrix");
  const Vector scaled = qr.solve(h);

  FirCoeffs out;
  out.phi.resize(static_cast<std::size_t>(cols));
  for (Eigen::Index k = 0; k < cols; ++k) out.phi[k] = scaled(k) / col_scale(k);
  return out;
}

ArmaCoeffs design_arma1_tikhonov(double w, const LaplacianSpec& lap) {
  if (!(w > 0.0)) throw Error("Tikhonov weight must be positive");
  if (lap.kind != LaplacianKind::TranslatedNormalized &&
      lap.kind != LaplacianKind::ScaledTranslatedDiscrete)
    throw Error("Tikhonov ARMA_1 design needs a translated Laplacian with rho <= 1");
  const double a = lap.edge_scale, s = lap.shift;
  return ArmaCoeffs{{cplx(-w / (a + w * s))}, {cplx(a / (a + w * s))}};
}

ArmaCoeffs arma_from_poles(const std::vector<cplx>& poles, const std::vector<cplx>& residues,
                           double rho) {
  if (poles.empty() || poles.size() != residues.size())
    throw Error("arma_from_poles: need matching non-empty pole and residue lists");
  ArmaCoeffs c;
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (!(std::abs(poles[k]) > rho)) throw Error("unstable pole");
    const cplx psi = 1.0 / poles[k];
    c.psi.push_back(psi);
    c.phi.push_back(-residues[k] * psi);
  }
  return c;
}

std::vector<cplx> circle_poles(int order, double radius) {
  if (order < 1) throw Error("ARMA order must be >= 1");
  std::vector<cplx> poles;
  for (int k = 1; k <= order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k - 1.0) / order;
    cplx pole = std::polar(radius, theta);
    if (2 * k - 1 == order) pole = cplx(-radius, 0.0);  // exactly real
    poles.push_back(pole);
  }
  return poles;
}

namespace {

constexpr double kRealTol = 1e-14;

bool is_real_pole(cplx p) { return std::abs(p.imag()) <= kRealTol * std::abs(p); }

}  // namespace

ArmaCoeffs design_arma_ls_with_poles(const ResponseTarget& target,
                                     const std::vector<cplx>& poles, int grid_size) {
  if (poles.empty()) throw Error("ARMA design needs at least one pole");
  const double range = std::max(std::abs(target.lambda_min()), std::abs(target.lambda_max()));

  // Pair each complex pole with its conjugate; one real unknown per real
  // pole, two (Re r, Im r) per conjugate pair.
  struct Slot {
    int first = -1;
    int second = -1;  // conjugate partner, -1 for real poles
  };
  std::vector<Slot> slots;
  std::vector<char> used(poles.size(), 0);
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (!(std::abs(poles[k]) > range)) throw Error("unstable pole");
    if (used[k]) continue;
    used[k] = 1;
    if (is_real_pole(poles[k])) {
      slots.push_back({static_cast<int>(k), -1});
      continue;
    }
    int partner = -1;
    for (std::size_t m = k + 1; m < poles.size(); ++m) {
      if (!used[m] && std::abs(poles[m] - std::conj(poles[k])) <= 1e-12 * std::abs(poles[k])) {
        partner = static_cast<int>(m);
        break;
      }
    }
    if (partner < 0) throw Error("complex pole without conjugate partner");
    used[partner] = 1;
    slots.push_back({static_cast<int>(k), partner});
  }

  const std::vector<double> g = target.grid(grid_size);
  Eigen::Index unknowns = 0;
  for (const Slot& s : slots) unknowns += s.second < 0 ? 1 : 2;
  const auto rows = static_cast<Eigen::Index>(g.size());
  if (rows < unknowns) throw Error("grid smaller than the number of residue unknowns");

  Matrix a(rows, unknowns);
  Vector h(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    Eigen::Index col = 0;
    for (const Slot& s : slots) {
      const cplx basis = 1.0 / (g[r] - poles[s.first]);
      if (s.second < 0) {
        a(r, col++) = basis.real();
      } else {
        a(r, col++) = 2.0 * basis.real();
        a(r, col++) = -2.0 * basis.imag();
      }
    }
    h(r) = target.value(g[r]);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(1e-13);
  if (qr.rank() < unknowns) throw NumericalError("rank-deficient residue system");
  const Vector sol = qr.solve(h);

  std::vector<cplx> residues(poles.size());
  Eigen::Index col = 0;
  for (const Slot& s : slots) {
    if (s.second < 0) {
      residues[s.first] = sol(col++);
    } else {
      const cplx r(sol(col), sol(col + 1));
      col += 2;
      residues[s.first] = r;
      residues[s.second] = std::conj(r);
    }
  }
  std::vector<cplx> exact_poles = poles;
  for (const Slot& s : slots) {
    if (s.second < 0) {
      exact_poles[s.first] = cplx(poles[s.first].real(), 0.0);
    } else {
      exact_poles[s.second] = std::conj(poles[s.first]);
    }
  }
  return arma_from_poles(exact_poles, residues, range);
}

ArmaCoeffs design_arma_ls(const ResponseTarget& target, int order, double pole_radius,
                          int grid_size) {
  const double range = std::max(std::abs(target.lambda_min()), std::abs(target.lambda_max()));
  if (!(pole_radius > range)) throw Error("pole radius must exceed the spectral bound");
  return design_arma_ls_with_poles(target, circle_poles(order, pole_radius), grid_size);
}

double fit_residual(const FilterCoeffs& c, const ResponseTarget& target, int grid_size) {
  double sum = 0.0;
  for (double lambda : target.grid(grid_size)) {
    const double e = eval_response(c, lambda).real() - target.value(lambda);
    sum += e * e;
  }
  return sum;
}

double max_fit_error(const FilterCoeffs& c, const ResponseTarget& target, int grid_size) {
  double worst = 0.0;
  for (double lambda : target.grid(grid_size))
    worst = std::max(worst, std::abs(eval_response(c, lambda).real() - target.value(lambda)));
  return worst;
}

double median_eigenvalue(const Spectrum& spectrum) {
  std::vector<double> v(spectrum.eigenvalues.data(),
                        spectrum.eigenvalues.data() + spectrum.eigenvalues.size());
  if (v.empty()) throw Error("empty spectrum");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace sgfl
