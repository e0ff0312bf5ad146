#include "sgfl/filters.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sgfl {

std::vector<cplx> ArmaCoeffs::poles() const {
  std::vector<cplx> out;
  out.reserve(psi.size());
  for (const cplx& s : psi) {
    if (s == cplx(0.0)) throw Error("ARMA branch with psi = 0 has no finite pole");
    out.push_back(1.0 / s);
  }
  return out;
}

std::vector<cplx> ArmaCoeffs::residues() const {
  std::vector<cplx> out;
  out.reserve(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) {
    if (psi[k] == cplx(0.0)) throw Error("ARMA branch with psi = 0 has no finite pole");
    out.push_back(-phi[k] / psi[k]);
  }
  return out;
}

double ArmaCoeffs::max_abs_psi() const {
  double m = 0.0;
  for (const cplx& s : psi) m = std::max(m, std::abs(s));
  return m;
}

bool ArmaCoeffs::is_stable(double rho) const { return max_abs_psi() * rho < 1.0; }

bool ArmaCoeffs::is_real() const {
  for (std::size_t k = 0; k < psi.size(); ++k)
    if (psi[k].imag() != 0.0 || phi[k].imag() != 0.0) return false;
  return true;
}

int filter_order(const FilterCoeffs& c) {
  return std::visit([](const auto& f) { return f.order(); }, c);
}

std::string filter_name(const FilterCoeffs& c) {
  return std::holds_alternative<FirCoeffs>(c) ? "fir" : "arma";
}

void validate(const FirCoeffs& c) {
  if (c.phi.empty()) throw Error("FIR filter needs at least one coefficient");
}

void validate(const ArmaCoeffs& c) {
  if (c.psi.empty()) throw Error("ARMA filter needs order K >= 1");
  if (c.psi.size() != c.phi.size()) throw Error("ARMA psi/phi length mismatch");
}

Vector fir_apply_static(const FirCoeffs& c, const Matrix& lap, const Vector& x) {
  validate(c);
  if (lap.rows() != x.size() || lap.cols() != x.size())
    throw Error("fir_apply_static: dimension mismatch");
  Vector z = c.phi[0] * x;
  Vector power = x;
  for (std::size_t k = 1; k < c.phi.size(); ++k) {
    power = lap * power;
    z.noalias() += c.phi[k] * power;
  }
  return z;
}

Vector arma_steady_state(const ArmaCoeffs& c, const Matrix& lap, const Vector& x) {
  validate(c);
  const Eigen::Index n = lap.rows();
  CVector z = CVector::Zero(n);
  const CVector xc = x.cast<cplx>();
  for (int k = 0; k < c.order(); ++k) {
    CMatrix system = CMatrix::Identity(n, n) - c.psi[k] * lap.cast<cplx>();
    z += c.phi[k] * system.partialPivLu().solve(xc);
  }
  return z.real();
}

Vector spectral_filter(const Spectrum& spectrum, const std::function<cplx(double)>& response,
                       const Vector& x) {
  Vector coeffs = gft(spectrum, x);
  for (int k = 0; k < spectrum.size(); ++k)
    coeffs(k) *= response(spectrum.eigenvalues(k)).real();
  return inverse_gft(spectrum, coeffs);
}

FirRunState make_fir_state(const FirCoeffs& c, const Vector& x0) {
  validate(c);
  FirRunState s;
  s.last_input = x0;
  s.partial.assign(static_cast<std::size_t>(c.order()), Vector::Zero(x0.size()));
  return s;
}

Vector fir_step_time_varying(FirRunState& state, const FirCoeffs& c, const Matrix& lap_t,
                             const Vector& x_next) {
  const std::size_t taps = state.partial.size();
  for (std::size_t j = taps; j-- > 1;) state.partial[j].noalias() = lap_t * state.partial[j - 1];
  if (taps > 0) state.partial[0].noalias() = lap_t * state.last_input;
  Vector z = c.phi[0] * x_next;
  for (std::size_t j = 0; j < taps; ++j) z.noalias() += c.phi[j + 1] * state.partial[j];
  state.last_input = x_next;
  ++state.t;
  return z;
}

ArmaRunState make_arma_state(const ArmaCoeffs& c, int n) {
  validate(c);
  ArmaRunState s;
  s.y.assign(static_cast<std::size_t>(c.order()), CVector::Zero(n));
  return s;
}

ArmaRunState make_arma_state(const ArmaCoeffs& c, std::vector<CVector> y0) {
  validate(c);
  if (static_cast<int>(y0.size()) != c.order()) throw Error("initial state needs K branches");
  ArmaRunState s;
  s.y = std::move(y0);
  return s;
}

void arma_branch_update(CVector& y, cplx psi, cplx phi, const Matrix& lap, const Vector& x) {
  const Vector re = lap * y.real();
  const Vector im = lap * y.imag();
  for (Eigen::Index i = 0; i < y.size(); ++i)
    y(i) = psi * cplx(re(i), im(i)) + phi * x(i);
}

Vector arma_step(ArmaRunState& state, const ArmaCoeffs& c, const Matrix& lap_t,
                 const Vector& x_t, double rho) {
  for (int k = 0; k < c.order(); ++k) arma_branch_update(state.y[k], c.psi[k], c.phi[k], lap_t, x_t);
  state.unstable_warning = rho > 0.0 && !c.is_stable(rho);
  ++state.t;
  return arma_output(state).real();
}

CVector arma_output(const ArmaRunState& state) {
  CVector z = state.y.front();
  for (std::size_t k = 1; k < state.y.size(); ++k) z += state.y[k];
  return z;
}

cplx eval_response_fir(const FirCoeffs& c, double lambda) {
  validate(c);
  // Horner
  double h = 0.0;
  for (std::size_t k = c.phi.size(); k-- > 0;) h = h * lambda + c.phi[k];
  return h;
}

cplx eval_response_arma(const ArmaCoeffs& c, double lambda) {
  validate(c);
  cplx h = 0.0;
  for (int k = 0; k < c.order(); ++k) {
    if (c.psi[k] == cplx(0.0)) {
      h += c.phi[k];  // memoryless branch, pole at infinity
      continue;
    }
    const cplx pole = 1.0 / c.psi[k];
    const cplx d = lambda - pole;
    if (d == cplx(0.0)) throw Error("pole on evaluation point");
    h += (-c.phi[k] / c.psi[k]) / d;
  }
  return h;
}

cplx eval_response(const FilterCoeffs& c, double lambda) {
  if (const auto* fir = std::get_if<FirCoeffs>(&c)) return eval_response_fir(*fir, lambda);
  return eval_response_arma(std::get<ArmaCoeffs>(c), lambda);
}

cplx eval_2d_response_fir(const FirCoeffs& c, cplx z, double lambda) {
  validate(c);
  const cplx ratio = lambda / z;
  cplx h = 0.0;
  for (std::size_t k = c.phi.size(); k-- > 0;) h = h * ratio + c.phi[k];
  return h;
}

cplx eval_2d_response_arma(const ArmaCoeffs& c, cplx z, double lambda) {
  validate(c);
  const cplx zinv = 1.0 / z;
  cplx h = 0.0;
  for (int k = 0; k < c.order(); ++k) {
    const cplx den = 1.0 - c.psi[k] * lambda * zinv;
    if (std::abs(den) == 0.0) throw Error("ARMA 2-D response denominator vanishes");
    h += c.phi[k] * zinv / den;
  }
  return h;
}

cplx eval_2d_response(const FilterCoeffs& c, cplx z, double lambda) {
  if (const auto* fir = std::get_if<FirCoeffs>(&c)) return eval_2d_response_fir(*fir, z, lambda);
  return eval_2d_response_arma(std::get<ArmaCoeffs>(c), z, lambda);
}

std::vector<Vector> mean_recursion_fir(const FirCoeffs& c, const Matrix& lap_bar,
                                       const MeanSequence& mean_seq, int t_end) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(std::max(t_end, 0)));
  FirRunState state = make_fir_state(c, mean_seq(0));
  for (int t = 0; t < t_end; ++t) out.push_back(fir_step_time_varying(state, c, lap_bar, mean_seq(t + 1)));
  return out;
}

ArmaMeanTrajectory mean_recursion_arma(const ArmaCoeffs& c, const Matrix& lap_bar,
                                       const MeanSequence& mean_seq, int t_end, double rho,
                                       std::vector<CVector> y0) {
  ArmaRunState state = y0.empty() ? make_arma_state(c, static_cast<int>(lap_bar.rows()))
                                  : make_arma_state(c, std::move(y0));
  ArmaMeanTrajectory out;
  out.unstable_warning = rho > 0.0 && !c.is_stable(rho);
  out.z.reserve(static_cast<std::size_t>(std::max(t_end, 0)));
  for (int t = 0; t < t_end; ++t) out.z.push_back(arma_step(state, c, lap_bar, mean_seq(t)));
  return out;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_complex(std::ostream& out, const char* tag, int k, cplx v) {
  out << tag << ' ' << k << ' ' << fmt17(v.real());
  if (v.imag() != 0.0) out << ' ' << fmt17(v.imag());
  out << '\n';
}

}  // namespace

void write_coeffs(std::ostream& out, const FilterCoeffs& c,
                  const std::vector<std::string>& comment_lines) {
  for (const std::string& line : comment_lines) out << "# " << line << '\n';
  if (const auto* fir = std::get_if<FirCoeffs>(&c)) {
    validate(*fir);
    out << "fir " << fir->order() << '\n';
    for (std::size_t k = 0; k < fir->phi.size(); ++k)
      out << "phi " << k << ' ' << fmt17(fir->phi[k]) << '\n';
    return;
  }
  const auto& arma = std::get<ArmaCoeffs>(c);
  validate(arma);
  out << "arma " << arma.order() << '\n';
  for (int k = 0; k < arma.order(); ++k) write_complex(out, "psi", k + 1, arma.psi[k]);
  for (int k = 0; k < arma.order(); ++k) write_complex(out, "phi", k + 1, arma.phi[k]);
}

FilterCoeffs read_coeffs(std::istream& in) {
  std::string line, variant;
  int order = -1;
  std::vector<double> fir_phi;
  std::vector<cplx> psi, phi;
  std::vector<char> seen_psi, seen_phi;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (variant.empty()) {
      if ((tag != "fir" && tag != "arma") || !(ss >> order) || order < 0)
        throw Error("coefficient file: bad header '" + line + "'");
      variant = tag;
      if (variant == "fir") {
        fir_phi.assign(static_cast<std::size_t>(order + 1), 0.0);
        seen_phi.assign(fir_phi.size(), 0);
      } else {
        if (order < 1) throw Error("coefficient file: ARMA order must be >= 1");
        psi.assign(static_cast<std::size_t>(order), 0.0);
        phi.assign(static_cast<std::size_t>(order), 0.0);
        seen_psi.assign(psi.size(), 0);
        seen_phi.assign(phi.size(), 0);
      }
      continue;
    }
    int k = -1;
    double re = 0.0, im = 0.0;
    if (!(ss >> k >> re)) throw Error("coefficient file: malformed line '" + line + "'");
    if (!(ss >> im)) im = 0.0;
    if (variant == "fir") {
      if (tag != "phi" || k < 0 || k > order || seen_phi[k] || im != 0.0)
        throw Error("coefficient file: bad FIR line '" + line + "'");
      fir_phi[k] = re;
      seen_phi[k] = 1;
    } else {
      if (k < 1 || k > order) throw Error("coefficient file: index out of range '" + line + "'");
      auto& target = tag == "psi" ? psi : phi;
      auto& seen = tag == "psi" ? seen_psi : seen_phi;
      if ((tag != "psi" && tag != "phi") || seen[k - 1])
        throw Error("coefficient file: bad ARMA line '" + line + "'");
      target[k - 1] = cplx(re, im);
      seen[k - 1] = 1;
    }
  }
  if (variant.empty()) throw Error("coefficient file: missing header");
  auto complete = [](const std::vector<char>& s) {
    for (char c : s)
      if (!c) return false;
    return true;
  };
  if (variant == "fir") {
    if (!complete(seen_phi)) throw Error("coefficient file: missing FIR coefficients");
    return FirCoeffs{fir_phi};
  }
  if (!complete(seen_psi) || !complete(seen_phi))
    throw Error("coefficient file: missing ARMA coefficients");
  return ArmaCoeffs{psi, phi};
}

void save_coeffs(const std::string& path, const FilterCoeffs& c,
                 const std::vector<std::string>& comment_lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_coeffs(out, c, comment_lines);
}

FilterCoeffs load_coeffs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  return read_coeffs(in);
}

}  // namespace sgfl
