#include <spdc/error.hpp>
#include <spdc/pump_spectrum.hpp>
#include <spdc/quadrature.hpp>

#include <cmath>
#include <sstream>

namespace spdc::pump {

using optics::kPi;
using optics::kTwoPi;

double laguerre(int p, int l, double x) {
  if (p < 0 || l < 0 || p > kMaxModeIndex || l > kMaxModeIndex)
    fail(ErrorCode::InvalidArgument, "Laguerre indexes must lie in [0, 20]");
  if (p == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + l - x;
  for (int k = 1; k < p; ++k) {
    double next = ((2.0 * k + 1.0 + l - x) * cur - (k + l) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double PumpBeam::waist() const { return std::sqrt(waist_sq()); }

void PumpBeam::validate() const {
  if (l < 0 || p < 0 || l > kMaxModeIndex || p > kMaxModeIndex)
    fail(ErrorCode::InvalidArgument, "mode indexes l, p must lie in [0, 20]");
  if (!(lambda_um > 0.0)) fail(ErrorCode::InvalidArgument, "pump wavelength must be positive");
  if (!(z_rayleigh_um > 0.0)) fail(ErrorCode::InvalidArgument, "Rayleigh range must be positive");
  if (!(k_p > 0.0)) fail(ErrorCode::InvalidArgument, "pump wave number must be positive");
  if (std::abs(polarization.norm() - 1.0) > 1e-9)
    fail(ErrorCode::InvalidArgument, "pump polarization must be a unit vector");
}

PumpBeam PumpBeam::in_crystal(const optics::CrystalConfig &crystal, double lambda_um, int l, int p,
                              double z_rayleigh_um, cplx amplitude, Vec3 polarization) {
  PumpBeam b;
  b.lambda_um = lambda_um;
  b.l = l;
  b.p = p;
  b.z_rayleigh_um = z_rayleigh_um;
  b.amplitude = amplitude;
  b.polarization = polarization;
  b.k_p = kTwoPi / lambda_um * optics::pump_index(crystal.sellmeier, crystal.theta_c, lambda_um);
  b.validate();
  return b;
}

double DeltaK::azimuth() const { return (dkx == 0.0 && dky == 0.0) ? 0.0 : std::atan2(dky, dkx); }

DeltaK DeltaK::from_pair(const Vec3 &ks, const Vec3 &ki, double k_p) {
  Vec3 d = ks + ki;
  return {d.x(), d.y(), d.z() - k_p};
}

DeltaK DeltaK::from_xi(const PumpBeam &beam, double xi, double alpha, double dkz) {
  double rho = std::sqrt(xi * beam.k_p / beam.z_rayleigh_um);
  return {rho * std::cos(alpha), rho * std::sin(alpha), dkz};
}

cplx lg_amplitude(const PumpBeam &beam, double r, double phi, double z) {
  const double zr = beam.z_rayleigh_um;
  const double g = 1.0 + (z / zr) * (z / zr);
  const double w2 = beam.waist_sq() * g;
  const double u = 2.0 * r * r / w2;
  double mag = std::pow(std::sqrt(u), beam.l) * laguerre(beam.p, beam.l, u) * std::exp(-r * r / w2) /
               std::sqrt(g);
  double phase = -beam.k_p * r * r * z / (2.0 * (z * z + zr * zr)) + beam.l * phi +
                 (2 * beam.p + beam.l + 1) * std::atan(z / zr);
  return beam.amplitude * std::polar(mag, phase);
}

void QuadratureSpec::validate() const {
  if (r_nodes < 1 || phi_nodes < 1 || z_nodes < 1)
    fail(ErrorCode::InvalidArgument, "quadrature node counts must be positive");
  if (!(r_cutoff_waists >= 6.0))
    fail(ErrorCode::InvalidArgument, "radial cutoff must be at least 6 waists");
  if (!(tolerance > 0.0)) fail(ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
  if (max_doublings < 1) fail(ErrorCode::InvalidArgument, "max_doublings must be at least 1");
}

namespace {

struct QuadResult {
  cplx value;
  double abs_scale;
};

QuadResult tensor_quadrature(const PumpBeam &beam, double z_lo, double z_hi, double r_max,
                             const DeltaK &dk, int nr, int nphi, int nz) {
  quad::Rule rr = quad::panel_rule(0.0, r_max, nr);
  quad::Rule rp = quad::panel_rule(0.0, kTwoPi, nphi);
  quad::Rule rz = quad::panel_rule(z_lo, z_hi, nz);

  std::vector<double> cphi(rp.size()), sphi(rp.size());
  for (std::size_t j = 0; j < rp.size(); ++j) {
    cphi[j] = std::cos(rp.nodes[j]);
    sphi[j] = std::sin(rp.nodes[j]);
  }
  cplx total{0.0, 0.0};
  double scale = 0.0;
  for (std::size_t k = 0; k < rz.size(); ++k) {
    const double z = rz.nodes[k];
    const cplx kz = std::polar(1.0, -dk.dkz * z);
    cplx sum_z{0.0, 0.0};
    for (std::size_t i = 0; i < rr.size(); ++i) {
      const double r = rr.nodes[i];
      cplx sum_phi{0.0, 0.0};
      double abs_phi = 0.0;
      for (std::size_t j = 0; j < rp.size(); ++j) {
        cplx f = lg_amplitude(beam, r, rp.nodes[j], z) *
                 std::polar(1.0, -(dk.dkx * r * cphi[j] + dk.dky * r * sphi[j]));
        sum_phi += rp.weights[j] * f;
        abs_phi += rp.weights[j] * std::abs(f);
      }
      sum_z += rr.weights[i] * r * sum_phi;
      scale += rz.weights[k] * rr.weights[i] * r * abs_phi;
    }
    total += rz.weights[k] * kz * sum_z;
  }
  return {total, scale};
}

} // namespace

cplx psi_tilde_numeric(const PumpBeam &beam, double crystal_length, double z0, const DeltaK &dk,
                       const QuadratureSpec &spec) {
  beam.validate();
  spec.validate();
  if (!(crystal_length > 0.0)) fail(ErrorCode::InvalidArgument, "crystal length must be positive");
  const double z_lo = z0 - 0.5 * crystal_length;
  const double z_hi = z0 + 0.5 * crystal_length;
  const double z_max = std::max(std::abs(z_lo), std::abs(z_hi));
  const double w_max = beam.waist() * std::sqrt(1.0 + (z_max / beam.z_rayleigh_um) * (z_max / beam.z_rayleigh_um));
  const double r_max = spec.r_cutoff_waists * w_max;

  // azimuthal node floor: 8 per unit of phase winding across the disk
  const int phi_floor = static_cast<int>(std::ceil(8.0 * (beam.l + std::sqrt(dk.rho_sq()) * r_max)));
  int nr = spec.r_nodes;
  int nphi = std::max(spec.phi_nodes, phi_floor);
  int nz = spec.z_nodes;

  QuadResult prev = tensor_quadrature(beam, z_lo, z_hi, r_max, dk, nr, nphi, nz);
  double last_diff = 0.0;
  for (int d = 0; d < spec.max_doublings; ++d) {
    nr *= 2;
    nphi *= 2;
    nz *= 2;
    QuadResult next = tensor_quadrature(beam, z_lo, z_hi, r_max, dk, nr, nphi, nz);
    last_diff = std::abs(next.value - prev.value);
    if (last_diff <= spec.tolerance * next.abs_scale) return next.value;
    prev = next;
  }
  std::ostringstream os;
  os << "quadrature did not reach tolerance " << spec.tolerance << " after " << spec.max_doublings
     << " doublings (last change " << last_diff / prev.abs_scale << ")";
  fail(ErrorCode::ConvergenceFailure, os.str());
}

double sinc(double x) {
  if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double sinc_argument(const PumpBeam &beam, double lc, double dkz, double xi, SpectrumForm form) {
  const double zr = beam.z_rayleigh_um;
  double c = form == SpectrumForm::Printed ? 4.0 : 0.0;
  return lc / (4.0 * zr) * (c - 2.0 * zr * dkz + xi);
}

double transverse_shape(int l, int p, double xi) {
  double L = laguerre(p, l, xi);
  return std::exp(-xi) * std::pow(xi, l) * L * L;
}

double spectrum_prefactor_sq(const PumpBeam &beam, double lc, SpectrumForm form) {
  double s = lc * beam.z_rayleigh_um / beam.k_p;
  double a2 = std::norm(beam.amplitude);
  if (form == SpectrumForm::Printed) return kPi * kPi * std::pow(4.0, -beam.l) * a2 * s * s;
  return 4.0 * kPi * kPi * a2 * s * s;
}

cplx psi_tilde_analytic(const PumpBeam &beam, double lc, const DeltaK &dk, SpectrumForm form) {
  const int l = beam.l, p = beam.p;
  const double xi = dk.xi(beam);
  const double alpha = dk.azimuth();
  const double radial = std::exp(-0.5 * xi) * std::pow(xi, 0.5 * l) * laguerre(p, l, xi);
  const double s = sinc(sinc_argument(beam, lc, dk.dkz, xi, form));
  const double scale = lc * beam.z_rayleigh_um / beam.k_p;
  if (form == SpectrumForm::Printed) {
    // -pi i^{l+1} 2^{-l} A (l_c z_R/k_P) e^{i(pi p + l alpha)}
    cplx pre = -kPi * std::pow(cplx(0.0, 1.0), l + 1) * std::pow(2.0, -l) * beam.amplitude * scale;
    return pre * std::polar(1.0, kPi * p + l * alpha) * radial * s;
  }
  // 2 pi A (-i)^l (-1)^p (z_R/k_P) l_c e^{i l alpha}
  cplx pre = 2.0 * kPi * beam.amplitude * std::pow(cplx(0.0, -1.0), l) * (p % 2 ? -1.0 : 1.0) * scale;
  return pre * std::polar(1.0, l * alpha) * radial * s;
}

double f_transv(const PumpBeam &beam, double lc, double xi, SpectrumForm form) {
  if (xi < 0.0) fail(ErrorCode::InvalidArgument, "xi must be nonnegative");
  return spectrum_prefactor_sq(beam, lc, form) * transverse_shape(beam.l, beam.p, xi);
}

double f_long(const PumpBeam &beam, double lc, double dkz, double xi, SpectrumForm form) {
  if (xi < 0.0) fail(ErrorCode::InvalidArgument, "xi must be nonnegative");
  double s = sinc(sinc_argument(beam, lc, dkz, xi, form));
  return s * s;
}

double prob_density(const PumpBeam &beam, double lc, const DeltaK &dk, SpectrumForm form) {
  double xi = dk.xi(beam);
  return f_long(beam, lc, dk.dkz, xi, form) * f_transv(beam, lc, xi, form);
}

bool thick_crystal(const PumpBeam &beam, double lc) { return lc / beam.z_rayleigh_um > 0.1; }

cplx time_window(double dw, double tau, double t) {
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "tau must be positive");
  double mag = std::abs(dw * tau) < 1e-8 ? tau : std::sin(0.5 * dw * tau) / (0.5 * dw);
  return std::polar(1.0, dw * (t - 0.5 * tau)) * mag;
}

PrintedResiduals printed_residuals(const PumpBeam &beam, double lc, const DeltaK &dk, cplx reference) {
  const double xi = dk.xi(beam);
  double xe = sinc_argument(beam, lc, dk.dkz, xi, SpectrumForm::Exact);
  double xp = sinc_argument(beam, lc, dk.dkz, xi, SpectrumForm::Printed);
  cplx printed = psi_tilde_analytic(beam, lc, dk, SpectrumForm::Printed);
  PrintedResiduals r{};
  r.prefactor_ratio = std::abs(printed) / std::abs(reference) * std::abs(sinc(xe) / sinc(xp));
  r.phase_offset = std::arg(printed / reference);
  r.sinc_offset = xp - xe;
  return r;
}

} // namespace spdc::pump
