#include <spdc/crystal_optics.hpp>
#include <spdc/error.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spdc::optics {

namespace {

double sellmeier_n2(double a, double b, double c, double d, double lambda_um) {
  double l2 = lambda_um * lambda_um;
  return a + b / (l2 - c) - d * l2;
}

} // namespace

SellmeierCoefficients bbo_sellmeier() {
  SellmeierCoefficients s;
  s.a = 2.7405;
  s.b = 0.0184;
  s.c = 0.0179;
  s.d = 0.0155;
  s.e = 2.3730;
  s.f = 0.0128;
  s.g = 0.0156;
  s.h = 0.0044;
  s.lambda_min_um = 0.22;
  s.lambda_max_um = 1.06;
  return s;
}

void SellmeierCoefficients::validate() const {
  if (!(lambda_min_um > 0.0) || !(lambda_max_um > lambda_min_um))
    fail(ErrorCode::NonPhysical, "Sellmeier range must satisfy 0 < lambda_min < lambda_max");
  double lo2 = lambda_min_um * lambda_min_um;
  if (!(lo2 - c > 0.0) || !(lo2 - g > 0.0))
    fail(ErrorCode::NonPhysical, "Sellmeier resonance pole inside the valid range");
  // n^2 is not monotone in general; check on a fine grid including both ends.
  const int n = 512;
  for (int i = 0; i <= n; ++i) {
    double lam = lambda_min_um + (lambda_max_um - lambda_min_um) * i / n;
    if (!(sellmeier_n2(a, b, c, d, lam) > 1.0) || !(sellmeier_n2(e, f, g, h, lam) > 1.0)) {
      std::ostringstream os;
      os << "Sellmeier n^2 <= 1 at lambda = " << lam << " um";
      fail(ErrorCode::NonPhysical, os.str());
    }
  }
}

double sellmeier_index(const SellmeierCoefficients &s, Branch branch, double lambda_um) {
  if (!(lambda_um >= s.lambda_min_um && lambda_um <= s.lambda_max_um)) {
    std::ostringstream os;
    os << "wavelength " << lambda_um << " um outside [" << s.lambda_min_um << ", "
       << s.lambda_max_um << "]";
    fail(ErrorCode::OutOfRange, os.str());
  }
  double n2 = branch == Branch::Ordinary ? sellmeier_n2(s.a, s.b, s.c, s.d, lambda_um)
                                         : sellmeier_n2(s.e, s.f, s.g, s.h, lambda_um);
  if (!(n2 > 0.0)) fail(ErrorCode::NonPhysical, "Sellmeier n^2 <= 0");
  return std::sqrt(n2);
}

PrincipalIndexes principal_indexes(const SellmeierCoefficients &coeffs, double lambda_um) {
  return {sellmeier_index(coeffs, Branch::Ordinary, lambda_um),
          sellmeier_index(coeffs, Branch::Extraordinary, lambda_um)};
}

const char *to_string(Frame frame) { return frame == Frame::Lab ? "Lab" : "Crystal"; }

double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

Direction::Direction(double theta, double phi, Frame frame) : frame_(frame) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    std::ostringstream os;
    os << "polar angle " << theta << " outside [0, pi]";
    fail(ErrorCode::InvalidArgument, os.str());
  }
  if (!std::isfinite(phi)) fail(ErrorCode::InvalidArgument, "azimuth is not finite");
  theta_ = theta;
  phi_ = wrap_angle(phi);
}

Direction Direction::from_vector(const Vec3 &v, Frame frame) {
  double norm = v.norm();
  if (!(norm > 0.0)) fail(ErrorCode::InvalidArgument, "zero vector has no direction");
  double z = std::clamp(v.z() / norm, -1.0, 1.0);
  double phi = (v.x() == 0.0 && v.y() == 0.0) ? 0.0 : std::atan2(v.y(), v.x());
  return {std::acos(z), phi, frame};
}

Vec3 Direction::unit_vector() const {
  double st = std::sin(theta_);
  return {st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_)};
}

const Direction &Direction::require(Frame expected, const char *where) const {
  if (frame_ != expected) {
    std::ostringstream os;
    os << where << " expects a " << to_string(expected) << "-frame direction, got "
       << to_string(frame_);
    fail(ErrorCode::WrongFrame, os.str());
  }
  return *this;
}

RotationMatrix rotation_zy(double theta_c, double phi_c) {
  double ct = std::cos(theta_c), st = std::sin(theta_c);
  double cp = std::cos(phi_c), sp = std::sin(phi_c);
  Mat3 rz;
  rz << cp, sp, 0.0, -sp, cp, 0.0, 0.0, 0.0, 1.0;
  Mat3 ry;
  ry << ct, 0.0, -st, 0.0, 1.0, 0.0, st, 0.0, ct;
  return RotationMatrix(rz * ry);
}

namespace {

FrameConversion convert(const Vec3 &v, Frame target) {
  Vec3 u = v.normalized();
  double z = std::clamp(u.z(), -1.0, 1.0);
  double transverse = std::hypot(u.x(), u.y());
  FrameConversion out;
  if (transverse <= 1e-12) {
    out.direction = Direction(std::acos(z), 0.0, target);
    out.degenerate_axis = true;
    return out;
  }
  out.direction = Direction(std::acos(z), std::atan2(u.y(), u.x()), target);
  return out;
}

} // namespace

FrameConversion lab_to_crystal(const Direction &dir, double theta_c, double phi_c) {
  dir.require(Frame::Lab, "lab_to_crystal");
  return convert(rotation_zy(theta_c, phi_c).apply(dir.unit_vector()), Frame::Crystal);
}

FrameConversion crystal_to_lab(const Direction &dir, double theta_c, double phi_c) {
  dir.require(Frame::Crystal, "crystal_to_lab");
  return convert(rotation_zy(theta_c, phi_c).inverse().apply(dir.unit_vector()), Frame::Lab);
}

Direction lab_to_crystal_strict(const Direction &dir, double theta_c, double phi_c) {
  FrameConversion fc = lab_to_crystal(dir, theta_c, phi_c);
  if (fc.degenerate_axis)
    fail(ErrorCode::DegenerateAxis, "direction maps onto the optic axis; azimuth undefined");
  return fc.direction;
}

PrintedCrystalAngles printed_crystal_angles(const Direction &dir_lab, double theta_c, double phi_c) {
  dir_lab.require(Frame::Lab, "printed_crystal_angles");
  double t = dir_lab.theta(), p = dir_lab.phi();
  double ct = std::cos(t), st = std::sin(t), cp = std::cos(p), sp = std::sin(p);
  double ctc = std::cos(theta_c), stc = std::sin(theta_c);
  double cpc = std::cos(phi_c), spc = std::sin(phi_c);

  double cz = ctc * ct + cp * stc * st;
  double n1 = -1.0 + cp * cp * stc * stc * st * st + ctc * ctc * (ct * ct + cp * cp * st * st * spc * spc);
  double n2 = std::pow(ct * stc * spc + cpc * st * sp, 2);
  double n3 = 2.0 * ctc * cpc * cp * st * (ct * cpc * stc - st * spc * sp);
  // Numerator and denominator are both square roots of non-positive numbers; their ratio is real.
  double num = std::sqrt(std::max(0.0, -(n1 + n2 + n3)));
  double den = std::sqrt(std::max(0.0, -((-1.0 + cz) * (1.0 + cz))));
  double ratio = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 1.0;
  return {std::acos(std::clamp(cz, -1.0, 1.0)), std::acos(ratio)};
}

double extraordinary_index_mixed(const PrincipalIndexes &n, const Vec3 &s) {
  double inv = (s.x() * s.x() + s.y() * s.y()) / (n.n_e * n.n_e) + s.z() * s.z() / (n.n_o * n.n_o);
  return 1.0 / std::sqrt(inv);
}

double extraordinary_index_mixed(const SellmeierCoefficients &coeffs, double lambda_um, const Vec3 &s) {
  return extraordinary_index_mixed(principal_indexes(coeffs, lambda_um), s);
}

double fresnel_cleared_residual(const PrincipalIndexes &n, const Vec3 &s, double eps) {
  double rx = eps / (n.n_o * n.n_o);
  double rz = eps / (n.n_e * n.n_e);
  double st2 = s.x() * s.x() + s.y() * s.y();
  return (1.0 - rx) * (1.0 - rz) * ((1.0 - rz) * st2 + (1.0 - rx) * s.z() * s.z());
}

double signal_index(const SellmeierCoefficients &coeffs, const Direction &dir_lab, double, double,
                    double lambda_um) {
  dir_lab.require(Frame::Lab, "signal_index");
  return sellmeier_index(coeffs, Branch::Ordinary, lambda_um);
}

double idler_index_closed_form(const PrincipalIndexes &n, double theta_c, double theta, double phi) {
  double ne = n.n_e, no = n.n_o;
  double cz = std::cos(theta_c) * std::cos(theta) + std::cos(phi) * std::sin(theta_c) * std::sin(theta);
  double sy = std::sin(theta) * std::sin(phi);
  double sx = std::cos(theta_c) * std::cos(phi) * std::sin(theta) - std::sin(theta_c) * std::cos(theta);
  return ne * no / std::sqrt(ne * ne * cz * cz + no * no * (sx * sx + sy * sy));
}

double idler_index(const SellmeierCoefficients &coeffs, const Direction &dir_lab, double theta_c,
                   double phi_c, double lambda_um) {
  dir_lab.require(Frame::Lab, "idler_index");
  PrincipalIndexes n = principal_indexes(coeffs, lambda_um);
  if (phi_c == 0.0) return idler_index_closed_form(n, theta_c, dir_lab.theta(), dir_lab.phi());
  Vec3 s = rotation_zy(theta_c, phi_c).apply(dir_lab.unit_vector());
  return extraordinary_index_mixed(n, s);
}

double pump_index(const PrincipalIndexes &n, double theta_c) {
  double c = std::cos(theta_c), s = std::sin(theta_c);
  return n.n_e * n.n_o / std::sqrt(n.n_e * n.n_e * c * c + n.n_o * n.n_o * s * s);
}

double pump_index(const SellmeierCoefficients &coeffs, double theta_c, double lambda_um) {
  return pump_index(principal_indexes(coeffs, lambda_um), theta_c);
}

Direction snell_exit(const Direction &dir_internal, double n_inside) {
  dir_internal.require(Frame::Lab, "snell_exit");
  double x = n_inside * std::sin(dir_internal.theta());
  if (x > 1.0) fail(ErrorCode::TotalInternalReflection, "n sin(theta) exceeds 1 at the exit face");
  double out = std::asin(x);
  if (dir_internal.theta() > kPi / 2) out = kPi - out;
  return Direction::lab(out, dir_internal.phi());
}

void CrystalConfig::validate() const {
  sellmeier.validate();
  if (!(theta_c >= 0.0 && theta_c <= kPi / 2))
    fail(ErrorCode::InvalidArgument, "theta_c must lie in [0, pi/2]");
  if (!std::isfinite(phi_c)) fail(ErrorCode::InvalidArgument, "phi_c is not finite");
  if (!(length_um > 0.0)) fail(ErrorCode::InvalidArgument, "crystal length must be positive");
}

CrystalConfig bbo_preset() { return CrystalConfig{}; }

} // namespace spdc::optics
