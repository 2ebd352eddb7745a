#pragma once
#include <Eigen/Core>
#include <spdc/d_tensor.hpp>
#include <string>

namespace spdc::optics {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double deg(double degrees) { return degrees * kPi / 180.0; }

enum class Branch { Ordinary, Extraordinary };

/// n^2 = a + b/(lambda^2 - c) - d lambda^2 (ordinary), same shape with e..h (extraordinary).
/// Wavelengths in micrometers.
struct SellmeierCoefficients {
  double a{}, b{}, c{}, d{};
  double e{}, f{}, g{}, h{};
  double lambda_min_um{};
  double lambda_max_um{};

  /// Throws NonPhysical if a pole lies inside the range or n^2 <= 1 somewhere in it.
  void validate() const;
};

/// Beta barium borate constants, valid over [0.22, 1.06] um.
SellmeierCoefficients bbo_sellmeier();

double sellmeier_index(const SellmeierCoefficients &coeffs, Branch branch, double lambda_um);

struct PrincipalIndexes {
  double n_o;
  double n_e;
};

PrincipalIndexes principal_indexes(const SellmeierCoefficients &coeffs, double lambda_um);

enum class Frame { Lab, Crystal };

const char *to_string(Frame frame);

/// Polar/azimuthal pair in a tagged frame. phi is wrapped into [0, 2pi).
class Direction {
public:
  Direction() = default;
  Direction(double theta, double phi, Frame frame);

  static Direction lab(double theta, double phi) { return {theta, phi, Frame::Lab}; }
  static Direction crystal(double theta, double phi) { return {theta, phi, Frame::Crystal}; }
  /// Direction of a nonzero vector; phi from atan2(y, x).
  static Direction from_vector(const Vec3 &v, Frame frame);

  double theta() const { return theta_; }
  double phi() const { return phi_; }
  Frame frame() const { return frame_; }
  Vec3 unit_vector() const;

  /// Throws WrongFrame unless the tag matches.
  const Direction &require(Frame expected, const char *where) const;

private:
  double theta_{0.0};
  double phi_{0.0};
  Frame frame_{Frame::Lab};
};

double wrap_angle(double phi);

class RotationMatrix {
public:
  RotationMatrix() : m_(Mat3::Identity()) {}
  explicit RotationMatrix(const Mat3 &m) : m_(m) {}

  const Mat3 &matrix() const { return m_; }
  Vec3 apply(const Vec3 &v) const { return m_ * v; }
  RotationMatrix inverse() const { return RotationMatrix(m_.transpose()); }

private:
  Mat3 m_;
};

/// R = Rz(phi_c) Ry(theta_c); maps lab vectors to crystal-frame vectors.
RotationMatrix rotation_zy(double theta_c, double phi_c);

struct FrameConversion {
  Direction direction;
  bool degenerate_axis{false}; ///< rotated vector on the crystal z axis; phi set to 0
};

FrameConversion lab_to_crystal(const Direction &dir, double theta_c, double phi_c);
FrameConversion crystal_to_lab(const Direction &dir, double theta_c, double phi_c);

/// Same as lab_to_crystal but throws DegenerateAxis when the result lies on the optic axis.
Direction lab_to_crystal_strict(const Direction &dir, double theta_c, double phi_c);

/// Closed trigonometric form of the crystal angles. phi comes out folded into [0, pi/2]
/// because the arccos loses the quadrant.
struct PrintedCrystalAngles {
  double theta_cr;
  double phi_cr_folded;
};

PrintedCrystalAngles printed_crystal_angles(const Direction &dir_lab, double theta_c, double phi_c);

/// 1/n^2 = (sx^2 + sy^2)/n_e^2 + sz^2/n_o^2 for a crystal-frame unit vector s.
double extraordinary_index_mixed(const PrincipalIndexes &n, const Vec3 &s);
double extraordinary_index_mixed(const SellmeierCoefficients &coeffs, double lambda_um, const Vec3 &s);

/// Fresnel equation multiplied through by its denominators, as a function of eps = n^2.
/// Vanishes at eps = n_o^2 and at the mixed extraordinary value.
double fresnel_cleared_residual(const PrincipalIndexes &n, const Vec3 &s, double eps);

double signal_index(const SellmeierCoefficients &coeffs, const Direction &dir_lab, double theta_c,
                    double phi_c, double lambda_um);

/// Extraordinary index seen by a lab-frame direction. Uses the phi_c = 0 closed form when
/// phi_c is zero and the rotate-then-mix composition otherwise.
double idler_index(const SellmeierCoefficients &coeffs, const Direction &dir_lab, double theta_c,
                   double phi_c, double lambda_um);

/// Closed form for phi_c = 0.
double idler_index_closed_form(const PrincipalIndexes &n, double theta_c, double theta, double phi);

double pump_index(const SellmeierCoefficients &coeffs, double theta_c, double lambda_um);
double pump_index(const PrincipalIndexes &n, double theta_c);

/// Refraction through an exit face normal to the pump axis.
Direction snell_exit(const Direction &dir_internal, double n_inside);

struct CrystalConfig {
  std::string name{"BBO"};
  SellmeierCoefficients sellmeier{bbo_sellmeier()};
  double theta_c{deg(49.7)};
  double phi_c{0.0};
  double length_um{1000.0};
  chi2::DTensor d_tensor{chi2::DTensor::bbo_dominant()};

  void validate() const;
};

CrystalConfig bbo_preset();

} // namespace spdc::optics
