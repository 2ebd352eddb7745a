#include <spdc/error.hpp>
#include <spdc/polarizability.hpp>
#include <spdc/quadrature.hpp>

#include <Eigen/SVD>
#include <cmath>

namespace spdc::chi2 {

using optics::kPi;
using optics::kTwoPi;

int contracted_index(int m, int n) {
  if (m == n) return m;
  int a = std::min(m, n), b = std::max(m, n);
  if (a == 1 && b == 2) return 3;
  if (a == 0 && b == 2) return 4;
  return 5;
}

Chi2Tensor expand_contracted(const DTensor &d) {
  Chi2Tensor chi;
  for (int q = 0; q < 3; ++q)
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n) chi(q, m, n) = 2.0 * d(q, contracted_index(m, n));
  return chi;
}

DTensor contract(const Chi2Tensor &chi) {
  static const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  DTensor d;
  for (int q = 0; q < 3; ++q)
    for (int l = 0; l < 6; ++l) {
      int m = pairs[l][0], n = pairs[l][1];
      d(q, l) = 0.25 * (chi(q, m, n) + chi(q, n, m));
    }
  return d;
}

const char *to_string(PolarizationCase c) {
  switch (c) {
  case PolarizationCase::OO: return "OO";
  case PolarizationCase::EE: return "EE";
  case PolarizationCase::EO: return "EO";
  case PolarizationCase::OE: return "OE";
  }
  return "?";
}

Vec3 pol_vector_ordinary(const Direction &dir, VectorForm form) {
  dir.require(Frame::Crystal, "pol_vector_ordinary");
  if (form == VectorForm::Verbatim) return {-std::sin(dir.theta()), std::cos(dir.theta()), 0.0};
  return {std::sin(dir.phi()), -std::cos(dir.phi()), 0.0};
}

Eigen::Matrix3d field_equation_matrix(const optics::PrincipalIndexes &ix, const Vec3 &s, double n) {
  Eigen::Matrix3d m = n * n * (s * s.transpose());
  Vec3 principal(ix.n_o * ix.n_o, ix.n_o * ix.n_o, ix.n_e * ix.n_e);
  for (int i = 0; i < 3; ++i) m(i, i) += principal(i) - n * n;
  return m;
}

Vec3 pol_vector_extraordinary(const Direction &dir, VectorForm form, const optics::PrincipalIndexes *ix) {
  dir.require(Frame::Crystal, "pol_vector_extraordinary");
  const double ct = std::cos(dir.theta()), st = std::sin(dir.theta());
  const double cp = std::cos(dir.phi()), sp = std::sin(dir.phi());
  if (form == VectorForm::Verbatim) return {-ct * cp, -ct * sp, st * cp};
  if (form == VectorForm::Appendix) return {-ct * cp, -ct * sp, st};
  if (!ix) fail(ErrorCode::InvalidArgument, "strict extraordinary vector needs the principal indexes");
  Vec3 s = dir.unit_vector();
  double n = optics::extraordinary_index_mixed(*ix, s);
  Eigen::Matrix3d m = field_equation_matrix(*ix, s, n);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullV);
  Eigen::Vector3d sv = svd.singularValues();
  double scale = std::max(1.0, m.norm());
  if (sv(1) <= 1e-10 * scale)
    fail(ErrorCode::NullspaceDegenerate, "field equations have rank < 2 (propagation along the optic axis)");
  Vec3 e = svd.matrixV().col(2).normalized();
  if (e.z() < 0.0 || (e.z() == 0.0 && e.x() < 0.0)) e = -e;
  return e;
}

Vec6 product_from_vectors(const Vec3 &e, const Vec3 &f) {
  Vec6 c;
  c << e(0) * f(0), e(1) * f(1), e(2) * f(2), e(1) * f(2) + e(2) * f(1), e(0) * f(2) + e(2) * f(0),
      e(0) * f(1) + e(1) * f(0);
  return c;
}

Vec6 product_vector(PolarizationCase c, const Direction &s, const Direction &i) {
  s.require(Frame::Crystal, "product_vector");
  i.require(Frame::Crystal, "product_vector");
  const double ct = std::cos(s.theta()), st = std::sin(s.theta());
  const double cp = std::cos(s.phi()), sp = std::sin(s.phi());
  const double ct2 = std::cos(i.theta()), st2 = std::sin(i.theta());
  const double cp2 = std::cos(i.phi()), sp2 = std::sin(i.phi());
  Vec6 v;
  switch (c) {
  case PolarizationCase::OO:
    v << sp * sp2, cp * cp2, 0.0, 0.0, 0.0, -cp * sp2 - sp * cp2;
    break;
  case PolarizationCase::EE:
    // 4th entry carries sin(theta') in its second term, as the vector product requires
    v << ct * ct2 * cp * cp2, ct * ct2 * sp * sp2, st * st2, -st * ct2 * sp2 - ct * sp * st2,
        -ct * cp * st2 - st * ct2 * cp2, ct * ct2 * (cp * sp2 + sp * cp2);
    break;
  case PolarizationCase::EO:
    v << -ct * cp * sp2, ct * sp * cp2, 0.0, -st * cp2, st * sp2, ct * cp * cp2 - ct * sp * sp2;
    break;
  case PolarizationCase::OE:
    v << -sp * ct2 * cp2, cp * ct2 * sp2, 0.0, -cp * st2, sp * st2, cp * ct2 * cp2 - sp * ct2 * sp2;
    break;
  }
  return v;
}

namespace {

Eigen::Matrix<double, 3, 6> as_matrix(const DTensor &d) {
  Eigen::Matrix<double, 3, 6> m;
  for (int q = 0; q < 3; ++q)
    for (int l = 0; l < 6; ++l) m(q, l) = d(q, l);
  return m;
}

} // namespace

PolarizabilityVector polarizability_vector(const DTensor &d, PolarizationCase c, const Direction &s,
                                           const Direction &i) {
  return {4.0 * as_matrix(d) * product_vector(c, s, i), Frame::Crystal};
}

Vec3 printed_polarizability(const DTensor &dt, PolarizationCase c, const Direction &s, const Direction &i) {
  s.require(Frame::Crystal, "printed_polarizability");
  i.require(Frame::Crystal, "printed_polarizability");
  const double ct = std::cos(s.theta()), st = std::sin(s.theta());
  const double cp = std::cos(s.phi()), sp = std::sin(s.phi());
  const double ct2 = std::cos(i.theta()), st2 = std::sin(i.theta());
  const double cp2 = std::cos(i.phi()), sp2 = std::sin(i.phi());
  Vec3 out;
  for (int q = 0; q < 3; ++q) {
    auto d = [&](int col) { return dt(q, col - 1); };
    switch (c) {
    case PolarizationCase::OO:
      out(q) = sp2 * (d(1) * sp - d(6) * cp) + cp2 * (d(2) * cp - d(6) * sp);
      break;
    case PolarizationCase::EE:
      out(q) = st2 * (d(3) * st - ct * (d(5) * cp + d(4) * sp)) +
               ct2 * (-st * (d(5) * cp2 + d(4) * sp2) +
                      ct * (d(1) * cp2 * cp + d(6) * cp * sp2 + d(6) * cp2 * sp + d(2) * sp2 * sp));
      break;
    case PolarizationCase::EO:
      out(q) = st * (-d(4) * cp2 + d(5) * sp2) +
               ct * (cp2 * (d(6) * cp + d(2) * sp) - sp2 * (d(1) * cp + d(6) * sp));
      break;
    case PolarizationCase::OE:
      out(q) = st2 * (-d(4) * cp + d(5) * sp) +
               ct2 * (cp * (d(6) * cp2 + d(2) * sp2) - (d(1) * cp2 + d(6) * sp2) * sp);
      break;
    }
  }
  return out;
}

PolarizabilityVector to_lab(const PolarizabilityVector &p, double theta_c, double phi_c) {
  if (p.frame != Frame::Crystal) fail(ErrorCode::WrongFrame, "to_lab expects a crystal-frame vector");
  return {optics::rotation_zy(theta_c, phi_c).inverse().apply(p.v), Frame::Lab};
}

PolarizabilityVector to_crystal(const PolarizabilityVector &p, double theta_c, double phi_c) {
  if (p.frame != Frame::Lab) fail(ErrorCode::WrongFrame, "to_crystal expects a lab-frame vector");
  return {optics::rotation_zy(theta_c, phi_c).apply(p.v), Frame::Crystal};
}

double interaction_energy(double e_p, const Vec3 &e_hat, const PolarizabilityVector &p_lab) {
  if (p_lab.frame != Frame::Lab) fail(ErrorCode::WrongFrame, "interaction_energy expects a lab-frame vector");
  if (std::abs(e_hat.norm() - 1.0) > 1e-9) fail(ErrorCode::InvalidArgument, "pump polarization must be unit");
  return -e_p * e_hat.dot(p_lab.v);
}

double printed_v_oe(const DTensor &dt, double theta_c, double phi_c, const Direction &s, const Direction &i) {
  s.require(Frame::Crystal, "printed_v_oe");
  i.require(Frame::Crystal, "printed_v_oe");
  const double cp = std::cos(s.phi()), sp = std::sin(s.phi());
  const double ct2 = std::cos(i.theta()), st2 = std::sin(i.theta());
  const double cp2 = std::cos(i.phi()), sp2 = std::sin(i.phi());
  auto row = [&](int q) {
    auto d = [&](int col) { return dt(q, col - 1); };
    return -d(4) * cp * st2 + d(2) * ct2 * cp * sp2 - d(1) * ct2 * cp2 * sp + d(5) * st2 * sp +
           d(6) * (ct2 * cp2 * cp - ct2 * sp2 * sp);
  };
  const double ctc = std::cos(theta_c), stc = std::sin(theta_c);
  return ctc * std::cos(phi_c) * row(0) - ctc * std::sin(phi_c) * row(1) + stc * row(2);
}

double printed_v_oe_bbo(const DTensor &dt, double theta_c, double phi_c, const Direction &s,
                        const Direction &i) {
  s.require(Frame::Crystal, "printed_v_oe_bbo");
  i.require(Frame::Crystal, "printed_v_oe_bbo");
  const double cp = std::cos(s.phi()), sp = std::sin(s.phi());
  const double ct2 = std::cos(i.theta()), st2 = std::sin(i.theta());
  const double cp2 = std::cos(i.phi()), sp2 = std::sin(i.phi());
  const double ctc = std::cos(theta_c);
  return -(dt(1, 1) * ctc * ct2 * cp * std::sin(phi_c) * sp2) +
         ctc * std::cos(phi_c) * (-dt(0, 0) * ct2 * cp2 * sp + dt(0, 4) * st2 * sp);
}

Eigen::Vector2d printed_transverse_p_oe(const DTensor &dt, double theta_c, double phi_c, double theta_i,
                                        double phi_i, double phi_s) {
  const double d11 = dt(0, 0), d22 = dt(1, 1), d15 = dt(0, 4);
  const double ctc = std::cos(theta_c), cpc = std::cos(phi_c), spc = std::sin(phi_c);
  const double ct2 = std::cos(theta_i), st2 = std::sin(theta_i);
  const double cp2 = std::cos(phi_i), sp2 = std::sin(phi_i);
  const double cp = std::cos(phi_s), sp = std::sin(phi_s);
  double x = ctc * (d15 * cpc * st2 * sp - ct2 * (d22 * cp * spc * sp2 + d11 * cpc * cp2 * sp));
  double y = d22 * ct2 * cpc * cp * sp2 + (-(d11 * ct2 * cp2) + d15 * st2) * spc * sp;
  return {x, y};
}

double azimuthal_ring_integral(const DTensor &d, double theta_c, double phi_c, double theta_i, double phi_s,
                               int nodes) {
  if (!d.follows_bbo_pattern())
    fail(ErrorCode::InvalidArgument, "azimuthal ring integral assumes the d11/d22/d15 pattern");
  quad::Rule rule = quad::panel_rule(0.0, kTwoPi, nodes);
  double ix = 0.0, iy = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    Eigen::Vector2d p = printed_transverse_p_oe(d, theta_c, phi_c, theta_i, rule.nodes[k], phi_s);
    ix += rule.weights[k] * p.x();
    iy += rule.weights[k] * p.y();
  }
  return ix * ix + iy * iy;
}

double azimuthal_ring_integral_closed_form(const DTensor &d, double theta_c, double phi_c, double theta_i,
                                           double phi_s) {
  double d15 = d(0, 4);
  double a = std::sin(theta_i) * std::sin(phi_s);
  double g = std::pow(std::cos(theta_c) * std::cos(phi_c), 2) + std::pow(std::sin(phi_c), 2);
  return 4.0 * d15 * d15 * kPi * kPi * a * a * g;
}

} // namespace spdc::chi2
