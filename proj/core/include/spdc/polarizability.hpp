#pragma once
#include <Eigen/Core>
#include <array>
#include <spdc/crystal_optics.hpp>
#include <spdc/d_tensor.hpp>

namespace spdc::chi2 {

using optics::Direction;
using optics::Frame;
using optics::Vec3;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Full chi(q, m, n), zero-based.
struct Chi2Tensor {
  std::array<double, 27> v{};
  double &operator()(int q, int m, int n) { return v[9 * q + 3 * m + n]; }
  double operator()(int q, int m, int n) const { return v[9 * q + 3 * m + n]; }
};

/// Contracted column l(m, n): 11->0, 22->1, 33->2, 23/32->3, 13/31->4, 12/21->5.
int contracted_index(int m, int n);

/// chi(q, m, n) = 2 d(q, l(m, n)).
Chi2Tensor expand_contracted(const DTensor &d);
/// Inverse of expand_contracted; the (m, n) pair is symmetrized first.
DTensor contract(const Chi2Tensor &chi);

enum class PolarizationCase { OO, EE, EO, OE };

const char *to_string(PolarizationCase c);

enum class VectorForm {
  Verbatim, ///< the printed field vectors, norm defect included
  Appendix, ///< the vectors behind the appendix product columns
  Strict,   ///< null space of the crystal field equations (extraordinary only)
};

/// Verbatim: (-sin theta, cos theta, 0). Appendix and Strict: (sin phi, -cos phi, 0).
Vec3 pol_vector_ordinary(const Direction &dir_cr, VectorForm form = VectorForm::Verbatim);

/// Verbatim: (-cos t cos p, -cos t sin p, sin t cos p). Appendix: (-cos t cos p, -cos t sin p, sin t).
/// Strict needs the principal indexes and throws NullspaceDegenerate on the optic axis.
Vec3 pol_vector_extraordinary(const Direction &dir_cr, VectorForm form = VectorForm::Verbatim,
                              const optics::PrincipalIndexes *indexes = nullptr);

/// Matrix of the crystal field equations for direction s and index n.
Eigen::Matrix3d field_equation_matrix(const optics::PrincipalIndexes &indexes, const Vec3 &s, double n);

/// (e1 e1', e2 e2', e3 e3', e2 e3' + e3 e2', e1 e3' + e3 e1', e1 e2' + e2 e1')
Vec6 product_from_vectors(const Vec3 &e, const Vec3 &e_prime);

/// Appendix closed-form columns for (signal, idler) crystal-frame directions.
Vec6 product_vector(PolarizationCase c, const Direction &dir_s_cr, const Direction &dir_i_cr);

struct PolarizabilityVector {
  Vec3 v{Vec3::Zero()};
  Frame frame{Frame::Crystal};
};

/// P = 4 d . product_vector.
PolarizabilityVector polarizability_vector(const DTensor &d, PolarizationCase c, const Direction &dir_s_cr,
                                           const Direction &dir_i_cr);

/// Appendix closed forms for P (printed without the factor 4).
Vec3 printed_polarizability(const DTensor &d, PolarizationCase c, const Direction &dir_s_cr,
                            const Direction &dir_i_cr);

PolarizabilityVector to_lab(const PolarizabilityVector &p, double theta_c, double phi_c);
PolarizabilityVector to_crystal(const PolarizabilityVector &p, double theta_c, double phi_c);

/// -E_p (e_hat . p_lab)
double interaction_energy(double e_p, const Vec3 &e_hat, const PolarizabilityVector &p_lab);

/// Printed expansion of the (o,e) energy for an x-polarized pump, per unit field, general d.
double printed_v_oe(const DTensor &d, double theta_c, double phi_c, const Direction &dir_s_cr,
                    const Direction &dir_i_cr);
/// The same with only d11, d22, d15 kept.
double printed_v_oe_bbo(const DTensor &d, double theta_c, double phi_c, const Direction &dir_s_cr,
                        const Direction &dir_i_cr);

/// Printed transverse (x, y) components of the (o,e) polarizability, d11/d22/d15 pattern.
Eigen::Vector2d printed_transverse_p_oe(const DTensor &d, double theta_c, double phi_c, double theta_i_cr,
                                        double phi_i_cr, double phi_s_cr);

/// Sum over x, y of (integral over phi_i_cr in [0, 2pi] of the transverse P_oe component)^2,
/// by Gauss-Legendre quadrature.
double azimuthal_ring_integral(const DTensor &d, double theta_c, double phi_c, double theta_i_cr,
                               double phi_s_cr, int nodes = 64);
/// 4 d15^2 pi^2 sin^2 theta' sin^2 phi (cos^2 theta_c cos^2 phi_c + sin^2 phi_c)
double azimuthal_ring_integral_closed_form(const DTensor &d, double theta_c, double phi_c, double theta_i_cr,
                                           double phi_s_cr);

} // namespace spdc::chi2
