#pragma once
#include <array>

namespace spdc::chi2 {

/// Contracted second-order susceptibility d_ql, 3 rows by 6 columns (pm/V).
/// Indexes are zero-based; d(0, 0) is d11.
struct DTensor {
  std::array<std::array<double, 6>, 3> d{};

  double &operator()(int q, int l) { return d[q][l]; }
  double operator()(int q, int l) const { return d[q][l]; }

  /// Only d11, d22 and d15 nonzero (the dominant BBO set).
  static DTensor bbo_dominant(double d11 = 1.0, double d22 = 1.0, double d15 = 1.0);
  /// Returns a copy with every coefficient outside the d11/d22/d15 pattern zeroed.
  DTensor restricted_to_bbo_pattern() const;
  bool follows_bbo_pattern(double tol = 0.0) const;
};

inline DTensor DTensor::bbo_dominant(double d11, double d22, double d15) {
  DTensor t;
  t(0, 0) = d11;
  t(1, 1) = d22;
  t(0, 4) = d15;
  return t;
}

inline DTensor DTensor::restricted_to_bbo_pattern() const {
  return bbo_dominant(d[0][0], d[1][1], d[0][4]);
}

inline bool DTensor::follows_bbo_pattern(double tol) const {
  for (int q = 0; q < 3; ++q)
    for (int l = 0; l < 6; ++l) {
      bool kept = (q == 0 && l == 0) || (q == 1 && l == 1) || (q == 0 && l == 4);
      if (!kept && (d[q][l] > tol || d[q][l] < -tol)) return false;
    }
  return true;
}

} // namespace spdc::chi2
