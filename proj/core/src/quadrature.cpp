#include <spdc/error.hpp>
#include <spdc/quadrature.hpp>

#include <algorithm>
#include <cmath>

namespace spdc::quad {

Rule gauss_legendre(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "Gauss-Legendre order must be positive");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double pi = 3.14159265358979323846;
  auto legendre = [n](double x, double &p_n, double &dp_n) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    p_n = p1;
    dp_n = n * (x * p1 - p0) / (x * x - 1.0);
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(x, p, dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, p, dp);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1) fail(ErrorCode::InvalidArgument, "panel count must be positive");
  Rule base = gauss_legendre(order);
  Rule r;
  r.nodes.reserve(static_cast<std::size_t>(panels) * order);
  r.weights.reserve(r.nodes.capacity());
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    for (int i = 0; i < order; ++i) {
      r.nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
      r.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return r;
}

Rule panel_rule(double a, double b, int min_nodes, int order) {
  if (min_nodes <= order) return composite_gauss_legendre(a, b, 1, std::max(min_nodes, 1));
  int panels = (min_nodes + order - 1) / order;
  return composite_gauss_legendre(a, b, panels, order);
}

} // namespace spdc::quad
