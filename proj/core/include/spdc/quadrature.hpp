#pragma once
#include <vector>

namespace spdc::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

/// Composite rule on [a, b]: `panels` equal panels, each with an `order`-point Gauss-Legendre rule.
Rule composite_gauss_legendre(double a, double b, int panels, int order);

/// Rule with at least `min_nodes` nodes on [a, b] built from fixed-order panels.
Rule panel_rule(double a, double b, int min_nodes, int order = 16);

template <class F> double integrate(const Rule &rule, F &&f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

} // namespace spdc::quad
