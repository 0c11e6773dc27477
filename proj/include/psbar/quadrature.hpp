#pragma once

#include <span>
#include <vector>

namespace psbar {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre nodes and weights (Newton iteration on P_n),
/// nodes ascending.
GaussRule gauss_legendre(int n);

/// Integral of f over consecutive panels [edges[i], edges[i+1]] with an
/// n-point Gauss-Legendre rule per panel.
template <class F>
double integrate_panels(F&& f, std::span<const double> edges, const GaussRule& rule) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double half = 0.5 * (edges[i + 1] - edges[i]);
    const double mid = 0.5 * (edges[i + 1] + edges[i]);
    double panel = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      panel += rule.weights[k] * f(mid + half * rule.nodes[k]);
    }
    total += half * panel;
  }
  return total;
}

/// Panel edges 0, h, 2h, 4h, ... up to at least rmax (geometric after the first).
std::vector<double> geometric_edges(double first, double rmax);

}  // namespace psbar
