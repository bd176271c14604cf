#pragma once

#include <vector>

namespace polytrap {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Computed by Newton iteration on P_n; accurate to machine precision.
const GaussLegendre& gauss_legendre(int n);

/// Composite rule: `panels` equal subintervals of [a, b], each carrying an
/// `order`-point Gauss-Legendre rule. Nodes are strictly increasing; for a
/// symmetric interval and even panel count the grid is symmetric about 0.
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

CompositeRule composite_gauss(double a, double b, int panels, int order);

/// integral of f over [a,b] with the composite rule.
template <class F>
double integrate(F&& f, double a, double b, int panels, int order) {
    const auto r = composite_gauss(a, b, panels, order);
    double acc = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * f(r.nodes[i]);
    return acc;
}

} // namespace polytrap
