#include "polytrap/quadrature.hpp"

#include "polytrap/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace polytrap {

namespace {

GaussLegendre compute_rule(int n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = 3.14159265358979323846;
    // Roots come in +/- pairs; solve for the non-negative half.
    const int half = (n + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Tricomi-style initial guess for root k (counted from the right).
        double x = std::cos(pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n and P_n' by the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - k] = x;
        rule.nodes[k] = -x;
        rule.weights[n - 1 - k] = w;
        rule.weights[k] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0; // kill the -0.0 from the pair copy
    return rule;
}

} // namespace

const GaussLegendre& gauss_legendre(int n) {
    if (n < 1) throw InvalidParameterError("gauss_legendre: order must be >= 1");
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

CompositeRule composite_gauss(double a, double b, int panels, int order) {
    if (!(a < b)) throw InvalidParameterError("composite_gauss: need a < b");
    if (panels < 1) throw InvalidParameterError("composite_gauss: panels must be >= 1");
    const auto& base = gauss_legendre(order);
    CompositeRule rule;
    rule.nodes.reserve(static_cast<size_t>(panels) * order);
    rule.weights.reserve(static_cast<size_t>(panels) * order);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        for (int i = 0; i < order; ++i) {
            rule.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
            rule.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return rule;
}

} // namespace polytrap
