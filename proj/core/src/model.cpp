#include "polytrap/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polytrap/errors.hpp"

namespace polytrap {

Confinement Confinement::harmonic(double gamma) {
    Confinement c;
    c.m = 0;
    c.gamma = gamma;
    c.coeffs = {1.0};
    validate(c);
    return c;
}

Confinement Confinement::quartic(double gamma, double a1) {
    Confinement c;
    c.m = 1;
    c.gamma = gamma;
    c.coeffs = {-a1, 1.0};
    validate(c);
    return c;
}

Confinement Confinement::sextic(double gamma, double a3, double a1) {
    Confinement c;
    c.m = 2;
    c.gamma = gamma;
    c.coeffs = {a1, a3, 1.0};
    validate(c);
    return c;
}

void validate(const Confinement& c) {
    if (!(c.gamma > 0.0))
        throw InvalidParameterError("confinement: gamma must be > 0, got " +
                                    std::to_string(c.gamma));
    if (c.m < 0 || c.coeffs.size() != static_cast<size_t>(c.m) + 1)
        throw InvalidParameterError("confinement: need m+1 coefficients");
    if (c.coeffs.back() != 1.0)
        throw InvalidParameterError("confinement: top coefficient must be 1");
}

ConfinementValues eval_confinement(const Confinement& c, double y) {
    // Horner in u = y^2. P = gamma*y*q(u), P' = gamma*dq with dq built from
    // (2k+1)*c[k], int_0^y P = gamma*u*r(u) with r from c[k]/(2k+2).
    const double u = y * y;
    double q = 0.0, dq = 0.0, r = 0.0;
    for (int k = c.m; k >= 0; --k) {
        q = q * u + c.coeffs[k];
        dq = dq * u + (2 * k + 1) * c.coeffs[k];
        r = r * u + c.coeffs[k] / (2 * k + 2);
    }
    return {c.gamma * y * q, c.gamma * dq, c.gamma * u * r};
}

double confinement_integral(const Confinement& c, double y) {
    const double u = y * y;
    double r = 0.0;
    for (int k = c.m; k >= 0; --k) r = r * u + c.coeffs[k] / (2 * k + 2);
    return c.gamma * u * r;
}

Coupling Coupling::from_lambda(double lambda) {
    if (!(lambda > 0.0))
        throw InvalidParameterError("coupling: lambda must be > 0, got " +
                                    std::to_string(lambda));
    Coupling cp;
    cp.lambda = lambda;
    cp.g = 2.0 * lambda * (lambda - 1.0);
    cp.h = -2.0 * lambda;
    cp.beta = 2.0 * lambda;
    return cp;
}

void validate(const System& s) {
    if (s.n < 1) throw InvalidParameterError("system: n must be >= 1");
    validate(s.trap);
    if (!(s.coupling.lambda > 0.0))
        throw InvalidParameterError("system: lambda must be > 0");
}

Rescaled rescale_to_monic(const Confinement& c, double lambda) {
    validate(c);
    if (!(lambda > 0.0)) throw InvalidParameterError("rescale: lambda must be > 0");
    Rescaled r;
    r.scale = std::pow(lambda, 1.0 / (2.0 * c.m + 2.0));
    r.monic = c;
    for (int k = 0; k <= c.m; ++k)
        r.monic.coeffs[k] =
            c.coeffs[k] * std::pow(lambda, -double(c.m - k) / (c.m + 1.0));
    r.monic.coeffs[c.m] = 1.0;  // exact, pow(lambda, -0) == 1 anyway
    return r;
}

// Positive stationary points of V in u = y^2: roots of the degree-m
// polynomial q of eval_confinement. Closed forms for m <= 2 (the factory
// shapes); larger m keeps the top-quadratic roots, which is enough for a
// bounding box.
static std::vector<double> stationary_points_u(const Confinement& c) {
    std::vector<double> ustat;
    if (c.m == 1) {
        if (-c.coeffs[0] > 0.0) ustat.push_back(-c.coeffs[0]);
    } else if (c.m >= 2) {
        const double c1 = c.coeffs[1], c0 = c.coeffs[0];
        const double disc = c1 * c1 - 4.0 * c0;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (double u : {(-c1 - sq) / 2.0, (-c1 + sq) / 2.0})
                if (u > 0.0) ustat.push_back(u);
        }
    }
    return ustat;
}

double potential_minimum(const Confinement& c) {
    double vmin = 0.0;  // V(0) = 0
    for (double u : stationary_points_u(c))
        vmin = std::min(vmin, confinement_integral(c, std::sqrt(u)));
    return vmin;
}

double support_halfwidth(const Confinement& c, double lambda, int n) {
    const double vmin = potential_minimum(c);
    const double drop = lambda * (n + 10.0);
    // V increases strictly past its outermost stationary point; bracketing
    // from anywhere inside can land on an inner well wall instead of the
    // outer turning point.
    double lo = 0.0;
    for (double u : stationary_points_u(c)) lo = std::max(lo, std::sqrt(u));
    if (confinement_integral(c, lo) - vmin > drop) return 1.1 * lo;
    double hi = std::max(1.0, 1.5 * lo);
    while (confinement_integral(c, hi) - vmin <= drop) hi *= 1.5;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (confinement_integral(c, mid) - vmin > drop ? hi : lo) = mid;
    }
    return 1.1 * hi;
}

} // namespace polytrap
