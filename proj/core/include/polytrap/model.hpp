#pragma once

#include <cstdint>
#include <vector>

namespace polytrap {

/// Odd confinement polynomial P(y) = gamma * sum_{k=0}^{m} c[k] * y^(2k+1).
///
/// c[k] is the signed coefficient of y^(2k+1) in P/gamma; the top coefficient
/// c[m] is always 1, so the polynomial is monic up to the overall gamma > 0.
/// The trap potential seen by one particle is V(y) = int_0^y P, an even
/// polynomial of degree 2m+2.
struct Confinement {
    int m = 0;                   // half-degree: P has degree 2m+1
    double gamma = 1.0;          // overall scale, > 0
    std::vector<double> coeffs;  // size m+1, coeffs[m] == 1

    /// Harmonic well, P = gamma*y.
    static Confinement harmonic(double gamma);

    /// P = gamma*(y^3 - a1*y). Positive a1 gives a symmetric double well
    /// with minima at y = +-sqrt(a1).
    static Confinement quartic(double gamma, double a1);

    /// P = gamma*(y^5 + a3*y^3 + a1*y), coefficients stored as passed.
    /// Negative a3 with 0 < a1 < a3^2/4 gives a triple well (minima at 0 and
    /// at y^2 = (-a3 + sqrt(a3^2 - 4*a1))/2).
    static Confinement sextic(double gamma, double a3, double a1);

    /// Signed coefficient of y in P/gamma (enters the ground-state energy).
    double linear_coeff() const { return coeffs.front(); }
};

/// Throws InvalidParameterError unless gamma > 0, coeffs.size() == m+1,
/// and the top coefficient is exactly 1.
void validate(const Confinement& c);

struct ConfinementValues {
    double p;         // P(y)
    double dp;        // P'(y)
    double integral;  // int_0^y P
};

ConfinementValues eval_confinement(const Confinement& c, double y);

/// Trap potential V(y) = int_0^y P.
double confinement_integral(const Confinement& c, double y);

/// Interaction strengths derived from the single parameter lambda > 0:
///   g = 2*lambda*(lambda - 1)  (inverse-square pair coupling, >= -1/2)
///   h = -2*lambda              (long-range pair coupling)
///   beta = 2*lambda            (log-gas exponent)
struct Coupling {
    double lambda;
    double g;
    double h;
    double beta;

    static Coupling from_lambda(double lambda);

    /// True at lambda == 1/2 where g sits on its admissible boundary -1/2.
    bool at_boundary() const { return g == -0.5; }
};

struct System {
    int n = 1;  // particle count, >= 1
    Confinement trap;
    Coupling coupling;
};

void validate(const System& s);

/// Positions of the n particles. Pairwise-distinct wherever interaction
/// terms are evaluated; coincidence is a singular input.
using Configuration = std::vector<double>;

/// Change of variables y = x / scale making the confinement monic-normalized:
/// scale = lambda^(1/(2m+2)) and c[k] -> c[k] * lambda^(-(m-k)/(m+1)).
/// At lambda = 1 this is the identity.
struct Rescaled {
    double scale = 1.0;  // x = scale * y
    Confinement monic;
};

Rescaled rescale_to_monic(const Confinement& c, double lambda);

/// Half-width W of a box that comfortably covers the classical support of
/// the n-particle ground state: the smallest W with
/// V(W) - min V > lambda * (n + 10), stretched by 10%.
double support_halfwidth(const Confinement& c, double lambda, int n);

/// Minimum of the trap potential V over the real line (V(0) = 0, so <= 0).
double potential_minimum(const Confinement& c);

} // namespace polytrap
