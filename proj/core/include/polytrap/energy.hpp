#pragma once

#include <cstdint>
#include <span>

#include "polytrap/model.hpp"

namespace polytrap {

/// log of the (unnormalized) ground-state amplitude at positions x:
///   lambda * sum_{i<j} log|x_i - x_j| - sum_i V(x_i).
/// A coincident pair gives -inf (distinguished value, not an error).
double log_ground_state(const System& s, const Configuration& x);

/// Two algebraic groupings of the same Hamiltonian applied to the ground
/// state. `canonical` keeps the pair terms in long-range form and the
/// one-body potential as P^2 - P'; its local energy vanishes identically.
/// `expanded` regroups into polynomial pair terms plus an even one-body
/// polynomial (no additive constant); its local energy is the constant E0.
enum class EnergyForm { canonical, expanded };

/// Local energy split by Hamiltonian term. `scale` is the sum of gross
/// magnitudes actually accumulated (pair singular pieces included), the
/// right denominator for judging how well `total` cancels.
struct EnergyTerms {
    double kinetic;     // -sum_i [ d2_i log psi + (d_i log psi)^2 ]
    double inv_square;  // g * sum_{i<j} 1/(x_i-x_j)^2
    double pair_poly;   // long-range term (canonical) or polynomial pair terms (expanded)
    double one_body;    // sum_i [P^2 - P'] (canonical) or even polynomial (expanded)
    double total;
    double scale;
};

/// Throws SingularInputError on a coincident pair, UnsupportedFormError for
/// the expanded grouping with m > 2.
EnergyTerms local_energy_terms(const System& s, const Configuration& x,
                               EnergyForm form);

double local_energy(const System& s, const Configuration& x, EnergyForm form);

/// E0 = gamma * l * n * (1 + lambda*(n-1)) with l the signed coefficient of
/// y in P/gamma. Equals the constant produced by the expanded grouping.
double ground_state_energy(const System& s);

/// Even one-body polynomial coefficients of the expanded grouping,
/// b[k] multiplying gamma^2 * y^(2k+2), k = 0..2m. N-dependent.
std::vector<double> expanded_one_body(const System& s);

/// Uniformly random configuration in [-W, W]^n, W = support_halfwidth,
/// resampled until all pairwise separations exceed min_sep.
Configuration random_configuration(const System& s, std::uint64_t seed,
                                   double min_sep = 1e-6);

struct ConstantCheck {
    double mean;        // mean of local_energy(expanded) - local_energy(canonical)
    double max_spread;  // max |sample - mean|
    int samples;
};

/// Evaluates the expanded-minus-canonical local energy on random
/// configurations; the result must be the configuration-independent E0.
ConstantCheck expanded_constant_check(const System& s, int samples,
                                      std::uint64_t seed);

} // namespace polytrap
