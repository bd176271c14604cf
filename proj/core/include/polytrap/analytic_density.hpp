#pragma once

#include "polytrap/model.hpp"
#include "polytrap/profile.hpp"

#include <array>
#include <vector>

namespace polytrap {

struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

/// Support decomposition of a density. Intervals are disjoint, sorted, and
/// symmetric about 0. `dip` marks a single band whose center is a local
/// minimum (the intermediate regime between one full band and a split).
struct BandStructure {
    std::vector<Band> intervals;
    bool dip = false;

    int count() const { return static_cast<int>(intervals.size()); }
};

/// Maximal intervals where profile.value > floor_rel * max(value); intervals
/// separated by a single grid cell are merged. All-zero profiles give an
/// empty structure.
BandStructure band_structure(const DensityProfile& profile, double floor_rel = 1e-6);

// --- quartic trap, closed forms -------------------------------------------

/// Parameters in the double-well convention: the trap polynomial is
/// gamma (x^3 - a1 x), i.e. Confinement::quartic(gamma, a1).
struct QuarticDensityParams {
    double gamma = 1.0;
    double a1 = 0.0;
    int n = 0;
};

/// Band-splitting threshold sqrt(2N/gamma): two bands iff a1 exceeds it.
double quartic_critical_a1(double gamma, int n);

/// Equilibrium density. Two-band regime (a1 > critical):
///   pi R1 = gamma |y| sqrt(2N/gamma - (y^2 - a1)^2).
/// Single-band regime:
///   pi R1 = gamma (y^2 + A) sqrt(B - y^2),
///   A = (s - 2 a1)/3, B = 2(s + a1)/3, s = sqrt(a1^2 + 6N/gamma).
/// Zero where the radicand is negative. The two forms coincide at the
/// threshold.
double quartic_density(const QuarticDensityParams& p, double y);

/// Exact support intervals and dip flag from the closed forms.
BandStructure quartic_bands(const QuarticDensityParams& p);

/// Second and fourth moments of the quartic density (two-band second moment
/// is a1*N exactly; the rest by quadrature over the support).
std::array<double, 2> quartic_moments(const QuarticDensityParams& p);

// --- sextic trap, self-consistent moments ---------------------------------

/// Stored-coefficient convention: the trap polynomial is
/// gamma (x^5 + a3 x^3 + a1 x), i.e. Confinement::sextic(gamma, a3, a1).
/// Multi-band structure requires a3 < 0.
struct SexticParams {
    double gamma = 1.0;
    double a3 = 0.0;
    double a1 = 0.0;
    int n = 0;
};

/// Band-splitting threshold a3^2/4.
double sextic_critical_a1(const SexticParams& p);

/// Density determined by the moment pair (M2, M4):
///   pi^2 R1^2 = gamma^2 [ -u^5 - 2 a3 u^4 - (a3^2 + 2 a1) u^3
///                         + (2N/gamma - 2 a1 a3) u^2
///                         + (2(M2 + a3 N)/gamma - a1^2) u
///                         + 2(M4 + a3 M2 + a1 N)/gamma ],  u = y^2,
/// clamped to 0 where the radicand is negative. Construction locates the
/// positive-radicand intervals, drops slivers carrying mass below
/// 1e-7 * total, and integrates the low moments over what remains.
class SexticDensity {
public:
    SexticDensity(const SexticParams& p, double m2, double m4);

    double operator()(double y) const;
    const std::array<double, 6>& radicand() const { return rad_; }
    double mass() const { return i0_; }
    double moment2() const { return i2_; }
    double moment4() const { return i4_; }
    bool feasible() const { return !intervals_u_.empty(); }
    /// Support intervals in u = y^2 (mass-filtered), ascending.
    const std::vector<std::array<double, 2>>& support_u() const { return intervals_u_; }
    BandStructure bands() const;

private:
    SexticParams p_;
    std::array<double, 6> rad_{}; // ascending coefficients in u
    std::vector<std::array<double, 2>> intervals_u_;
    double i0_ = 0.0, i2_ = 0.0, i4_ = 0.0;
};

struct SexticMomentState {
    double m2 = 0.0;
    double m4 = 0.0;
    double residual = 0.0;   // max(|M2 - I2|, |M4 - I4|) at the returned point
    double mass = 0.0;       // integral of the returned density
    int iterations = 0;
    bool converged = false;
};

struct SexticSolveResult {
    SexticMomentState state;
    SexticDensity density;
};

/// Finds (M2, M4) whose density reproduces its own moments: damped
/// fixed-point iteration on the normalization-corrected moment map, with a
/// Broyden fallback. Throws ConvergenceError (carrying the best residual)
/// when both stages fail, InvalidParameterError when the radicand is
/// nonpositive at the initial guess.
SexticSolveResult sextic_density_solve(const SexticParams& p, double tol = 1e-10,
                                       int max_iter = 400);

// --- critical parameters and phase scans ----------------------------------

struct CriticalParams {
    double a_c = 0.0;
    double e0_c = 0.0; // ground-state energy at a1 = a_c, stored-sign convention
};

/// Quartic (m=1) or sextic (m=2) traps only. The linear coefficient of the
/// critical trap keeps the stored-sign convention (quartic stores -a_c), so
/// e0_c is negative for the quartic case and positive for the sextic one.
CriticalParams critical_params(const System& s);

enum class TrapCase { quartic, sextic };

struct PhaseScanParams {
    TrapCase trap_case = TrapCase::quartic;
    double gamma = 1.0;
    double a3 = 0.0; // stored cubic coefficient; sextic only
    int n = 0;
    double lambda = 1.0;
    std::vector<double> a1_values;
    double tol = 1e-10;
    int max_iter = 400;
};

struct PhaseScanRow {
    double a1 = 0.0;
    int band_count = 0;
    bool dip = false;
    double e0 = 0.0;
    double m2 = 0.0;
    double m4 = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// One row per a1 value, in input order. Solver failures mark the row
/// (converged = false, band_count = 0) without aborting the scan.
std::vector<PhaseScanRow> phase_scan(const PhaseScanParams& p);

} // namespace polytrap
