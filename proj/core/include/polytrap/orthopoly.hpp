#pragma once

#include "polytrap/model.hpp"

#include <vector>

namespace polytrap {

/// Orthogonality weight w(y) = exp(-2 V(y)), V(y) = integral of the trap
/// polynomial from 0 to y. For the beta=2 determinantal machinery the trap
/// should already be in monic (rescaled) form.
struct Weight {
    Confinement trap;

    double log_value(double y) const { return -2.0 * confinement_integral(trap, y); }
};

struct QuadOptions {
    int panels = 64;
    int order = 30;
    /// Tail cutoff: the top-degree weighted integrand must fall this many
    /// log-units below its peak at the truncation point.
    double tail_drop = 138.155105579643701; // 60 ln 10
    double ortho_tol = 1e-8;
};

/// Three-term recurrence p_{k+1} = y p_k - beta_k p_{k-1} for the monic
/// polynomials of `weight` (diagonal coefficients vanish: the weight is even).
struct RecurrenceTable {
    Weight weight;
    std::vector<double> beta;     // beta[0] = 0 by convention
    std::vector<double> log_norm; // log h_k (monic squared norms), absolute scale
    double halfwidth = 0.0;       // quadrature truncation: support of the build was [-L, L]
    double max_log_w = 0.0;
    double ortho_residual = 0.0;  // from the independent-quadrature self-check

    int order() const { return static_cast<int>(beta.size()); }
};

/// Truncation point for an order-`n_polys` table: smallest L past the peak of
/// 2(n_polys-1) ln y + log w(y) at which that integrand has dropped by `drop`.
double truncation_halfwidth(const Weight& weight, int n_polys, double drop);

/// Discretized Stieltjes procedure on a composite Gauss-Legendre rule.
/// The weight is renormalized by its maximum log value before quadrature
/// (only ratios enter the recurrence; absolute norms are restored in
/// log_norm). Orthonormal polynomials are used internally.
/// Throws QuadratureError when the independent-quadrature orthogonality
/// check exceeds opt.ortho_tol, naming the worst (mu, nu) pair.
RecurrenceTable build_recurrence(const Weight& weight, int order, const QuadOptions& opt = {});

/// phi_k(y) = q_k(y) sqrt(w(y) / h_k), k < table.order(). The exponential
/// factor rides inside the recurrence via running log-scaling, so the values
/// neither overflow nor lose the tail: far outside the support they underflow
/// to 0 gracefully.
std::vector<double> eval_weighted_polys(const RecurrenceTable& table, double y);

/// R1(y) = sum_k phi_k(y)^2, the level density of the rank-N projection.
double kernel_density(const RecurrenceTable& table, double y);

struct KernelValue {
    double k11 = 0.0;
    double k22 = 0.0;
    double k12 = 0.0;
};

/// Weighted projection kernel at the three pairs built from (y1, y2).
KernelValue kernel_values(const RecurrenceTable& table, double y1, double y2);

/// R2(y1, y2) = K11 K22 - K12^2. Vanishes identically at coincidence.
double pcf_beta2(const RecurrenceTable& table, double y1, double y2);

/// integral of R1 over the build interval; equals the table order up to
/// quadrature error.
double kernel_trace(const RecurrenceTable& table, int panels = 64, int order = 30);

/// 1 - sin^2(pi r)/(pi r)^2 with the removable singularity at r = 0.
double sine_kernel_reference(double r);

/// Centered moving average; the window shrinks symmetrically at the ends.
std::vector<double> moving_average(const std::vector<double>& v, int window);

struct PcfCurve {
    std::vector<double> r;        // delta_y * R1(y), sorted ascending
    std::vector<double> value;    // R2(y, y+delta_y) / (R1(y) R1(y+delta_y))
    std::vector<double> smoothed; // moving average of `value` along the sorted curve
    int dropped = 0;              // grid points rejected by the density floor
};

/// Unfolded pair-correlation sweep: for each grid point y with
/// R1(y) >= density_floor records r = delta_y * R1(y) against the normalized
/// two-point function, sorts by r, and smooths.
PcfCurve scaled_pcf_sweep(const RecurrenceTable& table, double delta_y,
                          const std::vector<double>& y_grid, double density_floor,
                          int smooth_window = 21);

} // namespace polytrap
