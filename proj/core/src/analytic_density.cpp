#include "polytrap/analytic_density.hpp"

#include "polytrap/energy.hpp"
#include "polytrap/errors.hpp"
#include "polytrap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace polytrap {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMassSliver = 1e-7; // intervals below this fraction of total mass are noise
constexpr int kMomentOrder = 96;     // Gauss-Legendre order for interval moments

// Polynomials are stored as ascending coefficient vectors.

double poly_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
    return d;
}

/// Deflation by a known root: c = (x - root) * q + rem; rem is discarded
/// (the caller guarantees root is a root up to round-off).
std::vector<double> poly_deflate(const std::vector<double>& c, double root) {
    const size_t n = c.size();
    std::vector<double> q(n - 1, 0.0);
    double carry = c[n - 1];
    for (size_t i = n - 1; i-- > 0;) {
        q[i] = carry;
        carry = c[i] + root * carry;
    }
    return q;
}

double bisect_root(const std::vector<double>& c, double lo, double hi) {
    double flo = poly_eval(c, lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = poly_eval(c, mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// All real roots in [lo, hi], ascending: critical points of the derivative
/// split the interval into monotone pieces, each bisected on a sign change.
std::vector<double> real_roots(const std::vector<double>& c, double lo, double hi) {
    std::vector<double> p = c;
    while (!p.empty() && p.back() == 0.0) p.pop_back();
    std::vector<double> roots;
    if (p.size() < 2) return roots;
    if (p.size() == 2) {
        const double r = -p[0] / p[1];
        if (r >= lo && r <= hi) roots.push_back(r);
        return roots;
    }
    std::vector<double> pts = real_roots(poly_derivative(p), lo, hi);
    pts.insert(pts.begin(), lo);
    pts.push_back(hi);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        if (!(a < b)) continue;
        const double fa = poly_eval(p, a), fb = poly_eval(p, b);
        if (fa == 0.0) roots.push_back(a);
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) roots.push_back(bisect_root(p, a, b));
    }
    if (poly_eval(p, hi) == 0.0) roots.push_back(hi);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

/// Maximal subintervals of [0, bound] where the polynomial is positive.
std::vector<std::array<double, 2>> positive_intervals(const std::vector<double>& c, double bound) {
    std::vector<double> pts = real_roots(c, 0.0, bound);
    pts.insert(pts.begin(), 0.0);
    pts.push_back(bound);
    std::vector<std::array<double, 2>> out;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        if (!(a < b)) continue;
        if (poly_eval(c, 0.5 * (a + b)) > 0.0) {
            if (!out.empty() && out.back()[1] == a)
                out.back()[1] = b;
            else
                out.push_back({a, b});
        }
    }
    return out;
}

double cauchy_bound(const std::vector<double>& c) {
    double m = 0.0;
    for (size_t i = 0; i + 1 < c.size(); ++i) m = std::max(m, std::abs(c[i]));
    return 1.0 + m / std::abs(c.back());
}

struct IntervalMoments {
    double i0 = 0.0, i2 = 0.0, i4 = 0.0;
};

/// Moments of R1 = (gamma/pi) sqrt(rad(x^2)) over the x-support mapped from
/// u in [a, b]. The edge roots are deflated out and a sin substitution
/// absorbs the square-root endpoint behavior, so a single Gauss-Legendre
/// rule is spectrally accurate. A band starting at u = 0 with rad(0) > 0 is
/// a single central arc [-beta, beta] in x whose only root is the outer
/// edge; the off-center case is a mirror pair with roots at both edges.
IntervalMoments interval_moments(const std::vector<double>& rad, double a, double b,
                                 double gamma) {
    const auto& gl = gauss_legendre(kMomentOrder);
    IntervalMoments m;
    if (a == 0.0 && rad[0] != 0.0) {
        std::vector<double> q = poly_deflate(rad, b);
        for (double& v : q) v = -v; // rad = (b-u)(-q~)
        const double beta = std::sqrt(b);
        for (int i = 0; i < kMomentOrder; ++i) {
            const double t = 0.5 * kPi * gl.nodes[i];
            const double wt = 0.5 * kPi * gl.weights[i];
            const double x = beta * std::sin(t);
            const double c = std::cos(t);
            const double f =
                wt * b * c * c * std::sqrt(std::max(0.0, poly_eval(q, x * x)));
            const double x2 = x * x;
            m.i0 += f;
            m.i2 += f * x2;
            m.i4 += f * x2 * x2;
        }
        const double pref = gamma / kPi; // the arc already covers both signs of x
        m.i0 *= pref;
        m.i2 *= pref;
        m.i4 *= pref;
        return m;
    }
    std::vector<double> q = poly_deflate(poly_deflate(rad, a), b);
    for (double& v : q) v = -v; // rad = (u-a)(u-b) q~ = (u-a)(b-u)(-q~)
    const double alpha = std::sqrt(std::max(0.0, a));
    const double beta = std::sqrt(b);
    const double mid = 0.5 * (alpha + beta);
    const double half = 0.5 * (beta - alpha);
    for (int i = 0; i < kMomentOrder; ++i) {
        const double t = 0.5 * kPi * gl.nodes[i];
        const double wt = 0.5 * kPi * gl.weights[i];
        const double x = mid + half * std::sin(t);
        const double c = std::cos(t);
        const double g = (x + alpha) * (beta + x) * std::max(0.0, poly_eval(q, x * x));
        const double f = wt * half * half * c * c * std::sqrt(g);
        const double x2 = x * x;
        m.i0 += f;
        m.i2 += f * x2;
        m.i4 += f * x2 * x2;
    }
    const double pref = 2.0 * gamma / kPi;
    m.i0 *= pref;
    m.i2 *= pref;
    m.i4 *= pref;
    return m;
}

BandStructure bands_from_u(const std::vector<std::array<double, 2>>& intervals_u,
                           double rad_slope_at_0) {
    BandStructure out;
    bool central = false;
    std::vector<Band> right;
    for (const auto& iv : intervals_u) {
        if (iv[0] == 0.0)
            central = true;
        else
            right.push_back({std::sqrt(iv[0]), std::sqrt(iv[1])});
    }
    for (auto it = right.rbegin(); it != right.rend(); ++it)
        out.intervals.push_back({-it->hi, -it->lo});
    if (central && !intervals_u.empty())
        out.intervals.push_back({-std::sqrt(intervals_u.front()[1]),
                                 std::sqrt(intervals_u.front()[1])});
    for (const Band& b : right) out.intervals.push_back(b);
    out.dip = (out.count() == 1) && central && rad_slope_at_0 > 0.0;
    return out;
}

} // namespace

BandStructure band_structure(const DensityProfile& profile, double floor_rel) {
    BandStructure out;
    if (profile.y.size() != profile.value.size())
        throw InvalidParameterError("band_structure: grid/value size mismatch");
    const int n = static_cast<int>(profile.y.size());
    if (n == 0) return out;
    const double vmax = *std::max_element(profile.value.begin(), profile.value.end());
    if (!(vmax > 0.0)) return out;
    const double floor = floor_rel * vmax;

    std::vector<bool> on(n);
    for (int i = 0; i < n; ++i) on[i] = profile.value[i] > floor;
    // Bridge single-cell gaps.
    for (int i = 1; i + 1 < n; ++i)
        if (!on[i] && on[i - 1] && on[i + 1]) on[i] = true;

    std::vector<std::array<int, 2>> runs;
    for (int i = 0; i < n; ++i) {
        if (!on[i]) continue;
        int j = i;
        while (j + 1 < n && on[j + 1]) ++j;
        runs.push_back({i, j});
        i = j;
    }
    for (const auto& r : runs) out.intervals.push_back({profile.y[r[0]], profile.y[r[1]]});

    if (runs.size() == 1) {
        const int i0 = runs[0][0], i1 = runs[0][1];
        const int im = (i0 + i1) / 2;
        const int iq = (i1 - i0) / 4;
        if (iq >= 1)
            out.dip = profile.value[im] < profile.value[im - iq] &&
                      profile.value[im] < profile.value[im + iq];
    }
    return out;
}

double quartic_critical_a1(double gamma, int n) {
    if (!(gamma > 0.0) || n < 1) throw InvalidParameterError("quartic_critical_a1: bad params");
    return std::sqrt(2.0 * n / gamma);
}

namespace {

struct QuarticForm {
    bool two_band = false;
    double s = 0.0, A = 0.0, B = 0.0; // single-band shape constants
};

QuarticForm quartic_form(const QuarticDensityParams& p) {
    if (!(p.gamma > 0.0) || p.n < 1) throw InvalidParameterError("quartic_density: bad params");
    QuarticForm f;
    f.two_band = p.a1 > quartic_critical_a1(p.gamma, p.n);
    if (!f.two_band) {
        f.s = std::sqrt(p.a1 * p.a1 + 6.0 * p.n / p.gamma);
        f.A = (f.s - 2.0 * p.a1) / 3.0;
        f.B = 2.0 * (f.s + p.a1) / 3.0;
    }
    return f;
}

std::vector<double> quartic_radicand(const QuarticDensityParams& p, const QuarticForm& f) {
    const double c0 = f.two_band ? 0.0 : f.A * f.A * f.B;
    return {c0, 2.0 * p.n / p.gamma - p.a1 * p.a1, 2.0 * p.a1, -1.0};
}

} // namespace

double quartic_density(const QuarticDensityParams& p, double y) {
    const QuarticForm f = quartic_form(p);
    const double u = y * y;
    if (f.two_band) {
        const double rad = 2.0 * p.n / p.gamma - (u - p.a1) * (u - p.a1);
        return rad > 0.0 ? p.gamma * std::abs(y) * std::sqrt(rad) / kPi : 0.0;
    }
    const double rad = f.B - u;
    return rad > 0.0 ? p.gamma * (u + f.A) * std::sqrt(rad) / kPi : 0.0;
}

BandStructure quartic_bands(const QuarticDensityParams& p) {
    const QuarticForm f = quartic_form(p);
    std::vector<std::array<double, 2>> iu;
    if (f.two_band) {
        const double w = std::sqrt(2.0 * p.n / p.gamma);
        iu.push_back({p.a1 - w, p.a1 + w});
        return bands_from_u(iu, 0.0);
    }
    iu.push_back({0.0, f.B});
    return bands_from_u(iu, f.A * (2.0 * f.B - f.A));
}

std::array<double, 2> quartic_moments(const QuarticDensityParams& p) {
    const QuarticForm f = quartic_form(p);
    const std::vector<double> rad = quartic_radicand(p, f);
    const auto intervals = positive_intervals(rad, cauchy_bound(rad));
    double i2 = 0.0, i4 = 0.0;
    for (const auto& iv : intervals) {
        const IntervalMoments m = interval_moments(rad, iv[0], iv[1], p.gamma);
        i2 += m.i2;
        i4 += m.i4;
    }
    return {i2, i4};
}

double sextic_critical_a1(const SexticParams& p) { return 0.25 * p.a3 * p.a3; }

SexticDensity::SexticDensity(const SexticParams& p, double m2, double m4) : p_(p) {
    if (!(p.gamma > 0.0) || p.n < 1) throw InvalidParameterError("SexticDensity: bad params");
    const double g = p.gamma;
    rad_ = {2.0 * (m4 + p.a3 * m2 + p.a1 * p.n) / g,
            2.0 * (m2 + p.a3 * p.n) / g - p.a1 * p.a1,
            2.0 * p.n / g - 2.0 * p.a1 * p.a3,
            -(p.a3 * p.a3 + 2.0 * p.a1),
            -2.0 * p.a3,
            -1.0};
    const std::vector<double> rad(rad_.begin(), rad_.end());
    auto intervals = positive_intervals(rad, cauchy_bound(rad));

    std::vector<IntervalMoments> moments;
    double total = 0.0;
    for (const auto& iv : intervals) {
        moments.push_back(interval_moments(rad, iv[0], iv[1], g));
        total += moments.back().i0;
    }
    for (size_t i = 0; i < intervals.size(); ++i) {
        if (moments[i].i0 < kMassSliver * total) continue;
        intervals_u_.push_back(intervals[i]);
        i0_ += moments[i].i0;
        i2_ += moments[i].i2;
        i4_ += moments[i].i4;
    }
}

double SexticDensity::operator()(double y) const {
    const double u = y * y;
    double acc = 0.0;
    for (size_t i = rad_.size(); i-- > 0;) acc = acc * u + rad_[i];
    return acc > 0.0 ? p_.gamma * std::sqrt(acc) / kPi : 0.0;
}

BandStructure SexticDensity::bands() const { return bands_from_u(intervals_u_, rad_[1]); }

namespace {

/// One-cut ansatz moments as functions of the support halfwidth b; used only
/// to seed the fixed point.
struct OneCut {
    double mass, m2, m4;
};

OneCut one_cut_moments(const SexticParams& p, double b) {
    const double b2 = b * b, b4 = b2 * b2, b6 = b4 * b2, b8 = b4 * b4, b10 = b8 * b2;
    OneCut oc;
    oc.mass = p.gamma * (5.0 * b6 / 16.0 + 3.0 * p.a3 * b4 / 8.0 + p.a1 * b2 / 2.0);
    oc.m2 = p.gamma * (15.0 * b8 / 128.0 + p.a3 * b6 / 8.0 + p.a1 * b4 / 8.0);
    oc.m4 = p.gamma * (9.0 * b10 / 128.0 + 9.0 * p.a3 * b8 / 128.0 + p.a1 * b6 / 16.0);
    return oc;
}

std::array<double, 2> initial_guess(const SexticParams& p) {
    // Largest b with one-cut mass crossing N; the ansatz is wrong for split
    // supports but lands in the fixed point's basin.
    double lo = 0.0, hi = 0.0;
    double prev_b = 0.05, prev_f = one_cut_moments(p, prev_b).mass - p.n;
    for (double b = prev_b * 1.04; b < 1e3; b *= 1.04) {
        const double f = one_cut_moments(p, b).mass - p.n;
        if ((prev_f <= 0.0) != (f <= 0.0)) {
            lo = prev_b;
            hi = b;
        }
        prev_b = b;
        prev_f = f;
    }
    const double ustar = std::cbrt(std::max(1.0 * p.n / p.gamma, 1e-9));
    if (hi == 0.0) return {p.n * ustar, 2.0 * p.n * ustar * ustar};
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (one_cut_moments(p, mid).mass - p.n <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const OneCut oc = one_cut_moments(p, 0.5 * (lo + hi));
    return {std::max(oc.m2, 0.05 * p.n * ustar), std::max(oc.m4, 0.05 * p.n * ustar * ustar)};
}

struct CoreResult {
    SexticMomentState state;
    std::optional<SexticDensity> density;
};

CoreResult solve_core(const SexticParams& p, double tol, int max_iter) {
    if (!(tol > 0.0) || max_iter < 1) throw InvalidParameterError("sextic solve: bad tol/iter");
    std::array<double, 2> m = initial_guess(p);

    CoreResult best;
    best.state.residual = std::numeric_limits<double>::infinity();
    int iters = 0;

    // Residual and normalization-corrected moment map at a trial point.
    auto probe = [&](const std::array<double, 2>& x,
                     std::array<double, 2>& F) -> std::optional<SexticDensity> {
        SexticDensity d(p, x[0], x[1]);
        ++iters;
        if (!d.feasible() || !(d.mass() > 0.0)) return std::nullopt;
        F = {d.moment2() * p.n / d.mass(), d.moment4() * p.n / d.mass()};
        const double res = std::max(std::abs(d.moment2() - x[0]), std::abs(d.moment4() - x[1]));
        if (res < best.state.residual) {
            best.state = {x[0], x[1], res, d.mass(), iters, res < tol};
            best.density = d;
        }
        return d;
    };

    std::array<double, 2> F{};
    if (!probe(m, F).has_value())
        throw InvalidParameterError("sextic solve: radicand nonpositive at initial guess");

    const double damping = 0.3;
    for (int k = 0; k < max_iter && !best.state.converged; ++k) {
        m = {m[0] + damping * (F[0] - m[0]), m[1] + damping * (F[1] - m[1])};
        if (!probe(m, F).has_value()) break;
    }
    if (best.state.converged) return best;

    // Broyden fallback on H(m) = (I2 - m2, I4 - m4), seeded at the best point.
    m = {best.state.m2, best.state.m4};
    std::array<double, 2> H{};
    auto eval_h = [&](const std::array<double, 2>& x, std::array<double, 2>& h) -> bool {
        std::array<double, 2> f{};
        auto d = probe(x, f);
        if (!d.has_value()) return false;
        h = {d->moment2() - x[0], d->moment4() - x[1]};
        return true;
    };
    if (!eval_h(m, H)) return best;
    double J[2][2];
    for (int j = 0; j < 2; ++j) {
        const double h = std::max(1e-6, 1e-7 * std::abs(m[j]));
        std::array<double, 2> xp = m, Hp{};
        xp[j] += h;
        if (!eval_h(xp, Hp)) return best;
        J[0][j] = (Hp[0] - H[0]) / h;
        J[1][j] = (Hp[1] - H[1]) / h;
    }
    const int fallback_iter = std::min(max_iter, 80);
    for (int k = 0; k < fallback_iter && !best.state.converged; ++k) {
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (det == 0.0 || !std::isfinite(det)) break;
        std::array<double, 2> step = {-(J[1][1] * H[0] - J[0][1] * H[1]) / det,
                                      -(-J[1][0] * H[0] + J[0][0] * H[1]) / det};
        const double cap = 0.5 * std::max({std::abs(m[0]), std::abs(m[1]), 1.0});
        const double norm = std::max(std::abs(step[0]), std::abs(step[1]));
        if (norm > cap) {
            step[0] *= cap / norm;
            step[1] *= cap / norm;
        }
        std::array<double, 2> mn{}, Hn{};
        double shrink = 1.0;
        bool ok = false;
        for (int bt = 0; bt < 6; ++bt) {
            mn = {m[0] + shrink * step[0], m[1] + shrink * step[1]};
            if (eval_h(mn, Hn)) {
                ok = true;
                break;
            }
            shrink *= 0.5;
        }
        if (!ok) break;
        const std::array<double, 2> dm = {mn[0] - m[0], mn[1] - m[1]};
        const std::array<double, 2> dH = {Hn[0] - H[0], Hn[1] - H[1]};
        const double dd = dm[0] * dm[0] + dm[1] * dm[1];
        if (dd > 0.0) {
            const double r0 = dH[0] - (J[0][0] * dm[0] + J[0][1] * dm[1]);
            const double r1 = dH[1] - (J[1][0] * dm[0] + J[1][1] * dm[1]);
            J[0][0] += r0 * dm[0] / dd;
            J[0][1] += r0 * dm[1] / dd;
            J[1][0] += r1 * dm[0] / dd;
            J[1][1] += r1 * dm[1] / dd;
        }
        m = mn;
        H = Hn;
    }
    return best;
}

} // namespace

SexticSolveResult sextic_density_solve(const SexticParams& p, double tol, int max_iter) {
    CoreResult r = solve_core(p, tol, max_iter);
    if (!r.state.converged || !r.density.has_value()) {
        std::ostringstream msg;
        msg << "sextic_density_solve: no convergence after " << r.state.iterations
            << " evaluations, best residual " << r.state.residual << " at (M2, M4) = ("
            << r.state.m2 << ", " << r.state.m4 << ")";
        throw ConvergenceError(msg.str(), r.state.residual);
    }
    return {r.state, *r.density};
}

CriticalParams critical_params(const System& s) {
    validate(s);
    CriticalParams cp;
    Confinement crit;
    if (s.trap.m == 1) {
        cp.a_c = quartic_critical_a1(s.trap.gamma, s.n);
        crit = Confinement::quartic(s.trap.gamma, cp.a_c);
    } else if (s.trap.m == 2) {
        cp.a_c = 0.25 * s.trap.coeffs[1] * s.trap.coeffs[1];
        crit = Confinement::sextic(s.trap.gamma, s.trap.coeffs[1], cp.a_c);
    } else {
        throw UnsupportedFormError("critical_params: quartic and sextic traps only");
    }
    cp.e0_c = ground_state_energy({s.n, crit, s.coupling});
    return cp;
}

std::vector<PhaseScanRow> phase_scan(const PhaseScanParams& p) {
    if (p.a1_values.empty()) throw InvalidParameterError("phase_scan: empty a1 grid");
    const Coupling coupling = Coupling::from_lambda(p.lambda);
    std::vector<PhaseScanRow> rows;
    rows.reserve(p.a1_values.size());
    for (double a1 : p.a1_values) {
        PhaseScanRow row;
        row.a1 = a1;
        if (p.trap_case == TrapCase::quartic) {
            const System sys{p.n, Confinement::quartic(p.gamma, a1), coupling};
            row.e0 = ground_state_energy(sys);
            const QuarticDensityParams qp{p.gamma, a1, p.n};
            const BandStructure bs = quartic_bands(qp);
            row.band_count = bs.count();
            row.dip = bs.dip;
            const auto mm = quartic_moments(qp);
            row.m2 = mm[0];
            row.m4 = mm[1];
            row.converged = true;
        } else {
            const System sys{p.n, Confinement::sextic(p.gamma, p.a3, a1), coupling};
            row.e0 = ground_state_energy(sys);
            try {
                CoreResult r = solve_core({p.gamma, p.a3, a1, p.n}, p.tol, p.max_iter);
                row.m2 = r.state.m2;
                row.m4 = r.state.m4;
                row.residual = r.state.residual;
                row.iterations = r.state.iterations;
                row.converged = r.state.converged;
                if (r.state.converged && r.density.has_value()) {
                    const BandStructure bs = r.density->bands();
                    row.band_count = bs.count();
                    row.dip = bs.dip;
                }
            } catch (const InvalidParameterError&) {
                row.converged = false;
                row.residual = std::numeric_limits<double>::infinity();
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace polytrap
