#include "polytrap/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "polytrap/errors.hpp"
#include "polytrap/rng.hpp"

namespace polytrap {

namespace {

// Divided difference [P(x)-P(y)]/(x-y) evaluated as a polynomial in x,y
// (homogeneous-sum form), exact even for nearly coincident arguments:
//   DD = gamma * sum_k c[k] * h_{2k}(x,y),  h_d = sum_{a+b=d} x^a y^b.
double divided_difference(const Confinement& c, double x, double y) {
    double acc = 0.0;
    double h = 1.0;  // h_0
    for (int k = 0; k <= c.m; ++k) {
        acc += c.coeffs[k] * h;
        if (k < c.m) {
            // h_{d+2} = x^2*h_d + y^{d+1}*(x + y)
            const double yd1 = std::pow(y, 2 * k + 1);
            h = x * x * h + yd1 * (x + y);
        }
    }
    return c.gamma * acc;
}

void check_distinct(const Configuration& x) {
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = i + 1; j < x.size(); ++j)
            if (x[i] == x[j])
                throw SingularInputError("coincident positions in interaction term");
}

} // namespace

double log_ground_state(const System& s, const Configuration& x) {
    validate(s);
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        for (size_t j = i + 1; j < x.size(); ++j) {
            const double d = std::abs(x[i] - x[j]);
            if (d == 0.0) return -std::numeric_limits<double>::infinity();
            acc += std::log(d);
        }
    }
    acc *= s.coupling.lambda;
    for (double xi : x) acc -= confinement_integral(s.trap, xi);
    return acc;
}

double ground_state_energy(const System& s) {
    validate(s);
    const double l = s.trap.linear_coeff();
    return s.trap.gamma * l * s.n * (1.0 + s.coupling.lambda * (s.n - 1.0));
}

std::vector<double> expanded_one_body(const System& s) {
    const double g = s.trap.gamma;
    const double lam = s.coupling.lambda;
    const double nn = 3.0 * (1.0 + lam * (s.n - 1.0));  // 3 + 3*lambda*(n-1)
    switch (s.trap.m) {
        case 0:
            return {1.0};
        case 1: {
            const double s1 = s.trap.coeffs[0];
            return {s1 * s1 - nn / g, 2.0 * s1, 1.0};
        }
        case 2: {
            const double s1 = s.trap.coeffs[0];
            const double s3 = s.trap.coeffs[1];
            // y^4 coefficient: -5 gamma from P', -(5/3) lam gamma (n-1) from the
            // one-body remainder of the pair-quartic split.
            return {s1 * s1 - s3 * nn / g,
                    2.0 * s1 * s3 - (5.0 / 3.0) * (3.0 + lam * (s.n - 1.0)) / g,
                    s3 * s3 + 2.0 * s1,
                    2.0 * s3,
                    1.0};
        }
        default:
            throw UnsupportedFormError(
                "expanded grouping implemented for m <= 2 only");
    }
}

EnergyTerms local_energy_terms(const System& s, const Configuration& x,
                               EnergyForm form) {
    validate(s);
    if (x.size() != static_cast<size_t>(s.n))
        throw InvalidParameterError("configuration size != n");
    check_distinct(x);

    const int n = s.n;
    const double lam = s.coupling.lambda;
    const double g = s.coupling.g;
    const double h = s.coupling.h;
    const double gamma = s.trap.gamma;

    std::vector<double> p(n), dp(n), s1(n, 0.0), s2(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto v = eval_confinement(s.trap, x[i]);
        p[i] = v.p;
        dp[i] = v.dp;
    }

    double inv_sq = 0.0, inv_sq_gross = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = x[i] - x[j];
            const double r1 = 1.0 / d, r2 = r1 * r1;
            s1[i] += r1;
            s1[j] -= r1;
            s2[i] += r2;
            s2[j] += r2;
            inv_sq += g * r2;
            inv_sq_gross += std::abs(g) * r2;
        }
    }

    double kinetic = 0.0, kin_gross = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d1 = lam * s1[i] - p[i];
        const double d2 = -lam * s2[i] - dp[i];
        kinetic -= d2 + d1 * d1;
        kin_gross += lam * s2[i] + std::abs(dp[i]) + d1 * d1;
    }

    double pair_poly = 0.0, pair_gross = 0.0;
    double one_body = 0.0, one_gross = 0.0;

    if (form == EnergyForm::canonical) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double t = h * divided_difference(s.trap, x[i], x[j]);
                pair_poly += t;
                pair_gross += std::abs(t);
            }
        for (int i = 0; i < n; ++i) {
            one_body += p[i] * p[i] - dp[i];
            one_gross += p[i] * p[i] + std::abs(dp[i]);
        }
    } else {
        if (s.trap.m == 1) {
            const double a2 = lam * gamma;  // coefficient of (x_i-x_j)^2
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double d = x[i] - x[j];
                    pair_poly += a2 * d * d;
                    pair_gross += std::abs(a2) * d * d;
                }
        } else if (s.trap.m == 2) {
            const double s3 = s.trap.coeffs[1];
            const double a1 = lam * gamma / 12.0;        // (x_i-x_j)^4
            const double a2 = lam * gamma * s3;          // (x_i-x_j)^2
            const double a3 = -5.0 * lam * gamma / 12.0; // (x_i+x_j)^4
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double d = x[i] - x[j], q = x[i] + x[j];
                    const double d2 = d * d, q2 = q * q;
                    pair_poly += a1 * d2 * d2 + a2 * d2 + a3 * q2 * q2;
                    pair_gross += std::abs(a1) * d2 * d2 +
                                  std::abs(a2) * d2 + std::abs(a3) * q2 * q2;
                }
        } else if (s.trap.m != 0) {
            throw UnsupportedFormError(
                "expanded grouping implemented for m <= 2 only");
        }
        const auto b = expanded_one_body(s);
        const double g2 = gamma * gamma;
        for (int i = 0; i < n; ++i) {
            const double u = x[i] * x[i];
            double acc = 0.0, accg = 0.0, upow = u;
            for (double bk : b) {
                acc += bk * upow;
                accg += std::abs(bk) * upow;
                upow *= u;
            }
            one_body += g2 * acc;
            one_gross += g2 * accg;
        }
    }

    EnergyTerms t;
    t.kinetic = kinetic;
    t.inv_square = inv_sq;
    t.pair_poly = pair_poly;
    t.one_body = one_body;
    t.total = kinetic + inv_sq + pair_poly + one_body;
    t.scale = std::max({kin_gross, inv_sq_gross, pair_gross, one_gross, 1.0});
    return t;
}

double local_energy(const System& s, const Configuration& x, EnergyForm form) {
    return local_energy_terms(s, x, form).total;
}

namespace {

Configuration draw_configuration(const System& s, std::mt19937_64& eng,
                                 double w, double min_sep) {
    Configuration x(s.n);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        for (int i = 0; i < s.n; ++i) x[i] = w * (2.0 * uniform01(eng) - 1.0);
        bool ok = true;
        for (int i = 0; ok && i < s.n; ++i)
            for (int j = i + 1; ok && j < s.n; ++j)
                if (std::abs(x[i] - x[j]) < min_sep) ok = false;
        if (ok) return x;
    }
    throw InvalidParameterError(
        "could not draw a separated configuration; min_sep too large?");
}

} // namespace

Configuration random_configuration(const System& s, std::uint64_t seed,
                                   double min_sep) {
    validate(s);
    std::mt19937_64 eng(splitmix64(seed));
    const double w = support_halfwidth(s.trap, s.coupling.lambda, s.n);
    return draw_configuration(s, eng, w, min_sep);
}

ConstantCheck expanded_constant_check(const System& s, int samples,
                                      std::uint64_t seed) {
    validate(s);
    if (samples < 1) throw InvalidParameterError("samples must be >= 1");
    std::mt19937_64 eng(splitmix64(seed));
    const double w = support_halfwidth(s.trap, s.coupling.lambda, s.n);

    std::vector<double> diffs;
    diffs.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        const auto x = draw_configuration(s, eng, w, 1e-6);
        diffs.push_back(local_energy(s, x, EnergyForm::expanded) -
                        local_energy(s, x, EnergyForm::canonical));
    }
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= samples;
    double spread = 0.0;
    for (double d : diffs) spread = std::max(spread, std::abs(d - mean));
    return {mean, spread, samples};
}

} // namespace polytrap
