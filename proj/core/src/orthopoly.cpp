#include "polytrap/orthopoly.hpp"

#include "polytrap/errors.hpp"
#include "polytrap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace polytrap {

namespace {

constexpr double kRescaleThreshold = 1e150;

/// phi values via the orthonormal recurrence with a running log prefactor.
/// q_hat_{k+1} = (y q_hat_k - sqrt(beta_k) q_hat_{k-1}) / sqrt(beta_{k+1});
/// the carried pair (z_prev, z_cur) is renormalized whenever it grows past
/// kRescaleThreshold, with the shed magnitude folded into d.
void weighted_recurrence(const RecurrenceTable& t, double y, std::vector<double>& out) {
    const int n = t.order();
    out.resize(n);
    double d = 0.5 * (t.weight.log_value(y) - t.log_norm[0]);
    double z_prev = 0.0;
    double z_cur = 1.0;
    for (int k = 0; k < n; ++k) {
        if (k > 0) {
            const double z_next =
                (y * z_cur - std::sqrt(t.beta[k - 1]) * z_prev) / std::sqrt(t.beta[k]);
            z_prev = z_cur;
            z_cur = z_next;
            const double mag = std::abs(z_cur);
            if (mag > kRescaleThreshold) {
                z_prev /= mag;
                z_cur /= mag;
                d += std::log(mag);
            }
        }
        out[k] = z_cur * std::exp(d);
    }
}

} // namespace

double truncation_halfwidth(const Weight& weight, int n_polys, double drop) {
    if (n_polys < 1) throw InvalidParameterError("truncation_halfwidth: order must be >= 1");
    validate(weight.trap);
    const double vmin = potential_minimum(weight.trap);
    const double k2 = 2.0 * (n_polys - 1);
    auto f = [&](double y) {
        return k2 * std::log(y) - 2.0 * (confinement_integral(weight.trap, y) - vmin);
    };
    double y = 1e-3;
    double fmax = f(y);
    for (int i = 0; i < 20000; ++i) {
        y *= 1.02;
        const double v = f(y);
        if (v > fmax) fmax = v;
        if (v < fmax - drop) return y;
    }
    throw QuadratureError("truncation_halfwidth: weight tail does not decay");
}

RecurrenceTable build_recurrence(const Weight& weight, int order, const QuadOptions& opt) {
    if (order < 1) throw InvalidParameterError("build_recurrence: order must be >= 1");
    validate(weight.trap);

    RecurrenceTable t;
    t.weight = weight;
    t.halfwidth = truncation_halfwidth(weight, order, opt.tail_drop);
    t.max_log_w = -2.0 * potential_minimum(weight.trap);

    const auto rule = composite_gauss(-t.halfwidth, t.halfwidth, opt.panels, opt.order);
    const size_t m = rule.nodes.size();
    std::vector<double> what(m);
    for (size_t i = 0; i < m; ++i)
        what[i] = std::exp(weight.log_value(rule.nodes[i]) - t.max_log_w) * rule.weights[i];

    const double s0 = std::accumulate(what.begin(), what.end(), 0.0);
    if (!(s0 > 0.0)) throw QuadratureError("build_recurrence: renormalized weight has no mass");

    t.beta.assign(order, 0.0);
    t.log_norm.assign(order, 0.0);
    t.log_norm[0] = std::log(s0) + t.max_log_w;

    std::vector<double> prev(m, 0.0), cur(m, 1.0 / std::sqrt(s0)), next(m);
    for (int k = 1; k < order; ++k) {
        const double root_prev = std::sqrt(t.beta[k - 1]);
        double b = 0.0;
        for (size_t i = 0; i < m; ++i) {
            next[i] = rule.nodes[i] * cur[i] - root_prev * prev[i];
            b += what[i] * next[i] * next[i];
        }
        if (!(b > 0.0))
            throw QuadratureError("build_recurrence: nonpositive recurrence coefficient at k=" +
                                  std::to_string(k));
        t.beta[k] = b;
        t.log_norm[k] = t.log_norm[k - 1] + std::log(b);
        const double inv = 1.0 / std::sqrt(b);
        for (size_t i = 0; i < m; ++i) next[i] *= inv;
        std::swap(prev, cur);
        std::swap(cur, next);
    }

    // Self-check against a deliberately different rule on the same interval.
    const int chk_panels = opt.panels + opt.panels / 2 + 1;
    const int chk_order = std::max(8, opt.order - 7);
    const auto chk = composite_gauss(-t.halfwidth, t.halfwidth, chk_panels, chk_order);
    std::vector<std::vector<double>> gram(order, std::vector<double>(order, 0.0));
    std::vector<double> phi;
    for (size_t i = 0; i < chk.nodes.size(); ++i) {
        weighted_recurrence(t, chk.nodes[i], phi);
        for (int a = 0; a < order; ++a)
            for (int b = a; b < order; ++b) gram[a][b] += chk.weights[i] * phi[a] * phi[b];
    }
    double worst = 0.0;
    int worst_a = 0, worst_b = 0;
    for (int a = 0; a < order; ++a) {
        for (int b = a; b < order; ++b) {
            const double target = (a == b) ? 1.0 : 0.0;
            const double res = std::abs(gram[a][b] - target);
            if (res > worst) {
                worst = res;
                worst_a = a;
                worst_b = b;
            }
        }
    }
    t.ortho_residual = worst;
    if (worst > opt.ortho_tol) {
        std::ostringstream msg;
        msg << "build_recurrence: orthogonality residual " << worst << " at pair (" << worst_a
            << ", " << worst_b << ") exceeds " << opt.ortho_tol
            << "; increase quadrature panels/order";
        throw QuadratureError(msg.str());
    }
    return t;
}

std::vector<double> eval_weighted_polys(const RecurrenceTable& table, double y) {
    std::vector<double> out;
    weighted_recurrence(table, y, out);
    return out;
}

double kernel_density(const RecurrenceTable& table, double y) {
    std::vector<double> phi;
    weighted_recurrence(table, y, phi);
    double acc = 0.0;
    for (double v : phi) acc += v * v;
    return acc;
}

KernelValue kernel_values(const RecurrenceTable& table, double y1, double y2) {
    std::vector<double> a, b;
    weighted_recurrence(table, y1, a);
    weighted_recurrence(table, y2, b);
    KernelValue k;
    for (size_t i = 0; i < a.size(); ++i) {
        k.k11 += a[i] * a[i];
        k.k22 += b[i] * b[i];
        k.k12 += a[i] * b[i];
    }
    return k;
}

double pcf_beta2(const RecurrenceTable& table, double y1, double y2) {
    const KernelValue k = kernel_values(table, y1, y2);
    return std::max(0.0, k.k11 * k.k22 - k.k12 * k.k12);
}

double kernel_trace(const RecurrenceTable& table, int panels, int order) {
    return integrate([&](double y) { return kernel_density(table, y); }, -table.halfwidth,
                     table.halfwidth, panels, order);
}

double sine_kernel_reference(double r) {
    if (r < 0.0) throw InvalidParameterError("sine_kernel_reference: r must be >= 0");
    if (r == 0.0) return 0.0;
    const double pi = 3.14159265358979323846;
    const double s = std::sin(pi * r) / (pi * r);
    return 1.0 - s * s;
}

std::vector<double> moving_average(const std::vector<double>& v, int window) {
    if (window < 1 || window % 2 == 0)
        throw InvalidParameterError("moving_average: window must be odd and positive");
    const int n = static_cast<int>(v.size());
    const int half = window / 2;
    std::vector<double> out(v.size());
    for (int i = 0; i < n; ++i) {
        const int reach = std::min({half, i, n - 1 - i});
        double acc = 0.0;
        for (int j = i - reach; j <= i + reach; ++j) acc += v[j];
        out[i] = acc / (2 * reach + 1);
    }
    return out;
}

PcfCurve scaled_pcf_sweep(const RecurrenceTable& table, double delta_y,
                          const std::vector<double>& y_grid, double density_floor,
                          int smooth_window) {
    if (!(delta_y > 0.0)) throw InvalidParameterError("scaled_pcf_sweep: delta_y must be > 0");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(y_grid.size());
    PcfCurve curve;
    for (double y : y_grid) {
        const KernelValue k = kernel_values(table, y, y + delta_y);
        if (k.k11 < density_floor || k.k22 < density_floor) {
            ++curve.dropped;
            continue;
        }
        const double r2 = std::max(0.0, k.k11 * k.k22 - k.k12 * k.k12);
        pts.emplace_back(delta_y * k.k11, r2 / (k.k11 * k.k22));
    }
    std::sort(pts.begin(), pts.end());
    curve.r.reserve(pts.size());
    curve.value.reserve(pts.size());
    for (const auto& p : pts) {
        curve.r.push_back(p.first);
        curve.value.push_back(p.second);
    }
    curve.smoothed = moving_average(curve.value, smooth_window);
    return curve;
}

} // namespace polytrap
