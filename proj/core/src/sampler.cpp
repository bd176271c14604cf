#include "polytrap/sampler.hpp"

#include "polytrap/errors.hpp"
#include "polytrap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace polytrap {

void validate(const ChainConfig& cfg) {
    if (cfg.steps <= cfg.burn_in || cfg.burn_in < 0)
        throw InvalidParameterError("ChainConfig: need steps > burn_in >= 0");
    if (cfg.thinning < 1) throw InvalidParameterError("ChainConfig: thinning must be >= 1");
    if (cfg.chains < 1) throw InvalidParameterError("ChainConfig: chains must be >= 1");
}

namespace {

constexpr long long kTuneWindow = 200; // sweeps between proposal adjustments

struct ChainOutcome {
    long long accepted = 0; // measurement phase
    long long attempts = 0;
    double sigma = 0.0;     // frozen proposal scale
};

/// One Metropolis chain; kept configurations go to `sink`, their sum(y^2)
/// values to `s2_series`.
ChainOutcome run_chain(const System& s, const ChainConfig& cfg, int chain, SampleSink& sink,
                       std::vector<double>& s2_series) {
    const int n = s.n;
    const double beta = s.coupling.beta;
    const double w = support_halfwidth(s.trap, s.coupling.lambda, n);
    double sigma = cfg.proposal_sigma > 0.0 ? cfg.proposal_sigma : w / std::sqrt(double(n));

    std::mt19937_64 gen(chain_seed(cfg.seed, chain));
    NormalDraw normal;

    Configuration y(n);
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        y[i] = -0.8 * w + 1.6 * w * (i + 0.5) / n;
        v[i] = confinement_integral(s.trap, y[i]);
    }

    ChainOutcome out;
    long long tune_acc = 0, tune_att = 0;
    for (long long step = 0; step < cfg.steps; ++step) {
        const bool measuring = step >= cfg.burn_in;
        for (int i = 0; i < n; ++i) {
            const double yo = y[i];
            const double yn = yo + sigma * normal(gen);

            // Product of distance ratios: one log per proposal. The product
            // over- or underflowing (or hitting an exact coincidence) is
            // rare; redo those in log space.
            double prod = 1.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                prod *= (yn - y[j]) / (yo - y[j]);
            }
            double logr;
            const double ap = std::abs(prod);
            if (std::isfinite(prod) && ap > 1e-280 && ap < 1e280) {
                logr = std::log(ap);
            } else {
                logr = 0.0;
                for (int j = 0; j < n && std::isfinite(logr); ++j) {
                    if (j == i) continue;
                    const double d = std::abs(yn - y[j]);
                    if (d == 0.0)
                        logr = -std::numeric_limits<double>::infinity();
                    else
                        logr += std::log(d) - std::log(std::abs(yo - y[j]));
                }
            }

            const double vn = confinement_integral(s.trap, yn);
            const double a = beta * logr - beta * (vn - v[i]);
            const bool accept = std::log(uniform01(gen)) < a;
            if (accept) {
                y[i] = yn;
                v[i] = vn;
            }
            if (measuring) {
                out.attempts += 1;
                out.accepted += accept ? 1 : 0;
            } else {
                tune_att += 1;
                tune_acc += accept ? 1 : 0;
            }
        }

        if (!measuring && (step + 1) % kTuneWindow == 0 && tune_att > 0) {
            const double rate = double(tune_acc) / double(tune_att);
            sigma = std::clamp(sigma * std::exp(rate - 0.4), 1e-9 * w, 100.0 * w);
            tune_acc = tune_att = 0;
        }

        if (measuring && (step - cfg.burn_in) % cfg.thinning == 0) {
            sink.sample(y);
            double s2 = 0.0;
            for (double yi : y) s2 += yi * yi;
            s2_series.push_back(s2);
        }
    }
    out.sigma = sigma;
    return out;
}

/// Integrated autocorrelation, tau = 1 + 2 sum rho_t, with the usual
/// self-consistent window (smallest W >= 6 tau(W)).
double tau_int(const std::vector<double>& s) {
    const long long n = static_cast<long long>(s.size());
    if (n < 8) return 1.0;
    double mean = 0.0;
    for (double x : s) mean += x;
    mean /= double(n);
    double c0 = 0.0;
    for (double x : s) c0 += (x - mean) * (x - mean);
    c0 /= double(n);
    if (!(c0 > 0.0)) return 1.0;

    const long long cap = std::min<long long>(n / 4, 2000);
    double tau = 1.0;
    for (long long w = 1; w <= cap; ++w) {
        double cw = 0.0;
        for (long long t = 0; t + w < n; ++t) cw += (s[t] - mean) * (s[t + w] - mean);
        cw /= double(n - w);
        tau += 2.0 * cw / c0;
        if (double(w) >= 6.0 * tau) break;
    }
    return std::max(tau, 0.0);
}

class CollectSink : public SampleSink {
public:
    void sample(const Configuration& y) override { samples.push_back(y); }
    std::vector<Configuration> samples;
};

double batch_stddev_of_mean(const std::vector<double>& batch_values) {
    const size_t k = batch_values.size();
    if (k < 2) return 0.0;
    double mean = 0.0;
    for (double v : batch_values) mean += v;
    mean /= double(k);
    double var = 0.0;
    for (double v : batch_values) var += (v - mean) * (v - mean);
    return std::sqrt(var / double(k * (k - 1)));
}

} // namespace

SampleStats sample_stream(const System& s, const ChainConfig& cfg, SampleSink& sink) {
    validate(s);
    validate(cfg);
    if (!(s.coupling.beta > 0.0)) throw InvalidParameterError("sample_stream: beta must be > 0");

    SampleStats stats;
    long long accepted = 0, attempts = 0;
    double sigma_sum = 0.0, tau_sum = 0.0;
    std::vector<double> series;
    series.reserve(static_cast<size_t>(cfg.kept_per_chain()));
    for (int c = 0; c < cfg.chains; ++c) {
        sink.begin_chain(c);
        series.clear();
        const ChainOutcome out = run_chain(s, cfg, c, sink, series);
        accepted += out.accepted;
        attempts += out.attempts;
        sigma_sum += out.sigma;
        tau_sum += tau_int(series);
        stats.kept += static_cast<long long>(series.size());
    }
    stats.acceptance_rate = attempts > 0 ? double(accepted) / double(attempts) : 0.0;
    stats.proposal_sigma = sigma_sum / cfg.chains;
    stats.tau_int = tau_sum / cfg.chains;
    if (stats.acceptance_rate < 0.01) {
        std::ostringstream msg;
        msg << "pathological acceptance rate " << stats.acceptance_rate;
        stats.warning = msg.str();
    } else if (stats.acceptance_rate < 0.1 || stats.acceptance_rate > 0.9) {
        std::ostringstream msg;
        msg << "acceptance rate " << stats.acceptance_rate << " outside [0.1, 0.9]";
        stats.warning = msg.str();
    }
    return stats;
}

McRun sample_jpd(const System& s, const ChainConfig& cfg) {
    CollectSink sink;
    McRun run;
    run.stats = sample_stream(s, cfg, sink);
    run.samples = std::move(sink.samples);
    return run;
}

// --- StreamingHistogram -----------------------------------------------------

StreamingHistogram::StreamingHistogram(double lo, double hi, int bins, long long kept_per_chain,
                                       int batches_per_chain)
    : lo_(lo), hi_(hi), bins_(bins), kept_per_chain_(kept_per_chain),
      batches_per_chain_(batches_per_chain) {
    if (!(lo < hi) || bins < 1 || kept_per_chain < 1 || batches_per_chain < 1)
        throw InvalidParameterError("StreamingHistogram: bad parameters");
    width_ = (hi - lo) / bins;
    batch_len_ = std::max<long long>(1, kept_per_chain_ / batches_per_chain_);
    current_.assign(bins_, 0.0);
    pooled_.assign(bins_, 0.0);
}

void StreamingHistogram::flush_batch() {
    if (open_ == 0) return;
    batches_.push_back(current_);
    batch_totals_.push_back(current_total_);
    std::fill(current_.begin(), current_.end(), 0.0);
    current_total_ = 0.0;
    open_ = 0;
}

void StreamingHistogram::begin_chain(int) {
    flush_batch();
    in_chain_ = 0;
}

void StreamingHistogram::sample(const Configuration& y) {
    for (double yi : y) {
        if (yi < lo_ || yi >= hi_) continue;
        const int b = std::min(bins_ - 1, static_cast<int>((yi - lo_) / width_));
        current_[b] += 1.0;
        pooled_[b] += 1.0;
        current_total_ += 1.0;
        pooled_total_ += 1.0;
    }
    ++in_chain_;
    ++open_;
    if (in_chain_ % batch_len_ == 0 &&
        static_cast<int>(batches_.size()) % batches_per_chain_ != batches_per_chain_ - 1)
        flush_batch();
}

DensityProfile StreamingHistogram::finalize(int n_particles) {
    flush_batch();
    DensityProfile p;
    p.y.resize(bins_);
    p.value.resize(bins_);
    p.err.resize(bins_);
    for (int b = 0; b < bins_; ++b) p.y[b] = lo_ + (b + 0.5) * width_;
    if (!(pooled_total_ > 0.0)) return p;
    const double scale = n_particles / (pooled_total_ * width_);
    std::vector<double> batch_vals;
    for (int b = 0; b < bins_; ++b) {
        p.value[b] = pooled_[b] * scale;
        batch_vals.clear();
        for (size_t k = 0; k < batches_.size(); ++k) {
            if (batch_totals_[k] > 0.0)
                batch_vals.push_back(batches_[k][b] * n_particles / (batch_totals_[k] * width_));
        }
        p.err[b] = batch_stddev_of_mean(batch_vals);
        if (pooled_[b] == 0.0) p.err[b] = n_particles / (pooled_total_ * width_);
    }
    return p;
}

// --- StreamingMoments -------------------------------------------------------

StreamingMoments::StreamingMoments(long long kept_per_chain, int batches_per_chain)
    : kept_per_chain_(kept_per_chain), batches_per_chain_(batches_per_chain) {
    if (kept_per_chain < 1 || batches_per_chain < 1)
        throw InvalidParameterError("StreamingMoments: bad parameters");
    batch_len_ = std::max<long long>(1, kept_per_chain_ / batches_per_chain_);
}

void StreamingMoments::flush_batch() {
    if (cur_n_ == 0) return;
    b2_.push_back(cur2_ / double(cur_n_));
    b4_.push_back(cur4_ / double(cur_n_));
    cur2_ = cur4_ = 0.0;
    cur_n_ = 0;
}

void StreamingMoments::begin_chain(int) {
    flush_batch();
    in_chain_ = 0;
}

void StreamingMoments::sample(const Configuration& y) {
    double s2 = 0.0, s4 = 0.0;
    for (double yi : y) {
        const double u = yi * yi;
        s2 += u;
        s4 += u * u;
    }
    cur2_ += s2;
    cur4_ += s4;
    ++cur_n_;
    ++in_chain_;
    if (in_chain_ % batch_len_ == 0 &&
        static_cast<int>(b2_.size()) % batches_per_chain_ != batches_per_chain_ - 1)
        flush_batch();
}

StreamingMoments::Result StreamingMoments::finalize() {
    flush_batch();
    Result r;
    if (b2_.empty()) return r;
    for (double v : b2_) r.m2 += v;
    for (double v : b4_) r.m4 += v;
    r.m2 /= double(b2_.size());
    r.m4 /= double(b4_.size());
    r.err2 = batch_stddev_of_mean(b2_);
    r.err4 = batch_stddev_of_mean(b4_);
    return r;
}

// --- StreamingPcf -----------------------------------------------------------

StreamingPcf::StreamingPcf(double y_center, double window_halfwidth, double delta_max, int bins,
                           long long kept_per_chain, int batches_per_chain)
    : center_(y_center), window_(window_halfwidth), delta_max_(delta_max), bins_(bins),
      kept_per_chain_(kept_per_chain), batches_per_chain_(batches_per_chain) {
    if (!(window_halfwidth > 0.0) || !(delta_max > 0.0) || bins < 1 || kept_per_chain < 1 ||
        batches_per_chain < 1)
        throw InvalidParameterError("StreamingPcf: bad parameters");
    bin_width_ = delta_max_ / bins_;
    current_.assign(bins_, 0.0);
    pooled_.assign(bins_, 0);
}

void StreamingPcf::flush_batch() {
    if (current_cfg_ == 0) return;
    batches_.push_back(current_);
    batch_cfgs_.push_back(current_cfg_);
    std::fill(current_.begin(), current_.end(), 0.0);
    current_cfg_ = 0;
}

void StreamingPcf::begin_chain(int) {
    flush_batch();
    in_chain_ = 0;
}

void StreamingPcf::sample(const Configuration& y) {
    const size_t n = y.size();
    for (size_t i = 0; i < n; ++i) {
        if (std::abs(y[i] - center_) > window_) continue;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = y[j] - y[i];
            if (d <= 0.0 || d >= delta_max_) continue;
            const int b = std::min(bins_ - 1, static_cast<int>(d / bin_width_));
            current_[b] += 1.0;
            pooled_[b] += 1;
        }
    }
    ++current_cfg_;
    ++total_cfg_;
    ++in_chain_;
    if (in_chain_ % batch_len_ == 0 &&
        static_cast<int>(batches_.size()) % batches_per_chain_ != batches_per_chain_ - 1)
        flush_batch();
}

namespace {

double interp_profile(const DensityProfile& p, double y) {
    const size_t n = p.y.size();
    if (n == 0 || y < p.y.front() || y > p.y.back()) return 0.0;
    const double step = (p.y.back() - p.y.front()) / double(n - 1);
    const double t = (y - p.y.front()) / step;
    const size_t i = std::min(n - 2, static_cast<size_t>(t));
    const double f = t - double(i);
    return p.value[i] * (1.0 - f) + p.value[i + 1] * f;
}

} // namespace

PcfEstimate StreamingPcf::finalize(const DensityProfile& density) {
    flush_batch();
    PcfEstimate e;
    e.configurations = total_cfg_;
    e.delta.resize(bins_);
    e.r.resize(bins_);
    e.value.assign(bins_, 0.0);
    e.err.assign(bins_, 0.0);
    e.pairs.assign(pooled_.begin(), pooled_.end());
    if (total_cfg_ == 0) return e;

    // Window integrals of R1(y) R1(y+delta) on a fine subgrid.
    const int m = 512;
    const double step = 2.0 * window_ / m;
    std::vector<double> rho(m);
    double rho_mean = 0.0;
    for (int k = 0; k < m; ++k) {
        rho[k] = interp_profile(density, center_ - window_ + (k + 0.5) * step);
        rho_mean += rho[k];
    }
    rho_mean /= m;

    std::vector<double> batch_vals;
    for (int b = 0; b < bins_; ++b) {
        const double d = (b + 0.5) * bin_width_;
        e.delta[b] = d;
        e.r[b] = d * rho_mean;
        double denom = 0.0;
        for (int k = 0; k < m; ++k) {
            const double yk = center_ - window_ + (k + 0.5) * step;
            denom += rho[k] * interp_profile(density, yk + d) * step;
        }
        if (!(denom > 0.0)) continue;
        e.value[b] = double(pooled_[b]) / (double(total_cfg_) * bin_width_ * denom);
        batch_vals.clear();
        for (size_t k = 0; k < batches_.size(); ++k) {
            if (batch_cfgs_[k] > 0)
                batch_vals.push_back(batches_[k][b] /
                                     (double(batch_cfgs_[k]) * bin_width_ * denom));
        }
        e.err[b] = batch_stddev_of_mean(batch_vals);
    }
    return e;
}

} // namespace polytrap
