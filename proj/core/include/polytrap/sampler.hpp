#pragma once

#include "polytrap/model.hpp"
#include "polytrap/profile.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace polytrap {

/// Metropolis chain layout. `steps` counts sweeps (N single-particle
/// proposals each), including burn-in; every `thinning`-th post-burn-in
/// sweep is kept.
struct ChainConfig {
    long long steps = 0;
    long long burn_in = 0;
    double proposal_sigma = 0.0; // <= 0: auto, 0.5 * support width / sqrt(N), tuned in burn-in
    std::uint64_t seed = 0;
    long long thinning = 1;
    int chains = 8;

    long long kept_per_chain() const { return (steps - burn_in + thinning - 1) / thinning; }
};

void validate(const ChainConfig& cfg);

struct SampleStats {
    double acceptance_rate = 0.0; // measurement phase, averaged over chains
    double tau_int = 0.0;         // integrated autocorrelation of sum(y^2), in kept samples
    long long kept = 0;
    double proposal_sigma = 0.0;  // mean frozen value across chains
    std::string warning;          // empty for a healthy run
};

/// Receives kept configurations in deterministic order: chains are emitted
/// whole, in seed order, each preceded by begin_chain.
class SampleSink {
public:
    virtual ~SampleSink() = default;
    virtual void begin_chain(int chain) { (void)chain; }
    virtual void sample(const Configuration& y) = 0;
};

/// Fan-out to several sinks, in order.
class MultiSink : public SampleSink {
public:
    explicit MultiSink(std::vector<SampleSink*> sinks) : sinks_(std::move(sinks)) {}
    void begin_chain(int chain) override {
        for (auto* s : sinks_) s->begin_chain(chain);
    }
    void sample(const Configuration& y) override {
        for (auto* s : sinks_) s->sample(y);
    }

private:
    std::vector<SampleSink*> sinks_;
};

/// Metropolis sampling of |psi0|^2: log target
///   beta sum_{i<j} log|y_i - y_j| - beta sum_i V(y_i),  beta = 2 lambda.
/// Proposals are single-particle Gaussian moves; a proposal landing exactly
/// on another particle is rejected (log target -inf). Fully deterministic
/// for a given (system, config): per-chain generators are seeded by
/// chain_seed(master, chain) and chains run and emit in index order.
SampleStats sample_stream(const System& s, const ChainConfig& cfg, SampleSink& sink);

/// Materialized variant for modest sample counts.
struct McRun {
    std::vector<Configuration> samples;
    SampleStats stats;
};
McRun sample_jpd(const System& s, const ChainConfig& cfg);

/// Histogram density with batch-means errors. Batches never span chains
/// (batches_per_chain blocks per chain, remainder folded into the last
/// block). The finalized profile integrates to N exactly; empty bins carry
/// a one-count Poisson error bound.
class StreamingHistogram : public SampleSink {
public:
    StreamingHistogram(double lo, double hi, int bins, long long kept_per_chain,
                       int batches_per_chain = 7);
    void begin_chain(int chain) override;
    void sample(const Configuration& y) override;
    DensityProfile finalize(int n_particles);

private:
    void flush_batch();

    double lo_, hi_, width_;
    int bins_;
    long long kept_per_chain_, batch_len_;
    int batches_per_chain_;
    long long in_chain_ = 0;
    long long open_ = 0; // samples in the open batch
    std::vector<double> current_;             // counts for the open batch
    double current_total_ = 0.0;              // in-range count for the open batch
    std::vector<std::vector<double>> batches_; // per-batch normalized bin counts
    std::vector<double> batch_totals_;
    std::vector<double> pooled_;
    double pooled_total_ = 0.0;
};

/// Streaming second/fourth moments of the particle positions: estimates
/// M_p = integral of y^p R1(y) dy as the per-configuration mean of
/// sum_i y_i^p, with batch-means errors.
class StreamingMoments : public SampleSink {
public:
    StreamingMoments(long long kept_per_chain, int batches_per_chain = 7);
    void begin_chain(int chain) override;
    void sample(const Configuration& y) override;

    struct Result {
        double m2 = 0.0, m4 = 0.0;
        double err2 = 0.0, err4 = 0.0;
    };
    Result finalize();

private:
    void flush_batch();

    long long kept_per_chain_, batch_len_;
    int batches_per_chain_;
    long long in_chain_ = 0;
    double cur2_ = 0.0, cur4_ = 0.0;
    long long cur_n_ = 0;
    std::vector<double> b2_, b4_;
};

struct PcfEstimate {
    std::vector<double> delta;      // separation bin centers
    std::vector<double> r;          // unfolded separation, delta * mean window density
    std::vector<double> value;      // pair density normalized by R1 R1
    std::vector<double> err;
    std::vector<long long> pairs;   // raw pair counts per bin
    long long configurations = 0;
};

/// Pair counting anchored in a window around y_center: every ordered pair
/// with the left particle in the window and separation below delta_max is
/// binned. finalize() normalizes by the supplied density profile,
///   g(delta) = pairs / (n_cfg * bin_width * integral_W R1(y) R1(y+delta) dy),
/// and unfolds r = delta * (window mean of R1).
class StreamingPcf : public SampleSink {
public:
    StreamingPcf(double y_center, double window_halfwidth, double delta_max, int bins,
                 long long kept_per_chain, int batches_per_chain = 7);
    void begin_chain(int chain) override;
    void sample(const Configuration& y) override;
    PcfEstimate finalize(const DensityProfile& density);

private:
    void flush_batch();

    double center_, window_, delta_max_, bin_width_;
    int bins_;
    long long kept_per_chain_, batch_len_;
    int batches_per_chain_;
    long long in_chain_ = 0;
    long long total_cfg_ = 0;
    std::vector<double> current_;
    long long current_cfg_ = 0;
    std::vector<std::vector<double>> batches_;
    std::vector<long long> batch_cfgs_;
    std::vector<long long> pooled_;
};

} // namespace polytrap
