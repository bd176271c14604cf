// Command-line front end: verify / density / pcf / phase-scan.
//
// Every command writes plot-ready tables (CSV, 17 significant digits) plus a
// JSON manifest recording the command, the merged effective parameters, the
// seed, the code version, the wall time and the output file list. The
// manifest's wall time is the only field that varies between identical runs;
// all data files are byte-reproducible given the same seed and build.
//
// Exit codes: 0 success, 1 numerical/convergence failure, 2 usage error.

#include "polytrap/analytic_density.hpp"
#include "polytrap/energy.hpp"
#include "polytrap/errors.hpp"
#include "polytrap/model.hpp"
#include "polytrap/orthopoly.hpp"
#include "polytrap/rng.hpp"
#include "polytrap/sampler.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polytrap;

namespace {

std::string fnum(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string fint(long long v) { return std::to_string(v); }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }

    void save(const fs::path& path) const {
        std::FILE* f = std::fopen(path.string().c_str(), "wb");
        if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
        for (std::size_t i = 0; i < header.size(); ++i)
            std::fprintf(f, "%s%c", header[i].c_str(), i + 1 < header.size() ? ',' : '\n');
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                std::fprintf(f, "%s%c", row[i].c_str(), i + 1 < row.size() ? ',' : '\n');
        std::fclose(f);
    }
};

/// Accumulates everything the manifest records while a command runs.
struct RunContext {
    std::string command;
    fs::path outdir;
    std::string stem;
    json params = json::object();
    json seed;  // null unless the command consumed randomness
    json report = json::object();
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    RunContext(std::string cmd, const std::string& dir, std::string out_stem)
        : command(std::move(cmd)), outdir(dir), stem(std::move(out_stem)) {
        if (!outdir.empty()) fs::create_directories(outdir);
    }

    fs::path path(const std::string& suffix) const { return outdir / (stem + suffix); }

    void wrote(const fs::path& p) { outputs.push_back(p.filename().string()); }

    void write_json(const fs::path& p, const json& j) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
        out << j.dump(2) << "\n";
        wrote(p);
    }

    void write_manifest() const {
        json j;
        j["schema"] = "polytrap-manifest/1";
        j["command"] = command;
        j["version"] = POLYTRAP_VERSION;
        j["parameters"] = params;
        j["seed"] = seed;
        j["outputs"] = outputs;
        j["report"] = report;
        j["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ofstream out(path(".manifest.json"), std::ios::binary);
        out << j.dump(2) << "\n";
    }
};

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + step * i;
    g.back() = hi;
    return g;
}

/// Index-parallel map with dynamic scheduling; results must be written by
/// index so the output is independent of the thread count.
template <class F>
void parallel_for(int count, int threads, F&& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < count;) body(i);
        });
    for (auto& th : pool) th.join();
}

// --- shared option bundles --------------------------------------------------

struct TrapOpts {
    std::string shape = "quartic";
    double gamma = 1.0;
    double a1 = 0.0;
    double a3 = 0.0;
};

Confinement make_trap(const TrapOpts& t) {
    if (t.shape == "harmonic") return Confinement::harmonic(t.gamma);
    if (t.shape == "quartic") return Confinement::quartic(t.gamma, t.a1);
    return Confinement::sextic(t.gamma, t.a3, t.a1);
}

void add_trap_options(CLI::App* cmd, TrapOpts& t) {
    cmd->add_option("--case", t.shape, "Trap shape")
        ->check(CLI::IsMember({"harmonic", "quartic", "sextic"}))
        ->capture_default_str();
    cmd->add_option("--gamma", t.gamma, "Overall trap scale, > 0")->capture_default_str();
    cmd->add_option("--a1", t.a1,
                    "Well parameter: quartic trap gamma*(x^3 - a1*x), sextic linear coefficient")
        ->capture_default_str();
    cmd->add_option("--a3", t.a3, "Sextic cubic coefficient: trap gamma*(x^5 + a3*x^3 + a1*x)")
        ->capture_default_str();
}

json trap_json(const TrapOpts& t) {
    json j{{"case", t.shape}, {"gamma", t.gamma}};
    if (t.shape != "harmonic") j["a1"] = t.a1;
    if (t.shape == "sextic") j["a3"] = t.a3;
    return j;
}

struct EnsembleOpts {
    double lambda = 1.0;
    double beta = 0.0;
};

void add_ensemble_options(CLI::App* cmd, EnsembleOpts& e, bool with_beta) {
    cmd->add_option("--lambda", e.lambda, "Interaction exponent, > 0")->capture_default_str();
    if (with_beta) cmd->add_option("--beta", e.beta, "Log-gas exponent, = 2*lambda");
}

/// Folds --beta into lambda; both given and inconsistent is a usage error.
double resolve_lambda(const CLI::App* cmd, EnsembleOpts& e) {
    const bool has_beta = cmd->get_option_no_throw("--beta") && cmd->count("--beta") > 0;
    if (has_beta) {
        if (cmd->count("--lambda") > 0 && std::abs(e.beta - 2.0 * e.lambda) > 1e-12)
            throw InvalidParameterError("--beta and --lambda disagree (beta = 2*lambda)");
        e.lambda = e.beta / 2.0;
    }
    e.beta = 2.0 * e.lambda;
    return e.lambda;
}

struct McOpts {
    long long kept = 200000;
    long long burn_in = 2000;
    long long thinning = 2;
    int chains = 8;
    double sigma = 0.0;
    std::uint64_t seed = 1;
};

void add_mc_options(CLI::App* cmd, McOpts& o) {
    cmd->add_option("--kept", o.kept, "Total kept samples across all chains")
        ->capture_default_str();
    cmd->add_option("--burn-in", o.burn_in, "Burn-in sweeps per chain")->capture_default_str();
    cmd->add_option("--thin", o.thinning, "Keep every k-th post-burn-in sweep")
        ->capture_default_str();
    cmd->add_option("--chains", o.chains, "Independent chains")->capture_default_str();
    cmd->add_option("--sigma", o.sigma, "Proposal width; <= 0 auto-tunes during burn-in")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Master RNG seed")->capture_default_str();
}

ChainConfig chain_config(const McOpts& o) {
    const long long per_chain = (o.kept + std::max(1, o.chains) - 1) / std::max(1, o.chains);
    ChainConfig cfg;
    cfg.burn_in = o.burn_in;
    cfg.thinning = o.thinning;
    cfg.steps = o.burn_in + per_chain * o.thinning;
    cfg.chains = o.chains;
    cfg.proposal_sigma = o.sigma;
    cfg.seed = o.seed;
    return cfg;
}

json mc_json(const McOpts& o) {
    return json{{"kept", o.kept},     {"burn_in", o.burn_in}, {"thin", o.thinning},
                {"chains", o.chains}, {"sigma", o.sigma},     {"seed", o.seed}};
}

json stats_json(const SampleStats& st) {
    return json{{"acceptance_rate", st.acceptance_rate},
                {"tau_int", st.tau_int},
                {"kept", st.kept},
                {"proposal_sigma", st.proposal_sigma},
                {"warning", st.warning}};
}

json bands_json(const BandStructure& b) {
    json a = json::array();
    for (const auto& iv : b.intervals) a.push_back({iv.lo, iv.hi});
    return json{{"intervals", a}, {"count", b.count()}, {"dip", b.dip}};
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
    TrapOpts trap;
    EnsembleOpts ens;
    int n = 4;
    int samples = 100;
    std::uint64_t seed = 1;
    std::string outdir = ".";
    std::string out = "verify";
};

int run_verify(const VerifyArgs& a, double lambda) {
    RunContext ctx("verify", a.outdir, a.out);
    ctx.params = {{"trap", trap_json(a.trap)},
                  {"n", a.n},
                  {"lambda", lambda},
                  {"samples", a.samples}};
    ctx.seed = a.seed;

    System s{a.n, make_trap(a.trap), Coupling::from_lambda(lambda)};
    validate(s);

    double worst_canonical = 0.0;
    for (int k = 0; k < a.samples; ++k) {
        const Configuration x = random_configuration(s, chain_seed(a.seed, k));
        const EnergyTerms terms = local_energy_terms(s, x, EnergyForm::canonical);
        worst_canonical = std::max(worst_canonical, std::abs(terms.total) / terms.scale);
    }

    const ConstantCheck check = expanded_constant_check(s, a.samples, a.seed);
    const double e0 = ground_state_energy(s);
    const double spread_rel = check.max_spread / std::max(std::abs(check.mean), 1e-300);
    // relative to |E0|, with an absolute floor of 1e-10 when E0 = 0
    const double mean_err = std::abs(check.mean - e0) / std::max(std::abs(e0), 1.0);

    const bool pass_canonical = worst_canonical < 1e-9;
    const bool pass_spread = spread_rel < 1e-9;
    const bool pass_mean = mean_err < 1e-10;
    const bool pass = pass_canonical && pass_spread && pass_mean;

    ctx.report = {{"canonical_max_relative_residual", worst_canonical},
                  {"expanded_relative_spread", spread_rel},
                  {"expanded_mean", check.mean},
                  {"ground_state_energy", e0},
                  {"mean_relative_error", mean_err},
                  {"thresholds",
                   {{"canonical", 1e-9}, {"spread", 1e-9}, {"mean", 1e-10}}},
                  {"pass", pass}};
    ctx.write_json(ctx.path(".report.json"), ctx.report);
    ctx.write_manifest();
    if (!pass) std::cerr << "polytrap verify: residuals above threshold\n";
    return pass ? 0 : 1;
}

// --- density ------------------------------------------------------------------

struct DensityArgs {
    std::string method = "kernel";
    TrapOpts trap;
    EnsembleOpts ens;
    int n = 0;
    double ymax = 0.0;
    int points = 401;
    int bins = 200;
    QuadOptions quad;
    double tol = 1e-10;
    int max_iter = 400;
    McOpts mc;
    int threads = 1;
    std::string outdir = ".";
    std::string out = "density";
};

int run_density(const DensityArgs& a, double lambda) {
    RunContext ctx("density", a.outdir, a.out);
    const Confinement trap = make_trap(a.trap);
    validate(trap);
    const double ymax = a.ymax > 0 ? a.ymax : support_halfwidth(trap, lambda, a.n);
    ctx.params = {{"method", a.method}, {"trap", trap_json(a.trap)}, {"n", a.n},
                  {"lambda", lambda},   {"ymax", ymax}};

    if (a.method == "kernel") {
        if (lambda != 1.0)
            throw InvalidParameterError(
                "kernel density requires beta = 2 (lambda = 1); use --method mc for other beta");
        ctx.params["points"] = a.points;
        ctx.params["panels"] = a.quad.panels;
        ctx.params["quad_order"] = a.quad.order;
        const RecurrenceTable table = build_recurrence(Weight{trap}, a.n, a.quad);
        const std::vector<double> grid = linspace(-ymax, ymax, a.points);
        std::vector<double> val(grid.size());
        parallel_for(static_cast<int>(grid.size()), a.threads,
                     [&](int i) { val[static_cast<std::size_t>(i)] = kernel_density(table, grid[static_cast<std::size_t>(i)]); });
        CsvTable csv;
        csv.header = {"y", "density"};
        for (std::size_t i = 0; i < grid.size(); ++i) csv.add({fnum(grid[i]), fnum(val[i])});
        csv.save(ctx.path(".csv"));
        ctx.wrote(ctx.path(".csv"));
        ctx.report = {{"integral", kernel_trace(table, a.quad.panels, a.quad.order)},
                      {"truncation_halfwidth", table.halfwidth},
                      {"orthogonality_residual", table.ortho_residual}};
        ctx.write_manifest();
        return 0;
    }

    if (a.method == "analytic") {
        const std::vector<double> grid = linspace(-ymax, ymax, a.points);
        ctx.params["points"] = a.points;
        if (a.trap.shape == "quartic") {
            const QuarticDensityParams p{a.trap.gamma, a.trap.a1, a.n};
            CsvTable csv;
            csv.header = {"y", "density"};
            for (double y : grid) csv.add({fnum(y), fnum(quartic_density(p, y))});
            csv.save(ctx.path(".csv"));
            ctx.wrote(ctx.path(".csv"));
            const auto mom = quartic_moments(p);
            ctx.report = {{"bands", bands_json(quartic_bands(p))},
                          {"m2", mom[0]},
                          {"m4", mom[1]},
                          {"critical_a1", quartic_critical_a1(a.trap.gamma, a.n)}};
            ctx.write_manifest();
            return 0;
        }
        if (a.trap.shape == "sextic") {
            const SexticParams p{a.trap.gamma, a.trap.a3, a.trap.a1, a.n};
            ctx.params["tol"] = a.tol;
            ctx.params["max_iter"] = a.max_iter;
            try {
                const SexticSolveResult res = sextic_density_solve(p, a.tol, a.max_iter);
                std::vector<double> val(grid.size());
                parallel_for(static_cast<int>(grid.size()), a.threads, [&](int i) {
                    val[static_cast<std::size_t>(i)] = res.density(grid[static_cast<std::size_t>(i)]);
                });
                CsvTable csv;
                csv.header = {"y", "density"};
                for (std::size_t i = 0; i < grid.size(); ++i)
                    csv.add({fnum(grid[i]), fnum(val[i])});
                csv.save(ctx.path(".csv"));
                ctx.wrote(ctx.path(".csv"));
                ctx.report = {{"bands", bands_json(res.density.bands())},
                              {"m2", res.state.m2},
                              {"m4", res.state.m4},
                              {"residual", res.state.residual},
                              {"iterations", res.state.iterations},
                              {"mass", res.state.mass},
                              {"critical_a1", sextic_critical_a1(p)}};
                ctx.write_manifest();
                return 0;
            } catch (const ConvergenceError& e) {
                ctx.report = {{"error", e.what()}, {"best_residual", e.residual}};
                ctx.write_manifest();
                std::cerr << "polytrap density: " << e.what() << "\n";
                return 1;
            }
        }
        throw InvalidParameterError("analytic density needs --case quartic or sextic");
    }

    // mc
    System s{a.n, trap, Coupling::from_lambda(lambda)};
    validate(s);
    const ChainConfig cfg = chain_config(a.mc);
    ctx.params["bins"] = a.bins;
    ctx.params["mc"] = mc_json(a.mc);
    ctx.seed = a.mc.seed;
    StreamingHistogram hist(-ymax, ymax, a.bins, cfg.kept_per_chain());
    const SampleStats st = sample_stream(s, cfg, hist);
    const DensityProfile prof = hist.finalize(a.n);
    CsvTable csv;
    csv.header = {"y", "density", "stderr"};
    for (std::size_t i = 0; i < prof.y.size(); ++i)
        csv.add({fnum(prof.y[i]), fnum(prof.value[i]), fnum(prof.err[i])});
    csv.save(ctx.path(".csv"));
    ctx.wrote(ctx.path(".csv"));
    ctx.report = {{"stats", stats_json(st)}};
    ctx.write_manifest();
    return 0;
}

// --- pcf ----------------------------------------------------------------------

struct PcfArgs {
    std::string method = "kernel";
    TrapOpts trap;
    EnsembleOpts ens;
    int n = 0;
    double dy = 0.0;
    double ymax = 0.0;
    int points = 801;
    double floor_rel = 1e-3;
    int smooth = 21;
    QuadOptions quad;
    double center = 0.0;
    double window = 0.0;
    double delta_max = 0.0;
    int bins = 200;
    McOpts mc;
    int threads = 1;
    std::string outdir = ".";
    std::string out = "pcf";
};

int run_pcf(const PcfArgs& a, double lambda) {
    RunContext ctx("pcf", a.outdir, a.out);
    const Confinement trap = make_trap(a.trap);
    validate(trap);
    const double ymax = a.ymax > 0 ? a.ymax : support_halfwidth(trap, lambda, a.n);
    ctx.params = {{"method", a.method}, {"trap", trap_json(a.trap)}, {"n", a.n},
                  {"lambda", lambda},   {"ymax", ymax},              {"dy", a.dy}};

    if (a.method == "kernel") {
        if (lambda != 1.0)
            throw InvalidParameterError(
                "kernel pcf requires beta = 2 (lambda = 1); use --method mc for other beta");
        ctx.params["points"] = a.points;
        ctx.params["floor_rel"] = a.floor_rel;
        ctx.params["smooth"] = a.smooth;
        const RecurrenceTable table = build_recurrence(Weight{trap}, a.n, a.quad);
        const std::vector<double> grid = linspace(-ymax, ymax, a.points);
        std::vector<double> dens(grid.size());
        parallel_for(static_cast<int>(grid.size()), a.threads, [&](int i) {
            dens[static_cast<std::size_t>(i)] = kernel_density(table, grid[static_cast<std::size_t>(i)]);
        });
        const double floor = a.floor_rel * *std::max_element(dens.begin(), dens.end());
        const PcfCurve curve = scaled_pcf_sweep(table, a.dy, grid, floor, a.smooth);
        CsvTable csv;
        csv.header = {"r", "value", "smoothed", "sine_ref"};
        double worst = 0.0;
        for (std::size_t i = 0; i < curve.r.size(); ++i) {
            const double ref = sine_kernel_reference(curve.r[i]);
            worst = std::max(worst, std::abs(curve.smoothed[i] - ref));
            csv.add({fnum(curve.r[i]), fnum(curve.value[i]), fnum(curve.smoothed[i]), fnum(ref)});
        }
        csv.save(ctx.path(".csv"));
        ctx.wrote(ctx.path(".csv"));
        ctx.report = {{"dropped", curve.dropped},
                      {"points_used", curve.r.size()},
                      {"r_min", curve.r.empty() ? 0.0 : curve.r.front()},
                      {"r_max", curve.r.empty() ? 0.0 : curve.r.back()},
                      {"density_floor", floor},
                      {"max_abs_deviation_smoothed", worst}};
        ctx.write_manifest();
        return 0;
    }

    // mc
    if (a.dy <= 0) throw InvalidParameterError("--dy must be > 0");
    if (a.delta_max <= 0)
        throw InvalidParameterError("--delta-max is required for --method mc");
    const double window = a.window > 0 ? a.window : a.delta_max;
    const int pcf_bins = static_cast<int>(std::ceil(a.delta_max / a.dy));
    System s{a.n, trap, Coupling::from_lambda(lambda)};
    validate(s);
    const ChainConfig cfg = chain_config(a.mc);
    ctx.params["center"] = a.center;
    ctx.params["window"] = window;
    ctx.params["delta_max"] = a.delta_max;
    ctx.params["bins"] = a.bins;
    ctx.params["mc"] = mc_json(a.mc);
    ctx.seed = a.mc.seed;
    StreamingHistogram hist(-ymax, ymax, a.bins, cfg.kept_per_chain());
    StreamingPcf pcf(a.center, window, a.delta_max, pcf_bins, cfg.kept_per_chain());
    MultiSink sink({&hist, &pcf});
    const SampleStats st = sample_stream(s, cfg, sink);
    const DensityProfile prof = hist.finalize(a.n);
    const PcfEstimate est = pcf.finalize(prof);
    CsvTable csv;
    csv.header = {"delta", "r", "value", "stderr", "sine_ref", "pairs"};
    for (std::size_t i = 0; i < est.delta.size(); ++i)
        csv.add({fnum(est.delta[i]), fnum(est.r[i]), fnum(est.value[i]), fnum(est.err[i]),
                 fnum(sine_kernel_reference(est.r[i])), fint(est.pairs[i])});
    csv.save(ctx.path(".csv"));
    ctx.wrote(ctx.path(".csv"));
    ctx.report = {{"stats", stats_json(st)}, {"configurations", est.configurations}};
    ctx.write_manifest();
    return 0;
}

// --- phase-scan ---------------------------------------------------------------

struct PhaseScanArgs {
    TrapOpts trap;
    EnsembleOpts ens;
    int n = 0;
    double a1_from = 0.0;
    double a1_to = 0.0;
    double a1_step = 0.0;
    double tol = 1e-10;
    int max_iter = 400;
    std::string outdir = ".";
    std::string out = "phase_scan";
};

int run_phase_scan(const PhaseScanArgs& a, double lambda) {
    if (a.trap.shape == "harmonic")
        throw InvalidParameterError("phase-scan needs --case quartic or sextic");
    if (a.a1_step <= 0) throw InvalidParameterError("--a1-step must be > 0");
    if (a.n < 1) throw InvalidParameterError("phase-scan needs n >= 1");

    RunContext ctx("phase-scan", a.outdir, a.out);
    ctx.params = {{"trap", trap_json(a.trap)}, {"n", a.n},
                  {"lambda", lambda},          {"a1_from", a.a1_from},
                  {"a1_to", a.a1_to},          {"a1_step", a.a1_step},
                  {"tol", a.tol},              {"max_iter", a.max_iter}};

    const double dir = a.a1_to >= a.a1_from ? 1.0 : -1.0;
    const long long count =
        static_cast<long long>(std::floor(std::abs(a.a1_to - a.a1_from) / a.a1_step + 1e-9)) + 1;
    std::vector<double> a1s;
    a1s.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) a1s.push_back(a.a1_from + dir * a.a1_step * i);

    PhaseScanParams p;
    p.trap_case = a.trap.shape == "quartic" ? TrapCase::quartic : TrapCase::sextic;
    p.gamma = a.trap.gamma;
    p.a3 = a.trap.a3;
    p.n = a.n;
    p.lambda = lambda;
    p.a1_values = a1s;
    p.tol = a.tol;
    p.max_iter = a.max_iter;
    const std::vector<PhaseScanRow> rows = phase_scan(p);

    CsvTable csv;
    csv.header = {"a1", "band_count", "dip", "e0", "m2", "m4", "residual", "iterations",
                  "converged"};
    int nonconverged = 0;
    json transitions = json::array();
    const PhaseScanRow* prev = nullptr;
    for (const auto& r : rows) {
        csv.add({fnum(r.a1), fint(r.band_count), fint(r.dip ? 1 : 0), fnum(r.e0), fnum(r.m2),
                 fnum(r.m4), fnum(r.residual), fint(r.iterations), fint(r.converged ? 1 : 0)});
        if (!r.converged) ++nonconverged;
        if (prev && prev->converged && r.converged && prev->band_count != r.band_count)
            transitions.push_back({{"a1_before", prev->a1},
                                   {"a1_after", r.a1},
                                   {"bands_before", prev->band_count},
                                   {"bands_after", r.band_count}});
        if (r.converged) prev = &r;
    }
    csv.save(ctx.path(".csv"));
    ctx.wrote(ctx.path(".csv"));

    const double a_c = p.trap_case == TrapCase::quartic
                           ? quartic_critical_a1(a.trap.gamma, a.n)
                           : sextic_critical_a1({a.trap.gamma, a.trap.a3, 0.0, a.n});
    ctx.report = {{"rows", rows.size()},
                  {"nonconverged", nonconverged},
                  {"critical_a1", a_c},
                  {"transitions", transitions}};
    ctx.write_manifest();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polytrap: spectral, determinantal and Monte Carlo tools for a "
                 "log-gas in a polynomial trap"};
    app.require_subcommand(1);
    app.set_version_flag("--version", POLYTRAP_VERSION);
    app.set_config("--config", "",
                   "INI-style key=value file with one section per subcommand; "
                   "command-line flags take precedence");

    const int hw = std::max(1u, std::thread::hardware_concurrency());

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand(
        "verify", "Check the closed-form ground state against both local-energy groupings");
    add_trap_options(verify, va.trap);
    add_ensemble_options(verify, va.ens, false);
    verify->add_option("--n", va.n, "Particle count")->required();
    verify->add_option("--samples", va.samples, "Random configurations per check")
        ->capture_default_str();
    verify->add_option("--seed", va.seed, "Master RNG seed")->capture_default_str();
    verify->add_option("--outdir", va.outdir, "Output directory")
        ->envname("POLYTRAP_OUTDIR")
        ->capture_default_str();
    verify->add_option("--out", va.out, "Output file stem")->capture_default_str();

    DensityArgs da;
    da.threads = hw;
    CLI::App* density =
        app.add_subcommand("density", "Level density by kernel, closed form, or Monte Carlo");
    density->add_option("--method", da.method, "kernel | analytic | mc")
        ->check(CLI::IsMember({"kernel", "analytic", "mc"}))
        ->capture_default_str();
    add_trap_options(density, da.trap);
    add_ensemble_options(density, da.ens, true);
    density->add_option("--n", da.n, "Particle count")->required();
    density->add_option("--ymax", da.ymax, "Grid half-width; <= 0 picks the support half-width")
        ->capture_default_str();
    density->add_option("--points", da.points, "Grid points (kernel/analytic)")
        ->capture_default_str();
    density->add_option("--bins", da.bins, "Histogram bins (mc)")->capture_default_str();
    density->add_option("--panels", da.quad.panels, "Quadrature panels (kernel)")
        ->capture_default_str();
    density->add_option("--quad-order", da.quad.order, "Gauss-Legendre order per panel (kernel)")
        ->capture_default_str();
    density->add_option("--tol", da.tol, "Moment-solver tolerance (analytic sextic)")
        ->capture_default_str();
    density->add_option("--max-iter", da.max_iter, "Moment-solver iteration cap")
        ->capture_default_str();
    add_mc_options(density, da.mc);
    density->add_option("--threads", da.threads, "Worker thread cap for grid evaluation")
        ->capture_default_str();
    density->add_option("--outdir", da.outdir, "Output directory")
        ->envname("POLYTRAP_OUTDIR")
        ->capture_default_str();
    density->add_option("--out", da.out, "Output file stem")->capture_default_str();

    PcfArgs pa;
    pa.threads = hw;
    CLI::App* pcf = app.add_subcommand(
        "pcf", "Unfolded pair correlation by determinantal kernel or Monte Carlo");
    pcf->add_option("--method", pa.method, "kernel | mc")
        ->check(CLI::IsMember({"kernel", "mc"}))
        ->capture_default_str();
    add_trap_options(pcf, pa.trap);
    add_ensemble_options(pcf, pa.ens, true);
    pcf->add_option("--n", pa.n, "Particle count")->required();
    pcf->add_option("--dy", pa.dy, "Kernel: two-point offset; mc: separation bin width")
        ->required();
    pcf->add_option("--ymax", pa.ymax, "Sweep half-width; <= 0 picks the support half-width")
        ->capture_default_str();
    pcf->add_option("--points", pa.points, "Sweep grid points (kernel)")->capture_default_str();
    pcf->add_option("--floor-rel", pa.floor_rel, "Density floor relative to the grid maximum")
        ->capture_default_str();
    pcf->add_option("--smooth", pa.smooth, "Moving-average window (odd)")->capture_default_str();
    pcf->add_option("--panels", pa.quad.panels, "Quadrature panels (kernel)")
        ->capture_default_str();
    pcf->add_option("--quad-order", pa.quad.order, "Gauss-Legendre order per panel (kernel)")
        ->capture_default_str();
    pcf->add_option("--center", pa.center, "Window center (mc)")->capture_default_str();
    pcf->add_option("--window", pa.window, "Window half-width (mc); <= 0 uses delta-max")
        ->capture_default_str();
    pcf->add_option("--delta-max", pa.delta_max, "Largest separation counted (mc)")
        ->capture_default_str();
    pcf->add_option("--bins", pa.bins, "Density histogram bins for normalization (mc)")
        ->capture_default_str();
    add_mc_options(pcf, pa.mc);
    pcf->add_option("--threads", pa.threads, "Worker thread cap for grid evaluation")
        ->capture_default_str();
    pcf->add_option("--outdir", pa.outdir, "Output directory")
        ->envname("POLYTRAP_OUTDIR")
        ->capture_default_str();
    pcf->add_option("--out", pa.out, "Output file stem")->capture_default_str();

    PhaseScanArgs sa;
    CLI::App* scan = app.add_subcommand(
        "phase-scan", "Band structure, moments and energy along an a1 sweep");
    add_trap_options(scan, sa.trap);
    add_ensemble_options(scan, sa.ens, false);
    scan->add_option("--n", sa.n, "Particle count")->required();
    scan->add_option("--a1-from", sa.a1_from, "First a1 value")->required();
    scan->add_option("--a1-to", sa.a1_to, "Last a1 value (may be below --a1-from)")->required();
    scan->add_option("--a1-step", sa.a1_step, "Step magnitude, > 0")->required();
    scan->add_option("--tol", sa.tol, "Moment-solver tolerance (sextic)")->capture_default_str();
    scan->add_option("--max-iter", sa.max_iter, "Moment-solver iteration cap")
        ->capture_default_str();
    scan->add_option("--outdir", sa.outdir, "Output directory")
        ->envname("POLYTRAP_OUTDIR")
        ->capture_default_str();
    scan->add_option("--out", sa.out, "Output file stem")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (verify->parsed()) return run_verify(va, resolve_lambda(verify, va.ens));
        if (density->parsed()) return run_density(da, resolve_lambda(density, da.ens));
        if (pcf->parsed()) return run_pcf(pa, resolve_lambda(pcf, pa.ens));
        if (scan->parsed()) return run_phase_scan(sa, resolve_lambda(scan, sa.ens));
        std::cerr << "polytrap: a subcommand is required (see --help)\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InvalidParameterError& e) {
        std::cerr << "polytrap: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedFormError& e) {
        std::cerr << "polytrap: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "polytrap: " << e.what() << "\n";
        return 1;
    } catch (const QuadratureError& e) {
        std::cerr << "polytrap: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "polytrap: " << e.what() << "\n";
        return 1;
    }
}
