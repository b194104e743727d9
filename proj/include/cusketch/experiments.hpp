#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cusketch/common.hpp"
#include "cusketch/components.hpp"
#include "cusketch/hypergraph.hpp"
#include "cusketch/io.hpp"
#include "cusketch/peel.hpp"
#include "cusketch/process.hpp"
#include "cusketch/streams.hpp"

namespace cusketch {

inline constexpr uint64_t kDefaultSeed = 1;

// Deterministic task pool: tasks own disjoint output slots, so the result
// bytes do not depend on the worker count.
template <class Fn>
inline void parallel_for(size_t count, unsigned jobs, Fn&& fn) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = (unsigned)std::min<size_t>(jobs, count);
    if (jobs <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : workers) t.join();
}

struct ExperimentConfig {
    uint32_t k = 3;
    uint32_t n = 1000;
    std::vector<double> lambda_grid;
    uint64_t N = 10000;
    Model model = Model::Uniform;
    double beta = 0.0;
    std::vector<Strategy> strategies{Strategy::CU};
    uint32_t replicates = 15;
    uint64_t root_seed = kDefaultSeed;
    bool check_invariants = false;

    void validate() const {
        if (lambda_grid.empty()) throw std::invalid_argument("config: empty lambda grid");
        if (replicates == 0) throw std::invalid_argument("config: need replicates >= 1");
        if (strategies.empty()) throw std::invalid_argument("config: need a strategy");
        for (double l : lambda_grid)
            if ((uint64_t)std::llround(l * n) < 1)
                throw std::invalid_argument("config: lambda*n rounds below one edge");
    }
};

struct SweepRow {
    uint32_t k = 0;
    uint32_t n = 0;
    uint32_t m = 0;
    double lambda = 0;
    uint64_t N = 0;
    std::string model;
    std::string strategy;
    uint32_t replicate = 0;
    uint64_t seed = 0;  // graph seed of the replicate
    double err_unweighted = 0;
    double err_weighted = 0;
    double core_fraction = 0;
    int64_t giant_excess = 0;
};

namespace detail {

// graph seed per (grid point, replicate); stream seed additionally per strategy
inline uint64_t graph_seed(uint64_t root, size_t grid, uint32_t rep, uint32_t reps) {
    return derive_seed(root, "graph", grid * reps + rep);
}
inline uint64_t stream_seed(uint64_t root, size_t grid, uint32_t rep, uint32_t reps,
                            size_t strat) {
    return derive_seed(root, "stream", (grid * reps + rep) * 8 + strat);
}

} // namespace detail

// One row per (grid point x strategy x replicate): generate the hypergraph,
// run each strategy on a fresh stream, and attach peel/core and component
// statistics of the instance.
inline std::vector<SweepRow> sweep_lambda(const ExperimentConfig& cfg, unsigned jobs = 0) {
    cfg.validate();
    const size_t points = cfg.lambda_grid.size();
    const size_t tasks = points * cfg.replicates;
    const size_t strategies = cfg.strategies.size();
    std::vector<SweepRow> rows(tasks * strategies);

    parallel_for(tasks, jobs, [&](size_t task) {
        const size_t grid = task / cfg.replicates;
        const auto rep = (uint32_t)(task % cfg.replicates);
        const double lambda = cfg.lambda_grid[grid];
        const auto m = (uint32_t)std::llround(lambda * cfg.n);
        const uint64_t gseed = detail::graph_seed(cfg.root_seed, grid, rep, cfg.replicates);
        Hypergraph h = gen_erdos_renyi(cfg.n, m, cfg.k, gseed);
        PeelResult p = peel(h);
        ComponentReport comp = components(h);
        for (size_t s = 0; s < strategies; ++s) {
            StreamSpec spec{cfg.model, cfg.N, cfg.beta,
                            detail::stream_seed(cfg.root_seed, grid, rep, cfg.replicates, s)};
            ErrorReport er = run(h, spec, {cfg.strategies[s], cfg.check_invariants});
            SweepRow& row = rows[task * strategies + s];
            row.k = cfg.k;
            row.n = cfg.n;
            row.m = m;
            row.lambda = lambda;
            row.N = cfg.N;
            row.model = model_label(spec);
            row.strategy = strategy_name(cfg.strategies[s]);
            row.replicate = rep;
            row.seed = gseed;
            row.err_unweighted = er.err_unweighted;
            row.err_weighted = er.err_weighted;
            row.core_fraction = (double)p.core_vertices.size() / (double)cfg.n;
            row.giant_excess = comp.components[comp.giant].excess;
        }
    });
    return rows;
}

struct ConcentrationPoint {
    double lambda = 0;
    std::string strategy;
    uint32_t replicates = 0;
    double mean_err = 0;
    double stddev_err = 0;  // NaN with a single replicate
};

struct ConcentrationResult {
    std::vector<SweepRow> rows;
    std::vector<ConcentrationPoint> summary;
};

// Same rows as sweep_lambda, plus per-grid-point dispersion of the
// unweighted error across replicates.
inline ConcentrationResult concentration(const ExperimentConfig& cfg, unsigned jobs = 0) {
    ConcentrationResult res;
    res.rows = sweep_lambda(cfg, jobs);
    const size_t strategies = cfg.strategies.size();
    for (size_t grid = 0; grid < cfg.lambda_grid.size(); ++grid) {
        for (size_t s = 0; s < strategies; ++s) {
            double sum = 0;
            for (uint32_t rep = 0; rep < cfg.replicates; ++rep)
                sum += res.rows[(grid * cfg.replicates + rep) * strategies + s].err_unweighted;
            double mean = sum / cfg.replicates;
            double ss = 0;
            for (uint32_t rep = 0; rep < cfg.replicates; ++rep) {
                double d = res.rows[(grid * cfg.replicates + rep) * strategies + s].err_unweighted -
                           mean;
                ss += d * d;
            }
            ConcentrationPoint pt;
            pt.lambda = cfg.lambda_grid[grid];
            pt.strategy = strategy_name(cfg.strategies[s]);
            pt.replicates = cfg.replicates;
            pt.mean_err = mean;
            pt.stddev_err = cfg.replicates < 2
                                ? std::numeric_limits<double>::quiet_NaN()
                                : std::sqrt(ss / (cfg.replicates - 1));
            res.summary.push_back(pt);
        }
    }
    return res;
}

struct DistributionResult {
    std::vector<EdgeErrorRow> rows;  // randomized display order, stable edge ids
    Histogram histogram;
    ErrorReport report;
};

// Single-instance CU run for the per-edge error scatter; rows are shuffled
// for display, the edge_id column stays stable.
inline DistributionResult error_distribution(uint32_t k, double lambda, uint32_t n,
                                             uint64_t N, uint64_t seed,
                                             double bin_width = 0.02) {
    const auto m = (uint32_t)std::llround(lambda * n);
    Hypergraph h = gen_erdos_renyi(n, m, k, derive_seed(seed, "graph", 0));
    StreamSpec spec{Model::Uniform, N, 0.0, derive_seed(seed, "stream", 0)};
    DistributionResult res;
    res.report = run(h, spec, {Strategy::CU, false, bin_width});
    res.histogram = res.report.histogram;
    res.rows = res.report.rows;
    Rng rng(derive_seed(seed, "shuffle", 0));
    for (size_t i = res.rows.size(); i > 1; --i)
        std::swap(res.rows[i - 1], res.rows[rng.next_below(i)]);
    return res;
}

// Location of the tallest histogram bin and the edge fraction within
// +/- window of its center.
struct HistogramMode {
    double center = 0;
    double mass_fraction = 0;
};

inline HistogramMode dominant_mode(const Histogram& hist, uint64_t total_edges,
                                   double window) {
    size_t best = 0;
    for (size_t i = 1; i < hist.counts.size(); ++i)
        if (hist.counts[i] > hist.counts[best]) best = i;
    HistogramMode mode;
    mode.center = ((double)best + 0.5) * hist.bin_width;
    uint64_t mass = 0;
    for (size_t i = 0; i < hist.counts.size(); ++i) {
        double c = ((double)i + 0.5) * hist.bin_width;
        if (std::abs(c - mode.center) <= window + hist.bin_width / 2) mass += hist.counts[i];
    }
    mode.mass_fraction = total_edges == 0 ? 0.0 : (double)mass / (double)total_edges;
    return mode;
}

// Weighted-error sweep over Zipf skewness values; beta = 0 is the uniform
// baseline. Rows are grouped by beta in the given order.
inline std::vector<SweepRow> zipf_sweep(const ExperimentConfig& cfg,
                                        std::span<const double> betas, unsigned jobs = 0) {
    std::vector<SweepRow> all;
    for (size_t b = 0; b < betas.size(); ++b) {
        ExperimentConfig c = cfg;
        c.model = Model::Zipf;
        c.beta = betas[b];
        c.root_seed = derive_seed(cfg.root_seed, "zipf-beta", b);
        auto rows = sweep_lambda(c, jobs);
        all.insert(all.end(), rows.begin(), rows.end());
    }
    return all;
}

struct DualCheckResult {
    uint32_t n = 0, r = 0;
    uint64_t N = 0;
    std::string model;
    uint64_t seed = 0;
    double measured_mean_re = 0;
    double predicted_re = 0;       // (r-1)/(n-r+1)
    double mean_cv_over_n = 0;     // mean of c_v / N
    double max_cv_deviation = 0;   // max |c_v/N - n/(n-r+1)|
    double predicted_cv_over_n = 0;
    ErrorReport report;
};

// CU on the dual complete hypergraph K'_{n,r} against the closed-form error.
inline DualCheckResult dual_complete_check(uint32_t n, uint32_t r, uint64_t N, Model model,
                                           uint64_t seed) {
    Hypergraph h = r == 2 ? gen_dual_complete(n) : gen_dual_complete_r(n, r);
    StreamSpec spec{model, N, 0.0, derive_seed(seed, "stream", 0)};
    CounterState st(h);
    KeyStream keys(spec, h.m());
    for (uint64_t i = 0, len = keys.length(); i < len; ++i) st.step_cu(keys.next());

    DualCheckResult res;
    res.n = n;
    res.r = r;
    res.N = N;
    res.model = model_label(spec);
    res.seed = seed;
    res.predicted_re = (double)(r - 1) / (double)(n - r + 1);
    res.predicted_cv_over_n = (double)n / (double)(n - r + 1);
    res.report = make_report(st, {Strategy::CU});
    res.report.N = (double)N;
    res.report.model = res.model;
    res.report.seed = seed;
    res.measured_mean_re = res.report.err_unweighted;
    double sum_cv = 0;
    for (VertexId v = 0; v < h.n; ++v) {
        double ratio = (double)st.vertex_counter(v) / (double)N;
        sum_cv += ratio;
        res.max_cv_deviation =
            std::max(res.max_cv_deviation, std::abs(ratio - res.predicted_cv_over_n));
    }
    res.mean_cv_over_n = sum_cv / h.n;
    return res;
}

struct RegularCoreResult {
    uint32_t t = 0;
    uint64_t N = 0;
    std::vector<double> replicate_err;  // CU, uniform model
    double mean_err = 0;
    double stddev_err = 0;
};

// CU error on random 2-regular 3-uniform hypergraphs, the sparsest
// non-peelable instances; the average settles near 0.217.
inline RegularCoreResult regular_core_check(uint32_t t, uint64_t N, uint64_t seed,
                                            uint32_t replicates, unsigned jobs = 0) {
    if (replicates == 0) throw std::invalid_argument("regular_core_check: replicates >= 1");
    RegularCoreResult res;
    res.t = t;
    res.N = N;
    res.replicate_err.resize(replicates);
    parallel_for(replicates, jobs, [&](size_t rep) {
        Hypergraph h = gen_2regular_3uniform(t, derive_seed(seed, "graph", rep));
        StreamSpec spec{Model::Uniform, N, 0.0, derive_seed(seed, "stream", rep)};
        res.replicate_err[rep] = run(h, spec, {Strategy::CU}).err_unweighted;
    });
    double sum = 0;
    for (double e : res.replicate_err) sum += e;
    res.mean_err = sum / replicates;
    double ss = 0;
    for (double e : res.replicate_err) ss += (e - res.mean_err) * (e - res.mean_err);
    res.stddev_err = replicates < 2 ? std::numeric_limits<double>::quiet_NaN()
                                    : std::sqrt(ss / (replicates - 1));
    return res;
}

// Limit probability that a random edge has a nonzero regular-CM error: all k
// of its vertices carry at least one other edge.
inline double cm_nonzero_error_probability(uint32_t k, double lambda) {
    return std::pow(1.0 - std::exp(-(double)k * lambda), (double)k);
}

struct CmErrorRateResult {
    double empirical = 0;  // fraction of edges whose k vertices all have degree >= 2
    double predicted = 0;
    uint64_t edges_checked = 0;
};

inline CmErrorRateResult cm_error_rate_check(uint32_t k, double lambda, uint32_t n,
                                             uint64_t seed, uint32_t replicates) {
    if (replicates == 0) throw std::invalid_argument("cm_error_rate_check: replicates >= 1");
    CmErrorRateResult res;
    res.predicted = cm_nonzero_error_probability(k, lambda);
    const auto m = (uint32_t)std::llround(lambda * n);
    uint64_t nonzero = 0;
    for (uint32_t rep = 0; rep < replicates; ++rep) {
        Hypergraph h = gen_erdos_renyi(n, m, k, derive_seed(seed, "graph", rep));
        auto deg = h.degrees();
        for (EdgeId e = 0; e < h.m(); ++e) {
            nonzero += h.min_edge_degree(e, deg) >= 2;
            ++res.edges_checked;
        }
    }
    res.empirical = res.edges_checked == 0 ? 0.0 : (double)nonzero / (double)res.edges_checked;
    return res;
}

// ---- CSV / JSON emission ----

inline std::string sweep_csv(const std::vector<SweepRow>& rows, uint64_t root_seed) {
    std::string out = file_banner(root_seed) + "\n";
    out += "k,n,m,lambda,N,model,strategy,replicate,seed,err_unweighted,err_weighted,"
           "core_fraction,giant_excess\n";
    for (const auto& r : rows) {
        out += std::to_string(r.k) + "," + std::to_string(r.n) + "," + std::to_string(r.m) +
               "," + format_double(r.lambda) + "," + std::to_string(r.N) + "," + r.model +
               "," + r.strategy + "," + std::to_string(r.replicate) + "," +
               std::to_string(r.seed) + "," + format_double(r.err_unweighted) + "," +
               format_double(r.err_weighted) + "," + format_double(r.core_fraction) + "," +
               std::to_string(r.giant_excess) + "\n";
    }
    return out;
}

inline std::string concentration_summary_csv(const ConcentrationResult& res,
                                             uint64_t root_seed) {
    std::string out = file_banner(root_seed) + "\n";
    out += "lambda,strategy,replicates,mean_err,stddev_err\n";
    for (const auto& p : res.summary)
        out += format_double(p.lambda) + "," + p.strategy + "," +
               std::to_string(p.replicates) + "," + format_double(p.mean_err) + "," +
               format_double(p.stddev_err) + "\n";
    return out;
}

inline std::string error_report_csv(const ErrorReport& rep, uint64_t root_seed) {
    std::string out = file_banner(root_seed) + "\n";
    out += "edge_id,o_e,c_e,R_e\n";
    for (const auto& row : rep.rows)
        out += std::to_string(row.edge) + "," + std::to_string(row.occurrences) + "," +
               std::to_string(row.counter) + "," + format_double(row.relative_error) + "\n";
    return out;
}

inline std::string error_rows_csv(const std::vector<EdgeErrorRow>& rows, uint64_t root_seed) {
    std::string out = file_banner(root_seed) + "\n";
    out += "edge_id,o_e,c_e,R_e\n";
    for (const auto& row : rows)
        out += std::to_string(row.edge) + "," + std::to_string(row.occurrences) + "," +
               std::to_string(row.counter) + "," + format_double(row.relative_error) + "\n";
    return out;
}

inline std::string histogram_csv(const Histogram& hist, uint64_t root_seed) {
    std::string out = file_banner(root_seed) + "\n";
    out += "bin_lo,bin_hi,count\n";
    for (size_t i = 0; i < hist.counts.size(); ++i)
        out += format_double((double)i * hist.bin_width) + "," +
               format_double((double)(i + 1) * hist.bin_width) + "," +
               std::to_string(hist.counts[i]) + "\n";
    return out;
}

// The summary object pinned by the report interface.
inline std::string error_report_summary_json(const ErrorReport& rep) {
    nlohmann::json j{{"n", rep.n},
                     {"m", rep.m},
                     {"k", rep.k},
                     {"N", rep.N},
                     {"model", rep.model},
                     {"strategy", rep.strategy},
                     {"seed", rep.seed},
                     {"err_unweighted", rep.err_unweighted},
                     {"err_weighted", rep.err_weighted},
                     {"zero_occurrence_edges", rep.zero_occurrence_edges}};
    return j.dump(2) + "\n";
}

} // namespace cusketch
