// cusketch: command-line front end for the hypergraph / counter-process lab.
// Exit codes: 0 success, 1 validation or I/O error, 2 internal invariant
// violation. All outputs are written atomically (temp file + rename) and are
// byte-deterministic for a fixed --seed, independent of --jobs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cusketch/components.hpp"
#include "cusketch/experiments.hpp"
#include "cusketch/hypergraph.hpp"
#include "cusketch/io.hpp"
#include "cusketch/peel.hpp"
#include "cusketch/process.hpp"
#include "cusketch/sketch.hpp"
#include "cusketch/streams.hpp"

namespace {

using namespace cusketch;

std::vector<double> parse_grid(const std::string& text) {
    // "a:b:step" inclusive of both ends (within half a step), or a single value
    std::vector<double> grid;
    size_t c1 = text.find(':');
    if (c1 == std::string::npos) {
        grid.push_back(std::stod(text));
        return grid;
    }
    size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw CLI::ValidationError("--lambda-grid", "expected a:b:step");
    double a = std::stod(text.substr(0, c1));
    double b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    double step = std::stod(text.substr(c2 + 1));
    if (step <= 0 || b < a) throw CLI::ValidationError("--lambda-grid", "expected a<=b, step>0");
    auto count = (size_t)std::floor((b - a) / step + 0.5);
    for (size_t i = 0; i <= count; ++i) grid.push_back(a + (double)i * step);
    return grid;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) out.push_back(std::stod(item));
    return out;
}

Model parse_model(const std::string& name) {
    if (name == "balanced") return Model::Balanced;
    if (name == "uniform") return Model::Uniform;
    if (name == "zipf") return Model::Zipf;
    throw CLI::ValidationError("--model", "expected balanced|uniform|zipf");
}

std::vector<Strategy> parse_strategies(const std::string& name) {
    if (name == "cm") return {Strategy::CM};
    if (name == "cu") return {Strategy::CU};
    if (name == "both") return {Strategy::CM, Strategy::CU};
    throw CLI::ValidationError("--strategy", "expected cm|cu|both");
}

void require_zipf_beta(const std::string& model, bool beta_given) {
    if (beta_given && model != "zipf")
        throw CLI::ValidationError("--beta", "only valid with --model zipf");
}

Hypergraph load_graph(const std::string& path) { return parse_edge_list(read_file(path)); }

std::string run_report_json(const ErrorReport& rep) {
    nlohmann::json j = nlohmann::json::parse(error_report_summary_json(rep));
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& row : rep.rows) {
        nlohmann::json e{{"edge_id", row.edge},
                         {"o_e", row.occurrences},
                         {"c_e", row.counter},
                         {"R_e", row.relative_error}};
        edges.push_back(e);
    }
    j["edges"] = edges;
    return j.dump(2) + "\n";
}

struct GenOptions {
    std::string type = "er";
    uint32_t n = 1000, k = 3, r = 2, t = 1;
    uint32_t m = 0;
    double lambda = -1;
    uint64_t seed = kDefaultSeed;
    std::string out;
};

int cmd_gen(const GenOptions& o) {
    Hypergraph h;
    if (o.type == "er") {
        uint32_t m = o.m;
        if (o.lambda >= 0) m = (uint32_t)std::llround(o.lambda * o.n);
        if (m == 0) throw std::invalid_argument("gen: need --m or --lambda");
        h = gen_erdos_renyi(o.n, m, o.k, derive_seed(o.seed, "graph", 0));
    } else if (o.type == "dual") {
        h = gen_dual_complete(o.n);
    } else if (o.type == "dual-r") {
        h = gen_dual_complete_r(o.n, o.r);
    } else if (o.type == "regular3") {
        h = gen_2regular_3uniform(o.t, derive_seed(o.seed, "graph", 0));
    } else {
        throw std::invalid_argument("gen: unknown --type " + o.type);
    }
    write_file_atomic(o.out, file_banner(o.seed) + "\n" + format_edge_list(h));
    return 0;
}

struct PeelOptions {
    std::string in, out;
};

int cmd_peel(const PeelOptions& o) {
    Hypergraph h = load_graph(o.in);
    PeelResult p = peel(h);
    std::string csv = "vertex,level\n";
    for (VertexId v = 0; v < h.n; ++v)
        csv += std::to_string(v) + "," +
               (p.in_core(v) ? std::string("core") : std::to_string(p.level[v])) + "\n";
    write_file_atomic(o.out, csv);
    ComponentReport comp = components(h);
    nlohmann::json j{{"n", h.n},
                     {"m", h.m()},
                     {"k", h.k},
                     {"peelable", p.peelable},
                     {"core_vertices", p.core_vertices.size()},
                     {"core_edges", p.core_edges.size()},
                     {"rounds", p.rounds},
                     {"components", comp.components.size()},
                     {"giant_excess", comp.components[comp.giant].excess}};
    write_file_atomic(with_extension(o.out, ".json"), j.dump(2) + "\n");
    return 0;
}

struct RunOptions {
    std::string in;
    uint32_t k = 3, n = 1000;
    uint32_t m = 0;
    double lambda = -1;
    std::string model = "uniform";
    bool beta_given = false;
    double beta = 0.0;
    uint64_t N = 10000;
    std::string strategy = "cu";
    std::string stream_path;
    bool check_invariants = false;
    uint64_t seed = kDefaultSeed;
    std::string out, format = "csv";
};

int cmd_run(const RunOptions& o) {
    require_zipf_beta(o.model, o.beta_given);
    Hypergraph h;
    if (!o.in.empty()) {
        h = load_graph(o.in);
    } else {
        uint32_t m = o.m;
        if (o.lambda >= 0) m = (uint32_t)std::llround(o.lambda * o.n);
        if (m == 0) throw std::invalid_argument("run: need --in, --m or --lambda");
        h = gen_erdos_renyi(o.n, m, o.k, derive_seed(o.seed, "graph", 0));
    }
    auto strategies = parse_strategies(o.strategy);
    if (strategies.size() != 1)
        throw std::invalid_argument("run: --strategy must be cm or cu");
    RunConfig cfg{strategies[0], o.check_invariants};
    ErrorReport rep;
    if (!o.stream_path.empty()) {
        auto keys = load_stream(o.stream_path);
        rep = run(h, std::span<const EdgeId>(keys), cfg);
        rep.seed = o.seed;
    } else {
        StreamSpec spec{parse_model(o.model), o.N, o.beta, derive_seed(o.seed, "stream", 0)};
        rep = run(h, spec, cfg);
        rep.seed = o.seed;
    }
    if (o.format == "json") {
        write_file_atomic(o.out, run_report_json(rep));
    } else {
        write_file_atomic(o.out, error_report_csv(rep, o.seed));
        write_file_atomic(with_extension(o.out, ".json"), error_report_summary_json(rep));
    }
    return 0;
}

struct SweepOptions {
    uint32_t k = 3, n = 1000;
    std::string grid = "0.2:1.4:0.05";
    uint64_t N = 10000;
    std::string model = "uniform";
    bool beta_given = false;
    double beta = 0.0;
    std::string strategy = "both";
    uint32_t replicates = 15;
    uint64_t seed = kDefaultSeed;
    unsigned jobs = 0;
    bool check_invariants = false;
    std::string out;
};

ExperimentConfig sweep_config(const SweepOptions& o) {
    require_zipf_beta(o.model, o.beta_given);
    ExperimentConfig cfg;
    cfg.k = o.k;
    cfg.n = o.n;
    cfg.lambda_grid = parse_grid(o.grid);
    cfg.N = o.N;
    cfg.model = parse_model(o.model);
    cfg.beta = o.beta;
    cfg.strategies = parse_strategies(o.strategy);
    cfg.replicates = o.replicates;
    cfg.root_seed = o.seed;
    cfg.check_invariants = o.check_invariants;
    return cfg;
}

int cmd_sweep(const SweepOptions& o) {
    ConcentrationResult res = concentration(sweep_config(o), o.jobs);
    write_file_atomic(o.out, sweep_csv(res.rows, o.seed));
    write_file_atomic(with_extension(o.out, ".summary.csv"),
                      concentration_summary_csv(res, o.seed));
    return 0;
}

struct DistOptions {
    uint32_t k = 3, n = 1000;
    double lambda = 3.0;
    uint64_t N = 50000;
    uint64_t seed = kDefaultSeed;
    double bin_width = 0.02;
    std::string out;
};

int cmd_dist(const DistOptions& o) {
    DistributionResult res = error_distribution(o.k, o.lambda, o.n, o.N, o.seed, o.bin_width);
    write_file_atomic(o.out, error_rows_csv(res.rows, o.seed));
    write_file_atomic(with_extension(o.out, ".hist.csv"), histogram_csv(res.histogram, o.seed));
    return 0;
}

struct ZipfOptions {
    uint32_t k = 3, n = 1000;
    std::string grid = "0.25:3:0.25";
    uint64_t N = 10000;
    std::string betas = "0,0.2,0.5,0.7,0.9";
    uint32_t replicates = 15;
    uint64_t seed = kDefaultSeed;
    unsigned jobs = 0;
    std::string out;
};

int cmd_zipf(const ZipfOptions& o) {
    ExperimentConfig cfg;
    cfg.k = o.k;
    cfg.n = o.n;
    cfg.lambda_grid = parse_grid(o.grid);
    cfg.N = o.N;
    cfg.strategies = {Strategy::CU};
    cfg.replicates = o.replicates;
    cfg.root_seed = o.seed;
    auto betas = parse_list(o.betas);
    auto rows = zipf_sweep(cfg, betas, o.jobs);
    write_file_atomic(o.out, sweep_csv(rows, o.seed));
    return 0;
}

struct DualOptions {
    uint32_t n = 10, r = 2;
    uint64_t N = 100000;
    std::string model = "uniform";
    uint64_t seed = kDefaultSeed;
    std::string out;
};

int cmd_dual(const DualOptions& o) {
    DualCheckResult res = dual_complete_check(o.n, o.r, o.N, parse_model(o.model), o.seed);
    write_file_atomic(o.out, error_report_csv(res.report, o.seed));
    nlohmann::json j{{"n", res.n},
                     {"r", res.r},
                     {"N", res.N},
                     {"model", res.model},
                     {"seed", res.seed},
                     {"measured_mean_re", res.measured_mean_re},
                     {"predicted_re", res.predicted_re},
                     {"mean_cv_over_N", res.mean_cv_over_n},
                     {"predicted_cv_over_N", res.predicted_cv_over_n},
                     {"max_cv_deviation", res.max_cv_deviation}};
    write_file_atomic(with_extension(o.out, ".json"), j.dump(2) + "\n");
    std::printf("dual n=%u r=%u: measured %.4f predicted %.4f\n", res.n, res.r,
                res.measured_mean_re, res.predicted_re);
    return 0;
}

struct RegularOptions {
    uint32_t t = 200;
    uint64_t N = 10000;
    uint32_t replicates = 10;
    uint64_t seed = kDefaultSeed;
    unsigned jobs = 0;
    std::string out;
};

int cmd_regular(const RegularOptions& o) {
    RegularCoreResult res = regular_core_check(o.t, o.N, o.seed, o.replicates, o.jobs);
    std::string csv = file_banner(o.seed) + "\nreplicate,err_unweighted\n";
    for (size_t i = 0; i < res.replicate_err.size(); ++i)
        csv += std::to_string(i) + "," + format_double(res.replicate_err[i]) + "\n";
    write_file_atomic(o.out, csv);
    nlohmann::json j{{"t", res.t},
                     {"vertices", 3 * res.t},
                     {"edges", 2 * res.t},
                     {"N", res.N},
                     {"replicates", o.replicates},
                     {"seed", o.seed},
                     {"mean_err", res.mean_err},
                     {"stddev_err", res.stddev_err}};
    write_file_atomic(with_extension(o.out, ".json"), j.dump(2) + "\n");
    std::printf("regular t=%u: mean err %.4f\n", res.t, res.mean_err);
    return 0;
}

struct SketchOptions {
    uint32_t n = 1024, k = 3;
    std::string strategy = "cu";
    uint64_t seed = kDefaultSeed;
    std::string stream_path, import_path, export_path, out;
};

int cmd_sketch(const SketchOptions& o) {
    auto strategies = parse_strategies(o.strategy);
    if (strategies.size() != 1)
        throw std::invalid_argument("sketch: --strategy must be cm or cu");
    CountingSketch sketch =
        o.import_path.empty()
            ? CountingSketch(o.n, o.k, derive_seed(o.seed, "hash", 0), strategies[0])
            : CountingSketch::load(o.import_path);

    std::vector<std::string> keys;
    std::map<std::string, uint64_t> truth;
    if (!o.stream_path.empty()) {
        std::ifstream in(o.stream_path);
        if (!in) throw std::runtime_error("sketch: cannot open " + o.stream_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            sketch.update(line);
            if (truth.emplace(line, 0).second) keys.push_back(line);
            ++truth[line];
        }
    }
    if (!o.export_path.empty()) {
        write_file_atomic(o.export_path, sketch.serialize());
    }
    if (!o.out.empty()) {
        std::string csv = file_banner(o.seed) + "\nkey,true_count,estimate\n";
        for (const auto& key : keys)
            csv += key + "," + std::to_string(truth[key]) + "," +
                   std::to_string(sketch.query(key)) + "\n";
        write_file_atomic(o.out, csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cu-sketch-lab: counting sketches on random hash hypergraphs"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* sub_gen = app.add_subcommand("gen", "generate a hypergraph edge list");
    sub_gen->add_option("--type", gen.type, "er|dual|dual-r|regular3")->capture_default_str();
    sub_gen->add_option("--n", gen.n, "vertex count (er) or base vertices (duals)");
    sub_gen->add_option("--k", gen.k, "edge order (er)");
    sub_gen->add_option("--m", gen.m, "edge count (er)");
    sub_gen->add_option("--lambda", gen.lambda, "edge density m/n (er)");
    sub_gen->add_option("--r", gen.r, "base edge order (dual-r)");
    sub_gen->add_option("--t", gen.t, "size parameter (regular3: 3t vertices, 2t edges)");
    sub_gen->add_option("--seed", gen.seed, "root seed")->capture_default_str();
    sub_gen->add_option("--out", gen.out, "output path")->required();

    PeelOptions peel_opt;
    auto* sub_peel = app.add_subcommand("peel", "peel an edge list; levels and core");
    sub_peel->add_option("--in", peel_opt.in, "edge-list file")->required();
    sub_peel->add_option("--out", peel_opt.out, "output CSV path")->required();

    RunOptions run_opt;
    auto* sub_run = app.add_subcommand("run", "one CM/CU run; per-edge error report");
    sub_run->add_option("--in", run_opt.in, "edge-list file (else generated)");
    sub_run->add_option("--k", run_opt.k, "edge order")->capture_default_str();
    sub_run->add_option("--n", run_opt.n, "vertex count")->capture_default_str();
    sub_run->add_option("--m", run_opt.m, "edge count");
    sub_run->add_option("--lambda", run_opt.lambda, "edge density m/n");
    sub_run->add_option("--model", run_opt.model, "balanced|uniform|zipf")->capture_default_str();
    auto* run_beta = sub_run->add_option("--beta", run_opt.beta, "Zipf skewness");
    sub_run->add_option("--N", run_opt.N, "per-key multiplicity")->capture_default_str();
    sub_run->add_option("--strategy", run_opt.strategy, "cm|cu")->capture_default_str();
    sub_run->add_option("--stream", run_opt.stream_path, "explicit key file (overrides --model)");
    sub_run->add_flag("--check-invariants", run_opt.check_invariants,
                      "verify per-step counter invariants");
    sub_run->add_option("--seed", run_opt.seed, "root seed")->capture_default_str();
    sub_run->add_option("--out", run_opt.out, "output path")->required();
    sub_run->add_option("--format", run_opt.format, "csv|json")->capture_default_str();

    SweepOptions sweep_opt;
    auto* sub_sweep = app.add_subcommand("sweep", "lambda sweep; rows + dispersion summary");
    sub_sweep->add_option("--k", sweep_opt.k)->capture_default_str();
    sub_sweep->add_option("--n", sweep_opt.n)->capture_default_str();
    sub_sweep->add_option("--lambda-grid", sweep_opt.grid, "a:b:step or single value")
        ->capture_default_str();
    sub_sweep->add_option("--N", sweep_opt.N)->capture_default_str();
    sub_sweep->add_option("--model", sweep_opt.model)->capture_default_str();
    auto* sweep_beta = sub_sweep->add_option("--beta", sweep_opt.beta, "Zipf skewness");
    sub_sweep->add_option("--strategy", sweep_opt.strategy, "cm|cu|both")->capture_default_str();
    sub_sweep->add_option("--replicates", sweep_opt.replicates)->capture_default_str();
    sub_sweep->add_option("--seed", sweep_opt.seed)->capture_default_str();
    sub_sweep->add_option("--jobs", sweep_opt.jobs, "worker threads (0 = all)")
        ->capture_default_str();
    sub_sweep->add_flag("--check-invariants", sweep_opt.check_invariants);
    sub_sweep->add_option("--out", sweep_opt.out)->required();

    DistOptions dist_opt;
    auto* sub_dist = app.add_subcommand("dist", "single-instance per-edge error distribution");
    sub_dist->add_option("--k", dist_opt.k)->capture_default_str();
    sub_dist->add_option("--n", dist_opt.n)->capture_default_str();
    sub_dist->add_option("--lambda", dist_opt.lambda)->capture_default_str();
    sub_dist->add_option("--N", dist_opt.N)->capture_default_str();
    sub_dist->add_option("--seed", dist_opt.seed)->capture_default_str();
    sub_dist->add_option("--bin-width", dist_opt.bin_width)->capture_default_str();
    sub_dist->add_option("--out", dist_opt.out)->required();

    ZipfOptions zipf_opt;
    auto* sub_zipf = app.add_subcommand("zipf", "weighted-error sweep over Zipf betas");
    sub_zipf->add_option("--k", zipf_opt.k)->capture_default_str();
    sub_zipf->add_option("--n", zipf_opt.n)->capture_default_str();
    sub_zipf->add_option("--lambda-grid", zipf_opt.grid)->capture_default_str();
    sub_zipf->add_option("--N", zipf_opt.N)->capture_default_str();
    sub_zipf->add_option("--betas", zipf_opt.betas, "comma list")->capture_default_str();
    sub_zipf->add_option("--replicates", zipf_opt.replicates)->capture_default_str();
    sub_zipf->add_option("--seed", zipf_opt.seed)->capture_default_str();
    sub_zipf->add_option("--jobs", zipf_opt.jobs)->capture_default_str();
    sub_zipf->add_option("--out", zipf_opt.out)->required();

    DualOptions dual_opt;
    auto* sub_dual = app.add_subcommand("dual", "CU on K'_{n,r} vs the closed-form error");
    sub_dual->add_option("--n", dual_opt.n)->capture_default_str();
    sub_dual->add_option("--r", dual_opt.r)->capture_default_str();
    sub_dual->add_option("--N", dual_opt.N)->capture_default_str();
    sub_dual->add_option("--model", dual_opt.model)->capture_default_str();
    sub_dual->add_option("--seed", dual_opt.seed)->capture_default_str();
    sub_dual->add_option("--out", dual_opt.out)->required();

    RegularOptions reg_opt;
    auto* sub_reg = app.add_subcommand("regular", "CU error on 2-regular 3-uniform instances");
    sub_reg->add_option("--t", reg_opt.t)->capture_default_str();
    sub_reg->add_option("--N", reg_opt.N)->capture_default_str();
    sub_reg->add_option("--replicates", reg_opt.replicates)->capture_default_str();
    sub_reg->add_option("--seed", reg_opt.seed)->capture_default_str();
    sub_reg->add_option("--jobs", reg_opt.jobs)->capture_default_str();
    sub_reg->add_option("--out", reg_opt.out)->required();

    SketchOptions sk_opt;
    auto* sub_sk = app.add_subcommand("sketch", "key-facing sketch: build, export, import");
    sub_sk->add_option("--n", sk_opt.n, "counter array width")->capture_default_str();
    sub_sk->add_option("--k", sk_opt.k, "hash function count")->capture_default_str();
    sub_sk->add_option("--strategy", sk_opt.strategy, "cm|cu")->capture_default_str();
    sub_sk->add_option("--seed", sk_opt.seed)->capture_default_str();
    sub_sk->add_option("--stream", sk_opt.stream_path, "key file, one key per line");
    sub_sk->add_option("--import", sk_opt.import_path, "load sketch state");
    sub_sk->add_option("--export", sk_opt.export_path, "save sketch state");
    sub_sk->add_option("--out", sk_opt.out, "estimates CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        run_opt.beta_given = run_beta->count() > 0;
        sweep_opt.beta_given = sweep_beta->count() > 0;
        if (sub_gen->parsed()) return cmd_gen(gen);
        if (sub_peel->parsed()) return cmd_peel(peel_opt);
        if (sub_run->parsed()) return cmd_run(run_opt);
        if (sub_sweep->parsed()) return cmd_sweep(sweep_opt);
        if (sub_dist->parsed()) return cmd_dist(dist_opt);
        if (sub_zipf->parsed()) return cmd_zipf(zipf_opt);
        if (sub_dual->parsed()) return cmd_dual(dual_opt);
        if (sub_reg->parsed()) return cmd_regular(reg_opt);
        if (sub_sk->parsed()) return cmd_sketch(sk_opt);
    } catch (const cusketch::invariant_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
