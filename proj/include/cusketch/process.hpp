#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cusketch/common.hpp"
#include "cusketch/hypergraph.hpp"
#include "cusketch/streams.hpp"

namespace cusketch {

// Vertex counters plus per-edge occurrence bookkeeping for a CM or CU run on
// a hypergraph. Counters are extended naturals: kInfinity marks a vertex
// whose counter never changes (the marked-hypergraph testing device).
class CounterState {
public:
    explicit CounterState(const Hypergraph& h) : CounterState(h, {}) {}

    CounterState(const Hypergraph& h, std::vector<Counter> initial) : h_(&h) {
        if (!initial.empty() && initial.size() != h.n)
            throw std::invalid_argument("CounterState: initial assignment length mismatch");
        c_ = initial.empty() ? std::vector<Counter>(h.n, 0) : std::move(initial);
        o_.assign(h.m(), 0);
        // flat incidence copy; the step loop stays on two arrays
        offset_.resize(h.m() + 1);
        offset_[0] = 0;
        for (EdgeId e = 0; e < h.m(); ++e)
            offset_[e + 1] = offset_[e] + h.edges[e].size();
        verts_.reserve(offset_.back());
        for (const auto& e : h.edges)
            verts_.insert(verts_.end(), e.begin(), e.end());
    }

    const Hypergraph& graph() const { return *h_; }
    uint64_t steps() const { return t_; }
    Counter vertex_counter(VertexId v) const { return c_[v]; }
    const std::vector<Counter>& vertex_counters() const { return c_; }
    uint64_t occurrences(EdgeId e) const { return o_[e]; }

    Counter edge_counter(EdgeId e) const {
        Counter m = kInfinity;
        for (size_t i = offset_[e]; i < offset_[e + 1]; ++i) m = std::min(m, c_[verts_[i]]);
        return m;
    }

    // Conservative update: increment exactly the incident counters equal to
    // the incident minimum. If every incident counter is +infinity, nothing
    // finite changes; occurrences and the clock still advance.
    void step_cu(EdgeId e) {
        check_edge(e);
        const size_t lo = offset_[e], hi = offset_[e + 1];
        Counter m = kInfinity;
        for (size_t i = lo; i < hi; ++i) m = std::min(m, c_[verts_[i]]);
        if (m != kInfinity) {
            for (size_t i = lo; i < hi; ++i) {
                Counter& c = c_[verts_[i]];
                if (c == m) c = saturating_inc(c);
            }
        }
        ++o_[e];
        ++t_;
    }

    // Regular Count-Min: increment every incident counter.
    void step_cm(EdgeId e) {
        check_edge(e);
        for (size_t i = offset_[e]; i < offset_[e + 1]; ++i) {
            Counter& c = c_[verts_[i]];
            if (c != kInfinity) c = saturating_inc(c);
        }
        ++o_[e];
        ++t_;
    }

    void step(Strategy s, EdgeId e) { s == Strategy::CU ? step_cu(e) : step_cm(e); }

    // Asserts c_e >= o_e for every edge (both strategies), and, when
    // require_witness, that every unmarked vertex with at least one incident
    // edge has an incident edge with c_e == c_v. The witness condition is a
    // CU-process property: under CM a vertex can be a strict local maximum
    // (balanced CM on a path puts 2N on the center and N on both edges).
    // O(n * deg) per call; meant for small instances.
    void check_invariants(bool require_witness = true) const {
        const auto& h = *h_;
        std::vector<Counter> cedge(h.m());
        for (EdgeId e = 0; e < h.m(); ++e) {
            cedge[e] = edge_counter(e);
            if (cedge[e] < o_[e])
                throw invariant_error("c_e < o_e for edge " + std::to_string(e) +
                                      " at step " + std::to_string(t_));
        }
        if (!require_witness) return;
        std::vector<char> witnessed(h.n, 0);
        std::vector<char> has_edge(h.n, 0);
        for (EdgeId e = 0; e < h.m(); ++e)
            for (size_t i = offset_[e]; i < offset_[e + 1]; ++i) {
                VertexId v = verts_[i];
                has_edge[v] = 1;
                if (cedge[e] == c_[v]) witnessed[v] = 1;
            }
        for (VertexId v = 0; v < h.n; ++v)
            if (has_edge[v] && c_[v] != kInfinity && !witnessed[v])
                throw invariant_error("no incident edge matches counter of vertex " +
                                      std::to_string(v) + " at step " + std::to_string(t_));
    }

private:
    static Counter saturating_inc(Counter c) { return c < kInfinity - 1 ? c + 1 : kInfinity - 1; }

    void check_edge(EdgeId e) const {
        if (e >= o_.size()) throw std::invalid_argument("step: edge index out of range");
    }

    const Hypergraph* h_;
    std::vector<size_t> offset_;
    std::vector<VertexId> verts_;
    std::vector<Counter> c_;
    std::vector<uint64_t> o_;
    uint64_t t_ = 0;
};

struct Histogram {
    double bin_width = 0.02;
    std::vector<uint64_t> counts;  // bin i covers [i*w, (i+1)*w)

    void add(double x) {
        auto bin = (size_t)(x / bin_width);
        if (counts.size() <= bin) counts.resize(bin + 1, 0);
        ++counts[bin];
    }
};

struct EdgeErrorRow {
    EdgeId edge = 0;
    uint64_t occurrences = 0;
    Counter counter = 0;
    double relative_error = 0.0;  // NaN when occurrences == 0
};

// Per-edge errors after a run. Aggregates skip edges the quantities are not
// defined for: R_e needs o_e > 0, and edges whose every vertex is marked have
// c_e = +infinity. err_weighted divides by m*N (the paper's stream length);
// under the balanced model it coincides with err_unweighted exactly.
struct ErrorReport {
    std::vector<EdgeErrorRow> rows;  // finite-counter edges, edge-id order
    double err_unweighted = 0.0;     // mean R_e over edges with o_e > 0
    double err_weighted = 0.0;       // (1/(mN)) * sum(c_e - o_e)
    uint64_t zero_occurrence_edges = 0;
    uint64_t infinite_edges = 0;
    Histogram histogram;

    // run provenance, echoed into the summary JSON
    uint32_t n = 0, k = 0;
    uint64_t m = 0;
    double N = 0;  // steps/m for explicit streams
    std::string model = "explicit";
    std::string strategy;
    uint64_t seed = 0;
};

struct RunConfig {
    Strategy strategy = Strategy::CU;
    bool check_invariants = false;
    double bin_width = 0.02;
};

inline ErrorReport make_report(const CounterState& st, const RunConfig& cfg) {
    const Hypergraph& h = st.graph();
    ErrorReport rep;
    rep.histogram.bin_width = cfg.bin_width;
    rep.n = h.n;
    rep.k = h.k;
    rep.strategy = strategy_name(cfg.strategy);
    double sum_rel = 0.0, sum_abs = 0.0;
    uint64_t with_occ = 0;
    for (EdgeId e = 0; e < h.m(); ++e) {
        Counter c = st.edge_counter(e);
        if (c == kInfinity) {
            ++rep.infinite_edges;
            continue;
        }
        EdgeErrorRow row{e, st.occurrences(e), c,
                         std::numeric_limits<double>::quiet_NaN()};
        if (row.occurrences > 0) {
            row.relative_error =
                (double)(c - row.occurrences) / (double)row.occurrences;
            sum_rel += row.relative_error;
            rep.histogram.add(row.relative_error);
            ++with_occ;
        } else {
            ++rep.zero_occurrence_edges;
        }
        sum_abs += (double)(c - row.occurrences);
        rep.rows.push_back(row);
    }
    rep.m = rep.rows.size();
    rep.N = rep.m == 0 ? 0.0 : (double)st.steps() / (double)rep.m;
    rep.err_unweighted = with_occ == 0 ? 0.0 : sum_rel / (double)with_occ;
    // stream-length basis: equals (1/(mN)) * sum(c_e - o_e) since steps = m*N
    rep.err_weighted = st.steps() == 0 ? 0.0 : sum_abs / (double)st.steps();
    return rep;
}

inline ErrorReport run(const Hypergraph& h, std::span<const EdgeId> stream, RunConfig cfg) {
    CounterState st(h);
    const bool witness = cfg.strategy == Strategy::CU;
    for (EdgeId e : stream) {
        st.step(cfg.strategy, e);
        if (cfg.check_invariants) st.check_invariants(witness);
    }
    return make_report(st, cfg);
}

inline std::string format_beta(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", beta);
    return buf;
}

inline std::string model_label(const StreamSpec& spec) {
    return spec.model == Model::Zipf ? "zipf(" + format_beta(spec.beta) + ")"
                                     : model_name(spec.model);
}

inline ErrorReport run(const Hypergraph& h, const StreamSpec& spec, RunConfig cfg) {
    CounterState st(h);
    KeyStream keys(spec, h.m());
    const bool witness = cfg.strategy == Strategy::CU;
    for (uint64_t i = 0, len = keys.length(); i < len; ++i) {
        st.step(cfg.strategy, keys.next());
        if (cfg.check_invariants) st.check_invariants(witness);
    }
    ErrorReport rep = make_report(st, cfg);
    rep.N = (double)spec.N;
    rep.model = model_label(spec);
    rep.seed = spec.seed;
    return rep;
}

// One observed CU step on a dual-complete hypergraph K'_n, where every two
// edges share exactly one degree-2 vertex. Checks the step dichotomy: only
// the drawn edge's counter rises, except when the drawn edge is one of
// exactly two minimum edges, in which case the other minimum rises too. Also
// tracks the running identity sum(c_e) = t + p(t).
struct DualStepAudit {
    uint64_t t_before = 0;
    std::vector<EdgeId> minedges_before;  // edges with minimal c_e
    Counter p_before = 0;                 // min c_e before the step
    Counter p_after = 0;
    Counter q_after = 0;                  // max c_e after the step
    std::vector<EdgeId> increased;        // edges whose counter rose this step
};

inline DualStepAudit dual_step_audit(CounterState& st, EdgeId drawn) {
    const Hypergraph& h = st.graph();
    DualStepAudit a;
    a.t_before = st.steps();
    std::vector<Counter> before(h.m());
    for (EdgeId e = 0; e < h.m(); ++e) before[e] = st.edge_counter(e);
    a.p_before = *std::min_element(before.begin(), before.end());
    for (EdgeId e = 0; e < h.m(); ++e)
        if (before[e] == a.p_before) a.minedges_before.push_back(e);

    st.step_cu(drawn);

    Counter sum = 0;
    a.p_after = kInfinity;
    for (EdgeId e = 0; e < h.m(); ++e) {
        Counter c = st.edge_counter(e);
        if (c > before[e]) a.increased.push_back(e);
        a.p_after = std::min(a.p_after, c);
        a.q_after = std::max(a.q_after, c);
        sum += c;
    }

    auto fail = [&](const std::string& what) {
        throw invariant_error("dual_step_audit: " + what + " at t=" +
                              std::to_string(a.t_before) + " drawn=" + std::to_string(drawn));
    };
    if (a.minedges_before.size() < 2) fail("|minedges| < 2");
    const bool two_min = a.minedges_before.size() == 2 &&
                         std::find(a.minedges_before.begin(), a.minedges_before.end(), drawn) !=
                             a.minedges_before.end();
    if (two_min) {
        if (a.increased.size() != 2 ||
            !std::is_permutation(a.increased.begin(), a.increased.end(),
                                 a.minedges_before.begin()))
            fail("two-member minimum case must raise exactly the two minimum edges");
    } else {
        if (a.increased.size() != 1 || a.increased[0] != drawn)
            fail("only the drawn edge may increase");
    }
    if (sum != st.steps() + a.p_after) fail("sum(c_e) != t + p(t)");
    return a;
}

} // namespace cusketch
