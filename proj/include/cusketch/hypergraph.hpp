#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cusketch/common.hpp"
#include "cusketch/rng.hpp"

namespace cusketch {

// A k-uniform hypergraph on dense vertex ids [0, n). Edges are sorted vertex
// sets; the random generator guarantees pairwise-distinct edges, while duals
// and ingested files may contain parallel edges (K'_2 has two copies of {0}).
struct Hypergraph {
    uint32_t n = 0;                            // vertex count
    uint32_t k = 0;                            // nominal edge order
    std::vector<std::vector<VertexId>> edges;  // each sorted, distinct ids < n

    uint32_t m() const { return (uint32_t)edges.size(); }
    double lambda() const { return n == 0 ? 0.0 : (double)m() / (double)n; }

    bool uniform() const {
        for (const auto& e : edges)
            if (e.size() != k) return false;
        return true;
    }

    std::vector<uint32_t> degrees() const {
        std::vector<uint32_t> deg(n, 0);
        for (const auto& e : edges)
            for (VertexId v : e) ++deg[v];
        return deg;
    }

    uint32_t min_edge_degree(EdgeId e, const std::vector<uint32_t>& deg) const {
        uint32_t d = UINT32_MAX;
        for (VertexId v : edges[e]) d = std::min(d, deg[v]);
        return d;
    }

    void validate() const {
        for (const auto& e : edges) {
            if (e.empty()) throw std::invalid_argument("empty edge");
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] >= n) throw std::invalid_argument("vertex id out of range");
                if (i > 0 && e[i] <= e[i - 1])
                    throw std::invalid_argument("edge vertices must be sorted and distinct");
            }
        }
    }
};

// C(n,k) clamped at 2^63; only needed to validate requested edge counts.
inline uint64_t binomial_clamped(uint64_t n, uint64_t k) {
    constexpr uint64_t cap = 1ULL << 63;
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;  // exact: prefix products of C are integers
        if (r >= cap) return cap;
    }
    return (uint64_t)r;
}

namespace detail {

struct EdgeHash {
    size_t operator()(const std::vector<VertexId>& e) const {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (VertexId v : e) h = mix64(h ^ v);
        return (size_t)h;
    }
};

} // namespace detail

// Uniform m-subset of the simple k-edges on [0,n): each edge is k distinct
// vertices, distinct edges enforced by rejection against a hash set.
inline Hypergraph gen_erdos_renyi(uint32_t n, uint32_t m, uint32_t k, uint64_t seed) {
    if (k < 2) throw std::invalid_argument("gen_erdos_renyi: k must be >= 2");
    if (n < k) throw std::invalid_argument("gen_erdos_renyi: need n >= k");
    if ((uint64_t)m > binomial_clamped(n, k))
        throw std::invalid_argument("gen_erdos_renyi: m exceeds C(n,k)");

    Hypergraph h;
    h.n = n;
    h.k = k;
    h.edges.reserve(m);
    std::unordered_set<std::vector<VertexId>, detail::EdgeHash> seen;
    seen.reserve(m * 2);
    Rng rng(seed);
    std::vector<VertexId> edge(k);
    while (h.edges.size() < m) {
        for (uint32_t i = 0; i < k; ++i) {
            bool fresh = false;
            while (!fresh) {
                edge[i] = rng.next_below32(n);
                fresh = true;
                for (uint32_t j = 0; j < i; ++j)
                    if (edge[j] == edge[i]) { fresh = false; break; }
            }
        }
        std::sort(edge.begin(), edge.end());
        if (seen.insert(edge).second) h.edges.push_back(edge);
    }
    return h;
}

// K'_n, the dual of the complete graph K_n: one vertex per edge {a,b} of K_n
// (lexicographic ids), one order-(n-1) edge per base vertex. Every vertex has
// degree 2. K'_2 degenerates to one vertex with two parallel unit edges.
inline Hypergraph gen_dual_complete(uint32_t n) {
    if (n < 2) throw std::invalid_argument("gen_dual_complete: need n >= 2");
    Hypergraph h;
    h.n = n * (n - 1) / 2;
    h.k = n - 1;
    std::vector<std::vector<VertexId>> incident(n);
    VertexId id = 0;
    for (uint32_t a = 0; a < n; ++a)
        for (uint32_t b = a + 1; b < n; ++b) {
            incident[a].push_back(id);
            incident[b].push_back(id);
            ++id;
        }
    h.edges.assign(incident.begin(), incident.end());
    return h;
}

// K'_{n,r}, the dual of the complete r-uniform hypergraph on n base vertices:
// C(n,r) vertices (one per r-subset, lexicographic), n edges of order
// C(n-1,r-1), all degrees r. r=2 coincides with gen_dual_complete.
inline Hypergraph gen_dual_complete_r(uint32_t n, uint32_t r) {
    if (r < 2) throw std::invalid_argument("gen_dual_complete_r: need r >= 2");
    if (r > n) throw std::invalid_argument("gen_dual_complete_r: need n >= r");
    Hypergraph h;
    uint64_t verts = binomial_clamped(n, r);
    if (verts >= (1ULL << 32)) throw std::invalid_argument("gen_dual_complete_r: too large");
    h.n = (uint32_t)verts;
    h.k = (uint32_t)binomial_clamped(n - 1, r - 1);
    std::vector<std::vector<VertexId>> incident(n);

    // enumerate r-subsets of [0,n) in lexicographic order
    std::vector<uint32_t> subset(r);
    for (uint32_t i = 0; i < r; ++i) subset[i] = i;
    VertexId id = 0;
    while (true) {
        for (uint32_t v : subset) incident[v].push_back(id);
        ++id;
        int i = (int)r - 1;
        while (i >= 0 && subset[i] == n - r + i) --i;
        if (i < 0) break;
        ++subset[i];
        for (uint32_t j = i + 1; j < r; ++j) subset[j] = subset[j - 1] + 1;
    }
    h.edges.assign(incident.begin(), incident.end());
    return h;
}

// Random 2-regular 3-uniform hypergraph with 3t vertices and 2t edges, via the
// configuration model: a pool with every vertex twice is shuffled and chunked
// into triples; any triple with a repeated vertex or any duplicate edge
// rejects the whole sample. t=1 always rejects (both edges would be {0,1,2}).
inline Hypergraph gen_2regular_3uniform(uint32_t t, uint64_t seed) {
    if (t == 0) throw std::invalid_argument("gen_2regular_3uniform: need t >= 1");
    constexpr int kMaxAttempts = 1000;
    Rng rng(seed);
    std::vector<VertexId> pool(6 * (size_t)t);
    Hypergraph h;
    h.n = 3 * t;
    h.k = 3;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (size_t i = 0; i < pool.size(); ++i) pool[i] = (VertexId)(i / 2);
        for (size_t i = pool.size() - 1; i > 0; --i)
            std::swap(pool[i], pool[rng.next_below(i + 1)]);

        h.edges.clear();
        std::unordered_set<std::vector<VertexId>, detail::EdgeHash> seen;
        bool ok = true;
        for (size_t i = 0; ok && i < pool.size(); i += 3) {
            std::vector<VertexId> e{pool[i], pool[i + 1], pool[i + 2]};
            std::sort(e.begin(), e.end());
            if (e[0] == e[1] || e[1] == e[2] || !seen.insert(e).second) ok = false;
            else h.edges.push_back(std::move(e));
        }
        if (ok) return h;
    }
    throw std::runtime_error("gen_2regular_3uniform: retry budget exhausted");
}

// ---- edge-list text format ----
// Header line `k n m`, one edge per line as k space-separated vertex ids,
// comment lines start with '#'. Only uniform hypergraphs round-trip.

inline std::string format_edge_list(const Hypergraph& h) {
    if (!h.uniform())
        throw std::invalid_argument("format_edge_list: hypergraph is not k-uniform");
    std::string out;
    out += std::to_string(h.k) + " " + std::to_string(h.n) + " " + std::to_string(h.m()) + "\n";
    for (const auto& e : h.edges) {
        for (size_t i = 0; i < e.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(e[i]);
        }
        out += '\n';
    }
    return out;
}

inline Hypergraph parse_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    Hypergraph h;
    bool have_header = false;
    uint64_t expect_m = 0;
    while (std::getline(in, line)) {
        size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        std::istringstream fields(line);
        if (!have_header) {
            if (!(fields >> h.k >> h.n >> expect_m))
                throw std::invalid_argument("edge list: bad header, want `k n m`");
            have_header = true;
            continue;
        }
        std::vector<VertexId> e;
        e.reserve(h.k);
        uint64_t v;
        while (fields >> v) {
            if (v >= h.n) throw std::invalid_argument("edge list: vertex id out of range");
            e.push_back((VertexId)v);
        }
        if (e.size() != h.k) throw std::invalid_argument("edge list: edge order != k");
        std::sort(e.begin(), e.end());
        for (size_t i = 1; i < e.size(); ++i)
            if (e[i] == e[i - 1])
                throw std::invalid_argument("edge list: repeated vertex within edge");
        h.edges.push_back(std::move(e));
    }
    if (!have_header) throw std::invalid_argument("edge list: missing header");
    if (h.m() != expect_m) throw std::invalid_argument("edge list: edge count mismatch");
    return h;
}

} // namespace cusketch
