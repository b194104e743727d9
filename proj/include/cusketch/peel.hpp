#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cusketch/hypergraph.hpp"

namespace cusketch {

// Outcome of the synchronous peeling process. level[v] is the round in which
// v was removed, or kCore if it survives to the fixpoint. Marked vertices are
// never peeled; `peelable` asks whether every unmarked vertex was.
struct PeelResult {
    static constexpr int64_t kCore = -1;

    std::vector<int64_t> level;         // per vertex
    std::vector<VertexId> core_vertices;  // unpeeled vertices, sorted
    std::vector<EdgeId> core_edges;       // surviving edges, sorted
    bool peelable = false;
    uint32_t rounds = 0;

    bool in_core(VertexId v) const { return level[v] == kCore; }
};

// Synchronous rounds: every current unmarked leaf or isolated vertex is
// removed together with its incident edges, and gets the round index as its
// level. Runs until no removable vertex remains.
inline PeelResult peel(const Hypergraph& h, const std::vector<VertexId>& marked = {}) {
    std::vector<char> is_marked(h.n, 0);
    for (VertexId v : marked) {
        if (v >= h.n) throw std::invalid_argument("peel: marked vertex out of range");
        is_marked[v] = 1;
    }

    // vertex -> incident edge ids
    std::vector<uint32_t> deg = h.degrees();
    std::vector<size_t> off(h.n + 1, 0);
    for (VertexId v = 0; v < h.n; ++v) off[v + 1] = off[v] + deg[v];
    std::vector<EdgeId> incident(off[h.n]);
    {
        std::vector<size_t> cursor(off.begin(), off.end() - 1);
        for (EdgeId e = 0; e < h.m(); ++e)
            for (VertexId v : h.edges[e]) incident[cursor[v]++] = e;
    }

    PeelResult res;
    res.level.assign(h.n, PeelResult::kCore);
    std::vector<char> edge_alive(h.m(), 1);
    std::vector<char> peeled(h.n, 0);

    std::vector<VertexId> candidates(h.n);
    for (VertexId v = 0; v < h.n; ++v) candidates[v] = v;

    uint32_t round = 0;
    std::vector<VertexId> layer, touched;
    while (!candidates.empty()) {
        layer.clear();
        for (VertexId v : candidates)
            if (!peeled[v] && !is_marked[v] && deg[v] <= 1) layer.push_back(v);
        if (layer.empty()) break;
        std::sort(layer.begin(), layer.end());
        layer.erase(std::unique(layer.begin(), layer.end()), layer.end());

        touched.clear();
        for (VertexId v : layer) {
            res.level[v] = round;
            peeled[v] = 1;
            for (size_t i = off[v]; i < off[v + 1]; ++i) {
                EdgeId e = incident[i];
                if (!edge_alive[e]) continue;
                edge_alive[e] = 0;
                for (VertexId u : h.edges[e]) {
                    --deg[u];
                    touched.push_back(u);
                }
            }
        }
        candidates.assign(touched.begin(), touched.end());
        ++round;
    }
    res.rounds = round;

    res.peelable = true;
    for (VertexId v = 0; v < h.n; ++v) {
        if (!peeled[v]) {
            res.core_vertices.push_back(v);
            if (!is_marked[v]) res.peelable = false;
        }
    }
    for (EdgeId e = 0; e < h.m(); ++e)
        if (edge_alive[e]) res.core_edges.push_back(e);
    return res;
}

// A sub-hypergraph plus the marks that make it a testing device: vertices
// outside the closure keep +infinity counters and are exempt from peeling.
struct DescendantClosure {
    Hypergraph subgraph;             // same vertex-id space as the parent
    std::vector<VertexId> closure;   // v plus its descendants, sorted
    std::vector<VertexId> marked;    // subgraph vertices outside the closure
    std::vector<EdgeId> edge_ids;    // parent edge ids of subgraph.edges, sorted
};

// Descendants of v: vertices reachable from v through chains of strictly
// decreasing peeling level (each consecutive pair sharing an edge). The
// returned marked sub-hypergraph is always peelable.
inline DescendantClosure descendant_closure(const Hypergraph& h, VertexId v) {
    if (v >= h.n) throw std::invalid_argument("descendant_closure: vertex out of range");
    PeelResult p = peel(h);
    if (p.level[v] == PeelResult::kCore)
        throw std::invalid_argument("descendant_closure: v in core");

    std::vector<char> in_closure(h.n, 0);
    in_closure[v] = 1;
    std::vector<VertexId> frontier{v};
    while (!frontier.empty()) {
        std::vector<VertexId> next;
        for (VertexId x : frontier) {
            for (EdgeId e = 0; e < h.m(); ++e) {
                const auto& verts = h.edges[e];
                if (std::find(verts.begin(), verts.end(), x) == verts.end()) continue;
                for (VertexId u : verts) {
                    if (in_closure[u]) continue;
                    if (p.level[u] != PeelResult::kCore && p.level[u] < p.level[x]) {
                        in_closure[u] = 1;
                        next.push_back(u);
                    }
                }
            }
        }
        frontier = std::move(next);
    }

    DescendantClosure out;
    out.subgraph.n = h.n;
    out.subgraph.k = h.k;
    std::vector<char> vertex_used(h.n, 0);
    for (EdgeId e = 0; e < h.m(); ++e) {
        bool touches = false;
        for (VertexId u : h.edges[e])
            if (in_closure[u]) { touches = true; break; }
        if (!touches) continue;
        out.edge_ids.push_back(e);
        out.subgraph.edges.push_back(h.edges[e]);
        for (VertexId u : h.edges[e]) vertex_used[u] = 1;
    }
    for (VertexId u = 0; u < h.n; ++u) {
        if (in_closure[u]) out.closure.push_back(u);
        else if (vertex_used[u]) out.marked.push_back(u);
    }
    return out;
}

} // namespace cusketch
