#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cusketch/hypergraph.hpp"

namespace cusketch {

struct Component {
    std::vector<VertexId> vertices;  // sorted
    std::vector<EdgeId> edges;       // sorted
    int64_t excess = 0;              // |E'| - |V'|; a tree component has -1
};

struct ComponentReport {
    std::vector<Component> components;  // ordered by smallest vertex id
    size_t giant = 0;                   // index of the largest component
};

// Connected components via union-find over edge incidences. The giant is the
// component with the most vertices; ties go to the lowest component id.
inline ComponentReport components(const Hypergraph& h) {
    std::vector<VertexId> parent(h.n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](VertexId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& e : h.edges)
        for (size_t i = 1; i < e.size(); ++i) {
            VertexId a = find(e[0]), b = find(e[i]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }

    ComponentReport rep;
    std::vector<int64_t> comp_of_root(h.n, -1);
    for (VertexId v = 0; v < h.n; ++v) {
        VertexId r = find(v);
        if (comp_of_root[r] < 0) {
            comp_of_root[r] = (int64_t)rep.components.size();
            rep.components.emplace_back();
        }
        rep.components[comp_of_root[r]].vertices.push_back(v);
    }
    for (EdgeId e = 0; e < h.m(); ++e)
        rep.components[comp_of_root[find(h.edges[e][0])]].edges.push_back(e);

    for (size_t i = 0; i < rep.components.size(); ++i) {
        auto& c = rep.components[i];
        c.excess = (int64_t)c.edges.size() - (int64_t)c.vertices.size();
        if (c.vertices.size() > rep.components[rep.giant].vertices.size()) rep.giant = i;
    }
    return rep;
}

} // namespace cusketch
