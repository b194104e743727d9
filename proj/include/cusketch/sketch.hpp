#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cusketch/common.hpp"
#include "cusketch/hypergraph.hpp"
#include "cusketch/rng.hpp"

namespace cusketch {

// Keyed byte-string hash: FNV-style word mixing with a splitmix finalizer.
inline uint64_t hash_bytes(std::string_view key, uint64_t seed) {
    uint64_t h = mix64(seed ^ (0x9e3779b97f4a7c15ULL + key.size()));
    size_t i = 0;
    while (i + 8 <= key.size()) {
        uint64_t w;
        std::memcpy(&w, key.data() + i, 8);
        h = mix64(h ^ w);
        i += 8;
    }
    uint64_t tail = 0;
    for (size_t j = 0; i + j < key.size(); ++j)
        tail |= (uint64_t)(unsigned char)key[i + j] << (8 * j);
    return mix64(h ^ tail);
}

// Counting sketch in the shared-array (Spectral Bloom) layout: all k hash
// functions index one array of `width` counters. The k positions of a key are
// treated as a set, so a within-key collision increments one counter once;
// the induced hash hypergraph edge then has order < k.
class CountingSketch {
public:
    CountingSketch(uint32_t width, uint32_t depth, uint64_t hash_seed, Strategy strategy)
        : width_(width), depth_(depth), hash_seed_(hash_seed), strategy_(strategy),
          counters_(width, 0) {
        if (width == 0) throw std::invalid_argument("CountingSketch: width must be >= 1");
        if (depth == 0) throw std::invalid_argument("CountingSketch: depth must be >= 1");
        tweaks_.resize(depth);
        for (uint32_t i = 0; i < depth; ++i) tweaks_[i] = derive_seed(hash_seed, "hash", i);
    }

    uint32_t width() const { return width_; }
    uint32_t depth() const { return depth_; }
    uint64_t hash_seed() const { return hash_seed_; }
    Strategy strategy() const { return strategy_; }
    const std::vector<uint64_t>& counters() const { return counters_; }

    // Distinct hash positions of a key, sorted. Size <= depth.
    std::vector<VertexId> positions(std::string_view key) const {
        std::vector<VertexId> pos(depth_);
        uint64_t base = hash_bytes(key, hash_seed_);
        for (uint32_t i = 0; i < depth_; ++i) {
            uint64_t h = mix64(base ^ tweaks_[i]);
            // multiply-shift range reduction into [0, width)
            pos[i] = (VertexId)(((unsigned __int128)h * width_) >> 64);
        }
        std::sort(pos.begin(), pos.end());
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
        return pos;
    }

    void update(std::string_view key) {
        auto pos = positions(key);
        if (strategy_ == Strategy::CM) {
            for (VertexId p : pos) ++counters_[p];
        } else {
            uint64_t lo = counters_[pos[0]];
            for (VertexId p : pos) lo = std::min(lo, counters_[p]);
            for (VertexId p : pos)
                if (counters_[p] == lo) ++counters_[p];
        }
    }

    uint64_t query(std::string_view key) const {
        uint64_t lo = UINT64_MAX;
        for (VertexId p : positions(key)) lo = std::min(lo, counters_[p]);
        return lo;
    }

    // The hash hypergraph induced by a set of distinct keys: counter cells as
    // vertices, the position set of key i as edge i.
    Hypergraph hash_hypergraph(std::span<const std::string> distinct_keys) const {
        Hypergraph h;
        h.n = width_;
        h.k = depth_;
        h.edges.reserve(distinct_keys.size());
        for (const auto& key : distinct_keys) h.edges.push_back(positions(key));
        return h;
    }

    // ---- state export: JSON header line + little-endian counter array ----

    std::string serialize() const {
        nlohmann::json header{{"n", width_},
                              {"k", depth_},
                              {"hash_seed", hash_seed_},
                              {"strategy", strategy_name(strategy_)}};
        std::string out = header.dump();
        out += '\n';
        for (uint64_t c : counters_)
            for (int b = 0; b < 8; ++b) out += (char)((c >> (8 * b)) & 0xff);
        return out;
    }

    static CountingSketch deserialize(std::string_view bytes) {
        size_t nl = bytes.find('\n');
        if (nl == std::string_view::npos)
            throw std::invalid_argument("sketch import: missing header line");
        nlohmann::json header = nlohmann::json::parse(bytes.substr(0, nl));
        uint32_t n = header.at("n").get<uint32_t>();
        uint32_t k = header.at("k").get<uint32_t>();
        auto seed = header.at("hash_seed").get<uint64_t>();
        std::string strat = header.at("strategy").get<std::string>();
        if (strat != "cm" && strat != "cu")
            throw std::invalid_argument("sketch import: unknown strategy " + strat);
        std::string_view body = bytes.substr(nl + 1);
        if (body.size() != (size_t)n * 8)
            throw std::invalid_argument("sketch import: counter array size mismatch");
        CountingSketch s(n, k, seed, strat == "cm" ? Strategy::CM : Strategy::CU);
        for (uint32_t i = 0; i < n; ++i) {
            uint64_t c = 0;
            for (int b = 0; b < 8; ++b)
                c |= (uint64_t)(unsigned char)body[i * 8 + b] << (8 * b);
            s.counters_[i] = c;
        }
        return s;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("sketch save: cannot open " + path);
        std::string bytes = serialize();
        out.write(bytes.data(), (std::streamsize)bytes.size());
        if (!out) throw std::runtime_error("sketch save: write failed for " + path);
    }

    static CountingSketch load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("sketch load: cannot open " + path);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        return deserialize(bytes);
    }

private:
    uint32_t width_;
    uint32_t depth_;
    uint64_t hash_seed_;
    Strategy strategy_;
    std::vector<uint64_t> counters_;
    std::vector<uint64_t> tweaks_;
};

struct SketchDimensions {
    uint32_t width = 0;
    uint32_t depth = 0;
};

// depth = ceil(ln(1/delta)), width = ceil(depth * e / eps): the sizing that
// bounds the overestimate by eps * stream-length with probability 1 - delta.
inline SketchDimensions theorem21_dimensions(double eps, double delta) {
    if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1))
        throw std::invalid_argument("theorem21_dimensions: eps, delta must be in (0,1)");
    auto depth = (uint32_t)std::ceil(std::log(1.0 / delta));
    depth = std::max(depth, 1u);
    auto width = (uint32_t)std::ceil((double)depth * std::exp(1.0) / eps);
    return {width, depth};
}

// Fraction of (trial, query key) pairs whose CM overestimate exceeds
// eps * stream length. Hash functions are re-drawn per trial from `seed`.
inline double theorem21_trial(double eps, double delta,
                              std::span<const std::string> stream,
                              std::span<const std::string> query_keys,
                              uint32_t trials, uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("theorem21_trial: need trials >= 1");
    SketchDimensions dim = theorem21_dimensions(eps, delta);
    const double bound = eps * (double)stream.size();
    std::vector<uint64_t> truth(query_keys.size(), 0);
    for (size_t i = 0; i < query_keys.size(); ++i)
        for (const auto& key : stream) truth[i] += key == query_keys[i];
    uint64_t failures = 0, queries = 0;
    for (uint32_t trial = 0; trial < trials; ++trial) {
        CountingSketch s(dim.width, dim.depth, derive_seed(seed, "trial", trial),
                         Strategy::CM);
        for (const auto& key : stream) s.update(key);
        for (size_t i = 0; i < query_keys.size(); ++i) {
            double overestimate = (double)s.query(query_keys[i]) - (double)truth[i];
            failures += overestimate > bound;
            ++queries;
        }
    }
    return queries == 0 ? 0.0 : (double)failures / (double)queries;
}

} // namespace cusketch
