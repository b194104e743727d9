#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cusketch/common.hpp"
#include "cusketch/rng.hpp"

namespace cusketch {

enum class Model { Balanced, Uniform, Zipf };

inline const char* model_name(Model m) {
    switch (m) {
        case Model::Balanced: return "balanced";
        case Model::Uniform: return "uniform";
        case Model::Zipf: return "zipf";
    }
    return "?";
}

// Input model for a run over m keys: length is always N*m. Balanced emits a
// random permutation of the multiset with N copies of every key; Uniform and
// Zipf draw i.i.d. per step.
struct StreamSpec {
    Model model = Model::Uniform;
    uint64_t N = 1;
    double beta = 0.0;  // Zipf skewness; 0 reduces to the uniform model
    uint64_t seed = 0;
};

// Rank probabilities p_i proportional to 1/i^beta, i in [1..m]; key id = i-1.
inline std::vector<double> zipf_probs(uint32_t m, double beta) {
    if (m == 0) throw std::invalid_argument("zipf_probs: need m >= 1");
    if (beta < 0) throw std::invalid_argument("zipf_probs: need beta >= 0");
    std::vector<double> p(m);
    long double sum = 0.0L;
    for (uint32_t i = 0; i < m; ++i) {
        p[i] = std::pow((double)(i + 1), -beta);
        sum += p[i];
    }
    for (auto& x : p) x = (double)(x / sum);
    return p;
}

// Incremental key source for one run. Materializing wrappers below reuse it,
// so a collected sequence is byte-identical to the streamed one.
class KeyStream {
public:
    KeyStream(const StreamSpec& spec, uint32_t m) : rng_(spec.seed), m_(m) {
        if (m == 0) throw std::invalid_argument("KeyStream: need m >= 1");
        if (spec.N == 0) throw std::invalid_argument("KeyStream: need N >= 1");
        length_ = spec.N * (uint64_t)m;
        // beta == 0 takes the integer-uniform path, bit for bit
        model_ = (spec.model == Model::Zipf && spec.beta == 0.0) ? Model::Uniform : spec.model;
        if (model_ == Model::Balanced) {
            balanced_.reserve(length_);
            for (uint32_t key = 0; key < m; ++key)
                balanced_.insert(balanced_.end(), spec.N, key);
            // Fisher-Yates
            for (size_t i = balanced_.size() - 1; i > 0; --i)
                std::swap(balanced_[i], balanced_[rng_.next_below(i + 1)]);
        } else if (model_ == Model::Zipf) {
            auto probs = zipf_probs(m, spec.beta);
            cumulative_.resize(m);
            long double acc = 0.0L;
            for (uint32_t i = 0; i < m; ++i) {
                acc += probs[i];
                cumulative_[i] = (double)acc;
            }
            cumulative_.back() = 1.0;
        }
    }

    uint64_t length() const { return length_; }

    uint32_t next() {
        switch (model_) {
            case Model::Balanced: return balanced_[pos_++];
            case Model::Uniform: return rng_.next_below32(m_);
            case Model::Zipf: {
                double u = rng_.next_unit();
                auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
                if (it == cumulative_.end()) --it;
                return (uint32_t)(it - cumulative_.begin());
            }
        }
        return 0;
    }

private:
    Rng rng_;
    uint32_t m_;
    Model model_ = Model::Uniform;
    uint64_t length_ = 0;
    std::vector<uint32_t> balanced_;
    size_t pos_ = 0;
    std::vector<double> cumulative_;
};

inline std::vector<uint32_t> collect(KeyStream&& s) {
    std::vector<uint32_t> out;
    out.reserve(s.length());
    for (uint64_t i = 0; i < s.length(); ++i) out.push_back(s.next());
    return out;
}

inline std::vector<uint32_t> n_balanced(uint32_t m, uint64_t N, uint64_t seed) {
    return collect(KeyStream({Model::Balanced, N, 0.0, seed}, m));
}

inline std::vector<uint32_t> n_uniform(uint32_t m, uint64_t N, uint64_t seed) {
    return collect(KeyStream({Model::Uniform, N, 0.0, seed}, m));
}

inline std::vector<uint32_t> zipf_stream(uint32_t m, uint64_t N, double beta, uint64_t seed) {
    return collect(KeyStream({Model::Zipf, N, beta, seed}, m));
}

// ---- newline-delimited key files, for cross-implementation replay ----

inline void save_stream(const std::string& path, const std::vector<uint32_t>& keys) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_stream: cannot open " + path);
    for (uint32_t k : keys) out << k << '\n';
    if (!out) throw std::runtime_error("save_stream: write failed for " + path);
}

inline std::vector<uint32_t> load_stream(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_stream: cannot open " + path);
    std::vector<uint32_t> keys;
    uint64_t v;
    while (in >> v) {
        if (v > UINT32_MAX) throw std::invalid_argument("load_stream: key out of range");
        keys.push_back((uint32_t)v);
    }
    return keys;
}

} // namespace cusketch
