#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cusketch {

inline constexpr const char* kVersion = "0.1.0";

// First line of every CSV emitted by the experiment harness.
inline std::string file_banner(uint64_t root_seed) {
    return std::string("# cu-sketch-lab v") + kVersion + " seed=" + std::to_string(root_seed);
}

using VertexId = uint32_t;
using EdgeId = uint32_t;

// Vertex counters are extended naturals: finite values saturate just below
// kInfinity, and kInfinity itself is the marked-vertex sentinel.
using Counter = uint64_t;
inline constexpr Counter kInfinity = UINT64_MAX;

enum class Strategy { CM, CU };

inline const char* strategy_name(Strategy s) {
    return s == Strategy::CM ? "cm" : "cu";
}

// Thrown when a run-time consistency check fails (CLI exit code 2).
class invariant_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cusketch
