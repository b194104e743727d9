#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cusketch/process.hpp"
#include "cusketch/sketch.hpp"

namespace cusketch {
namespace {

std::vector<std::string> make_keys(size_t count, const std::string& prefix = "key-") {
    std::vector<std::string> keys;
    keys.reserve(count);
    for (size_t i = 0; i < count; ++i) keys.push_back(prefix + std::to_string(i));
    return keys;
}

TEST(Sketch, SingleCellCollidesEverything) {
    CountingSketch s(1, 1, 42, Strategy::CM);
    auto keys = make_keys(5);
    for (const auto& k : keys) s.update(k);
    EXPECT_EQ(s.query("anything"), 5u);
    CountingSketch cu(1, 1, 42, Strategy::CU);
    for (const auto& k : keys) cu.update(k);
    EXPECT_EQ(cu.query("else"), 5u);
}

TEST(Sketch, NoCollisionCountsAreExact) {
    for (Strategy strat : {Strategy::CM, Strategy::CU}) {
        CountingSketch s(1 << 20, 3, 7, strat);
        for (int i = 0; i < 3; ++i) s.update("p");
        EXPECT_EQ(s.query("p"), 3u);
    }
}

TEST(Sketch, DeterministicPositions) {
    CountingSketch a(1000, 4, 99, Strategy::CM);
    CountingSketch b(1000, 4, 99, Strategy::CU);
    for (const auto& k : make_keys(50)) EXPECT_EQ(a.positions(k), b.positions(k));
}

TEST(Sketch, PositionsAreSortedDistinctAndBounded) {
    CountingSketch s(17, 5, 3, Strategy::CU);
    for (const auto& k : make_keys(200)) {
        auto pos = s.positions(k);
        EXPECT_GE(pos.size(), 1u);
        EXPECT_LE(pos.size(), 5u);
        for (size_t i = 0; i < pos.size(); ++i) {
            EXPECT_LT(pos[i], 17u);
            if (i > 0) EXPECT_LT(pos[i - 1], pos[i]);
        }
    }
}

TEST(Sketch, NeverUndercountsAndCuBoundedByCm) {
    CountingSketch cm(64, 3, 11, Strategy::CM);
    CountingSketch cu(64, 3, 11, Strategy::CU);
    auto keys = make_keys(150);
    std::vector<uint64_t> truth(keys.size(), 0);
    Rng rng(5);
    for (int step = 0; step < 4000; ++step) {
        size_t i = rng.next_below(keys.size());
        cm.update(keys[i]);
        cu.update(keys[i]);
        ++truth[i];
    }
    for (size_t i = 0; i < keys.size(); ++i) {
        EXPECT_GE(cu.query(keys[i]), truth[i]);
        EXPECT_LE(cu.query(keys[i]), cm.query(keys[i]));
    }
    // per-cell dominance
    for (size_t c = 0; c < 64; ++c)
        EXPECT_LE(cu.counters()[c], cm.counters()[c]);
}

TEST(Sketch, HashHypergraphShape) {
    CountingSketch s(1000, 3, 21, Strategy::CU);
    auto one = make_keys(1);
    Hypergraph h1 = s.hash_hypergraph(one);
    EXPECT_EQ(h1.m(), 1u);
    EXPECT_EQ(h1.n, 1000u);

    auto keys = make_keys(818);
    Hypergraph h = s.hash_hypergraph(keys);
    EXPECT_EQ(h.m(), 818u);
    EXPECT_NEAR(h.lambda(), 0.818, 1e-12);
    h.validate();
}

TEST(Sketch, MatchesCounterProcessExactly) {
    // the sketch over keys and the counter process over the induced hash
    // hypergraph are the same algorithm in two encodings
    for (Strategy strat : {Strategy::CM, Strategy::CU}) {
        CountingSketch s(50, 3, 13, strat);
        auto keys = make_keys(120);
        Hypergraph h = s.hash_hypergraph(keys);
        CounterState st(h);
        Rng rng(31);
        for (int step = 0; step < 3000; ++step) {
            auto i = (EdgeId)rng.next_below(keys.size());
            s.update(keys[i]);
            st.step(strat, i);
        }
        for (size_t i = 0; i < keys.size(); ++i)
            ASSERT_EQ(s.query(keys[i]), st.edge_counter((EdgeId)i));
        for (VertexId v = 0; v < 50; ++v)
            ASSERT_EQ(s.counters()[v], st.vertex_counter(v));
    }
}

TEST(Sketch, Theorem21Dimensions) {
    SketchDimensions d = theorem21_dimensions(0.1, 0.05);
    EXPECT_EQ(d.depth, 3u);
    EXPECT_EQ(d.width, 82u);
    EXPECT_THROW(theorem21_dimensions(0.0, 0.5), std::invalid_argument);
    EXPECT_THROW(theorem21_dimensions(0.5, 1.0), std::invalid_argument);
}

TEST(Sketch, Theorem21EmptyStreamNeverFails) {
    std::vector<std::string> empty;
    auto queries = make_keys(3);
    EXPECT_EQ(theorem21_trial(0.1, 0.05, empty, queries, 10, 3), 0.0);
}

TEST(Sketch, Theorem21FailureRateWithinBound) {
    // quick version of the acceptance check: uniform stream over 200 keys
    auto keys = make_keys(200);
    std::vector<std::string> stream;
    Rng rng(17);
    for (int i = 0; i < 3000; ++i) stream.push_back(keys[rng.next_below(keys.size())]);
    std::vector<std::string> queries(keys.begin(), keys.begin() + 5);
    double rate = theorem21_trial(0.1, 0.05, stream, queries, 50, 23);
    EXPECT_LE(rate, 0.08);
}

TEST(Sketch, SerializeRoundTripsByteExactly) {
    CountingSketch s(37, 3, 0xfeedface, Strategy::CU);
    for (const auto& k : make_keys(500)) s.update(k);
    std::string bytes = s.serialize();
    CountingSketch back = CountingSketch::deserialize(bytes);
    EXPECT_EQ(back.serialize(), bytes);
    EXPECT_EQ(back.width(), s.width());
    EXPECT_EQ(back.depth(), s.depth());
    EXPECT_EQ(back.hash_seed(), s.hash_seed());
    EXPECT_EQ(back.strategy(), s.strategy());
    EXPECT_EQ(back.counters(), s.counters());
    EXPECT_EQ(back.query("key-3"), s.query("key-3"));
}

TEST(Sketch, SaveLoadFile) {
    auto path = (std::filesystem::temp_directory_path() / "cusketch_state_test.bin").string();
    CountingSketch s(8, 2, 5, Strategy::CM);
    s.update("x");
    s.save(path);
    CountingSketch back = CountingSketch::load(path);
    EXPECT_EQ(back.serialize(), s.serialize());
    std::filesystem::remove(path);
}

TEST(Sketch, DeserializeRejectsCorruptInput) {
    EXPECT_THROW(CountingSketch::deserialize("no newline"), std::invalid_argument);
    EXPECT_THROW(CountingSketch::deserialize("{\"n\":2,\"k\":1,\"hash_seed\":0,\"strategy\":\"cm\"}\nshort"),
                 std::invalid_argument);
    EXPECT_THROW(CountingSketch::deserialize("{\"n\":0,\"k\":1,\"hash_seed\":0,\"strategy\":\"xx\"}\n"),
                 std::invalid_argument);
}

TEST(Sketch, RejectsZeroDimensions) {
    EXPECT_THROW(CountingSketch(0, 1, 1, Strategy::CM), std::invalid_argument);
    EXPECT_THROW(CountingSketch(1, 0, 1, Strategy::CM), std::invalid_argument);
}

} // namespace
} // namespace cusketch
