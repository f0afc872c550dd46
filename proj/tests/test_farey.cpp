#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "ptb/errors.hpp"
#include "ptb/farey.hpp"

using namespace ptb;

namespace {

ErrorCode parse_error(const std::string& s)
{
    try {
        parse_word(s);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for " << s;
    return ErrorCode::BadReport;
}

oracle::IVec iv(const Vec2& v) { return {v.q, v.p}; }

} // namespace

TEST(Word, ParseAndCanonical)
{
    MonodromyWord w = parse_word("LR");
    EXPECT_EQ(w.letters, "LR");
    EXPECT_EQ(w.period(), 2);
    EXPECT_EQ(parse_word("rLl").letters, "LLR");
    EXPECT_EQ(parse_word("RLRL").letters, "LRLR");
    EXPECT_EQ(parse_error("LLLL"), ErrorCode::NotHyperbolic);
    EXPECT_EQ(parse_error("L"), ErrorCode::NotHyperbolic);
    EXPECT_EQ(parse_error(""), ErrorCode::EmptyWord);
    EXPECT_EQ(parse_error("LXR"), ErrorCode::InvalidCharacter);
}

TEST(Word, CanonicalStartsWithLEndsWithR)
{
    for (const auto& w : oracle::all_words(9)) {
        std::string c = parse_word(w).letters;
        EXPECT_EQ(c.front(), 'L') << w;
        EXPECT_EQ(c.back(), 'R') << w;
        // a rotation of the input
        EXPECT_NE((w + w).find(c), std::string::npos) << w;
    }
}

TEST(Monodromy, TraceMatchesIntegerProduct)
{
    EXPECT_EQ(monodromy_matrix(parse_word("LR")).trace(), 3);
    EXPECT_EQ(monodromy_matrix(std::string_view("L")).trace(), 2);
    EXPECT_EQ(monodromy_matrix(parse_word("LLR")).trace(), 4);
    for (const auto& w : oracle::all_words(10)) {
        Mat2 m = monodromy_matrix(std::string_view(w));
        oracle::IMat o = oracle::word_matrix(w);
        EXPECT_EQ(m.a, o[0]);
        EXPECT_EQ(m.b, o[1]);
        EXPECT_EQ(m.c, o[2]);
        EXPECT_EQ(m.d, o[3]);
        EXPECT_EQ(m.determinant(), 1);
        EXPECT_GT(m.trace(), 2) << w;
    }
}

TEST(Strip, FanLengthsAndEdges)
{
    FareyStrip lr = build_farey_strip(parse_word("LR"));
    EXPECT_EQ(lr.triangles.size(), 2u);
    EXPECT_EQ(lr.fan_lengths, (std::vector<int>{1, 1}));
    EXPECT_EQ(build_farey_strip(parse_word("LLR")).fan_lengths, (std::vector<int>{2, 1}));
    for (const auto& w : oracle::all_words(9)) {
        FareyStrip s = build_farey_strip(parse_word(w));
        int sum = 0;
        for (int l : s.fan_lengths)
            sum += l;
        EXPECT_EQ(sum, s.period());
        for (long long j = -s.period(); j < 2 * s.period(); ++j) {
            auto t = s.triangle(j);
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b)
                    EXPECT_EQ(std::llabs(det(t[static_cast<size_t>(a)], t[static_cast<size_t>(b)])), 1) << w << " " << j;
            // phi-invariance
            auto u = s.triangle(j + s.period());
            for (int a = 0; a < 3; ++a)
                EXPECT_EQ(Slope::of(s.phi * t[static_cast<size_t>(a)]), Slope::of(u[static_cast<size_t>(a)]));
        }
    }
}

// every minimal path found by the DFS in the Farey strip is enumerated, and nothing else
TEST(Paths, AgreeWithBruteForce)
{
    for (const auto& w : oracle::all_words(7)) {
        std::string c = parse_word(w).letters;
        if (c != w)
            continue; // one representative per rotation class
        FareyStrip s = build_farey_strip(parse_word(c));
        std::set<std::set<oracle::IVec>> lib;
        auto paths = enumerate_minimal_paths(s);
        for (const auto& p : paths) {
            std::vector<oracle::IVec> vs;
            for (const auto& v : p.vertices)
                vs.push_back(iv(v));
            lib.insert(oracle::path_key(c, vs));
        }
        EXPECT_EQ(lib.size(), paths.size()) << c;
        EXPECT_EQ(lib, oracle::brute_paths(c)) << c;
    }
}

TEST(Paths, MinimalAndInvariant)
{
    for (const auto& w : oracle::all_words(8)) {
        FareyStrip s = build_farey_strip(parse_word(w));
        for (const auto& p : enumerate_minimal_paths(s)) {
            EXPECT_TRUE(is_minimal(p));
            EXPECT_TRUE(valid_labels(s, p.labels));
            int n = p.edge_count();
            for (int i = 0; i < n; ++i)
                EXPECT_EQ(std::llabs(det(p.vertex(i), p.vertex(i + 1))), 1);
            EXPECT_EQ(Slope::of(p.vertex(n)), Slope::of(s.phi * p.vertex(0)));
            int span = 0;
            for (const auto& sec : p.sections)
                span += sec.span;
            EXPECT_EQ(span, s.period());
        }
    }
}

TEST(Sections, CrossingEveryHingeAlternates)
{
    // LR itself has no such path (a visited run-1 fan cannot have both neighbours visited)
    for (const char* w : {"LLRR", "LLRRLLRR", "LLLRRRLLRR"}) {
        FareyStrip s = build_farey_strip(parse_word(w));
        std::vector<int> labels(static_cast<size_t>(s.fan_count()), 1);
        ASSERT_TRUE(valid_labels(s, labels)) << w;
        auto secs = decompose_sections(s, labels);
        ASSERT_EQ(secs.size(), labels.size());
        for (size_t i = 0; i < secs.size(); ++i)
            EXPECT_EQ(secs[i].type, i % 2 == 0 ? SectionType::RL : SectionType::LR) << w;
    }
    FareyStrip lr = build_farey_strip(parse_word("LR"));
    EXPECT_FALSE(valid_labels(lr, {1, 1}));
}

TEST(Sections, SideRunningIsOneLLSection)
{
    // word LLLR: labels visit the R pivot and run along the far side of the L fan
    FareyStrip s = build_farey_strip(parse_word("LLLR"));
    std::vector<int> labels{0, 1};
    ASSERT_TRUE(valid_labels(s, labels));
    auto secs = decompose_sections(s, labels);
    // a run of L letters left outside the path is named RR here
    ASSERT_EQ(secs.size(), 1u);
    EXPECT_EQ(secs[0].type, SectionType::RR);
    EXPECT_EQ(secs[0].fan_length, 3);
    EXPECT_EQ(secs[0].span, 4);
}

TEST(Sections, CrossingsSeparatedByLongFan)
{
    for (const auto& w : oracle::all_words(8)) {
        FareyStrip s = build_farey_strip(parse_word(w));
        for (const auto& p : enumerate_minimal_paths(s)) {
            int m = static_cast<int>(p.sections.size());
            for (int i = 0; i < m; ++i) {
                const auto& a = p.sections[static_cast<size_t>(i)];
                const auto& b = p.sections[static_cast<size_t>((i + 1) % m)];
                bool ca = a.type == SectionType::RL || a.type == SectionType::LR;
                bool cb = b.type == SectionType::RL || b.type == SectionType::LR;
                if (ca && cb && a.type != b.type)
                    EXPECT_GE(s.fan_lengths[static_cast<size_t>(b.fan)], 2) << w;
            }
        }
    }
}

TEST(SemiFiber, TightnessMatchesFareyOracle)
{
    int tight_paths = 0;
    for (const auto& w : oracle::all_words(8)) {
        FareyStrip s = build_farey_strip(parse_word(w));
        for (const auto& p : enumerate_minimal_paths(s)) {
            SemiFiberInfo info = classify_semi_fiber(s, p);
            int n = p.edge_count();
            bool all = true;
            for (int i = 0; i < n; ++i) {
                bool t = oracle::farey_tight(iv(p.vertex(i - 1)), iv(p.vertex(i)), iv(p.vertex(i + 1)));
                EXPECT_EQ(t, static_cast<bool>(info.vertex_tight[static_cast<size_t>(i)])) << w << " vertex " << i;
                all = all && t;
            }
            EXPECT_EQ(all, info.semi_fiber) << w;
            tight_paths += all;
        }
    }
    EXPECT_GT(tight_paths, 0);
}

TEST(SemiFiber, OddTightPathExists)
{
    // a fully tight path with an odd number of edges, built from sharpest turns
    bool odd = false;
    for (const auto& w : oracle::all_words(6)) {
        FareyStrip s = build_farey_strip(parse_word(w));
        for (const auto& p : enumerate_minimal_paths(s))
            if (classify_semi_fiber(s, p).semi_fiber && p.edge_count() % 2 == 1)
                odd = true;
    }
    EXPECT_TRUE(odd);
}
