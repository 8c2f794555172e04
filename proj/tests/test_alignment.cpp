#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "scanviz/metrics/alignment.hpp"

using namespace scanviz;
using namespace scanviz::metrics;

namespace {

std::string random_string(Rng& rng, int max_len) {
    std::string s;
    const int n = 1 + int(rng.below(std::uint64_t(max_len)));
    for (int i = 0; i < n; ++i) s += kClassLetters[rng.below(9)];
    return s;
}

}  // namespace

TEST_CASE("sequence score examples") {
    CHECK(sequence_score("TTD", "TTD") == 1.0);
    CHECK(sequence_score("TTD", "TD") == doctest::Approx(2.0 / 3.0));
    CHECK(sequence_score("AAAA", "XXXX") == 0.0);
    CHECK(oracle::sequence_score("TTD", "TD") == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(sequence_score("", "T"), Error);
}

TEST_CASE("sequence score equals exhaustive alignment enumeration") {
    Rng rng(101);
    for (int trial = 0; trial < 600; ++trial) {
        auto a = random_string(rng, 6), b = random_string(rng, 6);
        INFO(a, " vs ", b);
        REQUIRE(sequence_score(a, b) == oracle::sequence_score(a, b));
        CHECK(sequence_score(a, b) == sequence_score(b, a));
        CHECK(sequence_score(a, b) >= 0.0);
        CHECK(sequence_score(a, b) <= 1.0);
    }
}

TEST_CASE("needleman-wunsch score equals enumeration for random substitution tables") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + int(rng.below(5)), m = 1 + int(rng.below(5));
        Eigen::MatrixXd sub(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) sub(i, j) = std::round(20 * rng.uniform() - 10);
        const double gap = -std::round(4 * rng.uniform());
        auto fn = [&](int i, int j) { return sub(i, j); };
        CHECK(needleman_wunsch(n, m, [&](Eigen::Index i, Eigen::Index j) { return sub(i, j); }, gap) ==
              oracle::best_alignment_score(n, m, fn, gap));
    }
}

TEST_CASE("scanmatch substitution matrix") {
    auto sub = scanmatch_substitution(12, 8, 10);
    CHECK(sub.rows() == 96);
    CHECK(sub(0, 0) == 10.0);
    CHECK(sub(0, 95) == doctest::Approx(0.0).epsilon(1e-12));
    for (int i = 0; i < 96; i += 7)
        for (int j = 0; j < 96; j += 5) CHECK(sub(i, j) == doctest::Approx(oracle::scanmatch_sub(i, j, 12, 8, 10)));
}

TEST_CASE("scanmatch examples") {
    Stimulus s = oracle::blank_stimulus(1200, 800);
    Rng rng(3);
    auto p = oracle::random_scanpath(rng, 10, 1200, 800);
    CHECK(scanmatch(p, p, s) == doctest::Approx(1.0).epsilon(1e-12));

    Scanpath tl{"s", "a", {{1, 1, 0, 100}}}, br{"s", "b", {{1199, 799, 0, 100}}};
    CHECK(scanmatch(tl, br, s) == doctest::Approx(0.0).epsilon(1e-12));

    // 2×2 grid hand case: a visits bins 0 then 3, b visits 1 then 3.
    ScanmatchParams small{2, 2, 10, 0};
    Scanpath a{"s", "a", {{100, 100, 0, 100}, {1000, 700, 100, 100}}};
    Scanpath b{"s", "b", {{1000, 100, 0, 100}, {1000, 700, 100, 100}}};
    CHECK(scanmatch_bins(a, s, 2, 2) == std::vector<int>{0, 3});
    CHECK(scanmatch_bins(b, s, 2, 2) == std::vector<int>{1, 3});
    std::vector<int> ba{0, 3}, bb{1, 3};
    double brute = oracle::best_alignment_score(
        2, 2, [&](int i, int j) { return oracle::scanmatch_sub(ba[std::size_t(i)], bb[std::size_t(j)], 2, 2, 10); }, 0.0);
    CHECK(scanmatch(a, b, s, small) == doctest::Approx(brute / 20.0));
    CHECK(scanmatch(a, b, s, small) == doctest::Approx((10.0 * (1 - 1 / std::sqrt(2.0)) + 10.0) / 20.0));
}

TEST_CASE("scanmatch on bin sequences equals enumeration") {
    Rng rng(19);
    auto sub = scanmatch_substitution(3, 3, 10);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> a(1 + rng.below(6)), b(1 + rng.below(6));
        for (auto& x : a) x = int(rng.below(9));
        for (auto& x : b) x = int(rng.below(9));
        double brute = oracle::best_alignment_score(
            int(a.size()), int(b.size()),
            [&](int i, int j) { return oracle::scanmatch_sub(a[std::size_t(i)], b[std::size_t(j)], 3, 3, 10); }, 0.0);
        double v = scanmatch_sequences(a, b, sub, 0.0, 10.0);
        CHECK(v == doctest::Approx(brute / (10.0 * double(std::max(a.size(), b.size())))).epsilon(1e-12));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
}
