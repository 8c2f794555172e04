#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "scanviz/metrics/trajectory.hpp"

using namespace scanviz;
using namespace scanviz::metrics;

namespace {

Eigen::MatrixX2d pts(std::initializer_list<std::pair<double, double>> xs) {
    Eigen::MatrixX2d m(Eigen::Index(xs.size()), 2);
    Eigen::Index i = 0;
    for (auto [x, y] : xs) m.row(i++) << x, y;
    return m;
}

std::vector<Eigen::Vector2d> rows(const Eigen::MatrixX2d& m) {
    std::vector<Eigen::Vector2d> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m.row(i).transpose());
    return out;
}

Scanpath translated(Scanpath p, double dx, double dy) {
    for (auto& f : p.fixations) f.x += dx, f.y += dy;
    return p;
}

}  // namespace

TEST_CASE("dtw examples") {
    CHECK(dtw2d(pts({{0, 0}}), pts({{3, 4}})) == 5.0);
    CHECK(dtw2d(pts({{0, 0}, {2, 0}}), pts({{0, 0}, {1, 0}, {2, 0}})) == 1.0);
    Rng rng(2);
    auto p = oracle::random_scanpath(rng, 12, 800, 600);
    CHECK(dtw2d(p, p) == 0.0);
}

TEST_CASE("dtw equals warping-path brute force and is symmetric") {
    Rng rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        auto a = positions(oracle::random_scanpath(rng, 1 + int(rng.below(5)), 100, 100));
        auto b = positions(oracle::random_scanpath(rng, 1 + int(rng.below(5)), 100, 100));
        CHECK(dtw2d(a, b) == doctest::Approx(oracle::dtw(rows(a), rows(b))).epsilon(1e-12));
        CHECK(dtw2d(a, b) == doctest::Approx(dtw2d(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("stde") {
    Stimulus s = oracle::blank_stimulus(800, 600);
    Rng rng(5);
    auto p = oracle::random_scanpath(rng, 10, 800, 600);
    CHECK(stde(p, p, s) == 1.0);

    SUBCASE("k = 1 is the symmetrised mean nearest-point distance") {
        Scanpath a{"s", "a", {{0, 0, 0, 100}, {100, 0, 100, 100}}};
        Scanpath b{"s", "b", {{0, 30, 0, 100}, {300, 0, 100, 100}}};
        // a→b nearest distances: 30 and |(100,0)−(0,30)|; b→a: 30 and 200.
        const double d_ab = (30.0 + std::hypot(100.0, 30.0)) / 2.0;
        const double d_ba = (30.0 + 200.0) / 2.0;
        const double expected = std::exp(-((d_ab + d_ba) / 2.0) / s.diagonal());
        CHECK(stde(a, b, s, {1, 0}) == doctest::Approx(expected));
    }
    SUBCASE("decreases as b moves away") {
        const double d = s.diagonal();
        double s0 = stde(p, translated(p, 0, 0), s);
        double s1 = stde(p, translated(p, d / 4 * 0.6, d / 4 * 0.8), s);
        double s2 = stde(p, translated(p, d / 2 * 0.6, d / 2 * 0.8), s);
        CHECK(s0 > s1);
        CHECK(s1 > s2);
    }
    SUBCASE("short paths") {
        Scanpath two{"s", "a", {{0, 0, 0, 100}, {1, 1, 100, 100}}};
        CHECK_THROWS_WITH_AS(stde(two, p, s), doctest::Contains("smaller k"), Error);
    }
    SUBCASE("symmetric and in range") {
        for (int t = 0; t < 100; ++t) {
            auto a = oracle::random_scanpath(rng, 3 + int(rng.below(10)), 800, 600);
            auto b = oracle::random_scanpath(rng, 3 + int(rng.below(10)), 800, 600);
            double v = stde(a, b, s);
            CHECK(v == doctest::Approx(stde(b, a, s)).epsilon(1e-12));
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("multimatch") {
    Stimulus s = oracle::blank_stimulus(1000, 800);
    Scanpath a{"s", "a",
               {{100, 100, 0, 350}, {600, 150, 350, 400}, {550, 600, 750, 500}, {150, 650, 1250, 320},
                {400, 400, 1570, 600}}};

    SUBCASE("identity") {
        for (double v : multimatch(a, a, s).as_array()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("doubled durations only change the duration dimension") {
        Scanpath b = a;
        double t = 0;
        for (auto& f : b.fixations) f.duration_ms *= 2, f.onset_ms = t, t += f.duration_ms;
        auto m = multimatch(a, b, s);
        CHECK(m.shape == doctest::Approx(1.0));
        CHECK(m.direction == doctest::Approx(1.0));
        CHECK(m.length == doctest::Approx(1.0));
        CHECK(m.position == doctest::Approx(1.0));
        CHECK(m.duration < 1.0);
    }
    SUBCASE("translation only changes position") {
        auto m = multimatch(a, translated(a, 100, 0), s);
        CHECK(m.shape == doctest::Approx(1.0));
        CHECK(m.direction == doctest::Approx(1.0));
        CHECK(m.length == doctest::Approx(1.0));
        CHECK(m.duration == doctest::Approx(1.0));
        CHECK(m.position < 1.0);
    }
    SUBCASE("random translations, any path") {
        Rng rng(77);
        for (int t = 0; t < 100; ++t) {
            auto p = oracle::random_scanpath(rng, 2 + int(rng.below(10)), 600, 500);
            auto m = multimatch(p, translated(p, 300 * rng.uniform(), 250 * rng.uniform()), s);
            CHECK(m.shape == doctest::Approx(1.0));
            CHECK(m.direction == doctest::Approx(1.0));
            CHECK(m.length == doctest::Approx(1.0));
            CHECK(m.duration == doctest::Approx(1.0));
            CHECK(m.position <= 1.0);
        }
    }
    SUBCASE("range") {
        Rng rng(78);
        for (int t = 0; t < 200; ++t) {
            auto p = oracle::random_scanpath(rng, 2 + int(rng.below(10)), 1000, 800);
            auto q = oracle::random_scanpath(rng, 2 + int(rng.below(10)), 1000, 800);
            for (double v : multimatch(p, q, s).as_array()) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
    SUBCASE("single fixation") {
        Scanpath one{"s", "a", {{1, 1, 0, 100}}};
        CHECK_THROWS_AS(multimatch(one, a, s), Error);
    }
}

TEST_CASE("multimatch simplification") {
    // Three collinear short saccades through short fixations collapse into one.
    Scanpath p{"s", "a", {{0, 0, 0, 100}, {10, 0, 100, 100}, {20, 0, 200, 100}, {30, 0, 300, 100}}};
    auto v = simplify(to_vector_path(p), 100, 45, 300);
    CHECK(v.num_saccades() == 1);
    CHECK(v.saccades(0, 0) == doctest::Approx(30));
    CHECK(v.durations.sum() == doctest::Approx(400));
    // Long fixations between saccades are kept.
    Scanpath q = p;
    for (auto& f : q.fixations) f.duration_ms = 500;
    CHECK(simplify(to_vector_path(q), 100, 45, 300).num_saccades() == 3);
}
