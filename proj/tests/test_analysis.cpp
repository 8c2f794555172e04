#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "scanviz/analysis.hpp"
#include "scanviz/fixtures.hpp"

using namespace scanviz;
using namespace scanviz::analysis;

namespace {

Stimulus title_data() {
    Stimulus s = oracle::blank_stimulus(100, 100);
    s.annotations = {{"s", ElementClass::T, Box{0, 0, 10, 10}, 0},
                     {"s", ElementClass::D, Box{0, 20, 20, 10}, 0},
                     {"s", ElementClass::D, Box{0, 40, 30, 10}, 0}};
    return s;
}

std::vector<Fixation> at(double x, double y, int n, double onset0 = 0, double step = 100) {
    std::vector<Fixation> out;
    for (int i = 0; i < n; ++i) out.push_back({x, y, onset0 + step * i, step});
    return out;
}

}  // namespace

TEST_CASE("compute_efd examples") {
    Stimulus s = title_data();
    CHECK(compute_efd(at(5, 5, 5), s, ElementClass::T, 0, 5000) == doctest::Approx(0.05));
    CHECK(compute_efd(at(90, 90, 5), s, ElementClass::T, 0, 5000) == 0.0);
    auto data = at(5, 25, 4);
    auto more = at(5, 45, 6, 400);
    data.insert(data.end(), more.begin(), more.end());
    CHECK(compute_efd(data, s, ElementClass::D, 0, 5000) == doctest::Approx(10.0 / 500.0));
    CHECK_THROWS_AS(compute_efd(data, s, ElementClass::L, 0, 5000), Error);
    // Only onsets inside [t0, t1) count.
    CHECK(compute_efd(at(5, 5, 5), s, ElementClass::T, 100, 300) == doctest::Approx(0.02));
}

TEST_CASE("EFD class ratio is invariant to uniform rescaling") {
    Stimulus s = title_data();
    std::vector<Fixation> f = at(5, 5, 7);
    auto d = at(10, 45, 3, 700);
    f.insert(f.end(), d.begin(), d.end());
    double ratio = compute_efd(f, s, ElementClass::T, 0, 5000) / compute_efd(f, s, ElementClass::D, 0, 5000);
    for (double k : {0.5, 2.0, 3.0}) {
        Stimulus t = s;
        t.width = int(s.width * k), t.height = int(s.height * k);
        for (auto& a : t.annotations) {
            auto& b = std::get<Box>(a.region);
            b = {b.x * k, b.y * k, b.w * k, b.h * k};
        }
        auto g = f;
        for (auto& x : g) x.x *= k, x.y *= k;
        double r = compute_efd(g, t, ElementClass::T, 0, 5000) / compute_efd(g, t, ElementClass::D, 0, 5000);
        CHECK(r == doctest::Approx(ratio));
    }
}

TEST_CASE("efd_time_series") {
    Dataset ds;
    ds.stimuli = {title_data()};
    ds.stimuli[0].stimulus_id = "a";
    Stimulus b = oracle::blank_stimulus(100, 100, "b");
    b.annotations = {{"b", ElementClass::T, Box{0, 0, 10, 10}, 0}};
    ds.stimuli.push_back(b);

    SUBCASE("mean over stimuli") {
        ds.scanpaths = {{"a", "v", at(5, 5, 2)}, {"b", "v", at(5, 5, 4)}};
        auto se = efd_time_series(ds, ElementClass::T, 500, 1000);
        REQUIRE(se.values.size() == 2);
        CHECK(*se.values[0] == doctest::Approx(0.03));
        CHECK(*se.values[1] == 0.0);
    }
    SUBCASE("peaked at one bin") {
        ds.scanpaths = {{"a", "v", at(5, 5, 3, 500, 100)}};
        auto se = efd_time_series(ds, ElementClass::T, 500, 2000);
        CHECK(*se.values[0] == 0.0);
        CHECK(*se.values[1] > 0.0);
        CHECK(*se.values[2] == 0.0);
    }
    SUBCASE("uniform fixations give a flat series") {
        ds.scanpaths = {{"a", "v", at(5, 5, 20, 0, 100)}};
        auto se = efd_time_series(ds, ElementClass::T, 500, 2000);
        for (auto& v : se.values) CHECK(*v == doctest::Approx(*se.values[0]));
    }
    SUBCASE("absent class bins are absent") {
        ds.scanpaths = {{"a", "v", at(5, 5, 2)}};
        auto se = efd_time_series(ds, ElementClass::L, 500, 1000);
        CHECK_FALSE(se.values[0].has_value());
    }
    CHECK_THROWS_AS(efd_time_series(ds, ElementClass::T, 300, 1000), Error);
}

TEST_CASE("k-means and dynamics clustering") {
    SUBCASE("flat pair clusters together") {
        EfdSeries flat{ElementClass::T, 500, {1.0, 1.0, 1.0, 1.0}};
        EfdSeries flat2{ElementClass::D, 500, {2.0, 2.0, 2.0, 2.0}};
        EfdSeries peak{ElementClass::L, 500, {0.0, 5.0, 0.0, 0.0}};
        auto c = cluster_dynamics({flat, flat2, peak}, 2);
        CHECK(c.labels[0] == c.labels[1]);
        CHECK(c.labels[0] != c.labels[2]);
    }
    SUBCASE("k equal to the number of points") {
        Eigen::MatrixXd x(3, 2);
        x << 0, 0, 1, 0, 0, 1;
        auto c = kmeans(x, 3);
        CHECK(c.inertia == doctest::Approx(0.0));
        CHECK(c.labels == std::vector<int>{0, 1, 2});
    }
    SUBCASE("too few distinct rows") {
        Eigen::MatrixXd x = Eigen::MatrixXd::Ones(4, 2);
        CHECK_THROWS_AS(kmeans(x, 2), Error);
    }
    SUBCASE("template recovery") {
        Rng rng(5);
        std::vector<std::vector<double>> templates = {
            {5, 3, 2, 1, 1, 1, 1, 1, 1, 1}, {1, 2, 3, 4, 5, 5, 4, 3, 2, 1}, {1, 1, 1, 1, 1, 2, 3, 4, 5, 6}};
        std::vector<int> truth = {0, 1, 2, 0, 1, 2, 0, 1};
        std::vector<EfdSeries> series;
        for (int t : truth) {
            EfdSeries s{ElementClass::T, 500, {}};
            for (double v : templates[std::size_t(t)]) s.values.push_back(v * (1 + 0.05 * rng.normal()));
            series.push_back(s);
        }
        auto c = cluster_dynamics(series, 3);
        for (std::size_t i = 0; i < truth.size(); ++i)
            for (std::size_t j = 0; j < truth.size(); ++j) CHECK((truth[i] == truth[j]) == (c.labels[i] == c.labels[j]));
    }
}

TEST_CASE("scanpath strings") {
    Stimulus s = title_data();
    Scanpath p{"s", "v", {{5, 5, 0, 100}, {5, 5, 100, 100}, {5, 25, 200, 100}}};
    CHECK(scanpath_to_string(p, s) == "TTD");
    p.fixations.push_back({90, 90, 300, 100});
    CHECK(scanpath_to_string(p, s) == "TTD_");
    Rng rng(1);
    auto q = oracle::random_scanpath(rng, 37, 100, 100);
    CHECK(scanpath_to_string(q, s).size() == 37);
}

TEST_CASE("transition matrix examples") {
    auto m = transition_matrix(std::vector<std::string>{"TTD"});
    CHECK(m.at('T', 'T') == doctest::Approx(0.5));
    CHECK(m.at('T', 'D') == doctest::Approx(0.5));
    CHECK(transition_matrix(std::vector<std::string>{"TD", "TD"}).at('T', 'D') == 1.0);
    CHECK(transition_matrix(std::vector<std::string>{"LLLL"}).at('L', 'L') == 1.0);
    CHECK(m.labels == "AXGLOTSD");
    auto with_bg = transition_matrix(std::vector<std::string>{"T_T"}, {true, std::nullopt});
    CHECK(with_bg.labels.size() == 9);
    CHECK(with_bg.at('T', '_') == 1.0);
    CHECK(transition_matrix(std::vector<std::string>{"T_T"}).probs.sum() == 0.0);
}

TEST_CASE("transition window filters by source onset") {
    LabelSequence a{"TDL", {0, 1000, 3000}};
    TransitionOptions early{false, std::pair{0.0, 2000.0}};
    auto m = transition_matrix(std::vector<LabelSequence>{a}, early);
    CHECK(m.at('T', 'D') == 1.0);
    CHECK(m.at('D', 'L') == 1.0);  // D's onset 1000 is inside the window
    TransitionOptions late{false, std::pair{2000.0, 5000.0}};
    CHECK(transition_matrix(std::vector<LabelSequence>{a}, late).probs.sum() == 0.0);
}

TEST_CASE("transition rows sum to one or zero") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> strings;
        for (int k = 0; k < 1 + int(rng.below(5)); ++k) {
            std::string s;
            for (int i = 0; i < 1 + int(rng.below(12)); ++i) s += kClassLetters[rng.below(9)];
            strings.push_back(s);
        }
        auto m = transition_matrix(strings, {rng.uniform() < 0.5, std::nullopt});
        for (Eigen::Index r = 0; r < m.probs.rows(); ++r) {
            double sum = m.probs.row(r).sum();
            CHECK((std::abs(sum - 1.0) <= 1e-9 || sum == 0.0));
        }
    }
}

TEST_CASE("viewer consistency") {
    Stimulus s = title_data();
    Dataset ds;
    ds.stimuli = {s};
    ds.scanpaths = {{"s", "v1", {{5, 5, 0, 100}, {5, 25, 100, 100}}}, {"s", "v2", {{5, 5, 0, 100}, {5, 25, 100, 100}}}};
    auto r = viewer_consistency(ds, {"v1", "v2"});
    CHECK(r.sequence_score(0, 0) == 1.0);
    CHECK(r.sequence_score(0, 1) == 1.0);
    CHECK(r.shared_stimuli(0, 1) == 1);

    SUBCASE("two viewers from one Markov chain") {
        auto spec = fixtures::parse_fixture_spec(json::parse(R"({
            "stimuli": [{"stimulus_id": "m", "width": 400, "height": 300, "elements": [
                {"class": "T", "box": [0, 0, 400, 50]}, {"class": "D", "box": [0, 60, 250, 200]},
                {"class": "L", "box": [260, 60, 140, 100]}, {"class": "X", "box": [0, 270, 400, 30]}]}],
            "replicate": 100, "viewers": 2, "window_ms": 3000, "durations": {"fixed": 150},
            "slices": [{"end_ms": 3000, "attractiveness": {"T": 1, "D": 1, "L": 1, "X": 1}}],
            "transitions": {"T": {"T": 0.3, "D": 0.5, "L": 0.2}, "D": {"D": 0.6, "X": 0.2, "L": 0.2},
                            "L": {"L": 0.8, "D": 0.2}, "X": {"X": 0.5, "D": 0.5}}})"));
        auto fx = fixtures::gen_fixtures(spec, 99);
        auto rep = viewer_consistency(fx, {"v000", "v001"});
        CHECK(rep.transition_cc(0, 1) > 0.9);
        CHECK(rep.transition_cc(0, 0) == doctest::Approx(1.0));
    }
}
