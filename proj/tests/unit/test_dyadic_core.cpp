#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "emin/grid.hpp"
#include "emin/signal_io.hpp"
#include "test_helpers.hpp"

using namespace emin;
using emin::test::indicator;
using emin::test::random_signal;

TEST_CASE("lp_norm on indicators and constants") {
    const Grid g = Grid::unit(4);
    CHECK(lp_norm(indicator(g, 0.0, 1.0), 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp_norm(indicator(g, 0.0, 0.5, 2.0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));

    // Midpoint sums integrate linear weights exactly.
    std::vector<double> wv(static_cast<std::size_t>(g.cells()));
    for (std::int64_t i = 0; i < g.cells(); ++i) wv[static_cast<std::size_t>(i)] = g.cell_midpoint(i);
    const Weight w(g, wv);
    CHECK(lp_norm(Signal::constant(g, 1.0), 1.0, &w) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("lp_norm rejects bad input") {
    const Grid g = Grid::unit(3);
    const Signal f = Signal::constant(g, 1.0);
    CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
    const Weight w = Weight::ones(Grid::unit(4));
    CHECK_THROWS_AS(lp_norm(f, 2.0, &w), std::invalid_argument);
}

TEST_CASE("interval_average examples") {
    const Grid g = Grid::unit(4);
    const Signal f = indicator(g, 0.0, 0.25, 4.0);
    CHECK(interval_average(f, {1, 0}) == doctest::Approx(2.0).epsilon(1e-14));

    const Signal c = Signal::constant(g, -3.5);
    for (int r = 0; r <= 4; ++r)
        CHECK(interval_average(c, {r, 0}) == doctest::Approx(3.5).epsilon(1e-14));

    // |f| = 1 on the interval, so any weight gives 1.
    Signal ind = indicator(g, 0.0, 0.5);
    std::vector<double> wv(static_cast<std::size_t>(g.cells()), 1.0);
    for (std::int64_t i = 0; i < g.cells() / 4; ++i) wv[static_cast<std::size_t>(i)] = 2.0;
    const Weight w(g, wv);
    CHECK(interval_average(ind, {1, 0}, &w) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(interval_average(f, {5, 0}), std::invalid_argument);
    CHECK_THROWS_AS(interval_average(f, {2, 4}), std::invalid_argument);
}

TEST_CASE("weighted_measure additivity and overlap detection") {
    const Grid g = Grid::unit(3);
    const Weight ones = Weight::ones(g);
    std::vector<DyadicInterval> root = {{0, 0}};
    CHECK(weighted_measure(root, ones) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(weighted_measure({}, ones) == 0.0);

    const Weight threes(g, std::vector<double>(8, 3.0));
    std::vector<DyadicInterval> halves = {{1, 0}, {1, 1}};
    CHECK(weighted_measure(halves, threes) == doctest::Approx(3.0).epsilon(1e-14));

    std::vector<DyadicInterval> overlap = {{1, 0}, {2, 1}};
    CHECK_THROWS_AS(weighted_measure(overlap, ones), std::invalid_argument);

    // Exact additivity: same summation order on both sides.
    Rng rng(7);
    std::vector<double> wv(8);
    for (auto& x : wv) x = rng.uniform(0.1, 5.0);
    const Weight w(g, wv);
    std::vector<DyadicInterval> parts = {{2, 0}, {2, 1}, {1, 1}};
    std::vector<DyadicInterval> a = {{2, 0}};
    std::vector<DyadicInterval> b = {{2, 1}};
    std::vector<DyadicInterval> c = {{1, 1}};
    CHECK(weighted_measure(parts, w) ==
          weighted_measure(a, w) + weighted_measure(b, w) + weighted_measure(c, w));
}

TEST_CASE("Holder inequality between p-norms") {
    Rng rng(42);
    for (int rep = 0; rep < 30; ++rep) {
        const Grid g = Grid::unit(6);
        const Signal f = random_signal(g, rng, 3.0);
        const double pairs[4][2] = {{1.0, 2.0}, {1.5, 3.0}, {2.0, 4.0}, {1.0, 6.0}};
        for (const auto& pq : pairs) {
            const double lhs = lp_norm(f, pq[0]);
            const double rhs =
                lp_norm(f, pq[1]) * std::pow(g.length, 1.0 / pq[0] - 1.0 / pq[1]);
            CHECK(lhs <= rhs * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("root average equals L1 norm over length") {
    Rng rng(3);
    const Grid g = make_grid(5, -1.0, 2.0);
    const Signal f = random_signal(g, rng);
    CHECK(interval_average(f, DyadicInterval::root()) ==
          doctest::Approx(lp_norm(f, 1.0) / g.length).epsilon(1e-12));
}

TEST_CASE("signal and weight validation") {
    const Grid g = Grid::unit(2);
    CHECK_THROWS_AS(Signal(g, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Signal(g, {1.0, 2.0, std::nan(""), 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Weight(g, {1.0, 2.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Weight(g, {1.0, 2.0, -1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(-1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(3, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("dyadic interval cell geometry") {
    const Grid g = Grid::unit(5);
    const DyadicInterval I{2, 3};
    CHECK(I.first_cell(g.J) == 24);
    CHECK(I.cell_count(g.J) == 8);
    CHECK(I.measure(g) == doctest::Approx(0.25));
    CHECK(I.parent() == DyadicInterval{1, 1});
    CHECK(I.left_child().first_cell(g.J) == I.first_cell(g.J));
    CHECK(I.left_child().end_cell(g.J) == I.right_child().first_cell(g.J));
    CHECK(I.right_child().end_cell(g.J) == I.end_cell(g.J));
}

TEST_CASE("dilated cell ranges") {
    const Grid g = Grid::unit(5);  // 32 cells
    SUBCASE("factor 1 is the interval itself") {
        auto [lo, hi] = dilate_cell_range({3, 2}, 1.0, g);
        CHECK(lo == 8);
        CHECK(hi == 12);
    }
    SUBCASE("factor 2 of a single cell covers three cells") {
        auto [lo, hi] = dilate_cell_range({5, 16}, 2.0, g);
        CHECK(lo == 15);
        CHECK(hi == 18);
    }
    SUBCASE("clipping at the boundary") {
        auto [lo, hi] = dilate_cell_range({5, 0}, 30.0, g);
        CHECK(lo == 0);
        CHECK(hi == 16);  // half cell + 15 cells, cover rounds up
    }
    SUBCASE("symmetric interior dilate") {
        auto [lo, hi] = dilate_cell_range({4, 8}, 3.0, g);
        // cells [16,18) dilated by 3: [13, 21)
        CHECK(lo == 13);
        CHECK(hi == 21);
    }
}

TEST_CASE("binary and csv round trips") {
    Rng rng(11);
    const Grid g = make_grid(6, 0.0, 1.0);
    const Signal f = random_signal(g, rng, 5.0);
    const auto dir = std::filesystem::temp_directory_path();

    const std::string bin = (dir / "emin_test_signal.bin").string();
    write_signal_binary(f, bin);
    const Signal fb = read_signal_binary(bin);
    CHECK(fb.grid == f.grid);
    CHECK(emin::test::max_abs_diff(fb, f) == 0.0);

    const std::string csv = (dir / "emin_test_signal.csv").string();
    write_signal_csv(f, csv);
    const Signal fc = read_signal_csv(csv, g);
    CHECK(emin::test::max_abs_diff(fc, f) == 0.0);

    std::filesystem::remove(bin);
    std::filesystem::remove(csv);
}
