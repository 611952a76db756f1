#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "scbiclust/rng.hpp"
#include "scbiclust/sim.hpp"

using namespace scb;

TEST_CASE("scenario dimensions match the published designs") {
    CHECK(scenario(1).n == 100);
    CHECK(scenario(1).p == 200);
    CHECK(scenario(2).n == 100);
    CHECK(scenario(3).p == 200);
    CHECK(scenario(4).n == 1200);
    CHECK(scenario(4).p == 75);
    CHECK(scenario(5).n == 150);
    CHECK(scenario(5).p == 500);
    CHECK_THROWS_AS(scenario(6), InputError);
    CHECK_THROWS_AS(scenario(0), InputError);
}

TEST_CASE("published 1-indexed block ranges convert to 0-indexed truth") {
    // Scenario 1's primary block is published as [51-90, 61-130].
    const Scenario s = scenario(1);
    const auto& primary = s.biclusters[s.primary_index];
    CHECK(primary.row_lo == 50);
    CHECK(primary.row_hi == 89);
    CHECK(primary.col_lo == 60);
    CHECK(primary.col_hi == 129);
    CHECK(primary.n_rows() == 40);
    CHECK(primary.n_cols() == 70);

    // Scenario 5's first block is published as [1-30, 1-200].
    const Scenario s5 = scenario(5);
    const auto& v1 = s5.biclusters[0];
    CHECK(v1.row_lo == 0);
    CHECK(v1.row_hi == 29);
    CHECK(v1.col_lo == 0);
    CHECK(v1.col_hi == 199);
    CHECK(v1.kind == BiclusterKind::variance);
}

TEST_CASE("generation is deterministic per stream") {
    const Scenario s = scenario(1);
    Rng a = Rng(5).stream(1), b = Rng(5).stream(1), c = Rng(5).stream(2);
    const auto X = generate(s, a);
    const auto Y = generate(s, b);
    const auto Z = generate(s, c);
    CHECK(X.values() == Y.values());
    CHECK(X.values() != Z.values());
}

TEST_CASE("scenario-1 entry means match the block parameters") {
    const Scenario s = scenario(1);
    double inside = 0.0, outside = 0.0;
    const int reps = 500;
    for (int r = 0; r < reps; ++r) {
        Rng rng = Rng(61).stream(3, r);
        const auto X = generate(s, rng);
        inside += X(59, 99);   // published cell (60, 100), inside block 3
        outside += X(0, 99);   // published cell (1, 100), outside all blocks
    }
    CHECK(inside / reps == Catch::Approx(3.0).margin(0.25));
    CHECK(outside / reps == Catch::Approx(0.0).margin(0.2));
}

TEST_CASE("scenario-4 noise columns are standard normal") {
    const Scenario s = scenario(4);
    double sum = 0.0, sumsq = 0.0;
    std::size_t count = 0;
    for (int r = 0; r < 5; ++r) {
        Rng rng = Rng(62).stream(4, r);
        const auto X = generate(s, rng);
        for (std::size_t i = 0; i < s.n; ++i) {
            sum += X(i, 50);  // published column 51, the first noise column
            sumsq += X(i, 50) * X(i, 50);
            ++count;
        }
    }
    const double mean = sum / count;
    const double sd = std::sqrt(sumsq / count - mean * mean);
    CHECK(mean == Catch::Approx(0.0).margin(0.05));
    CHECK(sd == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("scenario-5 first block has standard deviation 15") {
    const Scenario s = scenario(5);
    const auto& b1 = s.biclusters[0];
    double mean_sd = 0.0;
    const int reps = 500;
    for (int r = 0; r < reps; ++r) {
        Rng rng = Rng(63).stream(5, r);
        const auto X = generate(s, rng);
        double sum = 0.0, sumsq = 0.0;
        std::size_t count = 0;
        for (std::size_t i = b1.row_lo; i <= b1.row_hi; ++i)
            for (std::size_t j = b1.col_lo; j <= b1.col_hi; ++j) {
                sum += X(i, j);
                sumsq += X(i, j) * X(i, j);
                ++count;
            }
        const double m = sum / count;
        mean_sd += std::sqrt((sumsq - count * m * m) / (count - 1));
    }
    CHECK(mean_sd / reps == Catch::Approx(15.0).margin(0.5));
}

TEST_CASE("scenario-4 moons share the angle across feature pairs") {
    const Scenario s = scenario(4);
    Rng rng = Rng(64).stream(4);
    const auto X = generate(s, rng);
    // Columns 0 and 2 repeat the same curve up to noise.
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(std::abs(X(i, 0) - X(i, 2)) < 6.0 * 0.2 * 1.5);
}
