#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "scbiclust/bicluster.hpp"
#include "scbiclust/error.hpp"
#include "scbiclust/matrix.hpp"
#include "scbiclust/rng.hpp"

namespace scb {

/// A planted signal block, 0-indexed inclusive ranges.
struct TrueBicluster {
    std::size_t row_lo, row_hi;
    std::size_t col_lo, col_hi;
    BiclusterKind kind = BiclusterKind::mean;

    std::size_t n_rows() const { return row_hi - row_lo + 1; }
    std::size_t n_cols() const { return col_hi - col_lo + 1; }
    std::size_t n_entries() const { return n_rows() * n_cols(); }
    bool contains_row(std::size_t i) const { return i >= row_lo && i <= row_hi; }
    bool contains_col(std::size_t j) const { return j >= col_lo && j <= col_hi; }
};

/// One of the five benchmark scenarios. Block coordinates follow the
/// 1-indexed published ranges converted to 0-indexed inclusive ranges.
struct Scenario {
    int id = 0;
    std::size_t n = 0, p = 0;
    std::vector<TrueBicluster> biclusters;
    std::size_t primary_index = 0;  // which block the primary fit should find
    bool sequential = false;        // score layers by identification (3 and 5)
};

inline Scenario scenario(int id) {
    Scenario s;
    s.id = id;
    switch (id) {
        case 1:
            // 100x200 N(0,1) background, four additive normal blocks;
            // block 3 is the primary.
            s.n = 100;
            s.p = 200;
            s.biclusters = {{0, 19, 0, 19},     // +N(2,1)
                            {15, 29, 50, 79},   // +N(3,1)
                            {50, 89, 60, 129},  // +N(3,1), primary
                            {65, 99, 150, 199}};  // +N(2,1)
            s.primary_index = 2;
            break;
        case 2:
            // Cauchy(0,1) background with additive Cauchy location shifts.
            s.n = 100;
            s.p = 200;
            s.biclusters = {{0, 19, 0, 19},     // +Cauchy(75,1)
                            {15, 29, 50, 79},   // +Cauchy(50,1)
                            {50, 89, 70, 109},  // +Cauchy(200,1), primary
                            {70, 99, 155, 199}};  // +Cauchy(75,1)
            s.primary_index = 2;
            break;
        case 3:
            // Sum of two layers, each N(0,0.5) background; the blocks
            // replace the background within their layer.
            s.n = 100;
            s.p = 200;
            s.biclusters = {{0, 39, 0, 39},    // N(7,2) in layer 1
                            {20, 59, 20, 59}};  // N(-5,3) in layer 2
            s.primary_index = 0;
            s.sequential = true;
            break;
        case 4:
            // Two interlocking half-moons in 25 replicated feature pairs,
            // plus 25 pure-noise features.
            s.n = 1200;
            s.p = 75;
            s.biclusters = {{0, 499, 0, 49}};
            s.primary_index = 0;
            break;
        case 5:
            // N(1,2) background; two variance blocks replace it.
            s.n = 150;
            s.p = 500;
            s.biclusters = {{0, 29, 0, 199, BiclusterKind::variance},    // N(1,15)
                            {30, 49, 200, 399, BiclusterKind::variance}};  // N(1,5)
            s.primary_index = 0;
            s.sequential = true;
            break;
        default:
            throw InputError("unknown scenario id " + std::to_string(id));
    }
    return s;
}

/// Draws one matrix for the scenario. Deterministic per rng stream.
inline DataMatrix generate(const Scenario& s, Rng& rng) {
    DataMatrix X(s.n, s.p);
    switch (s.id) {
        case 1: {
            const double shift_sd[4][2] = {{2, 1}, {3, 1}, {3, 1}, {2, 1}};
            for (std::size_t i = 0; i < s.n; ++i)
                for (std::size_t j = 0; j < s.p; ++j) {
                    double v = rng.normal();
                    for (std::size_t k = 0; k < s.biclusters.size(); ++k)
                        if (s.biclusters[k].contains_row(i) && s.biclusters[k].contains_col(j))
                            v += rng.normal(shift_sd[k][0], shift_sd[k][1]);
                    X(i, j) = v;
                }
            break;
        }
        case 2: {
            const double shift[4] = {75, 50, 200, 75};
            for (std::size_t i = 0; i < s.n; ++i)
                for (std::size_t j = 0; j < s.p; ++j) {
                    double v = rng.cauchy(0.0, 1.0);
                    for (std::size_t k = 0; k < s.biclusters.size(); ++k)
                        if (s.biclusters[k].contains_row(i) && s.biclusters[k].contains_col(j))
                            v += rng.cauchy(shift[k], 1.0);
                    X(i, j) = v;
                }
            break;
        }
        case 3: {
            const auto& b1 = s.biclusters[0];
            const auto& b2 = s.biclusters[1];
            for (std::size_t i = 0; i < s.n; ++i)
                for (std::size_t j = 0; j < s.p; ++j) {
                    const double layer1 = (b1.contains_row(i) && b1.contains_col(j))
                                              ? rng.normal(7.0, 2.0)
                                              : rng.normal(0.0, 0.5);
                    const double layer2 = (b2.contains_row(i) && b2.contains_col(j))
                                              ? rng.normal(-5.0, 3.0)
                                              : rng.normal(0.0, 0.5);
                    X(i, j) = layer1 + layer2;
                }
            break;
        }
        case 4: {
            constexpr double pi = 3.14159265358979323846;
            for (std::size_t i = 0; i < s.n; ++i) {
                const double theta = rng.uniform(0.0, pi);
                const bool first_moon = i < 500;
                const double phase = theta + (first_moon ? 0.0 : pi);
                for (std::size_t pair = 1; pair <= 25; ++pair) {
                    const std::size_t col_odd = 2 * pair - 2;   // published column 2j-1
                    const std::size_t col_even = 2 * pair - 1;  // published column 2j
                    X(i, col_odd) =
                        (first_moon ? 5.0 : 0.0) + 5.0 * std::cos(phase) + rng.normal(0.0, 0.2);
                    X(i, col_even) =
                        (first_moon ? -2.0 : 0.0) + 5.0 * std::sin(phase) + rng.normal(0.0, 0.2);
                }
                for (std::size_t j = 50; j < s.p; ++j) X(i, j) = rng.normal();
            }
            break;
        }
        case 5: {
            const auto& b1 = s.biclusters[0];
            const auto& b2 = s.biclusters[1];
            for (std::size_t i = 0; i < s.n; ++i)
                for (std::size_t j = 0; j < s.p; ++j) {
                    if (b1.contains_row(i) && b1.contains_col(j))
                        X(i, j) = rng.normal(1.0, 15.0);
                    else if (b2.contains_row(i) && b2.contains_col(j))
                        X(i, j) = rng.normal(1.0, 5.0);
                    else
                        X(i, j) = rng.normal(1.0, 2.0);
                }
            break;
        }
        default:
            throw InputError("unknown scenario id " + std::to_string(s.id));
    }
    return X;
}

}  // namespace scb
