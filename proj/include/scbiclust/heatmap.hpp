#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "scbiclust/bicluster.hpp"
#include "scbiclust/error.hpp"
#include "scbiclust/matrix.hpp"

namespace scb {

/// Renders the matrix as a binary PPM (P6): one cell_size x cell_size
/// block per entry on a blue-white-red diverging ramp over column z-scores
/// clipped at +-3 (constant columns map to the white midpoint). Bicluster
/// boundaries, when layers are given, are drawn in black.
inline std::vector<std::uint8_t> render_heatmap(const DataMatrix& X,
                                                const std::vector<Bicluster>& layers = {},
                                                std::size_t cell_size = 1) {
    const std::size_t n = X.n(), p = X.p();
    if (cell_size == 0) throw InputError("cell size must be positive");

    // Robust per-column z-scores; zero spread maps to the ramp midpoint.
    std::vector<double> z(n * p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double mean, sd;
        detail::column_mean_sd(X, j, mean, sd);
        for (std::size_t i = 0; i < n; ++i)
            z[i * p + j] = sd > 0.0 ? (X(i, j) - mean) / sd : 0.0;
    }

    // Membership masks per layer for outline lookup.
    std::vector<std::vector<bool>> row_in(layers.size()), col_in(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        row_in[l].assign(n, false);
        col_in[l].assign(p, false);
        for (std::size_t i : layers[l].rows)
            if (i < n) row_in[l][i] = true;
        for (std::size_t j : layers[l].cols)
            if (j < p) col_in[l][j] = true;
    }
    auto in_layer = [&](std::size_t l, std::ptrdiff_t i, std::ptrdiff_t j) {
        if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(n) ||
            j >= static_cast<std::ptrdiff_t>(p))
            return false;
        return row_in[l][static_cast<std::size_t>(i)] && col_in[l][static_cast<std::size_t>(j)];
    };
    auto on_outline = [&](std::size_t i, std::size_t j) {
        for (std::size_t l = 0; l < layers.size(); ++l) {
            if (!in_layer(l, static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j)))
                continue;
            const auto ii = static_cast<std::ptrdiff_t>(i);
            const auto jj = static_cast<std::ptrdiff_t>(j);
            if (!in_layer(l, ii - 1, jj) || !in_layer(l, ii + 1, jj) ||
                !in_layer(l, ii, jj - 1) || !in_layer(l, ii, jj + 1))
                return true;
        }
        return false;
    };

    const std::size_t width = p * cell_size;
    const std::size_t height = n * cell_size;
    std::string header = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + 3 * width * height);

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint8_t> scanline;
        scanline.reserve(3 * width);
        for (std::size_t j = 0; j < p; ++j) {
            std::uint8_t r, g, b;
            if (on_outline(i, j)) {
                r = g = b = 0;
            } else {
                const double clipped = std::clamp(z[i * p + j], -3.0, 3.0);
                const double t = (clipped + 3.0) / 6.0;
                if (t < 0.5) {  // blue -> white
                    const double u = t / 0.5;
                    r = static_cast<std::uint8_t>(std::lround(255.0 * u));
                    g = static_cast<std::uint8_t>(std::lround(255.0 * u));
                    b = 255;
                } else {  // white -> red
                    const double u = (t - 0.5) / 0.5;
                    r = 255;
                    g = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - u)));
                    b = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - u)));
                }
            }
            for (std::size_t c = 0; c < cell_size; ++c) {
                scanline.push_back(r);
                scanline.push_back(g);
                scanline.push_back(b);
            }
        }
        for (std::size_t c = 0; c < cell_size; ++c)
            bytes.insert(bytes.end(), scanline.begin(), scanline.end());
    }
    return bytes;
}

inline void write_heatmap(const DataMatrix& X, const std::string& path,
                          const std::vector<Bicluster>& layers = {}, std::size_t cell_size = 1) {
    const auto bytes = render_heatmap(X, layers, cell_size);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace scb
