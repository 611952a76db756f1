#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scbiclust/bicluster.hpp"
#include "scbiclust/matrix.hpp"
#include "scbiclust/rng.hpp"
#include "scbiclust/sim.hpp"

namespace scb {

enum class Identification { bic1, bic2, bic12, none };

inline std::string to_string(Identification id) {
    switch (id) {
        case Identification::bic1: return "bic1";
        case Identification::bic2: return "bic2";
        case Identification::bic12: return "bic1+2";
        default: return "none";
    }
}

/// Accuracy of one found bicluster against the planted truth.
/// Observation/feature rates compare against the scenario's primary block;
/// entry rates compare against the identified block (best entry-set
/// Jaccard among bic1, bic2 and their covering rectangle, "none" below
/// the threshold).
struct AccuracyReport {
    double obs_misclass = 0.0;
    double feature_fnr = 0.0;
    double feature_fpr = 0.0;
    double entry_fnr = 0.0;
    double entry_fpr = 0.0;
    Identification identification = Identification::none;
    bool valid = false;
};

namespace detail {

inline std::size_t count_in_range(const std::vector<std::size_t>& sorted, std::size_t lo,
                                  std::size_t hi) {
    std::size_t count = 0;
    for (std::size_t v : sorted)
        if (v >= lo && v <= hi) ++count;
    return count;
}

inline double rect_jaccard(const Bicluster& found, const TrueBicluster& rect) {
    const std::size_t inter = count_in_range(found.rows, rect.row_lo, rect.row_hi) *
                              count_in_range(found.cols, rect.col_lo, rect.col_hi);
    const std::size_t found_size = found.rows.size() * found.cols.size();
    const std::size_t uni = found_size + rect.n_entries() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

inline AccuracyReport score(const Bicluster& found, const Scenario& s,
                            double jaccard_threshold = 0.1) {
    AccuracyReport rep;
    rep.valid = found.rows.size() >= 2 && found.cols.size() >= 2;

    const TrueBicluster& primary = s.biclusters[s.primary_index];

    // Observation misclassification: symmetric difference over n.
    const std::size_t rows_inter =
        detail::count_in_range(found.rows, primary.row_lo, primary.row_hi);
    rep.obs_misclass = static_cast<double>(found.rows.size() + primary.n_rows() -
                                           2 * rows_inter) /
                       static_cast<double>(s.n);

    const std::size_t cols_inter =
        detail::count_in_range(found.cols, primary.col_lo, primary.col_hi);
    rep.feature_fnr = static_cast<double>(primary.n_cols() - cols_inter) /
                      static_cast<double>(primary.n_cols());
    const std::size_t non_bic_cols = s.p - primary.n_cols();
    rep.feature_fpr = non_bic_cols == 0
                          ? 0.0
                          : static_cast<double>(found.cols.size() - cols_inter) /
                                static_cast<double>(non_bic_cols);

    // Identification: candidate targets are bic1, bic2 (when present) and
    // the rectangle covering both.
    std::vector<std::pair<Identification, TrueBicluster>> candidates;
    if (s.sequential && s.biclusters.size() >= 2) {
        candidates.emplace_back(Identification::bic1, s.biclusters[0]);
        candidates.emplace_back(Identification::bic2, s.biclusters[1]);
        TrueBicluster both = s.biclusters[0];
        both.row_lo = std::min(both.row_lo, s.biclusters[1].row_lo);
        both.row_hi = std::max(both.row_hi, s.biclusters[1].row_hi);
        both.col_lo = std::min(both.col_lo, s.biclusters[1].col_lo);
        both.col_hi = std::max(both.col_hi, s.biclusters[1].col_hi);
        candidates.emplace_back(Identification::bic12, both);
    } else {
        candidates.emplace_back(Identification::bic1, primary);
    }

    double best = -1.0;
    const TrueBicluster* target = nullptr;
    for (const auto& [label, rect] : candidates) {
        const double jac = detail::rect_jaccard(found, rect);
        if (jac > best) {
            best = jac;
            rep.identification = label;
            target = &rect;
        }
    }
    if (best < jaccard_threshold || target == nullptr) {
        rep.identification = Identification::none;
        target = &primary;
    }

    const std::size_t entry_inter =
        detail::count_in_range(found.rows, target->row_lo, target->row_hi) *
        detail::count_in_range(found.cols, target->col_lo, target->col_hi);
    const std::size_t found_entries = found.rows.size() * found.cols.size();
    const std::size_t target_entries = target->n_entries();
    rep.entry_fnr = static_cast<double>(target_entries - entry_inter) /
                    static_cast<double>(target_entries);
    const std::size_t non_entries = s.n * s.p - target_entries;
    rep.entry_fpr = non_entries == 0
                        ? 0.0
                        : static_cast<double>(found_entries - entry_inter) /
                              static_cast<double>(non_entries);
    return rep;
}

/// Split-half reproducibility rates, averaged over the random splits.
struct SplitRates {
    double obs_misclass = 0.0;
    double feature_fnr = 0.0;
    double feature_fpr = 0.0;
    double feature_misclass = 0.0;
};

struct ReproReport {
    double obs_misclass = 0.0;
    double feature_fnr = 0.0;
    double feature_fpr = 0.0;
    double feature_misclass = 0.0;
    std::size_t splits = 0;
    std::size_t none_fits = 0;  // half-fits that found no bicluster (scored 1.0)
    std::vector<SplitRates> per_split;
};

using PrimaryFitter =
    std::function<std::optional<Bicluster>(const DataMatrix&, Rng&)>;

namespace detail {

inline DataMatrix submatrix_rows(const DataMatrix& X, const std::vector<std::size_t>& rows) {
    DataMatrix out(rows.size(), X.p());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < X.p(); ++j) out(i, j) = X(rows[i], j);
    return out;
}

inline std::size_t intersection_size(const std::vector<std::size_t>& a,
                                     const std::vector<std::size_t>& b) {
    std::size_t count = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            ++i;
        else if (b[j] < a[i])
            ++j;
        else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

}  // namespace detail

/// Fits the reference bicluster U on the full matrix, then for each of
/// `splits` random halvings fits U1 and U2 on the halves and records how
/// well they reproduce U:
///   obs_misclass   observations in U1/U2 xor (U restricted to the half),
///                  over the half size;
///   feature_fnr    fraction of U's features missing from U1/U2;
///   feature_fpr    fraction of non-U features selected by U1/U2;
///   feature_misclass  fraction of all features selected by exactly one
///                  of U1, U2.
/// A half-fit that returns no bicluster enters these definitions as the
/// empty bicluster (all reference features missed, nothing spuriously
/// selected) and is counted in none_fits.
inline ReproReport reproducibility(const DataMatrix& X, const PrimaryFitter& fit,
                                   std::size_t splits, Rng rng) {
    if (X.n() < 8) throw InputError("reproducibility needs at least 8 observations");
    ReproReport rep;
    rep.splits = splits;

    Rng fit_rng = rng.split(0x66697466ULL);
    const auto reference = fit(X, fit_rng);
    if (!reference) {
        rep.obs_misclass = rep.feature_fnr = rep.feature_fpr = rep.feature_misclass = 1.0;
        rep.none_fits = 1 + 2 * splits;
        return rep;
    }
    const auto& U = *reference;
    std::vector<bool> in_u_rows(X.n(), false);
    for (std::size_t i : U.rows) in_u_rows[i] = true;

    for (std::size_t split = 0; split < splits; ++split) {
        std::vector<std::size_t> order(X.n());
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = X.n() - 1; i > 0; --i)
            std::swap(order[i], order[rng.uniform_index(i + 1)]);
        const std::size_t half_size = X.n() / 2;
        std::vector<std::size_t> halves[2] = {
            {order.begin(), order.begin() + half_size},
            {order.begin() + half_size, order.end()}};
        std::sort(halves[0].begin(), halves[0].end());
        std::sort(halves[1].begin(), halves[1].end());

        double obs = 0.0, fnr = 0.0, fpr = 0.0;
        std::vector<std::size_t> half_cols[2];
        for (int h = 0; h < 2; ++h) {
            const auto& rows = halves[h];
            Rng half_rng = rng.split(0x68616c66ULL + h);
            const auto sub = detail::submatrix_rows(X, rows);
            std::optional<Bicluster> fitted;
            try {
                fitted = fit(sub, half_rng);
            } catch (const NumericError&) {
                fitted = std::nullopt;
            }
            std::size_t ref_in_half = 0;
            for (std::size_t i : rows)
                if (in_u_rows[i]) ++ref_in_half;
            if (!fitted) {
                // Empty bicluster: every reference row/feature is missed,
                // nothing is spuriously selected.
                ++rep.none_fits;
                obs += static_cast<double>(ref_in_half) / static_cast<double>(rows.size());
                fnr += 1.0;
                continue;
            }
            // Map half-local row indices back to the originals.
            std::vector<std::size_t> found_rows;
            found_rows.reserve(fitted->rows.size());
            for (std::size_t local : fitted->rows) found_rows.push_back(rows[local]);
            std::sort(found_rows.begin(), found_rows.end());

            const std::size_t inter = detail::intersection_size(found_rows, U.rows);
            obs += static_cast<double>(found_rows.size() + ref_in_half - 2 * inter) /
                   static_cast<double>(rows.size());

            half_cols[h] = fitted->cols;
            const std::size_t col_inter = detail::intersection_size(half_cols[h], U.cols);
            fnr += static_cast<double>(U.cols.size() - col_inter) /
                   static_cast<double>(U.cols.size());
            const std::size_t non_u = X.p() - U.cols.size();
            fpr += non_u == 0 ? 0.0
                              : static_cast<double>(half_cols[h].size() - col_inter) /
                                    static_cast<double>(non_u);
        }
        SplitRates rates;
        rates.obs_misclass = obs / 2.0;
        rates.feature_fnr = fnr / 2.0;
        rates.feature_fpr = fpr / 2.0;
        {
            const std::size_t inter = detail::intersection_size(half_cols[0], half_cols[1]);
            rates.feature_misclass =
                static_cast<double>(half_cols[0].size() + half_cols[1].size() - 2 * inter) /
                static_cast<double>(X.p());
        }
        rep.obs_misclass += rates.obs_misclass;
        rep.feature_fnr += rates.feature_fnr;
        rep.feature_fpr += rates.feature_fpr;
        rep.feature_misclass += rates.feature_misclass;
        rep.per_split.push_back(rates);
    }
    rep.obs_misclass /= static_cast<double>(splits);
    rep.feature_fnr /= static_cast<double>(splits);
    rep.feature_fpr /= static_cast<double>(splits);
    rep.feature_misclass /= static_cast<double>(splits);
    return rep;
}

}  // namespace scb
