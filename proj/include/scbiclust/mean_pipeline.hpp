#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "scbiclust/bicluster.hpp"
#include "scbiclust/hierarchical.hpp"
#include "scbiclust/kmeans.hpp"
#include "scbiclust/matrix.hpp"
#include "scbiclust/null.hpp"
#include "scbiclust/rng.hpp"

namespace scb {

namespace detail {

/// Mean-bicluster fit with an optional cache slot for the Beta null (the
/// Beta order statistics depend only on p, so sequences compute them once,
/// and only when some layer actually rejects). distance_matrix, when
/// given, supplies the matrix the hierarchical base measures distances on
/// (typically the data before column rescaling); weights and tests always
/// use the standardized X.
inline std::optional<Bicluster> fit_mean_primary(const DataMatrix& X, const BiclustConfig& cfg,
                                                 Rng& rng,
                                                 std::optional<NullOrderStats>* beta_null_cache,
                                                 const DataMatrix* distance_matrix = nullptr) {
    const std::size_t p = X.p();

    Partition part;
    WeightVector weights;
    if (cfg.base == BaseClusterer::kmeans) {
        SparseKmeansConfig km = cfg.km;
        km.weight_mode = WeightMode::sqrt;
        km.s = 0.0;  // s = sqrt(p)
        auto fit = sparse_two_means(X, km, rng);
        part = std::move(fit.partition);
        weights = std::move(fit.weights);
    } else {
        // Hierarchical base: cluster once with equal weights, then derive
        // the weights from the resulting partition. Standardization erases
        // the between-feature scale that single linkage needs to bridge
        // pure-noise features, so distances prefer the unscaled matrix.
        const DataMatrix& D = distance_matrix != nullptr ? *distance_matrix : X;
        if (D.n() != X.n()) throw InputError("distance matrix row count mismatch");
        const auto dendro = single_linkage(D, WeightVector::uniform(D.p()));
        part = cut_two(dendro);
        weights = sqrt_weights_from_bcss(bcss(X, part));
    }

    KsResult ks;
    NullOrderStats null_stats;
    if (cfg.null_method == NullMethod::permutation) {
        auto est = permutation_null_order_stats(X, part, cfg.null_replicates,
                                                rng.split(0x7065726dULL), WeightMode::sqrt);
        ks = ks_test_two_sample(weights.values, est.pooled, cfg.alpha);
        if (!ks.reject) return std::nullopt;
        null_stats = std::move(est.stats);
    } else {
        ks = ks_test_beta(weights, cfg.alpha);
        if (!ks.reject) return std::nullopt;
        // The order statistics only matter once the test rejects.
        if (beta_null_cache != nullptr) {
            if (!beta_null_cache->has_value())
                *beta_null_cache =
                    beta_null_order_stats(p, cfg.null_replicates, rng.split(0x62657461ULL));
            null_stats = **beta_null_cache;
        } else {
            null_stats = beta_null_order_stats(p, cfg.null_replicates, rng.split(0x62657461ULL));
        }
    }
    return assemble_bicluster(part, std::move(weights), ks, null_stats, BiclusterKind::mean);
}

}  // namespace detail

/// One round of the SC-Biclust procedure for mean biclusters: fit sparse
/// 2-means (or a single-linkage 2-cut), test the weights against the null,
/// and cut the features. Returns nothing when the KS test fails to reject,
/// i.e. no bicluster is found. X must be standardized. For the
/// hierarchical base, raw, when given, carries the same observations on
/// their original scales and is what the linkage distances are computed
/// on.
inline std::optional<Bicluster> fit_primary(const DataMatrix& X, const BiclustConfig& cfg,
                                            Rng& rng, const DataMatrix* raw = nullptr) {
    return detail::fit_mean_primary(X, cfg, rng, nullptr, raw);
}

/// Shifts the entries of the bicluster so that, for each of its features,
/// the mean over its observations equals the mean over the remaining
/// observations. Entries outside the bicluster are untouched.
inline DataMatrix residualize_mean(const DataMatrix& X, const Bicluster& U) {
    const std::size_t n = X.n();
    if (U.rows.empty() || U.rows.size() >= n) throw InputError("bicluster rows must be a proper subset");
    std::vector<bool> in_rows(n, false);
    for (std::size_t i : U.rows) in_rows[i] = true;

    DataMatrix out = X;
    const double n_in = static_cast<double>(U.rows.size());
    const double n_out = static_cast<double>(n - U.rows.size());
    for (std::size_t j : U.cols) {
        double sum_in = 0.0, sum_out = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            (in_rows[i] ? sum_in : sum_out) += X(i, j);
        const double shift = sum_out / n_out - sum_in / n_in;
        for (std::size_t i : U.rows) out(i, j) += shift;
    }
    return out;
}

/// Sequential extraction: fit, residualize, re-standardize, repeat until
/// the KS test accepts the null or max_layers is hit. The residual field
/// holds the (re-standardized) matrix state after the last extraction.
/// With the hierarchical base and a raw matrix supplied, an unscaled
/// residual is maintained in parallel for the linkage distances.
inline LayerSequence fit_sequence(const DataMatrix& X, const BiclustConfig& cfg, Rng& rng,
                                  const DataMatrix* raw = nullptr) {
    LayerSequence seq;
    seq.residual = X;
    std::optional<NullOrderStats> beta_null;
    std::optional<DataMatrix> raw_residual;
    if (raw != nullptr && cfg.base == BaseClusterer::hierarchical) raw_residual = *raw;

    seq.stopped_reason = StopReason::max_layers;
    for (int layer = 0; layer < cfg.max_layers; ++layer) {
        auto found = detail::fit_mean_primary(seq.residual, cfg, rng, &beta_null,
                                              raw_residual ? &*raw_residual : nullptr);
        if (!found) {
            seq.stopped_reason = StopReason::ks_accept;
            break;
        }
        seq.layers.push_back(std::move(*found));
        seq.residual = standardize(residualize_mean(seq.residual, seq.layers.back()));
        if (raw_residual) *raw_residual = residualize_mean(*raw_residual, seq.layers.back());
    }
    return seq;
}

}  // namespace scb
