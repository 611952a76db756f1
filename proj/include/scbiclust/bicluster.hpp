#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "scbiclust/error.hpp"
#include "scbiclust/kmeans.hpp"
#include "scbiclust/matrix.hpp"
#include "scbiclust/null.hpp"

namespace scb {

enum class BiclusterKind { mean, variance };

/// A discovered submatrix: the observations of the smaller fitted cluster
/// and the m features with the largest weights, plus the test statistics
/// that admitted it.
struct Bicluster {
    std::vector<std::size_t> rows;  // sorted observation indices
    std::vector<std::size_t> cols;  // sorted feature indices
    BiclusterKind kind = BiclusterKind::mean;
    WeightVector weights;  // full length-p weight vector of the fit
    double ks_statistic = 0.0;
    double ks_p_value = 1.0;
    std::size_t m = 0;  // |cols|
};

enum class BaseClusterer { kmeans, hierarchical };

struct BiclustConfig {
    BaseClusterer base = BaseClusterer::kmeans;
    NullMethod null_method = NullMethod::beta;
    double alpha = 0.05;
    int max_layers = 10;
    SparseKmeansConfig km;
    std::size_t null_replicates = 1000;   // draws for the beta/permutation/chisq nulls
    std::size_t null_fit_replicates = 50;  // noise refits for the variance bootstrap null
};

enum class StopReason { ks_accept, max_layers };

struct LayerSequence {
    std::vector<Bicluster> layers;
    DataMatrix residual;  // matrix state after the last extraction
    StopReason stopped_reason = StopReason::ks_accept;
};

/// Feature-count cut: m = argmax over j in 1..p-1 of
///   (w_(p-j+1) - w0_(p-j+1)) - (w_(p-j) - w0_(p-j)),
/// i.e. the largest drop, relative to the null line, between consecutive
/// sorted weights counted from the top. Ties pick the smallest j.
inline std::size_t select_feature_count(std::span<const double> w_sorted,
                                        std::span<const double> null_expected) {
    const std::size_t p = w_sorted.size();
    if (null_expected.size() != p) throw InputError("null order statistics length mismatch");
    if (p < 2) throw InputError("feature cut needs p >= 2");
    std::size_t best_j = 1;
    double best_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= p - 1; ++j) {
        const double upper = w_sorted[p - j] - null_expected[p - j];
        const double lower = w_sorted[p - j - 1] - null_expected[p - j - 1];
        const double gap = upper - lower;
        if (gap > best_gap) {
            best_gap = gap;
            best_j = j;
        }
    }
    return best_j;
}

/// Indices of the m largest weights; equal weights prefer the lower
/// feature index. Returned sorted ascending.
inline std::vector<std::size_t> top_m_features(const WeightVector& w, std::size_t m) {
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (w[a] != w[b]) return w[a] > w[b];
        return a < b;
    });
    order.resize(m);
    std::sort(order.begin(), order.end());
    return order;
}

namespace detail {

inline WeightVector sqrt_weights_from_bcss(const std::vector<double>& b) {
    double total = 0.0;
    for (double v : b) total += v;
    if (total <= 0.0) throw AllZeroBcss();
    std::vector<double> w(b.size());
    const double inv = 1.0 / std::sqrt(total);
    for (std::size_t j = 0; j < b.size(); ++j) w[j] = std::sqrt(b[j]) * inv;
    return WeightVector(std::move(w));
}

inline Bicluster assemble_bicluster(const Partition& part, WeightVector weights,
                                    const KsResult& ks, const NullOrderStats& null_stats,
                                    BiclusterKind kind) {
    std::vector<double> sorted = weights.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = select_feature_count(sorted, null_stats.expected);

    Bicluster bic;
    bic.rows = part.smaller_cluster_rows();
    bic.cols = top_m_features(weights, m);
    bic.kind = kind;
    bic.weights = std::move(weights);
    bic.ks_statistic = ks.statistic;
    bic.ks_p_value = ks.p_value;
    bic.m = m;
    return bic;
}

}  // namespace detail

}  // namespace scb
