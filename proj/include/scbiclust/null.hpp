#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "scbiclust/kmeans.hpp"
#include "scbiclust/matrix.hpp"
#include "scbiclust/parallel.hpp"
#include "scbiclust/rng.hpp"
#include "scbiclust/special.hpp"

namespace scb {

enum class NullMethod { beta, permutation, chisq, bootstrap };

/// Expected order statistics of the feature weights under the
/// no-bicluster null, sorted non-decreasing.
struct NullOrderStats {
    std::vector<double> expected;
    NullMethod method = NullMethod::beta;
    std::size_t replicates = 0;
};

/// Order statistics plus the raw simulated weights pooled over all
/// replicates, which two-sample KS tests compare against.
struct NullEstimate {
    NullOrderStats stats;
    std::vector<double> pooled;
};

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
};

namespace detail {

// Runs gen(replicate_rng, row) for every replicate on its own derived RNG
// stream, each filling a length-p weight vector that is then sorted.
// Averaging happens in replicate order, so results do not depend on the
// thread count.
template <class Gen>
inline NullEstimate simulate_null(std::size_t p, std::size_t replicates, const Rng& rng,
                                  NullMethod method, bool keep_pooled, Gen&& gen) {
    std::vector<double> buffer(replicates * p);
    parallel_for(replicates, [&](std::size_t r) {
        Rng rep_rng = rng.stream(0x6e756c6cULL, r);  // "null"
        std::span<double> row(buffer.data() + r * p, p);
        gen(rep_rng, row);
        std::sort(row.begin(), row.end());
    });

    NullEstimate est;
    est.stats.method = method;
    est.stats.replicates = replicates;
    est.stats.expected.assign(p, 0.0);
    for (std::size_t r = 0; r < replicates; ++r)
        for (std::size_t j = 0; j < p; ++j) est.stats.expected[j] += buffer[r * p + j];
    for (auto& v : est.stats.expected) v /= static_cast<double>(replicates);
    if (keep_pooled) est.pooled = std::move(buffer);
    return est;
}

}  // namespace detail

/// Monte Carlo estimate of E(w_(j)) when w_j = sqrt(b_j)/sqrt(sum b) with
/// b_j iid chi-square(1). Each marginal w_j^2 is Beta(1/2, (p-1)/2); drawing
/// the whole vector jointly respects the unit-sphere coupling between the
/// order statistics, unlike independent Beta draws.
inline NullOrderStats beta_null_order_stats(std::size_t p, std::size_t replicates, const Rng& rng) {
    auto est = detail::simulate_null(
        p, replicates, rng, NullMethod::beta, /*keep_pooled=*/false,
        [p](Rng& r, std::span<double> w) {
            double total = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double z = r.normal();
                w[j] = z * z;
                total += w[j];
            }
            const double inv = 1.0 / std::sqrt(total);
            for (std::size_t j = 0; j < p; ++j) w[j] = std::sqrt(w[j]) * inv;
        });
    return std::move(est.stats);
}

/// Permutation estimate of the null weight order statistics: each round
/// permutes every column of X independently (breaking the row structure
/// while keeping marginals), recomputes the per-feature BCSS against the
/// fixed fitted partition and forms weights as in the fit.
inline NullEstimate permutation_null_order_stats(const DataMatrix& X, const Partition& part,
                                                 std::size_t rounds, const Rng& rng,
                                                 WeightMode mode = WeightMode::sqrt) {
    const std::size_t n = X.n(), p = X.p();
    return detail::simulate_null(
        p, rounds, rng, NullMethod::permutation, /*keep_pooled=*/true,
        [&X, &part, n, p, mode](Rng& r, std::span<double> w) {
            DataMatrix perm = X;
            for (std::size_t j = 0; j < p; ++j) {
                for (std::size_t i = n - 1; i > 0; --i) {
                    const std::size_t k = r.uniform_index(i + 1);
                    std::swap(perm(i, j), perm(k, j));
                }
            }
            const auto b = bcss(perm, part);
            double total = 0.0;
            if (mode == WeightMode::sqrt) {
                for (double v : b) total += v;
                if (total <= 0.0) {
                    const double u = 1.0 / std::sqrt(static_cast<double>(p));
                    for (std::size_t j = 0; j < p; ++j) w[j] = u;
                    return;
                }
                const double inv = 1.0 / std::sqrt(total);
                for (std::size_t j = 0; j < p; ++j) w[j] = std::sqrt(b[j]) * inv;
            } else {
                for (double v : b) total += v * v;
                if (total <= 0.0) {
                    const double u = 1.0 / std::sqrt(static_cast<double>(p));
                    for (std::size_t j = 0; j < p; ++j) w[j] = u;
                    return;
                }
                const double inv = 1.0 / std::sqrt(total);
                for (std::size_t j = 0; j < p; ++j) w[j] = b[j] * inv;
            }
        });
}

/// Null weight order statistics for variance biclustering: per replicate
/// draws V1_j = chisq(n1)/n1 and V2_j = chisq(n2)/n2, sets
/// b_j = log(|V1_j - V2_j| + 1) and normalizes w = b/||b||_2.
inline NullEstimate chisq_variance_null_order_stats(std::size_t n1, std::size_t n2, std::size_t p,
                                                    std::size_t replicates, const Rng& rng) {
    if (n1 < 2 || n2 < 2) throw InputError("chi-square null needs cluster sizes >= 2");
    return detail::simulate_null(
        p, replicates, rng, NullMethod::chisq, /*keep_pooled=*/true,
        [n1, n2, p](Rng& r, std::span<double> w) {
            double sumsq = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double v1 = r.chi_squared(n1) / static_cast<double>(n1);
                const double v2 = r.chi_squared(n2) / static_cast<double>(n2);
                w[j] = std::log(std::abs(v1 - v2) + 1.0);
                sumsq += w[j] * w[j];
            }
            const double inv = 1.0 / std::sqrt(sumsq);
            for (std::size_t j = 0; j < p; ++j) w[j] *= inv;
        });
}

/// One-sample Kolmogorov-Smirnov test that the squared weights follow
/// Beta(1/2, (p-1)/2), with the asymptotic p-value.
inline KsResult ks_test_beta(const WeightVector& w, double alpha = 0.05) {
    const std::size_t p = w.size();
    if (p < 2) throw InputError("KS test needs at least 2 weights");
    std::vector<double> x(p);
    for (std::size_t j = 0; j < p; ++j) x[j] = w[j] * w[j];
    std::sort(x.begin(), x.end());

    const double a = 0.5;
    const double b = 0.5 * (static_cast<double>(p) - 1.0);
    const double inv_p = 1.0 / static_cast<double>(p);
    double d = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        const double f = beta_cdf(std::min(x[i], 1.0), a, b);
        d = std::max(d, static_cast<double>(i + 1) * inv_p - f);
        d = std::max(d, f - static_cast<double>(i) * inv_p);
    }
    KsResult res;
    res.statistic = d;
    res.p_value = ks_asymptotic_p(d, static_cast<double>(p));
    res.alpha = alpha;
    res.reject = res.p_value < alpha;
    return res;
}

/// Two-sample Kolmogorov-Smirnov test (sup distance between the empirical
/// CDFs over the pooled points, asymptotic p-value with effective sample
/// size n1 n2 / (n1 + n2)).
inline KsResult ks_test_two_sample(std::span<const double> sample,
                                   std::span<const double> reference, double alpha = 0.05) {
    std::vector<double> a(sample.begin(), sample.end());
    std::vector<double> b(reference.begin(), reference.end());
    if (a.empty() || b.empty()) throw InputError("KS test needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double fa = 0.0, fb = 0.0, d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double va = a[ia];
        const double vb = b[ib];
        if (va <= vb) fa = static_cast<double>(++ia) / na;
        if (vb <= va) fb = static_cast<double>(++ib) / nb;
        d = std::max(d, std::abs(fa - fb));
    }
    KsResult res;
    res.statistic = d;
    res.p_value = ks_asymptotic_p(d, na * nb / (na + nb));
    res.alpha = alpha;
    res.reject = res.p_value < alpha;
    return res;
}

}  // namespace scb
