#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "scbiclust/error.hpp"
#include "scbiclust/matrix.hpp"
#include "scbiclust/rng.hpp"

namespace scb {

/// Nonnegative per-feature weights with unit Euclidean norm.
struct WeightVector {
    std::vector<double> values;

    WeightVector() = default;
    explicit WeightVector(std::vector<double> v) : values(std::move(v)) {}

    static WeightVector uniform(std::size_t p) {
        return WeightVector(std::vector<double>(p, 1.0 / std::sqrt(static_cast<double>(p))));
    }

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t j) const { return values[j]; }

    double l1_norm() const {
        double s = 0.0;
        for (double v : values) s += std::abs(v);
        return s;
    }
    double l2_norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }
};

enum class WeightMode { linear, sqrt };

struct SparseKmeansConfig {
    double s = 0.0;  // L1 bound on the weights; 0 means "use sqrt(p)"
    int n_starts = 20;
    int max_iter = 15;
    double tol = 1e-4;
    WeightMode weight_mode = WeightMode::sqrt;
    int max_sweeps = 100;

    double resolve_s(std::size_t p) const {
        return s > 0.0 ? s : std::sqrt(static_cast<double>(p));
    }
};

struct SparseKmeansResult {
    Partition partition;
    WeightVector weights;
    std::vector<double> bcss;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_history;  // criterion value per outer iteration
};

/// S(x, delta) = sign(x) (|x| - delta)_+
inline double soft_threshold(double x, double delta) {
    const double shrunk = std::abs(x) - delta;
    if (shrunk <= 0.0) return 0.0;
    return x < 0.0 ? -shrunk : shrunk;
}

/// Solves the weight subproblem: w = S(b, delta) / ||S(b, delta)||_2 with
/// delta = 0 when ||b/||b||_2||_1 <= s, otherwise delta chosen by bisection
/// so that ||w||_1 = s (to 1e-8, at most 60 steps).
inline WeightVector update_weights(std::span<const double> b, double s) {
    const std::size_t p = b.size();
    const double sqrt_p = std::sqrt(static_cast<double>(p));
    if (s < 1.0 || s > sqrt_p * (1.0 + 1e-12))
        throw InputError("weight bound s must lie in [1, sqrt(p)]");

    double l2 = 0.0, max_b = 0.0;
    for (double v : b) {
        l2 += v * v;
        max_b = std::max(max_b, v);
    }
    if (max_b <= 0.0) throw AllZeroBcss();
    l2 = std::sqrt(l2);

    std::vector<double> w(p);
    double l1 = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        w[j] = b[j] / l2;
        l1 += std::abs(w[j]);
    }
    if (l1 <= s) return WeightVector(std::move(w));

    auto thresholded_norms = [&](double delta, std::vector<double>& v) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            v[j] = soft_threshold(b[j], delta);
            sum += v[j];
            sumsq += v[j] * v[j];
        }
        return std::pair<double, double>{sum, std::sqrt(sumsq)};
    };

    double lo = 0.0, hi = max_b;
    std::vector<double> v(p);
    for (int step = 0; step < 60; ++step) {
        const double mid = 0.5 * (lo + hi);
        const auto [sum, norm] = thresholded_norms(mid, v);
        if (norm == 0.0) {
            hi = mid;
            continue;
        }
        const double l1n = sum / norm;
        if (std::abs(l1n - s) <= 1e-8) {
            for (auto& x : v) x /= norm;
            return WeightVector(std::move(v));
        }
        if (l1n > s)
            lo = mid;
        else
            hi = mid;
    }
    const auto [sum, norm] = thresholded_norms(lo, v);
    (void)sum;
    for (auto& x : v) x /= norm;
    return WeightVector(std::move(v));
}

namespace detail {

inline DataMatrix scale_columns_by_sqrt_weights(const DataMatrix& X, const WeightVector& w) {
    DataMatrix Y(X.n(), X.p());
    std::vector<double> scale(X.p());
    for (std::size_t j = 0; j < X.p(); ++j) scale[j] = std::sqrt(std::max(w[j], 0.0));
    for (std::size_t i = 0; i < X.n(); ++i)
        for (std::size_t j = 0; j < X.p(); ++j) Y(i, j) = X(i, j) * scale[j];
    return Y;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

/// Total between-cluster sum of squares of Y under the partition
/// (centroid form); equals the weighted criterion sum_j w_j b_j(X) when
/// Y is the sqrt(w)-scaled matrix.
inline double total_bcss(const DataMatrix& Y, const Partition& part) {
    const auto b = bcss(Y, part);
    return std::accumulate(b.begin(), b.end(), 0.0);
}

/// Lloyd-style alternation for 2 clusters from explicit starting
/// centroids, followed by Hartigan-style single-point exchanges (a move
/// commits when it strictly lowers the within-cluster sum of squares,
/// sizes included). Plain nearest-centroid sweeps alone leave too many
/// local optima on weak-signal data; the exchange pass matches the
/// behavior of the stock k-means implementations this procedure is run
/// with in practice. Both phases only ever decrease the WSS, so a
/// warm-started call cannot end worse than its starting partition. An
/// emptied cluster is repaired by moving the point farthest from its
/// centroid into it.
inline Partition lloyd_two_means(const DataMatrix& Y, std::vector<double> c1,
                                 std::vector<double> c2, int max_sweeps) {
    const std::size_t n = Y.n(), p = Y.p();
    std::vector<std::uint8_t> labels(n, 1);
    std::size_t count1 = 0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool changed = false;
        count1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d1 = squared_distance(Y.row(i), c1);
            const double d2 = squared_distance(Y.row(i), c2);
            const std::uint8_t lab = d2 < d1 ? 2 : 1;
            if (lab != labels[i]) {
                labels[i] = lab;
                changed = true;
            }
            if (lab == 1) ++count1;
        }
        if (count1 == 0 || count1 == n) {
            // Repair: move the point farthest from its centroid to the
            // empty side.
            const auto& c = count1 == 0 ? c2 : c1;
            std::size_t worst = 0;
            double worst_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = squared_distance(Y.row(i), c);
                if (d > worst_d) {
                    worst_d = d;
                    worst = i;
                }
            }
            labels[worst] = count1 == 0 ? 1 : 2;
            count1 = count1 == 0 ? 1 : count1 - 1;
            changed = true;
        }
        if (!changed) break;
        std::fill(c1.begin(), c1.end(), 0.0);
        std::fill(c2.begin(), c2.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& c = labels[i] == 1 ? c1 : c2;
            const auto r = Y.row(i);
            for (std::size_t j = 0; j < p; ++j) c[j] += r[j];
        }
        const double inv1 = 1.0 / static_cast<double>(count1);
        const double inv2 = 1.0 / static_cast<double>(n - count1);
        for (std::size_t j = 0; j < p; ++j) {
            c1[j] *= inv1;
            c2[j] *= inv2;
        }
    }

    // Exchange phase. Moving x from cluster a (size na) to b changes the
    // WSS by nb/(nb+1) ||x - mu_b||^2 - na/(na-1) ||x - mu_a||^2.
    std::vector<double> s1(p, 0.0), s2(p, 0.0);
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = labels[i] == 1 ? s1 : s2;
        if (labels[i] == 1) ++n1;
        const auto r = Y.row(i);
        for (std::size_t j = 0; j < p; ++j) s[j] += r[j];
    }
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const bool in1 = labels[i] == 1;
            const std::size_t na = in1 ? n1 : n - n1;
            const std::size_t nb = n - na;
            if (na < 2) continue;
            const auto& sa = in1 ? s1 : s2;
            const auto& sb = in1 ? s2 : s1;
            const auto r = Y.row(i);
            double da = 0.0, db = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double va = r[j] - sa[j] / static_cast<double>(na);
                const double vb = r[j] - sb[j] / static_cast<double>(nb);
                da += va * va;
                db += vb * vb;
            }
            const double delta = static_cast<double>(nb) / (nb + 1) * db -
                                 static_cast<double>(na) / (na - 1) * da;
            if (delta < 0.0) {
                for (std::size_t j = 0; j < p; ++j) {
                    (in1 ? s1 : s2)[j] -= r[j];
                    (in1 ? s2 : s1)[j] += r[j];
                }
                n1 += in1 ? -1 : 1;
                labels[i] = in1 ? 2 : 1;
                moved = true;
            }
        }
        if (!moved) break;
    }
    return Partition::from_labels(std::move(labels));
}

inline std::vector<double> centroid_of(const DataMatrix& Y, const std::vector<std::size_t>& rows) {
    std::vector<double> c(Y.p(), 0.0);
    for (std::size_t i : rows) {
        const auto r = Y.row(i);
        for (std::size_t j = 0; j < Y.p(); ++j) c[j] += r[j];
    }
    for (auto& v : c) v /= static_cast<double>(rows.size());
    return c;
}

}  // namespace detail

/// 2-means under the weighted dissimilarity sum_j w_j (X_ij - X_i'j)^2,
/// run as plain 2-means on the column-scaled matrix Y_ij = X_ij sqrt(w_j).
/// The best of n_starts random initializations (two distinct rows drawn via
/// rng) is returned, judged by the weighted between-cluster sum of squares;
/// ties keep the earliest start. A warm-start partition, when given, is
/// refined first and competes with the random starts.
inline Partition weighted_two_means(const DataMatrix& X, const WeightVector& w, Rng& rng,
                                    int n_starts, int max_sweeps = 100,
                                    const Partition* warm_start = nullptr) {
    if (w.size() != X.p()) throw InputError("weight length does not match feature count");
    const DataMatrix Y = detail::scale_columns_by_sqrt_weights(X, w);
    const std::size_t n = Y.n();

    bool any_distinct = false;
    for (std::size_t i = 1; i < n && !any_distinct; ++i)
        any_distinct = detail::squared_distance(Y.row(i), Y.row(0)) > 0.0;
    if (!any_distinct) throw DegenerateData();

    Partition best;
    double best_obj = -std::numeric_limits<double>::infinity();
    auto consider = [&](Partition cand) {
        const double obj = detail::total_bcss(Y, cand);
        if (obj > best_obj) {
            best_obj = obj;
            best = std::move(cand);
        }
    };

    if (warm_start != nullptr) {
        auto c1 = detail::centroid_of(Y, warm_start->cluster_rows(1));
        auto c2 = detail::centroid_of(Y, warm_start->cluster_rows(2));
        consider(detail::lloyd_two_means(Y, std::move(c1), std::move(c2), max_sweeps));
    }

    for (int start = 0; start < n_starts; ++start) {
        const std::size_t i0 = rng.uniform_index(n);
        std::size_t i1 = i0;
        for (int attempt = 0; attempt < 64 && i1 == i0; ++attempt) {
            const std::size_t cand = rng.uniform_index(n);
            if (cand != i0 && detail::squared_distance(Y.row(cand), Y.row(i0)) > 0.0) i1 = cand;
        }
        if (i1 == i0) {
            for (std::size_t i = 0; i < n; ++i)
                if (detail::squared_distance(Y.row(i), Y.row(i0)) > 0.0) {
                    i1 = i;
                    break;
                }
        }
        std::vector<double> c1(Y.row(i0).begin(), Y.row(i0).end());
        std::vector<double> c2(Y.row(i1).begin(), Y.row(i1).end());
        consider(detail::lloyd_two_means(Y, std::move(c1), std::move(c2), max_sweeps));
    }
    return best;
}

/// Iterative sparse 2-means: alternates the weighted 2-means step with the
/// weight update until the relative L1 change of the weights drops below
/// cfg.tol or cfg.max_iter is reached. weight_mode picks the update:
///   linear: w = S(b, delta)/||S(b, delta)||_2 with the L1 bound s;
///   sqrt:   the same update applied to sqrt(b), which at s = sqrt(p)
///           reduces to the closed form w_j = sqrt(b_j) / sqrt(sum_k b_k).
/// After the first iteration the previous partition seeds one candidate of
/// the 2-means step, which makes the criterion non-decreasing.
inline SparseKmeansResult sparse_two_means(const DataMatrix& X, const SparseKmeansConfig& cfg,
                                           Rng& rng) {
    const std::size_t p = X.p();
    const double s = cfg.resolve_s(p);

    SparseKmeansResult result;
    WeightVector w = WeightVector::uniform(p);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        const Partition* warm = iter > 1 ? &result.partition : nullptr;
        result.partition =
            weighted_two_means(X, w, rng, cfg.n_starts, cfg.max_sweeps, warm);
        result.bcss = bcss(X, result.partition);

        WeightVector next;
        if (cfg.weight_mode == WeightMode::sqrt) {
            std::vector<double> root(p);
            for (std::size_t j = 0; j < p; ++j) root[j] = std::sqrt(result.bcss[j]);
            next = update_weights(root, s);
        } else {
            next = update_weights(result.bcss, s);
        }

        double objective = 0.0;
        for (std::size_t j = 0; j < p; ++j)
            objective += next[j] * (cfg.weight_mode == WeightMode::sqrt
                                        ? std::sqrt(result.bcss[j])
                                        : result.bcss[j]);
        result.objective_history.push_back(objective);

        double change = 0.0, base = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            change += std::abs(next[j] - w[j]);
            base += std::abs(w[j]);
        }
        w = std::move(next);
        result.iterations = iter;
        if (change / base < cfg.tol) {
            result.converged = true;
            break;
        }
    }
    result.weights = std::move(w);
    return result;
}

}  // namespace scb
