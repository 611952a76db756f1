#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "scbiclust/error.hpp"
#include "scbiclust/kmeans.hpp"
#include "scbiclust/matrix.hpp"

namespace scb {

struct MergeRecord {
    std::size_t left;   // cluster id (leaves 0..n-1, merge k creates id n+k)
    std::size_t right;  // left < right
    double height;
};

struct Dendrogram {
    std::size_t n_leaves = 0;
    std::vector<MergeRecord> merges;  // n-1 records, heights non-decreasing
};

/// Agglomerative single linkage on the weighted squared Euclidean distance
/// sum_j w_j (X_ij - X_i'j)^2, built from the minimum spanning tree (Prim),
/// whose edges sorted ascending are exactly the single-linkage merge
/// heights. Distances are computed on the fly, so memory stays O(n).
inline Dendrogram single_linkage(const DataMatrix& X, const WeightVector& w) {
    const std::size_t n = X.n(), p = X.p();
    if (n < 2) throw InputError("single linkage needs at least 2 observations");
    if (w.size() != p) throw InputError("weight length does not match feature count");

    auto dist = [&](std::size_t a, std::size_t b) {
        const auto ra = X.row(a), rb = X.row(b);
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double d = ra[j] - rb[j];
            s += w[j] * d * d;
        }
        return s;
    };

    // Prim's algorithm from vertex 0; ties pick the lowest vertex index.
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, 0);
    in_tree[0] = true;
    for (std::size_t i = 1; i < n; ++i) best[i] = dist(0, i);

    struct Edge {
        std::size_t u, v;
        double weight;
    };
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (std::size_t added = 1; added < n; ++added) {
        std::size_t pick = n;
        double pick_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_tree[i] && best[i] < pick_d) {
                pick_d = best[i];
                pick = i;
            }
        }
        in_tree[pick] = true;
        edges.push_back({parent[pick], pick, pick_d});
        for (std::size_t i = 0; i < n; ++i) {
            if (in_tree[i]) continue;
            const double d = dist(pick, i);
            if (d < best[i]) {
                best[i] = d;
                parent[i] = pick;
            }
        }
    }

    std::stable_sort(edges.begin(), edges.end(),
                     [](const Edge& a, const Edge& b) { return a.weight < b.weight; });

    // Union-find over cluster ids; merge k produces id n + k.
    std::vector<std::size_t> cluster_id(n);
    std::iota(cluster_id.begin(), cluster_id.end(), std::size_t{0});
    std::vector<std::size_t> root(n);
    std::iota(root.begin(), root.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (root[x] != x) {
            root[x] = root[root[x]];
            x = root[x];
        }
        return x;
    };

    Dendrogram dendro;
    dendro.n_leaves = n;
    dendro.merges.reserve(n - 1);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::size_t ru = find(edges[k].u);
        const std::size_t rv = find(edges[k].v);
        std::size_t a = cluster_id[ru], b = cluster_id[rv];
        if (a > b) std::swap(a, b);
        dendro.merges.push_back({a, b, edges[k].weight});
        root[ru] = rv;
        cluster_id[rv] = n + k;
    }
    return dendro;
}

/// Splits the hierarchy into two clusters by removing the final merge.
/// Cluster 1 is the side containing observation 0. Singleton sides are
/// allowed; validity filtering happens downstream.
inline Partition cut_two(const Dendrogram& d) {
    const std::size_t n = d.n_leaves;
    if (n < 2 || d.merges.size() != n - 1) throw InputError("malformed dendrogram");

    // children[k] = the two cluster ids merged into id n+k.
    const auto& final_merge = d.merges.back();
    std::vector<std::size_t> members;
    std::vector<std::size_t> stack{final_merge.left};
    while (!stack.empty()) {
        const std::size_t id = stack.back();
        stack.pop_back();
        if (id < n) {
            members.push_back(id);
        } else {
            const auto& rec = d.merges[id - n];
            stack.push_back(rec.left);
            stack.push_back(rec.right);
        }
    }

    std::vector<std::uint8_t> labels(n, 2);
    for (std::size_t i : members) labels[i] = 1;
    if (labels[0] == 2)
        for (auto& lab : labels) lab = lab == 1 ? 2 : 1;
    return Partition::from_labels(std::move(labels));
}

}  // namespace scb
