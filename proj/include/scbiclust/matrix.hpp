#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scbiclust/error.hpp"

namespace scb {

/// Dense n-by-p matrix of observations (rows) by features (columns),
/// stored row-major. Immutable in pipeline use; mutation happens only
/// while building a matrix.
class DataMatrix {
public:
    DataMatrix() = default;

    DataMatrix(std::size_t n, std::size_t p, double fill = 0.0)
        : n_(n), p_(p), values_(n * p, fill) {
        if (n == 0 || p == 0) throw InputError("matrix dimensions must be positive");
    }

    std::size_t n() const { return n_; }
    std::size_t p() const { return p_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * p_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * p_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * p_, p_};
    }
    std::span<double> row(std::size_t i) { return {values_.data() + i * p_, p_}; }

    const std::vector<double>& values() const { return values_; }

    const std::vector<std::string>& feature_names() const { return feature_names_; }
    void set_feature_names(std::vector<std::string> names) {
        if (!names.empty() && names.size() != p_)
            throw InputError("feature name count does not match column count");
        feature_names_ = std::move(names);
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    std::size_t n_ = 0;
    std::size_t p_ = 0;
    std::vector<double> values_;
    std::vector<std::string> feature_names_;
};

/// Binary split of the observations into clusters labeled 1 and 2.
struct Partition {
    std::vector<std::uint8_t> labels;  // entries are 1 or 2
    std::size_t n1 = 0;
    std::size_t n2 = 0;

    static Partition from_labels(std::vector<std::uint8_t> labels) {
        Partition part;
        part.labels = std::move(labels);
        for (std::uint8_t lab : part.labels) {
            if (lab == 1)
                ++part.n1;
            else if (lab == 2)
                ++part.n2;
            else
                throw InputError("partition labels must be 1 or 2");
        }
        if (part.n1 == 0 || part.n2 == 0)
            throw InputError("partition must have two nonempty clusters");
        return part;
    }

    std::size_t n() const { return labels.size(); }

    std::vector<std::size_t> cluster_rows(int which) const {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == which) rows.push_back(i);
        return rows;
    }

    /// Observation indices of the smaller cluster; when sizes tie, the
    /// cluster containing observation 0 wins.
    std::vector<std::size_t> smaller_cluster_rows() const {
        int which;
        if (n1 < n2)
            which = 1;
        else if (n2 < n1)
            which = 2;
        else
            which = labels[0];
        return cluster_rows(which);
    }
};

namespace detail {

inline void column_mean_sd(const DataMatrix& X, std::size_t j, double& mean, double& sd) {
    const std::size_t n = X.n();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += X(i, j);
    mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = X(i, j) - mean;
        ss += d * d;
    }
    sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

}  // namespace detail

/// Rescales every column to sample mean 0 and sample standard deviation 1
/// (divisor n-1). Throws ConstantFeature for zero-variance columns.
inline DataMatrix standardize(const DataMatrix& X) {
    if (X.n() < 2) throw InputError("standardize requires at least 2 observations");
    DataMatrix out(X.n(), X.p());
    out.set_feature_names(X.feature_names());
    for (std::size_t j = 0; j < X.p(); ++j) {
        double mean, sd;
        detail::column_mean_sd(X, j, mean, sd);
        if (sd == 0.0) throw ConstantFeature(j);
        for (std::size_t i = 0; i < X.n(); ++i) out(i, j) = (X(i, j) - mean) / sd;
    }
    return out;
}

struct StandardizedDrop {
    DataMatrix matrix;
    std::vector<std::size_t> kept_columns;  // original index of each kept column
};

/// Like standardize() but removes zero-variance columns and reports the
/// surviving column indices so reports can be mapped back.
inline StandardizedDrop standardize_drop_constant(const DataMatrix& X) {
    if (X.n() < 2) throw InputError("standardize requires at least 2 observations");
    std::vector<std::size_t> kept;
    std::vector<double> means, sds;
    for (std::size_t j = 0; j < X.p(); ++j) {
        double mean, sd;
        detail::column_mean_sd(X, j, mean, sd);
        if (sd == 0.0) continue;
        kept.push_back(j);
        means.push_back(mean);
        sds.push_back(sd);
    }
    if (kept.empty()) throw ConstantFeature(0);
    DataMatrix out(X.n(), kept.size());
    if (!X.feature_names().empty()) {
        std::vector<std::string> names;
        names.reserve(kept.size());
        for (std::size_t j : kept) names.push_back(X.feature_names()[j]);
        out.set_feature_names(std::move(names));
    }
    for (std::size_t jj = 0; jj < kept.size(); ++jj)
        for (std::size_t i = 0; i < X.n(); ++i)
            out(i, jj) = (X(i, kept[jj]) - means[jj]) / sds[jj];
    return {std::move(out), std::move(kept)};
}

/// Per-feature between-cluster sum of squares for a 2-cluster partition,
/// in the centroid normalization b_j = sum_k n_k (mean_kj - mean_j)^2
/// = (n1 n2 / n) (mean_1j - mean_2j)^2. The all-pairs distance form of the
/// clustering criterion equals exactly twice this; the centroid form is the
/// one whose null distribution on standardized data is chi-square(1).
inline std::vector<double> bcss(const DataMatrix& X, const Partition& part) {
    if (part.n() != X.n()) throw InputError("partition size does not match matrix");
    const std::size_t n = X.n(), p = X.p();
    std::vector<double> sum1(p, 0.0), sum2(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = X.row(i);
        auto& dst = part.labels[i] == 1 ? sum1 : sum2;
        for (std::size_t j = 0; j < p; ++j) dst[j] += r[j];
    }
    const double n1 = static_cast<double>(part.n1);
    const double n2 = static_cast<double>(part.n2);
    const double factor = n1 * n2 / static_cast<double>(n);
    std::vector<double> b(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double diff = sum1[j] / n1 - sum2[j] / n2;
        b[j] = factor * diff * diff;
    }
    return b;
}

}  // namespace scb
