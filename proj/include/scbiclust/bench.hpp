#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scbiclust/bicluster.hpp"
#include "scbiclust/error.hpp"
#include "scbiclust/matrix.hpp"
#include "scbiclust/mean_pipeline.hpp"
#include "scbiclust/parallel.hpp"
#include "scbiclust/scoring.hpp"
#include "scbiclust/sim.hpp"
#include "scbiclust/variance.hpp"

namespace scb {

/// One CSV row: a single extracted layer (or a layer-0 marker when a
/// replicate found nothing).
struct BenchRow {
    int scenario = 0;
    int replicate = 0;
    int layer = 0;  // 1-based; 0 marks an empty sequence
    std::size_t n_rows = 0, n_cols = 0;
    double ks_stat = 0.0, ks_p = 1.0;
    AccuracyReport acc;
    double wall_ms = 0.0;  // whole-sequence wall time, repeated per layer
};

struct ScenarioSummary {
    int scenario = 0;
    std::size_t replicates = 0;
    std::size_t valid = 0;  // replicates whose first layer is a valid bicluster
    double mean_obs_misclass = 0.0;  // over valid first layers
    double mean_feature_fnr = 0.0;
    double mean_feature_fpr = 0.0;
    std::map<int, std::size_t> layer_histogram;  // layers found -> count
    std::map<std::string, std::size_t> layer1_identification;
    std::map<std::string, std::size_t> layer2_identification;
    double mean_wall_ms = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<ScenarioSummary> summaries;
};

/// Pipeline matched to each scenario: 1-3 mean/k-means, 4 mean with the
/// single-linkage base, 5 variance.
inline BiclustConfig bench_config_for(int scenario_id, const BiclustConfig& base) {
    BiclustConfig cfg = base;
    cfg.base = scenario_id == 4 ? BaseClusterer::hierarchical : BaseClusterer::kmeans;
    if (scenario_id == 5)
        cfg.null_method = base.null_method == NullMethod::chisq ? NullMethod::chisq
                                                                : NullMethod::bootstrap;
    else if (cfg.null_method != NullMethod::permutation)
        cfg.null_method = NullMethod::beta;
    return cfg;
}

inline LayerSequence run_scenario_fit(const Scenario& s, const DataMatrix& X,
                                      const BiclustConfig& cfg, Rng& rng) {
    const DataMatrix Z = standardize(X);
    if (s.id == 5) return fit_variance_sequence(Z, cfg, rng);
    return fit_sequence(Z, cfg, rng, &X);
}

inline BenchResult run_bench(const std::vector<int>& scenario_ids, std::size_t replicates,
                             const BiclustConfig& base_cfg, std::uint64_t seed) {
    BenchResult result;
    Rng root(seed);

    for (int sid : scenario_ids) {
        const Scenario scen = scenario(sid);
        const BiclustConfig cfg = bench_config_for(sid, base_cfg);
        if (sid == 5 && cfg.null_method == NullMethod::bootstrap) {
            // Warm the shared noise-refit null before the replicate loop so
            // it is generated with full parallelism.
            SparseKmeansConfig km = cfg.km;
            km.s = 0.0;
            variance_noise_null(scen.n, scen.p, km, cfg.null_fit_replicates, seed);
        }

        std::vector<std::vector<BenchRow>> replicate_rows(replicates);
        parallel_for(replicates, [&](std::size_t r) {
            Rng gen_rng = root.stream(0x67656e00ULL + static_cast<std::uint64_t>(sid), r);
            Rng fit_rng = root.stream(0x66697400ULL + static_cast<std::uint64_t>(sid), r);
            const DataMatrix X = generate(scen, gen_rng);

            const auto t0 = std::chrono::steady_clock::now();
            const LayerSequence seq = run_scenario_fit(scen, X, cfg, fit_rng);
            const double wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();

            auto& rows = replicate_rows[r];
            if (seq.layers.empty()) {
                BenchRow row;
                row.scenario = sid;
                row.replicate = static_cast<int>(r);
                row.layer = 0;
                row.wall_ms = wall_ms;
                rows.push_back(row);
            }
            for (std::size_t l = 0; l < seq.layers.size(); ++l) {
                const Bicluster& bic = seq.layers[l];
                BenchRow row;
                row.scenario = sid;
                row.replicate = static_cast<int>(r);
                row.layer = static_cast<int>(l + 1);
                row.n_rows = bic.rows.size();
                row.n_cols = bic.cols.size();
                row.ks_stat = bic.ks_statistic;
                row.ks_p = bic.ks_p_value;
                row.acc = score(bic, scen);
                row.wall_ms = wall_ms;
                rows.push_back(row);
            }
        });

        ScenarioSummary summary;
        summary.scenario = sid;
        summary.replicates = replicates;
        std::size_t valid_first = 0;
        for (std::size_t r = 0; r < replicates; ++r) {
            int layers = 0;
            for (const auto& row : replicate_rows[r]) {
                result.rows.push_back(row);
                if (row.layer > 0) ++layers;
                if (row.layer == 1) {
                    summary.layer1_identification[to_string(row.acc.identification)]++;
                    if (row.acc.valid) {
                        ++valid_first;
                        summary.mean_obs_misclass += row.acc.obs_misclass;
                        summary.mean_feature_fnr += row.acc.feature_fnr;
                        summary.mean_feature_fpr += row.acc.feature_fpr;
                    }
                }
                if (row.layer == 2)
                    summary.layer2_identification[to_string(row.acc.identification)]++;
            }
            summary.layer_histogram[layers]++;
            summary.mean_wall_ms += replicate_rows[r].front().wall_ms;
        }
        summary.valid = valid_first;
        if (valid_first > 0) {
            summary.mean_obs_misclass /= static_cast<double>(valid_first);
            summary.mean_feature_fnr /= static_cast<double>(valid_first);
            summary.mean_feature_fpr /= static_cast<double>(valid_first);
        }
        summary.mean_wall_ms /= static_cast<double>(replicates);
        result.summaries.push_back(std::move(summary));
    }
    return result;
}

inline void write_bench_csv(const BenchResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "id,replicate,layer,n_rows,n_cols,ks_stat,ks_p,obs_misclass,feat_fnr,feat_fpr,"
           "entry_fnr,entry_fpr,identification,valid,wall_ms\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    for (const auto& row : result.rows) {
        out << row.scenario << ',' << row.replicate << ',' << row.layer << ',' << row.n_rows
            << ',' << row.n_cols << ',' << num(row.ks_stat) << ',' << num(row.ks_p) << ','
            << num(row.acc.obs_misclass) << ',' << num(row.acc.feature_fnr) << ','
            << num(row.acc.feature_fpr) << ',' << num(row.acc.entry_fnr) << ','
            << num(row.acc.entry_fpr) << ',' << to_string(row.acc.identification) << ','
            << (row.acc.valid ? 1 : 0) << ',' << num(row.wall_ms) << '\n';
    }
}

inline std::string format_bench_summary(const BenchResult& result) {
    std::ostringstream out;
    for (const auto& s : result.summaries) {
        out << "scenario " << s.scenario << " (" << s.replicates << " replicates)\n";
        out << "  valid first layers: " << s.valid << "/" << s.replicates << "\n";
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "  layer-1 means (valid only): obs_misclass=%.4f feature_fnr=%.4f "
                      "feature_fpr=%.4f\n",
                      s.mean_obs_misclass, s.mean_feature_fnr, s.mean_feature_fpr);
        out << buf;
        out << "  layers found:";
        for (const auto& [layers, count] : s.layer_histogram)
            out << " " << layers << "x" << count;
        out << "\n  layer-1 identification:";
        for (const auto& [label, count] : s.layer1_identification)
            out << " " << label << "=" << count;
        if (!s.layer2_identification.empty()) {
            out << "\n  layer-2 identification:";
            for (const auto& [label, count] : s.layer2_identification)
                out << " " << label << "=" << count;
        }
        std::snprintf(buf, sizeof(buf), "\n  mean fit wall time: %.1f ms\n", s.mean_wall_ms);
        out << buf;
    }
    return out.str();
}

}  // namespace scb
