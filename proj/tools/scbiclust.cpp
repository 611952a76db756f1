// Command-line front end: fit biclusters in CSV matrices, generate and
// benchmark the simulation scenarios, evaluate split-half reproducibility,
// and render heatmaps.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scbiclust/scbiclust.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--seed", opts.seed, "Root seed; all randomness derives from it");
    cmd->add_option("--threads", opts.threads,
                    "Worker thread cap (0 = SCB_THREADS env or hardware)");
}

struct FitOptions {
    std::string input, output;
    std::string kind = "mean";
    std::string base = "kmeans";
    std::string null_method = "auto";
    double alpha = 0.05;
    int max_layers = 10;
    std::size_t null_replicates = 1000;
    bool no_standardize = false;
    bool drop_constant = false;
    bool has_header = false;
};

scb::BiclustConfig make_config(const FitOptions& opt) {
    scb::BiclustConfig cfg;
    cfg.alpha = opt.alpha;
    cfg.max_layers = opt.max_layers;
    cfg.null_replicates = opt.null_replicates;

    if (opt.kind == "mean") {
        if (opt.base == "kmeans")
            cfg.base = scb::BaseClusterer::kmeans;
        else if (opt.base == "hier")
            cfg.base = scb::BaseClusterer::hierarchical;
        else
            throw scb::InputError("--base must be kmeans or hier");
        if (opt.null_method == "auto" || opt.null_method == "beta")
            cfg.null_method = scb::NullMethod::beta;
        else if (opt.null_method == "permutation")
            cfg.null_method = scb::NullMethod::permutation;
        else
            throw scb::InputError("--null for mean biclusters must be beta or permutation");
    } else if (opt.kind == "variance") {
        if (opt.base != "kmeans")
            throw scb::InputError("variance biclustering uses its own exchange clusterer; "
                                  "--base cannot be combined with --kind variance");
        if (opt.null_method == "auto" || opt.null_method == "bootstrap")
            cfg.null_method = scb::NullMethod::bootstrap;
        else if (opt.null_method == "chisq")
            cfg.null_method = scb::NullMethod::chisq;
        else
            throw scb::InputError("--null for variance biclusters must be bootstrap or chisq");
    } else {
        throw scb::InputError("--kind must be mean or variance");
    }
    return cfg;
}

nlohmann::ordered_json config_json(const FitOptions& opt) {
    nlohmann::ordered_json j;
    j["kind"] = opt.kind;
    j["base"] = opt.base;
    j["null"] = opt.null_method == "auto"
                    ? (opt.kind == "variance" ? "bootstrap" : "beta")
                    : opt.null_method;
    j["alpha"] = opt.alpha;
    j["max_layers"] = opt.max_layers;
    j["null_replicates"] = opt.null_replicates;
    j["standardize"] = !opt.no_standardize;
    j["drop_constant"] = opt.drop_constant;
    return j;
}

int run_fit(const FitOptions& opt, const CommonOptions& common) {
    const scb::BiclustConfig cfg = make_config(opt);
    const scb::DataMatrix X = scb::read_csv(opt.input, opt.has_header);

    std::vector<std::size_t> kept;
    scb::DataMatrix Z;
    if (opt.no_standardize) {
        Z = X;
    } else if (opt.drop_constant) {
        auto dropped = scb::standardize_drop_constant(X);
        Z = std::move(dropped.matrix);
        kept = std::move(dropped.kept_columns);
        if (kept.size() < X.p())
            std::cerr << "warning: dropped " << (X.p() - kept.size())
                      << " zero-variance feature(s)\n";
    } else {
        Z = scb::standardize(X);
    }

    scb::Rng rng(common.seed);
    const auto t0 = std::chrono::steady_clock::now();
    scb::LayerSequence seq = opt.kind == "variance"
                                 ? scb::fit_variance_sequence(Z, cfg, rng)
                                 : scb::fit_sequence(Z, cfg, rng, &X);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    // Map feature indices back to the original columns when some were
    // dropped.
    if (!kept.empty() && kept.size() < X.p()) {
        for (auto& layer : seq.layers)
            for (auto& c : layer.cols) c = kept[c];
    }

    nlohmann::ordered_json doc = scb::sequence_to_json(seq);
    nlohmann::ordered_json meta;
    meta["version"] = scb::version_string();
    meta["seed"] = common.seed;
    meta["n"] = X.n();
    meta["p"] = X.p();
    meta["config"] = config_json(opt);
    if (!kept.empty() && kept.size() < X.p()) meta["kept_columns"] = kept;
    meta["wall_ms"] = wall_ms;
    doc["metadata"] = std::move(meta);
    scb::write_json(doc, opt.output);

    std::cerr << "found " << seq.layers.size() << " layer(s)\n";
    return kExitOk;
}

struct SimulateOptions {
    int scenario = 1;
    std::string output;
    std::string truth_path;
};

int run_simulate(const SimulateOptions& opt, const CommonOptions& common) {
    const scb::Scenario scen = scb::scenario(opt.scenario);
    scb::Rng rng = scb::Rng(common.seed).stream(0x73696d00ULL, static_cast<std::uint64_t>(opt.scenario));
    const scb::DataMatrix X = scb::generate(scen, rng);
    scb::write_csv(X, opt.output);

    if (!opt.truth_path.empty()) {
        nlohmann::ordered_json truth;
        truth["scenario"] = scen.id;
        truth["n"] = scen.n;
        truth["p"] = scen.p;
        nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < scen.biclusters.size(); ++k) {
            const auto& b = scen.biclusters[k];
            nlohmann::ordered_json jb;
            jb["rows"] = {b.row_lo, b.row_hi};
            jb["cols"] = {b.col_lo, b.col_hi};
            jb["kind"] = b.kind == scb::BiclusterKind::mean ? "mean" : "variance";
            jb["primary"] = k == scen.primary_index;
            blocks.push_back(std::move(jb));
        }
        truth["biclusters"] = std::move(blocks);
        scb::write_json(truth, opt.truth_path);
    }
    return kExitOk;
}

struct BenchOptions {
    std::string scenarios = "1,2,3,4,5";
    std::size_t replicates = 20;
    std::string out_dir;
    double alpha = 0.05;
    std::size_t null_replicates = 1000;
    int max_layers = 10;
};

int run_bench_cmd(const BenchOptions& opt, const CommonOptions& common) {
    std::vector<int> ids;
    std::stringstream ss(opt.scenarios);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        try {
            ids.push_back(std::stoi(token));
        } catch (const std::exception&) {
            throw scb::InputError("bad scenario list: " + opt.scenarios);
        }
    }
    if (ids.empty()) throw scb::InputError("no scenarios given");
    for (int id : ids) scb::scenario(id);  // validate before any work

    scb::BiclustConfig cfg;
    cfg.alpha = opt.alpha;
    cfg.null_replicates = opt.null_replicates;
    cfg.max_layers = opt.max_layers;

    const auto result = scb::run_bench(ids, opt.replicates, cfg, common.seed);

    std::filesystem::create_directories(opt.out_dir);
    const auto dir = std::filesystem::path(opt.out_dir);
    scb::write_bench_csv(result, (dir / "results.csv").string());
    const std::string summary = scb::format_bench_summary(result);
    std::ofstream out(dir / "summary.txt");
    if (!out) throw scb::IoError("cannot write summary");
    out << summary;
    std::cout << summary;
    return kExitOk;
}

struct SplitEvalOptions {
    FitOptions fit;  // reuses kind/base/null/alpha/etc (max_layers unused)
    std::size_t splits = 10;
};

int run_split_eval(const SplitEvalOptions& opt, const CommonOptions& common) {
    const scb::BiclustConfig cfg = make_config(opt.fit);
    const scb::DataMatrix X = scb::read_csv(opt.fit.input, opt.fit.has_header);

    const bool variance = opt.fit.kind == "variance";
    scb::PrimaryFitter fitter = [cfg, variance](const scb::DataMatrix& M, scb::Rng& rng) {
        const scb::DataMatrix Z = scb::standardize(M);
        return variance ? scb::fit_variance_primary(Z, cfg, rng)
                        : scb::fit_primary(Z, cfg, rng, &M);
    };

    const scb::ReproReport rep =
        scb::reproducibility(X, fitter, opt.splits, scb::Rng(common.seed));

    nlohmann::ordered_json j;
    j["obs_misclass"] = rep.obs_misclass;
    j["feature_fnr"] = rep.feature_fnr;
    j["feature_fpr"] = rep.feature_fpr;
    j["feature_misclass"] = rep.feature_misclass;
    j["splits"] = rep.splits;
    j["none_fits"] = rep.none_fits;
    nlohmann::ordered_json meta;
    meta["version"] = scb::version_string();
    meta["seed"] = common.seed;
    meta["config"] = config_json(opt.fit);
    j["metadata"] = std::move(meta);
    scb::write_json(j, opt.fit.output);
    return kExitOk;
}

struct HeatmapOptions {
    std::string input, output;
    std::string result_path;
    std::size_t cell = 1;
    bool has_header = false;
};

int run_heatmap(const HeatmapOptions& opt) {
    const scb::DataMatrix X = scb::read_csv(opt.input, opt.has_header);
    std::vector<scb::Bicluster> layers;
    if (!opt.result_path.empty()) {
        const auto doc = scb::load_json(opt.result_path);
        if (!doc.contains("layers")) throw scb::InputError("result JSON has no layers array");
        for (const auto& layer : doc.at("layers")) layers.push_back(scb::layer_from_json(layer));
    }
    scb::write_heatmap(X, opt.output, layers, opt.cell);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SC-Biclust: mean and variance biclustering via sparse clustering"};
    app.require_subcommand(1);

    CommonOptions common;

    FitOptions fit_opt;
    auto* fit = app.add_subcommand("fit", "Extract biclusters from a CSV matrix");
    fit->add_option("--in", fit_opt.input, "Input CSV matrix")->required();
    fit->add_option("--out", fit_opt.output, "Output result JSON")->required();
    fit->add_option("--kind", fit_opt.kind, "Bicluster kind: mean|variance");
    fit->add_option("--base", fit_opt.base, "Base clusterer for mean fits: kmeans|hier");
    fit->add_option("--null", fit_opt.null_method, "Null model: auto|beta|permutation|chisq");
    fit->add_option("--alpha", fit_opt.alpha, "KS test level");
    fit->add_option("--max-layers", fit_opt.max_layers, "Maximum layers to extract");
    fit->add_option("--null-replicates", fit_opt.null_replicates,
                    "Replicates for simulated nulls");
    fit->add_flag("--no-standardize", fit_opt.no_standardize,
                  "Assume the input is already standardized");
    fit->add_flag("--drop-constant", fit_opt.drop_constant,
                  "Drop zero-variance features instead of failing");
    fit->add_flag("--has-header", fit_opt.has_header, "First CSV line is a header");
    add_common(fit, common);

    SimulateOptions sim_opt;
    auto* simulate = app.add_subcommand("simulate", "Generate a benchmark scenario matrix");
    simulate->add_option("--scenario", sim_opt.scenario, "Scenario id (1-5)")->required();
    simulate->add_option("--out", sim_opt.output, "Output CSV")->required();
    simulate->add_option("--truth", sim_opt.truth_path, "Also write the truth JSON here");
    add_common(simulate, common);

    BenchOptions bench_opt;
    auto* bench = app.add_subcommand("bench", "Run the simulation benchmark");
    bench->add_option("--scenarios", bench_opt.scenarios, "Comma-separated scenario ids");
    bench->add_option("--replicates", bench_opt.replicates, "Replicates per scenario");
    bench->add_option("--out", bench_opt.out_dir, "Output directory")->required();
    bench->add_option("--alpha", bench_opt.alpha, "KS test level");
    bench->add_option("--null-replicates", bench_opt.null_replicates,
                      "Replicates for simulated nulls");
    bench->add_option("--max-layers", bench_opt.max_layers, "Maximum layers per fit");
    add_common(bench, common);

    SplitEvalOptions split_opt;
    auto* split = app.add_subcommand("split-eval", "Split-half reproducibility of the primary fit");
    split->add_option("--in", split_opt.fit.input, "Input CSV matrix")->required();
    split->add_option("--out", split_opt.fit.output, "Output report JSON")->required();
    split->add_option("--splits", split_opt.splits, "Number of random halvings");
    split->add_option("--kind", split_opt.fit.kind, "Bicluster kind: mean|variance");
    split->add_option("--base", split_opt.fit.base, "Base clusterer: kmeans|hier");
    split->add_option("--null", split_opt.fit.null_method, "Null model: auto|beta|permutation|chisq");
    split->add_option("--alpha", split_opt.fit.alpha, "KS test level");
    split->add_option("--null-replicates", split_opt.fit.null_replicates,
                      "Replicates for simulated nulls");
    split->add_flag("--has-header", split_opt.fit.has_header, "First CSV line is a header");
    add_common(split, common);

    HeatmapOptions heat_opt;
    auto* heatmap = app.add_subcommand("heatmap", "Render a matrix (and fit result) as a PPM");
    heatmap->add_option("--in", heat_opt.input, "Input CSV matrix")->required();
    heatmap->add_option("--out", heat_opt.output, "Output PPM image")->required();
    heatmap->add_option("--result", heat_opt.result_path, "Fit result JSON to outline");
    heatmap->add_option("--cell", heat_opt.cell, "Pixels per matrix cell");
    heatmap->add_flag("--has-header", heat_opt.has_header, "First CSV line is a header");
    add_common(heatmap, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (common.threads > 0) scb::set_max_threads(common.threads);

    try {
        if (fit->parsed()) return run_fit(fit_opt, common);
        if (simulate->parsed()) return run_simulate(sim_opt, common);
        if (bench->parsed()) return run_bench_cmd(bench_opt, common);
        if (split->parsed()) return run_split_eval(split_opt, common);
        if (heatmap->parsed()) return run_heatmap(heat_opt);
    } catch (const scb::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const scb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitInput;
}
