#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "scbiclust/bicluster.hpp"
#include "scbiclust/error.hpp"

namespace scb {

inline const char* version_string() { return "0.1.0"; }

inline nlohmann::ordered_json layer_to_json(const Bicluster& bic) {
    nlohmann::ordered_json j;
    j["kind"] = bic.kind == BiclusterKind::mean ? "mean" : "variance";
    j["rows"] = bic.rows;
    j["cols"] = bic.cols;
    j["m"] = bic.m;
    j["ks_statistic"] = bic.ks_statistic;
    j["ks_p_value"] = bic.ks_p_value;
    j["weights"] = bic.weights.values;
    return j;
}

inline Bicluster layer_from_json(const nlohmann::json& j) {
    Bicluster bic;
    bic.kind = j.at("kind").get<std::string>() == "variance" ? BiclusterKind::variance
                                                             : BiclusterKind::mean;
    bic.rows = j.at("rows").get<std::vector<std::size_t>>();
    bic.cols = j.at("cols").get<std::vector<std::size_t>>();
    bic.m = j.at("m").get<std::size_t>();
    bic.ks_statistic = j.at("ks_statistic").get<double>();
    bic.ks_p_value = j.at("ks_p_value").get<double>();
    if (j.contains("weights"))
        bic.weights = WeightVector(j.at("weights").get<std::vector<double>>());
    return bic;
}

inline nlohmann::ordered_json sequence_to_json(const LayerSequence& seq) {
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& bic : seq.layers) layers.push_back(layer_to_json(bic));
    nlohmann::ordered_json j;
    j["layers"] = std::move(layers);
    j["stopped_reason"] =
        seq.stopped_reason == StopReason::ks_accept ? "ks_accept" : "max_layers";
    return j;
}

inline void write_json(const nlohmann::ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace scb
