// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rcsnet/error.hpp"
#include "rcsnet/model.hpp"

namespace rcsnet {

namespace {

const std::set<std::string> kKnownKeys = {"version",     "input_size", "stage_channels", "osa_depths",
                                          "neck_depths", "num_classes", "anchors",       "head_strides",
                                          "bn_eps"};

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(ErrorCode::Config, key + ": expected a number");
    }
}

std::vector<int> int_list(const YAML::Node& node, const std::string& key) {
    require(node.IsSequence(), ErrorCode::Config, key + ": expected a sequence");
    std::vector<int> out;
    for (const auto& item : node) out.push_back(scalar<int>(item, key));
    return out;
}

} // namespace

ModelConfig parse_model_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        fail(ErrorCode::Config, std::string("malformed config: ") + e.what());
    }
    require(root.IsMap(), ErrorCode::Config, "config must be a mapping");
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        require(kKnownKeys.count(key) == 1, ErrorCode::Config, key + ": unknown key");
    }
    require(static_cast<bool>(root["version"]), ErrorCode::Config, "version: missing");
    const int version = scalar<int>(root["version"], "version");
    require(version == ModelConfig::kFormatVersion, ErrorCode::Config,
            "version: unsupported config version " + std::to_string(version));

    ModelConfig cfg;
    if (root["input_size"]) cfg.input_size = scalar<int>(root["input_size"], "input_size");
    if (root["stage_channels"]) cfg.stage_channels = int_list(root["stage_channels"], "stage_channels");
    if (root["osa_depths"]) cfg.osa_depths = int_list(root["osa_depths"], "osa_depths");
    if (root["neck_depths"]) cfg.neck_depths = int_list(root["neck_depths"], "neck_depths");
    if (root["num_classes"]) cfg.num_classes = scalar<int>(root["num_classes"], "num_classes");
    if (root["head_strides"]) cfg.head_strides = int_list(root["head_strides"], "head_strides");
    if (root["bn_eps"]) cfg.bn_eps = scalar<float>(root["bn_eps"], "bn_eps");
    if (root["anchors"]) {
        const auto& node = root["anchors"];
        require(node.IsSequence(), ErrorCode::Config, "anchors: expected a sequence of [w, h] pairs");
        std::vector<AnchorBox> boxes;
        for (const auto& pair : node) {
            require(pair.IsSequence() && pair.size() == 2, ErrorCode::Config, "anchors: each entry must be [w, h]");
            const double w = scalar<double>(pair[0], "anchors");
            const double h = scalar<double>(pair[1], "anchors");
            require(w > 0.0 && h > 0.0, ErrorCode::Config, "anchors: sides must be positive");
            boxes.push_back({w, h});
        }
        cfg.anchors = AnchorSet(std::move(boxes));
    }
    cfg.validate();
    return cfg;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model_config(buf.str());
}

std::string to_yaml(const ModelConfig& cfg) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "version" << YAML::Value << ModelConfig::kFormatVersion;
    out << YAML::Key << "input_size" << YAML::Value << cfg.input_size;
    out << YAML::Key << "stage_channels" << YAML::Value << YAML::Flow << cfg.stage_channels;
    out << YAML::Key << "osa_depths" << YAML::Value << YAML::Flow << cfg.osa_depths;
    out << YAML::Key << "neck_depths" << YAML::Value << YAML::Flow << cfg.neck_depths;
    out << YAML::Key << "num_classes" << YAML::Value << cfg.num_classes;
    out << YAML::Key << "anchors" << YAML::Value << YAML::BeginSeq;
    for (const auto& a : cfg.anchors.boxes()) out << YAML::Flow << YAML::BeginSeq << a.w << a.h << YAML::EndSeq;
    out << YAML::EndSeq;
    out << YAML::Key << "head_strides" << YAML::Value << YAML::Flow << cfg.head_strides;
    out << YAML::Key << "bn_eps" << YAML::Value << cfg.bn_eps;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string config_hash(const ModelConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : to_yaml(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace rcsnet
