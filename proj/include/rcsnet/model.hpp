// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rcsnet/rcs.hpp"

namespace rcsnet {

/// Anchor prior in input-image pixels.
struct AnchorBox {
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
    friend bool operator==(const AnchorBox&, const AnchorBox&) = default;
};

/// Anchor priors sorted by area ascending.
class AnchorSet {
public:
    AnchorSet() = default;
    /// Sorts by area; every side must be positive.
    explicit AnchorSet(std::vector<AnchorBox> boxes);

    /// (87,90), (127,139), (154,171), (191,240).
    static AnchorSet published();

    const std::vector<AnchorBox>& boxes() const { return boxes_; }
    std::size_t size() const { return boxes_.size(); }
    const AnchorBox& operator[](std::size_t i) const { return boxes_[i]; }

    friend bool operator==(const AnchorSet&, const AnchorSet&) = default;

private:
    std::vector<AnchorBox> boxes_;
};

struct ModelConfig {
    static constexpr int kFormatVersion = 1;

    int input_size = 640;
    /// Stem width followed by the four backbone stage widths.
    std::vector<int> stage_channels{16, 32, 64, 128, 256};
    /// RCS units per backbone RCS-OSA stage.
    std::vector<int> osa_depths{1, 1, 2, 2};
    /// RCS units in the two neck RCS-OSA modules (stride 16, then stride 32).
    std::vector<int> neck_depths{1, 1};
    int num_classes = 1;
    AnchorSet anchors = AnchorSet::published();
    std::vector<int> head_strides{16, 32};
    float bn_eps = 1e-5f;

    static constexpr int kAnchorsPerHead = 2;
    int head_channels() const { return kAnchorsPerHead * (5 + num_classes); }
    /// Anchors of head `i` (0: stride 16, 1: stride 32); smaller anchors go to the finer grid.
    std::array<AnchorBox, 2> head_anchors(int head) const;

    /// Throws a config error naming the offending field.
    void validate() const;

    /// Desk-scale reference configuration.
    static ModelConfig nano();
};

ModelConfig parse_model_config(const std::string& yaml_text);
ModelConfig load_model_config(const std::filesystem::path& path);
std::string to_yaml(const ModelConfig& cfg);
/// FNV-1a over the canonical YAML rendering, as 16 hex digits.
std::string config_hash(const ModelConfig& cfg);

// Graph node payloads.
struct InputOp {};
struct RepVGGOp {
    RepVGGBlock block;
};
/// Plain conv + bias + activation.
struct ConvOp {
    ConvParams conv;
};
struct OsaOp {
    RcsOsa osa;
};
struct MaxPoolOp {
    int k = 2;
    int stride = 2;
};
struct UpsampleOp {
    int factor = 2;
};
struct ConcatOp {};
/// 1x1 prediction conv with implicit add (before) and multiply (after) vectors; both are
/// folded into the conv on deployment.
struct HeadOp {
    ConvParams pred;
    std::optional<std::vector<float>> implicit_add;
    std::optional<std::vector<float>> implicit_mul;
};

using NodeOp = std::variant<InputOp, RepVGGOp, ConvOp, OsaOp, MaxPoolOp, UpsampleOp, ConcatOp, HeadOp>;

struct Node {
    std::string name;
    std::vector<int> inputs;
    NodeOp op;
};

const char* node_kind(const NodeOp& op);

/// Named parameter array; vectors use rank 1.
struct ParamRef {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::span<float> values;
};

/// A DAG evaluated in insertion order; node 0 is the input.
class Graph {
public:
    Graph();

    int add(std::string name, NodeOp op, std::vector<int> inputs);
    void set_outputs(std::vector<int> outputs) { outputs_ = std::move(outputs); }

    const std::vector<Node>& nodes() const { return nodes_; }
    std::vector<Node>& nodes() { return nodes_; }
    const std::vector<int>& outputs() const { return outputs_; }

    std::vector<Tensor> forward(const Tensor& x) const;
    /// Static output shapes for every node.
    std::vector<Shape> infer_shapes(Shape input) const;

    std::size_t param_count() const;
    /// Every stored parameter array in serialization order.
    std::vector<ParamRef> params();

    /// Nodes with no consumers.
    std::vector<int> sinks() const;

private:
    std::vector<Node> nodes_;
    std::vector<int> outputs_;
};

struct HeadOutputs {
    Tensor stride16;
    Tensor stride32;
};

class Model {
public:
    Model(ModelConfig cfg, Graph graph, BlockMode mode);

    const ModelConfig& config() const { return cfg_; }
    const Graph& graph() const { return graph_; }
    Graph& graph() { return graph_; }
    BlockMode mode() const { return mode_; }
    std::size_t param_count() const { return graph_.param_count(); }

    /// Raw head tensors (n, 2*(5+nc), s/16, s/16) and (n, 2*(5+nc), s/32, s/32).
    HeadOutputs forward(const Tensor& x) const;

private:
    ModelConfig cfg_;
    Graph graph_;
    BlockMode mode_;
};

/// Deterministic RCS-YOLO graph: stem RepVGG + maxpool, four (stride-2 RepVGG, RCS-OSA)
/// stages, a two-level PANet neck, and two RepVGG + implicit-head prediction branches.
Model build_model(const ModelConfig& cfg, std::uint64_t seed);
Model reparameterize_model(const Model& m);
/// Zeroes every conv kernel and bias and resets batch-norm to identity statistics; implicit
/// vectors become add 0 / multiply 1. Used to get bias-only head patterns.
void zero_weights(Model& m);

/// Number of nodes still holding multi-branch RepVGG blocks (including those inside RCS-OSA).
std::size_t count_multibranch_blocks(const Model& m);

void save_weights(const Model& m, const std::filesystem::path& path);
Model load_weights(const ModelConfig& cfg, const std::filesystem::path& path);

struct ManifestEntry {
    std::string name;
    std::vector<std::uint32_t> dims;
};

struct WeightFileInfo {
    std::uint32_t version = 0;
    BlockMode mode = BlockMode::Train;
    std::vector<ManifestEntry> manifest;
};

/// Reads only the header and manifest.
WeightFileInfo read_weight_manifest(const std::filesystem::path& path);

} // namespace rcsnet
