// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "rcsnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rcsnet/error.hpp"

namespace rcsnet {

AnchorSet::AnchorSet(std::vector<AnchorBox> boxes) : boxes_(std::move(boxes)) {
    for (const auto& b : boxes_)
        require(b.w > 0.0 && b.h > 0.0, ErrorCode::Input, "anchor sides must be positive");
    std::stable_sort(boxes_.begin(), boxes_.end(),
                     [](const AnchorBox& a, const AnchorBox& b) { return a.area() < b.area(); });
}

AnchorSet AnchorSet::published() { return AnchorSet({{87, 90}, {127, 139}, {154, 171}, {191, 240}}); }

std::array<AnchorBox, 2> ModelConfig::head_anchors(int head) const {
    require(head == 0 || head == 1, ErrorCode::Precondition, "head index must be 0 or 1");
    require(anchors.size() == 4, ErrorCode::Config, "anchors: expected exactly 4 pairs");
    const std::size_t base = static_cast<std::size_t>(head) * 2;
    return {anchors[base], anchors[base + 1]};
}

void ModelConfig::validate() const {
    require(input_size >= 32 && input_size % 32 == 0, ErrorCode::Config,
            "input_size: must be a positive multiple of 32, got " + std::to_string(input_size));
    require(stage_channels.size() == 5, ErrorCode::Config,
            "stage_channels: expected 5 entries (stem + 4 stages), got " + std::to_string(stage_channels.size()));
    for (int c : stage_channels)
        require(c >= 2 && c % 2 == 0, ErrorCode::Config,
                "stage_channels: every width must be even and >= 2, got " + std::to_string(c));
    require(osa_depths.size() == 4, ErrorCode::Config,
            "osa_depths: expected 4 entries, got " + std::to_string(osa_depths.size()));
    for (int n : osa_depths) require(n >= 1, ErrorCode::Config, "osa_depths: every depth must be >= 1");
    require(neck_depths.size() == 2, ErrorCode::Config,
            "neck_depths: expected 2 entries, got " + std::to_string(neck_depths.size()));
    for (int n : neck_depths) require(n >= 1, ErrorCode::Config, "neck_depths: every depth must be >= 1");
    require(num_classes >= 1, ErrorCode::Config, "num_classes: must be >= 1");
    require(anchors.size() == 4, ErrorCode::Config,
            "anchors: expected exactly 4 pairs, got " + std::to_string(anchors.size()));
    require(head_strides == std::vector<int>{16, 32}, ErrorCode::Config, "head_strides: must be [16, 32]");
    require(bn_eps > 0.0f, ErrorCode::Config, "bn_eps: must be positive");
}

ModelConfig ModelConfig::nano() { return ModelConfig{}; }

const char* node_kind(const NodeOp& op) {
    struct Visitor {
        const char* operator()(const InputOp&) const { return "input"; }
        const char* operator()(const RepVGGOp&) const { return "repvgg"; }
        const char* operator()(const ConvOp&) const { return "conv"; }
        const char* operator()(const OsaOp&) const { return "rcs_osa"; }
        const char* operator()(const MaxPoolOp&) const { return "maxpool"; }
        const char* operator()(const UpsampleOp&) const { return "upsample"; }
        const char* operator()(const ConcatOp&) const { return "concat"; }
        const char* operator()(const HeadOp&) const { return "head"; }
    };
    return std::visit(Visitor{}, op);
}

Graph::Graph() { nodes_.push_back(Node{"input", {}, InputOp{}}); }

int Graph::add(std::string name, NodeOp op, std::vector<int> inputs) {
    require(!std::holds_alternative<InputOp>(op), ErrorCode::Config, "graph already has an input node");
    const int id = static_cast<int>(nodes_.size());
    for (int in : inputs)
        require(in >= 0 && in < id, ErrorCode::Config, "node '" + name + "' references a later or missing node");
    nodes_.push_back(Node{std::move(name), std::move(inputs), std::move(op)});
    return id;
}

namespace {

Tensor apply_head(const HeadOp& head, const Tensor& x) {
    if (!head.implicit_add) return conv2d(x, head.pred);
    Tensor shifted = x;
    const auto& add = *head.implicit_add;
    require(static_cast<int>(add.size()) == x.c(), ErrorCode::Shape, "implicit add width mismatch");
    const std::size_t plane = x.shape().plane();
    for (int n = 0; n < x.n(); ++n)
        for (int c = 0; c < x.c(); ++c) {
            float* p = shifted.plane(n, c);
            for (std::size_t i = 0; i < plane; ++i) p[i] += add[c];
        }
    Tensor out = conv2d(shifted, head.pred);
    const auto& mul = *head.implicit_mul;
    for (int n = 0; n < out.n(); ++n)
        for (int c = 0; c < out.c(); ++c) {
            float* p = out.plane(n, c);
            for (std::size_t i = 0; i < out.shape().plane(); ++i) p[i] *= mul[c];
        }
    return out;
}

int conv_dim(int in, int k, int stride, int pad) { return (in + 2 * pad - k) / stride + 1; }

} // namespace

namespace {

Tensor eval_node(const Node& node, std::span<const Tensor* const> inputs) {
    const Tensor& in = *inputs.front();
    Tensor out;
    if (const auto* rep = std::get_if<RepVGGOp>(&node.op)) {
        out = rep->block.forward(in);
        activation_inplace(out);
    } else if (const auto* conv = std::get_if<ConvOp>(&node.op)) {
        out = conv2d(in, conv->conv);
        activation_inplace(out);
    } else if (const auto* osa = std::get_if<OsaOp>(&node.op)) {
        out = rcs_osa_forward(in, osa->osa);
    } else if (const auto* pool = std::get_if<MaxPoolOp>(&node.op)) {
        out = maxpool2d(in, pool->k, pool->stride);
    } else if (const auto* up = std::get_if<UpsampleOp>(&node.op)) {
        out = upsample_nearest(in, up->factor);
    } else if (std::holds_alternative<ConcatOp>(node.op)) {
        out = concat_channels(inputs);
    } else if (const auto* head = std::get_if<HeadOp>(&node.op)) {
        out = apply_head(*head, in);
    }
    return out;
}

std::vector<const Tensor*> gather_inputs(const Node& node, const std::vector<Tensor>& values) {
    std::vector<const Tensor*> parts;
    for (int src : node.inputs) parts.push_back(&values[static_cast<std::size_t>(src)]);
    return parts;
}

} // namespace

std::vector<Tensor> Graph::forward(const Tensor& x) const {
    std::vector<Tensor> values(nodes_.size());
    // Release intermediate tensors once their last consumer has run.
    std::vector<std::size_t> last_use(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (int in : nodes_[i].inputs) last_use[static_cast<std::size_t>(in)] = i;
    for (int out : outputs_) last_use[static_cast<std::size_t>(out)] = nodes_.size();

    values[0] = x;
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const Node& node = nodes_[i];
        values[i] = eval_node(node, gather_inputs(node, values));
        for (int src : node.inputs)
            if (last_use[static_cast<std::size_t>(src)] == i) values[static_cast<std::size_t>(src)] = Tensor();
    }
    std::vector<Tensor> result;
    for (int out : outputs_) result.push_back(values[static_cast<std::size_t>(out)]);
    return result;
}

std::vector<Shape> Graph::infer_shapes(Shape input) const {
    std::vector<Shape> shapes(nodes_.size());
    shapes[0] = input;
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const Node& node = nodes_[i];
        const Shape in = shapes[static_cast<std::size_t>(node.inputs.at(0))];
        Shape out = in;
        auto conv_shape = [&](const ConvParams& p) {
            require(in.c == p.c_in(), ErrorCode::Shape, "node '" + node.name + "' channel mismatch");
            return Shape{in.n, p.c_out(), conv_dim(in.h, p.k(), p.stride, p.padding),
                         conv_dim(in.w, p.k(), p.stride, p.padding)};
        };
        if (const auto* rep = std::get_if<RepVGGOp>(&node.op)) {
            const auto& b = rep->block;
            require(in.c == b.c_in(), ErrorCode::Shape, "node '" + node.name + "' channel mismatch");
            out = Shape{in.n, b.c_out(), conv_dim(in.h, 3, b.stride(), 1), conv_dim(in.w, 3, b.stride(), 1)};
        } else if (const auto* conv = std::get_if<ConvOp>(&node.op)) {
            out = conv_shape(conv->conv);
        } else if (const auto* osa = std::get_if<OsaOp>(&node.op)) {
            require(in.c == osa->osa.channels(), ErrorCode::Shape, "node '" + node.name + "' channel mismatch");
        } else if (const auto* pool = std::get_if<MaxPoolOp>(&node.op)) {
            out.h = (in.h - pool->k) / pool->stride + 1;
            out.w = (in.w - pool->k) / pool->stride + 1;
        } else if (const auto* up = std::get_if<UpsampleOp>(&node.op)) {
            out.h = in.h * up->factor;
            out.w = in.w * up->factor;
        } else if (std::holds_alternative<ConcatOp>(node.op)) {
            out.c = 0;
            for (int src : node.inputs) {
                const Shape& s = shapes[static_cast<std::size_t>(src)];
                require(s.h == in.h && s.w == in.w, ErrorCode::Shape, "node '" + node.name + "' spatial mismatch");
                out.c += s.c;
            }
        } else if (const auto* head = std::get_if<HeadOp>(&node.op)) {
            out = conv_shape(head->pred);
        }
        require(out.valid(), ErrorCode::Shape, "node '" + node.name + "' has an empty output");
        shapes[i] = out;
    }
    return shapes;
}

std::vector<int> Graph::sinks() const {
    std::vector<bool> consumed(nodes_.size(), false);
    for (const auto& n : nodes_)
        for (int in : n.inputs) consumed[static_cast<std::size_t>(in)] = true;
    std::vector<int> result;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (!consumed[i]) result.push_back(static_cast<int>(i));
    return result;
}

namespace {

std::uint32_t u32(int v) { return static_cast<std::uint32_t>(v); }

void push_vector(std::vector<ParamRef>& out, const std::string& name, std::vector<float>& v) {
    out.push_back(ParamRef{name, {u32(static_cast<int>(v.size()))}, v});
}

void push_conv(std::vector<ParamRef>& out, const std::string& prefix, ConvParams& p) {
    out.push_back(ParamRef{prefix + ".weight", {u32(p.c_out()), u32(p.c_in()), u32(p.k()), u32(p.k())},
                           p.kernel.data()});
    push_vector(out, prefix + ".bias", p.bias);
}

void push_bn(std::vector<ParamRef>& out, const std::string& prefix, BNParams& b) {
    push_vector(out, prefix + ".gamma", b.gamma);
    push_vector(out, prefix + ".beta", b.beta);
    push_vector(out, prefix + ".mean", b.mean);
    push_vector(out, prefix + ".var", b.var);
}

void push_block(std::vector<ParamRef>& out, const std::string& prefix, RepVGGBlock& blk) {
    if (blk.mode() == BlockMode::Deployed) {
        push_conv(out, prefix + ".fused", blk.fused_mut());
        return;
    }
    push_conv(out, prefix + ".dense", blk.dense_mut().conv);
    push_bn(out, prefix + ".dense.bn", blk.dense_mut().bn);
    push_conv(out, prefix + ".pointwise", blk.pointwise_mut().conv);
    push_bn(out, prefix + ".pointwise.bn", blk.pointwise_mut().bn);
    if (blk.identity_mut()) push_bn(out, prefix + ".identity.bn", *blk.identity_mut());
}

} // namespace

std::vector<ParamRef> Graph::params() {
    std::vector<ParamRef> out;
    for (auto& node : nodes_) {
        if (auto* rep = std::get_if<RepVGGOp>(&node.op)) {
            push_block(out, node.name, rep->block);
        } else if (auto* conv = std::get_if<ConvOp>(&node.op)) {
            push_conv(out, node.name, conv->conv);
        } else if (auto* osa = std::get_if<OsaOp>(&node.op)) {
            for (std::size_t u = 0; u < osa->osa.units.size(); ++u)
                push_block(out, node.name + ".unit" + std::to_string(u), osa->osa.units[u].block);
            push_conv(out, node.name + ".aggregate", osa->osa.aggregate);
        } else if (auto* head = std::get_if<HeadOp>(&node.op)) {
            if (head->implicit_add) push_vector(out, node.name + ".implicit_a", *head->implicit_add);
            push_conv(out, node.name + ".pred", head->pred);
            if (head->implicit_mul) push_vector(out, node.name + ".implicit_m", *head->implicit_mul);
        }
    }
    return out;
}

std::size_t Graph::param_count() const {
    std::size_t total = 0;
    for (const auto& node : nodes_) {
        if (const auto* rep = std::get_if<RepVGGOp>(&node.op)) {
            total += rep->block.param_count();
        } else if (const auto* conv = std::get_if<ConvOp>(&node.op)) {
            total += conv->conv.param_count();
        } else if (const auto* osa = std::get_if<OsaOp>(&node.op)) {
            total += osa->osa.param_count();
        } else if (const auto* head = std::get_if<HeadOp>(&node.op)) {
            total += head->pred.param_count();
            if (head->implicit_add) total += head->implicit_add->size();
            if (head->implicit_mul) total += head->implicit_mul->size();
        }
    }
    return total;
}

Model::Model(ModelConfig cfg, Graph graph, BlockMode mode)
    : cfg_(std::move(cfg)), graph_(std::move(graph)), mode_(mode) {
    cfg_.validate();
    require(graph_.outputs().size() == 2, ErrorCode::Config, "model graph must have exactly two heads");
}

HeadOutputs Model::forward(const Tensor& x) const {
    require(x.c() == 3 && x.h() == cfg_.input_size && x.w() == cfg_.input_size, ErrorCode::Shape,
            "model expects (n, 3, " + std::to_string(cfg_.input_size) + ", " + std::to_string(cfg_.input_size) +
                "), got " + to_string(x.shape()));
    auto outs = graph_.forward(x);
    return HeadOutputs{std::move(outs[0]), std::move(outs[1])};
}

namespace {

class Initializer {
public:
    Initializer(std::uint64_t seed, float eps) : rng_(seed), eps_(eps) {}

    ConvParams conv(int c_out, int c_in, int k, int stride) {
        ConvParams p = make_conv(c_out, c_in, k, stride);
        const float s = 1.0f / std::sqrt(static_cast<float>(c_in * k * k));
        rng_.fill(p.kernel, -s, s);
        rng_.fill(p.bias, -s, s);
        return p;
    }

    BNParams bn(int c) {
        BlockInit init;
        init.gamma_lo = 0.5f;
        init.gamma_hi = 1.5f;
        init.beta_bound = 0.1f;
        init.mean_bound = 0.1f;
        init.var_lo = 0.5f;
        init.var_hi = 1.5f;
        init.eps = eps_;
        return random_bn(c, rng_, init);
    }

    RepVGGBlock block(int c_in, int c_out, int stride) {
        ConvBn dense{conv(c_out, c_in, 3, stride), {}};
        dense.bn = bn(c_out);
        ConvBn pointwise{conv(c_out, c_in, 1, stride), {}};
        pointwise.bn = bn(c_out);
        std::optional<BNParams> identity;
        if (c_in == c_out && stride == 1) identity = bn(c_out);
        return RepVGGBlock(std::move(dense), std::move(pointwise), std::move(identity));
    }

    RcsOsa osa(int c, int n) {
        RcsOsa m;
        for (int i = 0; i < n; ++i) m.units.push_back(RcsUnit{block(c / 2, c / 2, 1), 2});
        m.aggregate = conv(c, 3 * c, 1, 1);
        return m;
    }

    HeadOp head(int c_in, int c_out, int num_classes) {
        HeadOp h;
        h.pred = conv(c_out, c_in, 1, 1);
        // Class-logit prior; objectness keeps its plain init so an untrained model still fires.
        const float cls_prior = std::log(0.6f / (static_cast<float>(num_classes) - 0.99f));
        const int per_anchor = 5 + num_classes;
        for (int o = 0; o < c_out; ++o)
            if (o % per_anchor >= 5) h.pred.bias[static_cast<std::size_t>(o)] += cls_prior;
        h.implicit_add = std::vector<float>(static_cast<std::size_t>(c_in));
        h.implicit_mul = std::vector<float>(static_cast<std::size_t>(c_out));
        rng_.fill(*h.implicit_add, -0.02f, 0.02f);
        rng_.fill(*h.implicit_mul, 0.98f, 1.02f);
        return h;
    }

    Rng& rng() { return rng_; }

private:
    Rng rng_;
    float eps_;
};

void set_running_stats(BNParams& bn, const Tensor& y) {
    const std::size_t plane = y.shape().plane();
    const double count = static_cast<double>(plane) * y.n();
    for (int c = 0; c < y.c(); ++c) {
        double sum = 0.0, sq = 0.0;
        for (int n = 0; n < y.n(); ++n) {
            const float* p = y.plane(n, c);
            for (std::size_t i = 0; i < plane; ++i) {
                sum += p[i];
                sq += static_cast<double>(p[i]) * p[i];
            }
        }
        const double mean = sum / count;
        bn.mean[static_cast<std::size_t>(c)] = static_cast<float>(mean);
        bn.var[static_cast<std::size_t>(c)] = static_cast<float>(std::max(sq / count - mean * mean, 1e-3));
    }
}

void calibrate_block(RepVGGBlock& blk, const Tensor& x) {
    set_running_stats(blk.dense_mut().bn, conv2d(x, blk.dense_mut().conv));
    set_running_stats(blk.pointwise_mut().bn, conv2d(x, blk.pointwise_mut().conv));
    if (blk.identity_mut()) set_running_stats(*blk.identity_mut(), x);
}

// Replaces every running mean/var with statistics observed on `x`, node by node, so that
// activations stay well-scaled through the untrained network.
void calibrate_batchnorm(Graph& g, const Tensor& x) {
    std::vector<Tensor> values(g.nodes().size());
    values[0] = x;
    for (std::size_t i = 1; i < g.nodes().size(); ++i) {
        Node& node = g.nodes()[i];
        const Tensor& in = values[static_cast<std::size_t>(node.inputs.at(0))];
        if (auto* rep = std::get_if<RepVGGOp>(&node.op)) {
            calibrate_block(rep->block, in);
        } else if (auto* osa = std::get_if<OsaOp>(&node.op)) {
            Tensor current = in;
            for (auto& unit : osa->osa.units) {
                calibrate_block(unit.block, channel_split(current).first);
                current = rcs_forward(current, unit);
            }
        }
        values[i] = eval_node(node, gather_inputs(node, values));
    }
}

} // namespace

Model build_model(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Initializer init(seed, cfg.bn_eps);
    Graph g;
    const auto& ch = cfg.stage_channels;

    int x = g.add("backbone.stem", RepVGGOp{init.block(3, ch[0], 1)}, {0});
    x = g.add("backbone.stem_pool", MaxPoolOp{2, 2}, {x});
    std::vector<int> stage_out;
    for (int s = 1; s <= 4; ++s) {
        const std::string prefix = "backbone.stage" + std::to_string(s);
        x = g.add(prefix + ".down", RepVGGOp{init.block(ch[s - 1], ch[s], 2)}, {x});
        x = g.add(prefix + ".osa", OsaOp{init.osa(ch[s], cfg.osa_depths[s - 1])}, {x});
        stage_out.push_back(x);
    }
    const int p4 = stage_out[2];
    const int p5 = stage_out[3];
    const int c4 = ch[3];
    const int c5 = ch[4];

    // top-down: stride 32 -> stride 16
    int lateral = g.add("neck.lateral", ConvOp{init.conv(c4, c5, 1, 1)}, {p5});
    int up = g.add("neck.upsample", UpsampleOp{2}, {lateral});
    int merged = g.add("neck.concat_up", ConcatOp{}, {up, p4});
    merged = g.add("neck.reduce_up", ConvOp{init.conv(c4, 2 * c4, 1, 1)}, {merged});
    const int n4 = g.add("neck.osa_up", OsaOp{init.osa(c4, cfg.neck_depths[0])}, {merged});

    // bottom-up: stride 16 -> stride 32
    int down = g.add("neck.down", RepVGGOp{init.block(c4, c4, 2)}, {n4});
    merged = g.add("neck.concat_down", ConcatOp{}, {down, p5});
    merged = g.add("neck.reduce_down", ConvOp{init.conv(c5, c4 + c5, 1, 1)}, {merged});
    const int n5 = g.add("neck.osa_down", OsaOp{init.osa(c5, cfg.neck_depths[1])}, {merged});

    int h16 = g.add("head16.repconv", RepVGGOp{init.block(c4, c4, 1)}, {n4});
    h16 = g.add("head16.detect", init.head(c4, cfg.head_channels(), cfg.num_classes), {h16});
    int h32 = g.add("head32.repconv", RepVGGOp{init.block(c5, c5, 1)}, {n5});
    h32 = g.add("head32.detect", init.head(c5, cfg.head_channels(), cfg.num_classes), {h32});
    g.set_outputs({h16, h32});

    calibrate_batchnorm(g, init.rng().tensor(Shape{2, 3, 128, 128}, 0.0f, 1.0f));

    g.infer_shapes(Shape{1, 3, cfg.input_size, cfg.input_size});
    return Model(cfg, std::move(g), BlockMode::Train);
}

namespace {

HeadOp fold_head(const HeadOp& head) {
    if (!head.implicit_add) return head;
    HeadOp out;
    out.pred = head.pred;
    const auto& add = *head.implicit_add;
    const auto& mul = *head.implicit_mul;
    for (int o = 0; o < head.pred.c_out(); ++o) {
        double shift = head.pred.bias[o];
        for (int i = 0; i < head.pred.c_in(); ++i)
            shift += static_cast<double>(head.pred.kernel.at(o, i, 0, 0)) * add[i];
        out.pred.bias[o] = static_cast<float>(shift * mul[o]);
        for (int i = 0; i < head.pred.c_in(); ++i) out.pred.kernel.at(o, i, 0, 0) = head.pred.kernel.at(o, i, 0, 0) * mul[o];
    }
    return out;
}

} // namespace

Model reparameterize_model(const Model& m) {
    require(m.mode() == BlockMode::Train, ErrorCode::State, "model is already deployed");
    Graph g = m.graph();
    for (auto& node : g.nodes()) {
        if (auto* rep = std::get_if<RepVGGOp>(&node.op)) {
            rep->block = convert_to_deployed(rep->block);
        } else if (auto* osa = std::get_if<OsaOp>(&node.op)) {
            osa->osa = convert_to_deployed(osa->osa);
        } else if (auto* head = std::get_if<HeadOp>(&node.op)) {
            *head = fold_head(*head);
        }
    }
    return Model(m.config(), std::move(g), BlockMode::Deployed);
}

void zero_weights(Model& m) {
    auto zero_bn = [](BNParams& b) { b = BNParams::identity(b.channels(), b.eps); };
    auto zero_conv = [](ConvParams& p) {
        std::fill(p.kernel.data().begin(), p.kernel.data().end(), 0.0f);
        std::fill(p.bias.begin(), p.bias.end(), 0.0f);
    };
    auto zero_block = [&](RepVGGBlock& b) {
        if (b.mode() == BlockMode::Deployed) {
            zero_conv(b.fused_mut());
            return;
        }
        zero_conv(b.dense_mut().conv);
        zero_bn(b.dense_mut().bn);
        zero_conv(b.pointwise_mut().conv);
        zero_bn(b.pointwise_mut().bn);
        if (b.identity_mut()) zero_bn(*b.identity_mut());
    };
    for (auto& node : m.graph().nodes()) {
        if (auto* rep = std::get_if<RepVGGOp>(&node.op)) {
            zero_block(rep->block);
        } else if (auto* conv = std::get_if<ConvOp>(&node.op)) {
            zero_conv(conv->conv);
        } else if (auto* osa = std::get_if<OsaOp>(&node.op)) {
            for (auto& u : osa->osa.units) zero_block(u.block);
            zero_conv(osa->osa.aggregate);
        } else if (auto* head = std::get_if<HeadOp>(&node.op)) {
            std::fill(head->pred.kernel.data().begin(), head->pred.kernel.data().end(), 0.0f);
            if (head->implicit_add) std::fill(head->implicit_add->begin(), head->implicit_add->end(), 0.0f);
            if (head->implicit_mul) std::fill(head->implicit_mul->begin(), head->implicit_mul->end(), 1.0f);
        }
    }
}

std::size_t count_multibranch_blocks(const Model& m) {
    std::size_t count = 0;
    for (const auto& node : m.graph().nodes()) {
        if (const auto* rep = std::get_if<RepVGGOp>(&node.op)) {
            count += rep->block.mode() == BlockMode::Train ? 1 : 0;
        } else if (const auto* osa = std::get_if<OsaOp>(&node.op)) {
            for (const auto& u : osa->osa.units) count += u.block.mode() == BlockMode::Train ? 1 : 0;
        }
    }
    return count;
}

} // namespace rcsnet
