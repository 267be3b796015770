// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <variant>

#include "rcsnet/analysis.hpp"
#include "rcsnet/error.hpp"

namespace rcsnet {

std::uint64_t flops(const LayerSpec& l) { return l.m * l.m * l.k * l.k * l.c1 * l.c2; }

std::uint64_t mac(const LayerSpec& l) { return l.m * l.m * (l.c1 + l.c2) + l.k * l.k * l.c1 * l.c2; }

void ComplexityReport::add(LayerCost row) {
    flops += row.flops;
    mac += row.mac;
    layers.push_back(std::move(row));
}

namespace {

LayerCost conv_row(std::string name, const LayerSpec& spec) {
    return LayerCost{std::move(name), "conv", spec, flops(spec), mac(spec)};
}

LayerCost movement_row(std::string name, std::string kind, std::uint64_t in_elems, std::uint64_t out_elems) {
    return LayerCost{std::move(name), std::move(kind), std::nullopt, 0, in_elems + out_elems};
}

std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

void add_block(ComplexityReport& r, const std::string& name, const RepVGGBlock& b, std::uint64_t m) {
    if (b.mode() == BlockMode::Deployed) {
        r.add(conv_row(name + ".fused", LayerSpec{m, 3, u64(b.c_in()), u64(b.c_out())}));
        return;
    }
    r.add(conv_row(name + ".dense", LayerSpec{m, 3, u64(b.c_in()), u64(b.c_out())}));
    r.add(conv_row(name + ".pointwise", LayerSpec{m, 1, u64(b.c_in()), u64(b.c_out())}));
}

void add_osa(ComplexityReport& r, const std::string& name, const RcsOsa& osa, std::uint64_t m, bool movement) {
    const std::uint64_t c = u64(osa.channels());
    for (std::size_t u = 0; u < osa.units.size(); ++u) {
        const std::string unit = name + ".unit" + std::to_string(u);
        add_block(r, unit, osa.units[u].block, m);
        if (movement) r.add(movement_row(unit + ".shuffle", "shuffle", c * m * m, c * m * m));
    }
    if (movement) r.add(movement_row(name + ".cascade_concat", "concat", 3 * c * m * m, 3 * c * m * m));
    r.add(conv_row(name + ".aggregate", LayerSpec{m, 1, 3 * c, c}));
}

std::uint64_t elems(const Shape& s) { return static_cast<std::uint64_t>(s.c) * s.h * s.w; }

} // namespace

OsaElanConstants osa_elan_constants(std::uint64_t c, std::uint64_t m) {
    const double cd = static_cast<double>(c);
    const double md = static_cast<double>(m);
    OsaElanConstants k;
    k.rcs_osa_flops = 20.25 * cd * cd * md * md;
    k.elan_flops = 40.0 * cd * cd * md * md;
    k.flops_ratio = k.rcs_osa_flops / k.elan_flops;
    k.rcs_osa_mac = 6.0 * cd * md * md + 20.25 * cd * cd;
    k.elan_mac = 17.0 * cd * md * md + 40.0 * cd * cd;
    return k;
}

ComplexityReport compare_osa_elan(std::uint64_t c, std::uint64_t m, int n) {
    require(n >= 1, ErrorCode::Config, "RCS-OSA depth must be >= 1");
    require(c >= 2 && c % 2 == 0 && m >= 1, ErrorCode::Precondition, "compare_osa_elan needs even C >= 2 and M >= 1");
    ComplexityReport r;
    const std::uint64_t half = c / 2;
    for (int u = 0; u < n; ++u)
        r.add(conv_row("rcs_osa.unit" + std::to_string(u) + ".fused", LayerSpec{m, 3, half, half}));
    r.add(conv_row("rcs_osa.aggregate", LayerSpec{m, 1, 3 * c, c}));
    r.notes.push_back("structural count: deployed RCS-OSA convs only (n fused 3x3 on C/2 channels + 1x1 3C->C); "
                      "shuffle/concat are zero-FLOP");
    r.notes.push_back("FLOPs count one multiply-accumulate as one FLOP; double the figures for the 2-FLOP convention");
    if (n == 4) {
        r.paper_constants = osa_elan_constants(c, m);
    } else {
        r.notes.push_back("closed-form RCS-OSA/ELAN constants are stated for n = 4 only");
    }
    return r;
}

ComplexityReport model_complexity(const Graph& g, Shape input) {
    const auto shapes = g.infer_shapes(input);
    ComplexityReport r;
    for (std::size_t i = 1; i < g.nodes().size(); ++i) {
        const Node& node = g.nodes()[i];
        const Shape& out = shapes[i];
        require(out.h == out.w, ErrorCode::Shape, "complexity analysis needs square feature maps");
        const std::uint64_t m = u64(out.h);
        if (const auto* rep = std::get_if<RepVGGOp>(&node.op)) {
            add_block(r, node.name, rep->block, m);
        } else if (const auto* conv = std::get_if<ConvOp>(&node.op)) {
            r.add(conv_row(node.name, LayerSpec{m, u64(conv->conv.k()), u64(conv->conv.c_in()), u64(conv->conv.c_out())}));
        } else if (const auto* osa = std::get_if<OsaOp>(&node.op)) {
            add_osa(r, node.name, osa->osa, m, true);
        } else if (const auto* head = std::get_if<HeadOp>(&node.op)) {
            r.add(conv_row(node.name, LayerSpec{m, 1, u64(head->pred.c_in()), u64(head->pred.c_out())}));
        } else if (!std::holds_alternative<InputOp>(node.op)) {
            std::uint64_t in_elems = 0;
            for (int src : node.inputs) in_elems += elems(shapes[static_cast<std::size_t>(src)]);
            r.add(movement_row(node.name, node_kind(node.op), in_elems, elems(out)));
        }
    }
    r.notes.push_back("bias, batch-norm, activation and pooling arithmetic excluded from FLOPs");
    r.notes.push_back("FLOPs count one multiply-accumulate as one FLOP; double the figures for the 2-FLOP convention");
    return r;
}

ComplexityReport model_complexity(const Model& m) {
    const int s = m.config().input_size;
    return model_complexity(m.graph(), Shape{1, 3, s, s});
}

} // namespace rcsnet
