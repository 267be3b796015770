// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

// Weight file layout (all integers and reals little-endian):
//   "RCSW" | u32 version | u8 mode (0 train, 1 deployed) | u32 entry count
//   manifest: per entry  u16 name length | name bytes | u8 rank | u32 dims[rank]
//   payload:  per entry, in manifest order, float32 values

#include <bit>
#include <cstring>
#include <fstream>

#include "rcsnet/error.hpp"
#include "rcsnet/model.hpp"

namespace rcsnet {

namespace {

constexpr char kMagic[4] = {'R', 'C', 'S', 'W'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
        require(out_.good(), ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    }

    void bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u16(std::uint16_t v) {
        const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
        bytes(b, 2);
    }
    void u32(std::uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(b, 4);
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

    void finish(const std::filesystem::path& path) {
        out_.flush();
        require(out_.good(), ErrorCode::Io, "write to '" + path.string() + "' failed");
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        require(in_.good(), ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
    }

    void bytes(void* data, std::size_t n, const char* what) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        require(static_cast<std::size_t>(in_.gcount()) == n, ErrorCode::Truncated, std::string("file ends inside ") + what);
    }
    std::uint8_t u8(const char* what) {
        std::uint8_t v;
        bytes(&v, 1, what);
        return v;
    }
    std::uint16_t u16(const char* what) {
        unsigned char b[2];
        bytes(b, 2, what);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }
    std::uint32_t u32(const char* what) {
        unsigned char b[4];
        bytes(b, 4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    std::ifstream in_;
};

std::string describe_dims(const std::vector<std::uint32_t>& dims) {
    std::string s = "[";
    for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? ", " : "") + std::to_string(dims[i]);
    return s + "]";
}

WeightFileInfo read_header(Reader& r) {
    char magic[4];
    r.bytes(magic, 4, "magic");
    require(std::memcmp(magic, kMagic, 4) == 0, ErrorCode::BadMagic, "not an RCSW weight file");
    WeightFileInfo info;
    info.version = r.u32("version");
    require(info.version == kVersion, ErrorCode::VersionMismatch,
            "weight file version " + std::to_string(info.version) + ", expected " + std::to_string(kVersion));
    const std::uint8_t mode = r.u8("mode flag");
    require(mode <= 1, ErrorCode::ManifestMismatch, "unknown mode flag " + std::to_string(mode));
    info.mode = mode == 0 ? BlockMode::Train : BlockMode::Deployed;
    const std::uint32_t count = r.u32("entry count");
    info.manifest.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        ManifestEntry e;
        const std::uint16_t len = r.u16("manifest name length");
        e.name.resize(len);
        r.bytes(e.name.data(), len, "manifest name");
        const std::uint8_t rank = r.u8("manifest rank");
        for (std::uint8_t d = 0; d < rank; ++d) e.dims.push_back(r.u32("manifest dims"));
        info.manifest.push_back(std::move(e));
    }
    return info;
}

} // namespace

void save_weights(const Model& m, const std::filesystem::path& path) {
    Graph copy = m.graph();
    const auto params = copy.params();
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.u8(m.mode() == BlockMode::Train ? 0 : 1);
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        w.u16(static_cast<std::uint16_t>(p.name.size()));
        w.bytes(p.name.data(), p.name.size());
        w.u8(static_cast<std::uint8_t>(p.dims.size()));
        for (auto d : p.dims) w.u32(d);
    }
    for (const auto& p : params)
        for (float v : p.values) w.f32(v);
    w.finish(path);
}

WeightFileInfo read_weight_manifest(const std::filesystem::path& path) {
    Reader r(path);
    return read_header(r);
}

Model load_weights(const ModelConfig& cfg, const std::filesystem::path& path) {
    Reader r(path);
    const WeightFileInfo info = read_header(r);

    Model model = build_model(cfg, 0);
    if (info.mode == BlockMode::Deployed) model = reparameterize_model(model);
    auto params = model.graph().params();

    require(info.manifest.size() == params.size(), ErrorCode::ManifestMismatch,
            "file has " + std::to_string(info.manifest.size()) + " entries, config expects " +
                std::to_string(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& e = info.manifest[i];
        require(e.name == params[i].name, ErrorCode::ManifestMismatch,
                "entry " + std::to_string(i) + " is '" + e.name + "', expected '" + params[i].name + "'");
        require(e.dims == params[i].dims, ErrorCode::ManifestMismatch,
                "node '" + e.name + "' has shape " + describe_dims(e.dims) + ", expected " +
                    describe_dims(params[i].dims));
    }
    for (auto& p : params)
        for (float& v : p.values) v = r.f32("weight payload");
    require(r.at_end(), ErrorCode::ManifestMismatch, "trailing bytes after weight payload");
    return model;
}

} // namespace rcsnet
