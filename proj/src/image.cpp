// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "rcsnet/detect.hpp"
#include "rcsnet/error.hpp"

namespace rcsnet {

namespace {

// Header tokens are separated by whitespace; '#' starts a comment running to end of line.
class PnmHeader {
public:
    explicit PnmHeader(const std::string& bytes) : bytes_(bytes) {}

    int next_int(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
        require(pos_ > start, ErrorCode::Input, std::string("PNM header: missing ") + what);
        require(pos_ - start <= 9, ErrorCode::Input, std::string("PNM header: ") + what + " too large");
        return std::stoi(bytes_.substr(start, pos_ - start));
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_start() {
        require(pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_])), ErrorCode::Input,
                "PNM header: missing separator before raster");
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& bytes_;
    std::size_t pos_ = 2;
};

} // namespace

Image parse_pnm(const std::string& bytes) {
    require(bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'), ErrorCode::Input,
            "only binary PGM (P5) and PPM (P6) are supported");
    const bool color = bytes[1] == '6';
    PnmHeader header(bytes);
    const int width = header.next_int("width");
    const int height = header.next_int("height");
    const int maxval = header.next_int("maxval");
    require(width >= 1 && height >= 1, ErrorCode::Input, "PNM image has zero size");
    require(maxval >= 1 && maxval <= 255, ErrorCode::Input, "PNM maxval must be in [1, 255]");
    const std::size_t start = header.raster_start();
    const std::size_t channels = color ? 3 : 1;
    const std::size_t need = static_cast<std::size_t>(width) * height * channels;
    require(bytes.size() - start >= need, ErrorCode::Input, "PNM raster is truncated");

    Image img(width, height);
    const auto* raster = reinterpret_cast<const std::uint8_t*>(bytes.data() + start);
    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            const int v = std::min<int>(raster[color ? i * 3 + c : i], maxval);
            img.rgb[i * 3 + c] = static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
        }
    }
    return img;
}

Image read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open image '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_pnm(buf.str());
}

void write_ppm(const Image& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    require(out.good(), ErrorCode::Io, "write to '" + path.string() + "' failed");
}

} // namespace rcsnet
