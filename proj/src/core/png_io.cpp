#include "png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "common.hpp"

namespace mfv {
namespace {

const uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(uint8_t(v >> 24));
    out.push_back(uint8_t(v >> 16));
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v));
}

uint32_t get_u32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void append_chunk(std::vector<uint8_t>& out, const char type[4], const std::vector<uint8_t>& payload) {
    put_u32(out, static_cast<uint32_t>(payload.size()));
    size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    uint32_t crc = static_cast<uint32_t>(
        crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
    put_u32(out, crc);
}

std::vector<uint8_t> zlib_compress(const std::vector<uint8_t>& raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> out(bound);
    int rc = compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6);
    require(rc == Z_OK, ErrCategory::io, "zlib compression failed");
    out.resize(bound);
    return out;
}

std::vector<uint8_t> zlib_decompress(const std::vector<uint8_t>& comp, size_t expected) {
    std::vector<uint8_t> out(expected);
    uLongf outlen = static_cast<uLongf>(expected);
    int rc = uncompress(out.data(), &outlen, comp.data(), static_cast<uLong>(comp.size()));
    require(rc == Z_OK && outlen == expected, ErrCategory::io, "zlib decompression failed");
    return out;
}

std::vector<uint8_t> encode(int width, int height, int bit_depth, int color_type,
                            const std::vector<uint8_t>& scanlines) {
    std::vector<uint8_t> out(kSignature, kSignature + 8);
    std::vector<uint8_t> ihdr;
    put_u32(ihdr, static_cast<uint32_t>(width));
    put_u32(ihdr, static_cast<uint32_t>(height));
    ihdr.push_back(static_cast<uint8_t>(bit_depth));
    ihdr.push_back(static_cast<uint8_t>(color_type));
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_compress(scanlines));
    append_chunk(out, "IEND", {});
    return out;
}

}  // namespace

std::vector<uint8_t> png_encode_rgb8(int width, int height, const std::vector<uint8_t>& rgb) {
    require(static_cast<size_t>(width) * height * 3 == rgb.size(), ErrCategory::usage,
            "png_encode_rgb8: pixel buffer size mismatch");
    std::vector<uint8_t> lines;
    lines.reserve(static_cast<size_t>(height) * (1 + 3 * static_cast<size_t>(width)));
    for (int y = 0; y < height; ++y) {
        lines.push_back(0);  // filter: none
        const uint8_t* row = rgb.data() + static_cast<size_t>(y) * width * 3;
        lines.insert(lines.end(), row, row + static_cast<size_t>(width) * 3);
    }
    return encode(width, height, 8, 2, lines);
}

std::vector<uint8_t> png_encode_gray1(int width, int height, const std::vector<uint8_t>& bits01) {
    require(static_cast<size_t>(width) * height == bits01.size(), ErrCategory::usage,
            "png_encode_gray1: pixel buffer size mismatch");
    int stride = (width + 7) / 8;
    std::vector<uint8_t> lines;
    lines.reserve(static_cast<size_t>(height) * (1 + static_cast<size_t>(stride)));
    for (int y = 0; y < height; ++y) {
        lines.push_back(0);
        for (int b = 0; b < stride; ++b) {
            uint8_t byte = 0;
            for (int k = 0; k < 8; ++k) {
                int x = b * 8 + k;
                if (x < width && bits01[static_cast<size_t>(y) * width + x])
                    byte = static_cast<uint8_t>(byte | (0x80 >> k));
            }
            lines.push_back(byte);
        }
    }
    return encode(width, height, 1, 0, lines);
}

PngImage png_decode(const std::vector<uint8_t>& file) {
    require(file.size() > 8 && std::memcmp(file.data(), kSignature, 8) == 0, ErrCategory::io,
            "not a PNG file");
    size_t pos = 8;
    int width = 0, height = 0, bit_depth = 0, color_type = 0;
    std::vector<uint8_t> idat;
    while (pos + 12 <= file.size()) {
        uint32_t len = get_u32(file.data() + pos);
        require(pos + 12 + len <= file.size(), ErrCategory::io, "truncated PNG chunk");
        const char* type = reinterpret_cast<const char*>(file.data() + pos + 4);
        const uint8_t* payload = file.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            require(len == 13, ErrCategory::io, "bad IHDR");
            width = static_cast<int>(get_u32(payload));
            height = static_cast<int>(get_u32(payload + 4));
            bit_depth = payload[8];
            color_type = payload[9];
            require(payload[12] == 0, ErrCategory::io, "interlaced PNG not supported");
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    require(width > 0 && height > 0, ErrCategory::io, "missing IHDR");

    PngImage img;
    img.width = width;
    img.height = height;
    if (color_type == 2 && bit_depth == 8) {
        img.channels = 3;
        size_t stride = 1 + static_cast<size_t>(width) * 3;
        auto raw = zlib_decompress(idat, stride * static_cast<size_t>(height));
        img.pixels.resize(static_cast<size_t>(width) * height * 3);
        for (int y = 0; y < height; ++y) {
            require(raw[static_cast<size_t>(y) * stride] == 0, ErrCategory::io,
                    "unsupported PNG filter (only filter 0 files are read)");
            std::memcpy(img.pixels.data() + static_cast<size_t>(y) * width * 3,
                        raw.data() + static_cast<size_t>(y) * stride + 1,
                        static_cast<size_t>(width) * 3);
        }
    } else if (color_type == 0 && bit_depth == 1) {
        img.channels = 1;
        size_t stride = 1 + static_cast<size_t>((width + 7) / 8);
        auto raw = zlib_decompress(idat, stride * static_cast<size_t>(height));
        img.pixels.resize(static_cast<size_t>(width) * height);
        for (int y = 0; y < height; ++y) {
            const uint8_t* row = raw.data() + static_cast<size_t>(y) * stride;
            require(row[0] == 0, ErrCategory::io,
                    "unsupported PNG filter (only filter 0 files are read)");
            for (int x = 0; x < width; ++x)
                img.pixels[static_cast<size_t>(y) * width + x] =
                    (row[1 + x / 8] >> (7 - x % 8)) & 1;
        }
    } else {
        fail_io("unsupported PNG format (expect RGB8 or 1-bit gray)");
    }
    return img;
}

void write_file_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    require(f.good(), ErrCategory::io, "cannot open for write: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    require(f.good(), ErrCategory::io, "write failed: " + path);
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), ErrCategory::io, "cannot open for read: " + path);
    f.seekg(0, std::ios::end);
    std::streamsize n = f.tellg();
    f.seekg(0, std::ios::beg);
    std::vector<uint8_t> bytes(static_cast<size_t>(n));
    f.read(reinterpret_cast<char*>(bytes.data()), n);
    require(f.good(), ErrCategory::io, "read failed: " + path);
    return bytes;
}

}  // namespace mfv
