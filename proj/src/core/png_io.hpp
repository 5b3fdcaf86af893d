#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mfv {

// Minimal PNG codec over zlib, covering exactly the formats this project
// writes: 8-bit RGB (color type 2) and 1-bit grayscale (color type 0) for
// masks, filter 0, no interlace. Readable by any standard viewer; the reader
// accepts only files produced here.

struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;            // 3 = RGB8, 1 = 1-bit gray expanded to bytes {0,1}
    std::vector<uint8_t> pixels; // row-major, channels interleaved
};

std::vector<uint8_t> png_encode_rgb8(int width, int height, const std::vector<uint8_t>& rgb);
std::vector<uint8_t> png_encode_gray1(int width, int height, const std::vector<uint8_t>& bits01);

PngImage png_decode(const std::vector<uint8_t>& file);

void write_file_bytes(const std::string& path, const std::vector<uint8_t>& bytes);
std::vector<uint8_t> read_file_bytes(const std::string& path);

}  // namespace mfv
