#pragma once

#include <cstdint>
#include <string>
#include <vector>

// IDX container format (big-endian headers), as published with MNIST:
//   images: magic 0x00000803, count, rows, cols, then count*rows*cols bytes
//   labels: magic 0x00000801, count, then count bytes
// Files ending in ".gz" are decompressed transparently on read.

namespace disent::idx {

constexpr uint32_t kImageMagic = 0x00000803;
constexpr uint32_t kLabelMagic = 0x00000801;

struct Images {
    uint32_t count = 0;
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<uint8_t> pixels;  // count * rows * cols, row-major per image
};

struct Labels {
    uint32_t count = 0;
    std::vector<uint8_t> values;
};

std::vector<uint8_t> read_file(const std::string& path);

Images parse_images(const std::vector<uint8_t>& bytes, const std::string& origin);
Labels parse_labels(const std::vector<uint8_t>& bytes, const std::string& origin);

Images read_images(const std::string& path);
Labels read_labels(const std::string& path);

std::vector<uint8_t> serialize_images(const Images& images);
std::vector<uint8_t> serialize_labels(const Labels& labels);

void write_images(const std::string& path, const Images& images);
void write_labels(const std::string& path, const Labels& labels);

}  // namespace disent::idx
