#include "disent/idx.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>

#include "disent/errors.hpp"

namespace disent::idx {

namespace {

bool has_gz_suffix(const std::string& path) {
    return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

std::vector<uint8_t> read_gz(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw FormatError("cannot open gzip file: " + path);
    std::vector<uint8_t> out;
    uint8_t buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.insert(out.end(), buf, buf + n);
    const bool ok = n == 0;
    gzclose(f);
    if (!ok) throw FormatError("gzip read error: " + path);
    return out;
}

uint32_t read_be32(const std::vector<uint8_t>& b, size_t off) {
    return (uint32_t(b[off]) << 24) | (uint32_t(b[off + 1]) << 16) | (uint32_t(b[off + 2]) << 8) |
           uint32_t(b[off + 3]);
}

void write_be32(std::vector<uint8_t>& b, uint32_t v) {
    b.push_back(uint8_t(v >> 24));
    b.push_back(uint8_t(v >> 16));
    b.push_back(uint8_t(v >> 8));
    b.push_back(uint8_t(v));
}

}  // namespace

std::vector<uint8_t> read_file(const std::string& path) {
    if (has_gz_suffix(path)) return read_gz(path);
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open file: " + path);
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

Images parse_images(const std::vector<uint8_t>& bytes, const std::string& origin) {
    if (bytes.size() < 16) throw FormatError("truncated IDX image header: " + origin);
    const uint32_t magic = read_be32(bytes, 0);
    if (magic != kImageMagic) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "bad IDX image magic 0x%08x: ", magic);
        throw FormatError(buf + origin);
    }
    Images img;
    img.count = read_be32(bytes, 4);
    img.rows = read_be32(bytes, 8);
    img.cols = read_be32(bytes, 12);
    const size_t expected = size_t(img.count) * img.rows * img.cols;
    if (bytes.size() != 16 + expected)
        throw FormatError("IDX image payload size mismatch: " + origin);
    img.pixels.assign(bytes.begin() + 16, bytes.end());
    return img;
}

Labels parse_labels(const std::vector<uint8_t>& bytes, const std::string& origin) {
    if (bytes.size() < 8) throw FormatError("truncated IDX label header: " + origin);
    const uint32_t magic = read_be32(bytes, 0);
    if (magic != kLabelMagic) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "bad IDX label magic 0x%08x: ", magic);
        throw FormatError(buf + origin);
    }
    Labels lab;
    lab.count = read_be32(bytes, 4);
    if (bytes.size() != 8 + size_t(lab.count))
        throw FormatError("IDX label payload size mismatch: " + origin);
    lab.values.assign(bytes.begin() + 8, bytes.end());
    return lab;
}

Images read_images(const std::string& path) { return parse_images(read_file(path), path); }
Labels read_labels(const std::string& path) { return parse_labels(read_file(path), path); }

std::vector<uint8_t> serialize_images(const Images& images) {
    std::vector<uint8_t> out;
    out.reserve(16 + images.pixels.size());
    write_be32(out, kImageMagic);
    write_be32(out, images.count);
    write_be32(out, images.rows);
    write_be32(out, images.cols);
    out.insert(out.end(), images.pixels.begin(), images.pixels.end());
    return out;
}

std::vector<uint8_t> serialize_labels(const Labels& labels) {
    std::vector<uint8_t> out;
    out.reserve(8 + labels.values.size());
    write_be32(out, kLabelMagic);
    write_be32(out, labels.count);
    out.insert(out.end(), labels.values.begin(), labels.values.end());
    return out;
}

void write_images(const std::string& path, const Images& images) {
    const auto bytes = serialize_images(images);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write file: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

void write_labels(const std::string& path, const Labels& labels) {
    const auto bytes = serialize_labels(labels);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write file: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}  // namespace disent::idx
