#include "disent/dataio.hpp"

#include <algorithm>
#include <cmath>

#include "disent/errors.hpp"
#include "disent/idx.hpp"

namespace disent {

Dataset load_idx(const std::string& images_path, const std::optional<std::string>& labels_path,
                 const IdxLoadOptions& options) {
    const idx::Images img = idx::read_images(images_path);

    Dataset ds;
    ds.name = options.name;
    ds.image_rows = int(img.rows);
    ds.image_cols = int(img.cols);
    const int n = int(img.count);
    const int rows = int(img.rows), cols = int(img.cols);
    const int d = rows * cols;
    ds.features.resize(n, d);
    for (int i = 0; i < n; ++i) {
        const uint8_t* src = img.pixels.data() + size_t(i) * d;
        double* dst = ds.features.row(i);
        if (options.transpose_images) {
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) dst[c * rows + r] = src[r * cols + c] / 255.0;
        } else {
            for (int j = 0; j < d; ++j) dst[j] = src[j] / 255.0;
        }
    }
    if (options.transpose_images) std::swap(ds.image_rows, ds.image_cols);

    if (labels_path) {
        const idx::Labels lab = idx::read_labels(*labels_path);
        if (lab.count != img.count)
            throw FormatError("image/label count mismatch: " + images_path + " has " +
                              std::to_string(img.count) + " images, " + *labels_path + " has " +
                              std::to_string(lab.count) + " labels");
        ds.labels.assign(lab.values.begin(), lab.values.end());
        int max_label = -1;
        for (int l : ds.labels) max_label = std::max(max_label, l);
        ds.num_classes = max_label + 1;
    }
    return ds;
}

std::vector<uint8_t> dataset_to_idx_images(const Dataset& ds) {
    if (ds.image_rows <= 0 || ds.image_cols <= 0)
        throw ArgumentError("dataset does not carry image geometry");
    idx::Images img;
    img.count = uint32_t(ds.size());
    img.rows = uint32_t(ds.image_rows);
    img.cols = uint32_t(ds.image_cols);
    img.pixels.resize(size_t(ds.size()) * ds.dim());
    for (int i = 0; i < ds.size(); ++i) {
        const double* src = ds.features.row(i);
        uint8_t* dst = img.pixels.data() + size_t(i) * ds.dim();
        for (int j = 0; j < ds.dim(); ++j) dst[j] = uint8_t(std::lround(src[j] * 255.0));
    }
    return idx::serialize_images(img);
}

std::vector<uint8_t> dataset_to_idx_labels(const Dataset& ds) {
    if (!ds.has_labels()) throw ArgumentError("dataset has no labels");
    idx::Labels lab;
    lab.count = uint32_t(ds.labels.size());
    lab.values.assign(ds.labels.begin(), ds.labels.end());
    return idx::serialize_labels(lab);
}

std::vector<int> sample_indices(int total, int n, Rng& rng) {
    if (n > total) throw ArgumentError("sample size exceeds population");
    std::vector<int> pool(total);
    for (int i = 0; i < total; ++i) pool[i] = i;
    // Partial Fisher-Yates: the first n entries are the draw.
    for (int i = 0; i < n; ++i) {
        const int j = i + int(rng.uniform_int(uint64_t(total - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    return pool;
}

Dataset sample_labelled_subset(const Dataset& ds, int n, uint64_t seed) {
    if (!ds.has_labels()) throw ArgumentError("sample_labelled_subset needs labels");
    Rng rng(seed);
    const auto idx = sample_indices(ds.size(), n, rng);
    return subset_by_indices(ds, idx);
}

Dataset subset_by_indices(const Dataset& ds, const std::vector<int>& indices) {
    Dataset out;
    out.name = ds.name;
    out.num_classes = ds.num_classes;
    out.image_rows = ds.image_rows;
    out.image_cols = ds.image_cols;
    out.features.resize(int(indices.size()), ds.dim());
    if (ds.has_labels()) out.labels.resize(indices.size());
    for (size_t i = 0; i < indices.size(); ++i) {
        const int src = indices[i];
        std::copy_n(ds.features.row(src), ds.dim(), out.features.row(int(i)));
        if (ds.has_labels()) out.labels[i] = ds.labels[src];
    }
    return out;
}

std::vector<std::vector<int>> batch_indices(int total, int batch_size, Rng& rng) {
    if (batch_size < 2) throw ArgumentError("batch_size must be at least 2");
    std::vector<int> order(total);
    for (int i = 0; i < total; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::vector<int>> out;
    for (int start = 0; start < total; start += batch_size) {
        const int end = std::min(start + batch_size, total);
        if (end - start < 2) break;  // drop degenerate remainder
        out.emplace_back(order.begin() + start, order.begin() + end);
    }
    return out;
}

Batch take_batch(const Dataset& ds, const std::vector<int>& indices) {
    Batch b;
    b.indices = indices;
    b.features.resize(int(indices.size()), ds.dim());
    if (ds.has_labels()) b.labels.resize(indices.size());
    for (size_t i = 0; i < indices.size(); ++i) {
        std::copy_n(ds.features.row(indices[i]), ds.dim(), b.features.row(int(i)));
        if (ds.has_labels()) b.labels[i] = ds.labels[indices[i]];
    }
    return b;
}

std::vector<Batch> batches(const Dataset& ds, int batch_size, uint64_t shuffle_seed) {
    Rng rng(shuffle_seed);
    std::vector<Batch> out;
    for (const auto& idx : batch_indices(ds.size(), batch_size, rng))
        out.push_back(take_batch(ds, idx));
    return out;
}

}  // namespace disent
