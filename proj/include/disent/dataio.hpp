#pragma once

#include <optional>
#include <string>
#include <vector>

#include "disent/matrix.hpp"
#include "disent/rng.hpp"

namespace disent {

// Feature matrix in [0,1] with optional integer class labels.
struct Dataset {
    Matrix features;          // N x d
    std::vector<int> labels;  // empty when unlabelled, else length N, values in [0, num_classes)
    std::string name;
    int num_classes = 0;
    int image_rows = 0;  // 0 when the rows are not images
    int image_cols = 0;

    bool has_labels() const { return !labels.empty(); }
    int size() const { return features.rows(); }
    int dim() const { return features.cols(); }
};

struct Batch {
    Matrix features;          // b x d
    std::vector<int> labels;  // empty when source is unlabelled
    std::vector<int> indices; // source row ids
    int size() const { return features.rows(); }
};

struct IdxLoadOptions {
    // EMNIST ships its images transposed relative to MNIST; setting this
    // transposes each image on load so all datasets share orientation.
    bool transpose_images = false;
    std::string name = "idx";
};

// Parse IDX files into a Dataset: pixels are divided by 255 and each image is
// flattened row-major. Throws FormatError on malformed files and a
// consistency error when image/label counts disagree.
Dataset load_idx(const std::string& images_path, const std::optional<std::string>& labels_path,
                 const IdxLoadOptions& options = {});

// Reconstructs the IDX byte streams from a Dataset loaded via load_idx
// (pixel = round(255 * feature)). Used for round-trip checks and subset export.
std::vector<uint8_t> dataset_to_idx_images(const Dataset& ds);
std::vector<uint8_t> dataset_to_idx_labels(const Dataset& ds);

// First-n draw of a uniform sample without replacement; n == total yields a
// permutation. Deterministic in rng state.
std::vector<int> sample_indices(int total, int n, Rng& rng);

// Uniform labelled subset of size n; throws if the dataset is unlabelled or n > N.
Dataset sample_labelled_subset(const Dataset& ds, int n, uint64_t seed);

Dataset subset_by_indices(const Dataset& ds, const std::vector<int>& indices);

// One epoch's shuffled partition into batches; a final batch smaller than 2
// is dropped (the neighborhood loss is undefined for single-row batches).
std::vector<std::vector<int>> batch_indices(int total, int batch_size, Rng& rng);

Batch take_batch(const Dataset& ds, const std::vector<int>& indices);

// Convenience: materialize every batch of one epoch.
std::vector<Batch> batches(const Dataset& ds, int batch_size, uint64_t shuffle_seed);

}  // namespace disent
