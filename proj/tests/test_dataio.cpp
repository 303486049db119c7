#include "disent/dataio.hpp"

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "disent/errors.hpp"
#include "disent/idx.hpp"
#include "doctest.h"

using namespace disent;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("disent_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

idx::Images tiny_images() {
    idx::Images img;
    img.count = 4;
    img.rows = 2;
    img.cols = 3;
    img.pixels.resize(4 * 6);
    for (size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = uint8_t(i * 11 % 256);
    return img;
}

idx::Labels tiny_labels() {
    idx::Labels lab;
    lab.count = 4;
    lab.values = {0, 1, 2, 1};
    return lab;
}

}  // namespace

TEST_CASE("load_idx parses images and labels") {
    TempDir tmp;
    idx::write_images(tmp.file("img"), tiny_images());
    idx::write_labels(tmp.file("lab"), tiny_labels());

    const Dataset ds = load_idx(tmp.file("img"), tmp.file("lab"));
    CHECK(ds.size() == 4);
    CHECK(ds.dim() == 6);
    CHECK(ds.num_classes == 3);
    CHECK(ds.labels == std::vector<int>{0, 1, 2, 1});
    CHECK(ds.image_rows == 2);
    CHECK(ds.image_cols == 3);
    // row-major flattening, divided by 255
    CHECK(ds.features(0, 1) == doctest::Approx(11.0 / 255.0));
    CHECK(ds.features(1, 0) == doctest::Approx(66.0 / 255.0));
    for (int i = 0; i < ds.size(); ++i)
        for (int j = 0; j < ds.dim(); ++j) {
            CHECK(ds.features(i, j) >= 0.0);
            CHECK(ds.features(i, j) <= 1.0);
        }
}

TEST_CASE("load_idx error paths") {
    TempDir tmp;

    SUBCASE("zero-byte file") {
        std::ofstream(tmp.file("empty")).close();
        CHECK_THROWS_AS(load_idx(tmp.file("empty"), std::nullopt), FormatError);
    }
    SUBCASE("bad magic") {
        auto bytes = idx::serialize_images(tiny_images());
        bytes[3] = 0x07;
        std::ofstream f(tmp.file("badmagic"), std::ios::binary);
        f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
        f.close();
        CHECK_THROWS_AS(load_idx(tmp.file("badmagic"), std::nullopt), FormatError);
    }
    SUBCASE("image/label count mismatch") {
        idx::write_images(tmp.file("img"), tiny_images());
        idx::Labels lab = tiny_labels();
        lab.count = 3;
        lab.values.resize(3);
        idx::write_labels(tmp.file("lab"), lab);
        CHECK_THROWS_AS(load_idx(tmp.file("img"), tmp.file("lab")), FormatError);
    }
    SUBCASE("truncated payload") {
        auto bytes = idx::serialize_images(tiny_images());
        bytes.pop_back();
        std::ofstream f(tmp.file("trunc"), std::ios::binary);
        f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
        f.close();
        CHECK_THROWS_AS(load_idx(tmp.file("trunc"), std::nullopt), FormatError);
    }
}

TEST_CASE("gzip files are decompressed by extension") {
    TempDir tmp;
    const auto bytes = idx::serialize_images(tiny_images());
    gzFile gz = gzopen(tmp.file("img.gz").c_str(), "wb");
    REQUIRE(gz != nullptr);
    gzwrite(gz, bytes.data(), unsigned(bytes.size()));
    gzclose(gz);

    const Dataset ds = load_idx(tmp.file("img.gz"), std::nullopt);
    CHECK(ds.size() == 4);
    CHECK(ds.features(0, 1) == doctest::Approx(11.0 / 255.0));
}

TEST_CASE("IDX round-trip reproduces the original bytes") {
    TempDir tmp;
    idx::write_images(tmp.file("img"), tiny_images());
    idx::write_labels(tmp.file("lab"), tiny_labels());

    const Dataset ds = load_idx(tmp.file("img"), tmp.file("lab"));
    CHECK(dataset_to_idx_images(ds) == idx::read_file(tmp.file("img")));
    CHECK(dataset_to_idx_labels(ds) == idx::read_file(tmp.file("lab")));
}

TEST_CASE("EMNIST-style transpose swaps image axes") {
    TempDir tmp;
    idx::Images img;
    img.count = 1;
    img.rows = 2;
    img.cols = 3;
    img.pixels = {10, 20, 30, 40, 50, 60};
    idx::write_images(tmp.file("img"), img);

    IdxLoadOptions options;
    options.transpose_images = true;
    const Dataset ds = load_idx(tmp.file("img"), std::nullopt, options);
    CHECK(ds.image_rows == 3);
    CHECK(ds.image_cols == 2);
    // stored row-major 2x3 [[10,20,30],[40,50,60]]; transposed 3x2 is
    // [[10,40],[20,50],[30,60]]
    const std::vector<double> expect = {10, 40, 20, 50, 30, 60};
    for (int j = 0; j < 6; ++j)
        CHECK(ds.features(0, j) == doctest::Approx(expect[j] / 255.0));
}

TEST_CASE("sample_labelled_subset is seeded and uniform without replacement") {
    Dataset ds;
    ds.features.resize(100, 2);
    ds.labels.resize(100);
    for (int i = 0; i < 100; ++i) {
        ds.features(i, 0) = i;
        ds.labels[i] = i % 5;
    }
    ds.num_classes = 5;

    const Dataset a = sample_labelled_subset(ds, 10, 42);
    const Dataset b = sample_labelled_subset(ds, 10, 42);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);

    const Dataset c = sample_labelled_subset(ds, 10, 43);
    CHECK_FALSE(a.features == c.features);

    std::set<double> seen;
    for (int i = 0; i < a.size(); ++i) {
        CHECK_FALSE(seen.count(a.features(i, 0)));
        seen.insert(a.features(i, 0));
        CHECK(a.labels[i] == int(a.features(i, 0)) % 5);
    }

    CHECK_THROWS_AS(sample_labelled_subset(ds, 101, 1), ArgumentError);

    Dataset unlabelled;
    unlabelled.features.resize(10, 1);
    CHECK_THROWS_AS(sample_labelled_subset(unlabelled, 5, 1), ArgumentError);
}

TEST_CASE("sample of size N is a permutation") {
    Rng rng(5);
    const auto idx = sample_indices(20, 20, rng);
    std::set<int> unique(idx.begin(), idx.end());
    CHECK(unique.size() == 20);
    CHECK(*unique.begin() == 0);
    CHECK(*unique.rbegin() == 19);
}

TEST_CASE("batch partition sizes and coverage") {
    SUBCASE("10000 points at batch 256: 39 full + one of 16") {
        Rng rng(1);
        const auto plan = batch_indices(10000, 256, rng);
        REQUIRE(plan.size() == 40);
        for (size_t i = 0; i + 1 < plan.size(); ++i) CHECK(plan[i].size() == 256);
        CHECK(plan.back().size() == 16);
    }
    SUBCASE("exactly one batch") {
        Rng rng(1);
        const auto plan = batch_indices(256, 256, rng);
        REQUIRE(plan.size() == 1);
        CHECK(plan[0].size() == 256);
    }
    SUBCASE("remainder below 2 is dropped") {
        Rng rng(1);
        const auto plan = batch_indices(3, 2, rng);
        REQUIRE(plan.size() == 1);
        CHECK(plan[0].size() == 2);
    }
    SUBCASE("batch_size below 2 is rejected") {
        Rng rng(1);
        CHECK_THROWS_AS(batch_indices(10, 1, rng), ArgumentError);
    }
    SUBCASE("epoch covers the dataset without duplicates") {
        Rng rng(77);
        const auto plan = batch_indices(1000, 128, rng);
        std::set<int> seen;
        size_t total = 0;
        for (const auto& batch : plan) {
            total += batch.size();
            seen.insert(batch.begin(), batch.end());
        }
        CHECK(seen.size() == total);
        CHECK(total == 1000 - (1000 % 128 < 2 ? 1000 % 128 : 0));
        CHECK(seen.size() == 1000);  // 1000 % 128 == 104 >= 2, nothing dropped
    }
}

TEST_CASE("take_batch materializes rows, labels and indices") {
    Dataset ds;
    ds.features.resize(6, 2);
    ds.labels = {0, 1, 0, 1, 0, 1};
    for (int i = 0; i < 6; ++i) ds.features(i, 0) = 10.0 * i;

    const Batch batch = take_batch(ds, {4, 1});
    CHECK(batch.size() == 2);
    CHECK(batch.features(0, 0) == 40.0);
    CHECK(batch.features(1, 0) == 10.0);
    CHECK(batch.labels == std::vector<int>{0, 1});
    CHECK(batch.indices == std::vector<int>{4, 1});
}
