#include "disent/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "disent/csvio.hpp"
#include "disent/errors.hpp"
#include "disent/idx.hpp"
#include "disent/kernels.hpp"
#include "json.hpp"

namespace disent {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// seed stream tags
constexpr uint64_t kTagInit = 1;
constexpr uint64_t kTagSubset = 2;
constexpr uint64_t kTagKmeans = 3;
constexpr uint64_t kTagSilhouette = 4;
constexpr uint64_t kTagDemoKmeans = 5;
constexpr uint64_t kTagShuffleBase = 0x100;

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

// ---------------------------------------------------------------------------
// datasets
// ---------------------------------------------------------------------------

Dataset make_synthetic_blobs(int n, int classes, int dim, double spread, uint64_t seed) {
    if (classes < 1 || n < classes) throw ArgumentError("make_synthetic_blobs: need n >= classes >= 1");
    Rng rng(seed);
    Matrix centers(classes, dim);
    for (int c = 0; c < classes; ++c)
        for (int j = 0; j < dim; ++j) centers(c, j) = 0.25 + 0.5 * rng.uniform();

    Dataset ds;
    ds.name = "synthetic-gaussian";
    ds.num_classes = classes;
    ds.features.resize(n, dim);
    ds.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        const int label = i % classes;
        ds.labels[i] = label;
        double* row = ds.features.row(i);
        const double* center = centers.row(label);
        for (int j = 0; j < dim; ++j)
            row[j] = std::clamp(center[j] + spread * rng.normal(), 0.0, 1.0);
    }
    return ds;
}

namespace {

std::string find_idx_file(const fs::path& dir, const std::string& base) {
    for (const char* ext : {"", ".gz"}) {
        fs::path candidate = dir / (base + ext);
        if (fs::exists(candidate)) return candidate.string();
    }
    throw FormatError("dataset file not found: " + (dir / base).string() + "[.gz]");
}

Dataset load_csv_dataset(const std::string& path, const std::string& name) {
    const auto table = csvio::read(path);
    if (table.header.empty()) throw FormatError("empty CSV dataset: " + path);
    const bool has_label = table.header.back() == "label";
    const int d = int(table.header.size()) - (has_label ? 1 : 0);
    Dataset ds;
    ds.name = name;
    ds.features.resize(int(table.rows.size()), d);
    if (has_label) ds.labels.resize(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (int(row.size()) != d + (has_label ? 1 : 0))
            throw FormatError(path + ": ragged row " + std::to_string(i + 2));
        for (int j = 0; j < d; ++j) ds.features(int(i), j) = std::stod(row[j]);
        if (has_label) ds.labels[i] = std::stoi(row.back());
    }
    if (has_label) {
        int max_label = -1;
        for (int l : ds.labels) max_label = std::max(max_label, l);
        ds.num_classes = max_label + 1;
    }
    return ds;
}

}  // namespace

Dataset load_configured_dataset(const ExperimentConfig& config, const std::string& split) {
    if (split != "train" && split != "test")
        throw ArgumentError("split must be train or test, got: " + split);
    const bool test = split == "test";

    if (config.dataset == "synthetic-gaussian") {
        const uint64_t seed = Rng::mix_seed(config.synth_seed, test ? 11 : 10);
        return make_synthetic_blobs(test ? config.synth_test : config.synth_train,
                                    config.synth_classes, config.synth_dim, config.synth_spread,
                                    seed);
    }
    if (config.dataset == "csv")
        return load_csv_dataset(test ? config.csv_test : config.csv_train,
                                "csv-" + split);

    const fs::path dir = fs::path(config.resolved_data_dir()) / config.dataset;
    IdxLoadOptions options;
    options.name = config.dataset + "-" + split;
    std::string img_base, lab_base;
    if (config.dataset == "mnist" || config.dataset == "fashion-mnist") {
        img_base = test ? "t10k-images-idx3-ubyte" : "train-images-idx3-ubyte";
        lab_base = test ? "t10k-labels-idx1-ubyte" : "train-labels-idx1-ubyte";
    } else if (config.dataset == "emnist-balanced") {
        img_base = std::string("emnist-balanced-") + (test ? "test" : "train") + "-images-idx3-ubyte";
        lab_base = std::string("emnist-balanced-") + (test ? "test" : "train") + "-labels-idx1-ubyte";
        options.transpose_images = true;  // EMNIST ships transposed relative to MNIST
    } else {
        throw ArgumentError("unknown dataset: " + config.dataset);
    }
    return load_idx(find_idx_file(dir, img_base), find_idx_file(dir, lab_base), options);
}

// ---------------------------------------------------------------------------
// training
// ---------------------------------------------------------------------------

TrainOutcome train_autoencoder(const Dataset& train, const losses::LossConfig& loss_config,
                               const TrainOptions& options) {
    TrainOutcome outcome;
    const int d = train.dim();
    const auto specs = nn::autoencoder_spec(d, options.latent_dim, options.encoder_hidden);
    outcome.params = nn::init_params(specs, int(options.encoder_hidden.size()) + 1,
                                     Rng::mix_seed(options.seed, kTagInit));
    nn::AdamState adam = nn::make_adam_state(outcome.params, options.learning_rate);

    if (loss_config.use_snnl && loss_config.supervised && !train.has_labels())
        throw ArgumentError("train_autoencoder: supervised loss needs a labelled dataset");

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        Rng shuffle_rng(Rng::mix_seed(options.seed, kTagShuffleBase + uint64_t(epoch)));
        const auto plan = batch_indices(train.size(), options.batch_size, shuffle_rng);
        double sum_rec = 0.0, sum_snnl = 0.0, sum_total = 0.0;
        long seen = 0;
        for (const auto& idx : plan) {
            Batch batch = take_batch(train, idx);
            nn::ForwardTrace trace = nn::forward(outcome.params, batch.features);
            losses::CompositeResult comp;
            try {
                comp = losses::composite_loss(loss_config, trace, batch.features, batch.labels,
                                              epoch);
            } catch (const UndefinedValueError& e) {
                ++outcome.skipped_batches;
                std::fprintf(stderr, "warning: skipping batch (%s)\n", e.what());
                continue;
            }
            if (!std::isfinite(comp.report.total)) {
                outcome.diverged = true;
                outcome.error = "non-finite loss at epoch " + std::to_string(epoch);
                return outcome;
            }
            nn::Gradients grads =
                nn::backward(outcome.params, trace, comp.output_grad, comp.layer_grads);
            try {
                nn::adam_step(outcome.params, grads, adam);
            } catch (const NumericError& e) {
                outcome.diverged = true;
                outcome.error = e.what();
                return outcome;
            }
            const double b = double(batch.size());
            sum_rec += comp.report.reconstruction * b;
            sum_snnl += comp.report.snnl_aggregate * b;
            sum_total += comp.report.total * b;
            seen += batch.size();
        }
        EpochLog log;
        log.epoch = epoch;
        log.temperature =
            loss_config.use_snnl ? losses::temperature(loss_config.schedule, epoch) : 0.0;
        if (seen > 0) {
            log.reconstruction = sum_rec / double(seen);
            log.snnl = sum_snnl / double(seen);
            log.total = sum_total / double(seen);
        }
        outcome.trace.push_back(log);
        outcome.params.epoch = epoch + 1;
    }
    return outcome;
}

std::string loss_trace_csv(const std::vector<EpochLog>& trace) {
    std::ostringstream out;
    out << "epoch,temperature,reconstruction,snnl,total\n";
    for (const auto& log : trace)
        out << log.epoch << ',' << csvio::fmt(log.temperature) << ','
            << csvio::fmt(log.reconstruction) << ',' << csvio::fmt(log.snnl) << ','
            << csvio::fmt(log.total) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// embeddings on disk
// ---------------------------------------------------------------------------

void write_embeddings_csv(const std::string& path, const Matrix& codes,
                          const std::vector<int>& labels) {
    if (!labels.empty() && int(labels.size()) != codes.rows())
        throw ArgumentError("write_embeddings_csv: label count mismatch");
    std::ostringstream out;
    for (int j = 0; j < codes.cols(); ++j) out << 'z' << j << ',';
    out << "label\n";
    for (int i = 0; i < codes.rows(); ++i) {
        const double* row = codes.row(i);
        for (int j = 0; j < codes.cols(); ++j) out << csvio::fmt_f32(row[j]) << ',';
        out << (labels.empty() ? -1 : labels[i]) << '\n';
    }
    csvio::write_text(path, out.str());
}

Matrix read_embeddings_csv(const std::string& path, std::vector<int>* labels_out) {
    const auto table = csvio::read(path);
    if (table.header.empty()) throw FormatError("empty embeddings CSV: " + path);
    const bool has_label = table.header.back() == "label";
    const int d = int(table.header.size()) - (has_label ? 1 : 0);
    Matrix codes(int(table.rows.size()), d);
    if (labels_out) labels_out->assign(table.rows.size(), -1);
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (int(row.size()) != d + (has_label ? 1 : 0))
            throw FormatError(path + ": ragged row " + std::to_string(i + 2));
        for (int j = 0; j < d; ++j) codes(int(i), j) = std::stod(row[j]);
        if (has_label && labels_out) (*labels_out)[i] = std::stoi(row.back());
    }
    return codes;
}

namespace {
constexpr char kEmbMagic[4] = {'D', 'E', 'M', 'B'};
}

void write_embeddings_bin(const std::string& path, const Matrix& codes,
                          const std::vector<int>& labels) {
    if (!labels.empty() && int(labels.size()) != codes.rows())
        throw ArgumentError("write_embeddings_bin: label count mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write embeddings: " + path);
    f.write(kEmbMagic, 4);
    const uint32_t version = 1, n = uint32_t(codes.rows()), dim = uint32_t(codes.cols());
    const uint8_t has_labels = labels.empty() ? 0 : 1;
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&n), 4);
    f.write(reinterpret_cast<const char*>(&dim), 4);
    f.write(reinterpret_cast<const char*>(&has_labels), 1);
    for (size_t i = 0; i < codes.size(); ++i) {
        const float v = float(codes.data()[i]);
        f.write(reinterpret_cast<const char*>(&v), 4);
    }
    for (int l : labels) {
        const int32_t v = l;
        f.write(reinterpret_cast<const char*>(&v), 4);
    }
}

Matrix read_embeddings_bin(const std::string& path, std::vector<int>* labels_out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open embeddings: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kEmbMagic, 4) != 0)
        throw FormatError("bad embeddings magic: " + path);
    uint32_t version = 0, n = 0, dim = 0;
    uint8_t has_labels = 0;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&n), 4);
    f.read(reinterpret_cast<char*>(&dim), 4);
    f.read(reinterpret_cast<char*>(&has_labels), 1);
    if (version != 1) throw FormatError("unsupported embeddings version: " + path);
    Matrix codes{int(n), int(dim)};
    for (size_t i = 0; i < codes.size(); ++i) {
        float v = 0;
        f.read(reinterpret_cast<char*>(&v), 4);
        codes.data()[i] = double(v);
    }
    if (labels_out) labels_out->clear();
    if (has_labels) {
        std::vector<int> labels(n);
        for (uint32_t i = 0; i < n; ++i) {
            int32_t v = 0;
            f.read(reinterpret_cast<char*>(&v), 4);
            labels[i] = v;
        }
        if (labels_out) *labels_out = std::move(labels);
    }
    if (!f) throw FormatError("truncated embeddings file: " + path);
    return codes;
}

Matrix read_embeddings(const std::string& path, std::vector<int>* labels_out) {
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".bin") == 0)
        return read_embeddings_bin(path, labels_out);
    return read_embeddings_csv(path, labels_out);
}

// ---------------------------------------------------------------------------
// experiment protocol
// ---------------------------------------------------------------------------

namespace {

Dataset training_set_for(const ExperimentConfig& config, const Dataset& train, uint64_t seed,
                         bool model_is_supervised) {
    const bool want_subset = config.labelled_subset_size > 0 &&
                             (model_is_supervised || config.subset_all_models);
    if (!want_subset) return train;
    if (config.labelled_subset_size > train.size())
        throw ArgumentError("labelled_subset_size exceeds training set size");
    if (train.has_labels())
        return sample_labelled_subset(train, config.labelled_subset_size,
                                      Rng::mix_seed(seed, kTagSubset));
    Rng rng(Rng::mix_seed(seed, kTagSubset));
    return subset_by_indices(train, sample_indices(train.size(), config.labelled_subset_size, rng));
}

ordered_json jnum(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

ordered_json metrics_json(const metrics::MetricsReport& m) {
    ordered_json j;
    j["acc"] = jnum(m.acc);
    j["nmi"] = jnum(m.nmi);
    j["ari"] = jnum(m.ari);
    j["sil"] = jnum(m.sil);
    j["chs"] = jnum(m.chs);
    j["dbi"] = jnum(m.dbi);
    j["sil_sampled"] = m.sil_sampled;
    if (m.sil_sampled) {
        j["sil_sample_seed"] = m.sil_sample_seed;
        j["sil_sample_size"] = m.sil_sample_size;
    }
    return j;
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& config) {
    config.validate();
    fs::create_directories(config.output_dir);
    const double t0 = now_seconds();

    RunRecord record;
    record.config = config;

    const Dataset train = load_configured_dataset(config, "train");
    const Dataset test = load_configured_dataset(config, "test");
    if (!test.has_labels())
        throw ArgumentError("test split has no labels; clustering metrics are undefined");
    const int k = config.clusters > 0 ? config.clusters : test.num_classes;
    if (k < 1) throw ArgumentError("cluster count is not positive");

    const bool is_pca = config.model == "original-pca";
    losses::LossConfig loss_config;
    if (!is_pca) loss_config = config.loss_config();

    for (uint64_t seed : config.seeds) {
        SeedOutcome outcome;
        outcome.seed = seed;
        const double seed_t0 = now_seconds();
        try {
            Matrix codes;
            if (is_pca) {
                const Dataset tr = training_set_for(config, train, seed, false);
                const auto proj = cluster::pca_fit(tr.features, config.latent_dim);
                codes = cluster::pca_transform(proj, test.features);
            } else {
                const Dataset tr =
                    training_set_for(config, train, seed, loss_config.use_snnl && loss_config.supervised);
                TrainOptions options;
                options.epochs = config.epochs;
                options.batch_size = config.batch_size;
                options.learning_rate = config.learning_rate;
                options.latent_dim = config.latent_dim;
                options.seed = seed;
                TrainOutcome tr_out = train_autoencoder(tr, loss_config, options);

                const auto trace_path =
                    fs::path(config.output_dir) / ("loss_trace_seed" + std::to_string(seed) + ".csv");
                csvio::write_text(trace_path.string(), loss_trace_csv(tr_out.trace));
                outcome.loss_trace_path = trace_path.string();

                if (tr_out.diverged) {
                    outcome.failed = true;
                    outcome.error = tr_out.error;
                    outcome.wall_seconds = now_seconds() - seed_t0;
                    record.per_seed.push_back(std::move(outcome));
                    continue;
                }
                const auto ckpt_path =
                    fs::path(config.output_dir) / ("checkpoint_seed" + std::to_string(seed) + ".dsnt");
                nn::save_checkpoint(ckpt_path.string(), tr_out.params);
                outcome.checkpoint_path = ckpt_path.string();
                codes = nn::encode(tr_out.params, test.features);
            }

            const auto runs = cluster::nine_run_protocol(codes, k, Rng::mix_seed(seed, kTagKmeans));
            const auto& ninth = runs.back();
            metrics::SilhouetteOptions sil_options;
            sil_options.full_limit = config.sil_full_limit;
            sil_options.sample_size = config.sil_sample_size;
            sil_options.seed = Rng::mix_seed(seed, kTagSilhouette);
            outcome.metrics = metrics::evaluate_all(codes, test.labels, ninth.assignments, sil_options);

            const auto emb_path =
                fs::path(config.output_dir) / ("embeddings_seed" + std::to_string(seed) + ".csv");
            write_embeddings_csv(emb_path.string(), codes, test.labels);
            outcome.embeddings_path = emb_path.string();
        } catch (const std::exception& e) {
            outcome.failed = true;
            outcome.error = e.what();
        }
        outcome.wall_seconds = now_seconds() - seed_t0;
        record.per_seed.push_back(std::move(outcome));
    }

    // Aggregate: mean over successful seeds; "best" is max, except DBI (min).
    auto& agg = record.aggregate;
    agg.best.dbi = std::numeric_limits<double>::infinity();
    for (const auto& out : record.per_seed) {
        if (out.failed) continue;
        agg.successful_seeds += 1;
        const auto& m = out.metrics;
        agg.average.acc += m.acc;
        agg.average.nmi += m.nmi;
        agg.average.ari += m.ari;
        agg.average.sil += m.sil;
        agg.average.chs += m.chs;
        agg.average.dbi += m.dbi;
        agg.best.acc = std::max(agg.best.acc, m.acc);
        agg.best.nmi = std::max(agg.best.nmi, m.nmi);
        agg.best.ari = std::max(agg.best.ari, m.ari);
        agg.best.sil = std::max(agg.best.sil, m.sil);
        agg.best.chs = std::max(agg.best.chs, m.chs);
        agg.best.dbi = std::min(agg.best.dbi, m.dbi);
        agg.average.sil_sampled = agg.average.sil_sampled || m.sil_sampled;
    }
    if (agg.successful_seeds > 0) {
        const double inv = 1.0 / agg.successful_seeds;
        agg.average.acc *= inv;
        agg.average.nmi *= inv;
        agg.average.ari *= inv;
        agg.average.sil *= inv;
        agg.average.chs *= inv;
        agg.average.dbi *= inv;
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        agg.average = {nan, nan, nan, nan, nan, nan};
        agg.best = {nan, nan, nan, nan, nan, nan};
    }

    record.wall_seconds = now_seconds() - t0;

    csvio::write_text((fs::path(config.output_dir) / "report.json").string(), report_json(record));
    csvio::write_text((fs::path(config.output_dir) / "report.csv").string(), report_csv(record));
    std::ostringstream log;
    log << "wall_seconds=" << record.wall_seconds << "\n";
    for (const auto& out : record.per_seed)
        log << "seed=" << out.seed << " wall_seconds=" << out.wall_seconds
            << (out.failed ? " FAILED: " + out.error : "") << "\n";
    csvio::write_text((fs::path(config.output_dir) / "run.log").string(), log.str());
    return record;
}

std::string report_json(const RunRecord& record) {
    ordered_json j;
    ordered_json cfg;
    const auto& c = record.config;
    cfg["dataset"] = c.dataset;
    cfg["model"] = c.model;
    cfg["labelled_subset_size"] = c.labelled_subset_size;
    cfg["subset_all_models"] = c.subset_all_models;
    cfg["latent_dim"] = c.latent_dim;
    cfg["epochs"] = c.epochs;
    cfg["batch_size"] = c.batch_size;
    cfg["learning_rate"] = c.learning_rate;
    cfg["alpha"] = c.alpha;
    cfg["fixed_temperature"] = c.fixed_temperature;
    cfg["eta"] = c.eta;
    cfg["gamma"] = c.gamma;
    cfg["snnl_layers"] = c.snnl_layers;
    cfg["clusters"] = c.clusters;
    cfg["seeds"] = c.seeds;
    if (c.dataset == "synthetic-gaussian") {
        cfg["synth_train"] = c.synth_train;
        cfg["synth_test"] = c.synth_test;
        cfg["synth_classes"] = c.synth_classes;
        cfg["synth_dim"] = c.synth_dim;
        cfg["synth_spread"] = c.synth_spread;
        cfg["synth_seed"] = c.synth_seed;
    }
    j["config"] = cfg;

    ordered_json seeds = ordered_json::array();
    for (const auto& out : record.per_seed) {
        ordered_json s;
        s["seed"] = out.seed;
        s["failed"] = out.failed;
        if (out.failed) {
            s["error"] = out.error;
        } else {
            s["metrics"] = metrics_json(out.metrics);
        }
        if (!out.checkpoint_path.empty()) s["checkpoint"] = out.checkpoint_path;
        if (!out.embeddings_path.empty()) s["embeddings"] = out.embeddings_path;
        if (!out.loss_trace_path.empty()) s["loss_trace"] = out.loss_trace_path;
        seeds.push_back(s);
    }
    j["per_seed"] = seeds;

    ordered_json agg;
    agg["successful_seeds"] = record.aggregate.successful_seeds;
    agg["average"] = metrics_json(record.aggregate.average);
    agg["best"] = metrics_json(record.aggregate.best);
    j["aggregate"] = agg;
    return j.dump(2) + "\n";
}

std::string report_csv(const RunRecord& record) {
    std::ostringstream out;
    out << "model,acc_avg,acc_best,nmi_avg,nmi_best,ari_avg,ari_best,"
           "sil_avg,sil_best,chs_avg,chs_best,dbi_avg,dbi_best\n";
    const auto& a = record.aggregate.average;
    const auto& b = record.aggregate.best;
    out << record.config.model << ',' << csvio::fmt(a.acc) << ',' << csvio::fmt(b.acc) << ','
        << csvio::fmt(a.nmi) << ',' << csvio::fmt(b.nmi) << ',' << csvio::fmt(a.ari) << ','
        << csvio::fmt(b.ari) << ',' << csvio::fmt(a.sil) << ',' << csvio::fmt(b.sil) << ','
        << csvio::fmt(a.chs) << ',' << csvio::fmt(b.chs) << ',' << csvio::fmt(a.dbi) << ','
        << csvio::fmt(b.dbi) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// few-labels sweep
// ---------------------------------------------------------------------------

SweepRecord few_labels_sweep(const ExperimentConfig& base, const std::vector<int>& sizes) {
    if (sizes.empty()) throw ArgumentError("few_labels_sweep: no sizes given");
    SweepRecord sweep;
    for (int size : sizes) {
        ExperimentConfig config = base;
        config.labelled_subset_size = size;
        config.output_dir = (fs::path(base.output_dir) / ("size-" + std::to_string(size))).string();
        SweepEntry entry;
        entry.size = size;
        entry.record = run_experiment(config);
        sweep.entries.push_back(std::move(entry));
    }
    return sweep;
}

std::string sweep_csv(const SweepRecord& sweep) {
    std::ostringstream out;
    out << "labelled_examples,acc_avg,acc_best,nmi_avg,nmi_best\n";
    for (const auto& entry : sweep.entries) {
        const auto& a = entry.record.aggregate.average;
        const auto& b = entry.record.aggregate.best;
        out << entry.size << ',' << csvio::fmt(a.acc) << ',' << csvio::fmt(b.acc) << ','
            << csvio::fmt(a.nmi) << ',' << csvio::fmt(b.nmi) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// synthetic Gaussian demo
// ---------------------------------------------------------------------------

namespace {

DemoSchedule run_demo_schedule(const Matrix& initial, const std::vector<int>& labels,
                               const losses::TemperatureSchedule& schedule,
                               const DemoOptions& options) {
    DemoSchedule result;
    Matrix coords = initial;
    for (int epoch = 0; epoch <= options.epochs; ++epoch) {
        const double T = losses::temperature(schedule, epoch);
        losses::ValueGrad vg = losses::snnl(coords, labels, T);
        result.loss.push_back(vg.value);
        result.temperature.push_back(T);
        if (epoch % options.snapshot_every == 0 || epoch == options.epochs)
            result.snapshots.emplace_back(epoch, coords);
        if (epoch == options.epochs) break;
        for (int step = 0; step < options.steps_per_epoch; ++step) {
            if (step > 0) vg = losses::snnl(coords, labels, T);
            double* x = coords.data();
            const double* g = vg.grad.data();
            for (size_t i = 0; i < coords.size(); ++i) x[i] -= options.learning_rate * g[i];
        }
    }
    result.final_coords = coords;

    const auto runs = cluster::nine_run_protocol(result.final_coords, options.classes,
                                                 Rng::mix_seed(options.seed, kTagDemoKmeans));
    result.kmeans_accuracy = metrics::clustering_accuracy(labels, runs.back().assignments);
    return result;
}

}  // namespace

DemoResult synthetic_gaussian_demo(const DemoOptions& options) {
    if (options.classes < 2 || options.n < options.classes)
        throw ArgumentError("demo: need n >= classes >= 2");
    DemoResult result;
    Rng rng(options.seed);
    result.initial_coords.resize(options.n, 2);
    for (int i = 0; i < options.n; ++i) {
        result.initial_coords(i, 0) = rng.normal();
        result.initial_coords(i, 1) = rng.normal();
    }
    result.labels.resize(options.n);
    for (int i = 0; i < options.n; ++i)
        result.labels[i] = int(rng.uniform_int(uint64_t(options.classes)));

    result.fixed = run_demo_schedule(result.initial_coords, result.labels,
                                     losses::TemperatureSchedule::fixed(options.fixed_temperature),
                                     options);
    result.annealing = run_demo_schedule(
        result.initial_coords, result.labels,
        losses::TemperatureSchedule::annealing(options.eta, options.gamma), options);
    return result;
}

}  // namespace disent
