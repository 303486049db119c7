#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "disent/csvio.hpp"
#include "disent/errors.hpp"
#include "disent/experiment.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace disent;

namespace {

struct ConfigCli {
    std::string config_path;
    std::vector<std::string> sets;
};

void add_config_options(CLI::App* cmd, ConfigCli& cc) {
    cmd->add_option("--config", cc.config_path, "experiment config file (key = value lines)");
    cmd->add_option("--set", cc.sets, "override a config key, e.g. --set epochs=5")
        ->take_all();
}

ExperimentConfig build_config(const ConfigCli& cc) {
    ExperimentConfig config;
    if (!cc.config_path.empty()) config = parse_config_file(cc.config_path);
    for (const auto& kv : cc.sets) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got: " + kv);
        apply_config_entry(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return config;
}

void print_aggregate(const RunRecord& record) {
    const auto& a = record.aggregate.average;
    const auto& b = record.aggregate.best;
    std::printf("%s on %s (%d/%zu seeds ok)\n", record.config.model.c_str(),
                record.config.dataset.c_str(), record.aggregate.successful_seeds,
                record.per_seed.size());
    std::printf("  ACC avg %.4f best %.4f | NMI avg %.4f best %.4f | ARI avg %.4f best %.4f\n",
                a.acc, b.acc, a.nmi, b.nmi, a.ari, b.ari);
    std::printf("  SIL avg %.4f best %.4f | CHS avg %.3f best %.3f | DBI avg %.4f best %.4f\n",
                a.sil, b.sil, a.chs, b.chs, a.dbi, b.dbi);
}

std::string coords_csv(const Matrix& coords, const std::vector<int>& labels) {
    std::ostringstream out;
    out << "x,y,label\n";
    for (int i = 0; i < coords.rows(); ++i)
        out << csvio::fmt(coords(i, 0)) << ',' << csvio::fmt(coords(i, 1)) << ',' << labels[i]
            << '\n';
    return out.str();
}

int run_train(const ConfigCli& cc) {
    ExperimentConfig config = build_config(cc);
    config.validate();
    if (config.model == "original-pca")
        throw ArgumentError("train: original-pca has no training phase; use experiment");
    fs::create_directories(config.output_dir);
    const Dataset full_train = load_configured_dataset(config, "train");
    const losses::LossConfig loss_config = config.loss_config();
    const uint64_t seed = config.seeds.front();

    Dataset train = full_train;
    if (config.labelled_subset_size > 0 &&
        (config.subset_all_models || (loss_config.use_snnl && loss_config.supervised)))
        train = sample_labelled_subset(full_train, config.labelled_subset_size,
                                       Rng::mix_seed(seed, 2));

    TrainOptions options;
    options.epochs = config.epochs;
    options.batch_size = config.batch_size;
    options.learning_rate = config.learning_rate;
    options.latent_dim = config.latent_dim;
    options.seed = seed;
    const TrainOutcome outcome = train_autoencoder(train, loss_config, options);
    csvio::write_text((fs::path(config.output_dir) / "loss_trace.csv").string(),
                      loss_trace_csv(outcome.trace));
    if (outcome.diverged) {
        std::fprintf(stderr, "training diverged: %s\n", outcome.error.c_str());
        return 1;
    }
    const auto ckpt = (fs::path(config.output_dir) / "checkpoint.dsnt").string();
    nn::save_checkpoint(ckpt, outcome.params);
    std::printf("checkpoint: %s\n", ckpt.c_str());
    return 0;
}

int run_experiment_cmd(const ConfigCli& cc) {
    const RunRecord record = run_experiment(build_config(cc));
    print_aggregate(record);
    std::printf("report: %s\n", (fs::path(record.config.output_dir) / "report.json").string().c_str());
    return record.aggregate.successful_seeds > 0 ? 0 : 1;
}

int run_cluster(const std::string& embeddings_path, int k, uint64_t seed,
                const std::string& out_dir) {
    std::vector<int> labels;
    const Matrix codes = read_embeddings(embeddings_path, &labels);
    if (k <= 0) {
        int max_label = -1;
        for (int l : labels) max_label = std::max(max_label, l);
        k = max_label + 1;
        if (k < 1) throw ArgumentError("cluster: set --k (embeddings carry no labels)");
    }
    fs::create_directories(out_dir);
    const auto runs = cluster::nine_run_protocol(codes, k, seed);
    const auto& ninth = runs.back();

    std::ostringstream assignments;
    assignments << "index,cluster\n";
    for (size_t i = 0; i < ninth.assignments.size(); ++i)
        assignments << i << ',' << ninth.assignments[i] << '\n';
    csvio::write_text((fs::path(out_dir) / "assignments.csv").string(), assignments.str());

    std::ostringstream centroids;
    for (int j = 0; j < ninth.centroids.cols(); ++j) centroids << (j ? "," : "") << 'c' << j;
    centroids << '\n';
    for (int i = 0; i < ninth.centroids.rows(); ++i) {
        for (int j = 0; j < ninth.centroids.cols(); ++j)
            centroids << (j ? "," : "") << csvio::fmt(ninth.centroids(i, j));
        centroids << '\n';
    }
    csvio::write_text((fs::path(out_dir) / "centroids.csv").string(), centroids.str());

    nlohmann::ordered_json j;
    j["k"] = k;
    j["seed"] = seed;
    nlohmann::ordered_json run_list = nlohmann::ordered_json::array();
    for (size_t r = 0; r < runs.size(); ++r) {
        nlohmann::ordered_json rj;
        rj["run"] = r + 1;
        rj["max_iters"] = 10 * (r + 1);
        rj["iterations_run"] = runs[r].iterations_run;
        rj["inertia"] = runs[r].inertia;
        rj["reporting"] = r + 1 == 9;
        run_list.push_back(rj);
    }
    j["runs"] = run_list;
    csvio::write_text((fs::path(out_dir) / "cluster.json").string(), j.dump(2) + "\n");
    std::printf("ninth-run inertia: %.6f (%d iterations)\n", ninth.inertia, ninth.iterations_run);
    return 0;
}

int run_evaluate(const std::string& embeddings_path, const std::string& assignments_path,
                 const std::string& out_path) {
    std::vector<int> labels;
    const Matrix codes = read_embeddings(embeddings_path, &labels);
    if (labels.empty()) throw ArgumentError("evaluate: embeddings carry no labels");

    const auto table = csvio::read(assignments_path);
    if (int(table.rows.size()) != codes.rows())
        throw ArgumentError("evaluate: assignments row count mismatch");
    std::vector<int> pred(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) pred[i] = std::stoi(table.rows[i].back());

    const auto report = metrics::evaluate_all(codes, labels, pred);
    nlohmann::ordered_json j;
    j["acc"] = report.acc;
    j["nmi"] = report.nmi;
    j["ari"] = report.ari;
    j["sil"] = report.sil;
    j["chs"] = std::isfinite(report.chs) ? nlohmann::ordered_json(report.chs)
                                         : nlohmann::ordered_json("inf");
    j["dbi"] = std::isfinite(report.dbi) ? nlohmann::ordered_json(report.dbi)
                                         : nlohmann::ordered_json("inf");
    j["sil_sampled"] = report.sil_sampled;
    const std::string text = j.dump(2) + "\n";
    if (!out_path.empty()) csvio::write_text(out_path, text);
    std::fputs(text.c_str(), stdout);
    return 0;
}

int run_sweep(const ConfigCli& cc, const std::vector<int>& sizes) {
    ExperimentConfig base = build_config(cc);
    const SweepRecord sweep = few_labels_sweep(base, sizes);
    const std::string csv = sweep_csv(sweep);
    csvio::write_text((fs::path(base.output_dir) / "sweep.csv").string(), csv);
    std::fputs(csv.c_str(), stdout);
    return 0;
}

int run_demo(const DemoOptions& options, const std::string& out_dir) {
    const DemoResult demo = synthetic_gaussian_demo(options);
    fs::create_directories(out_dir);

    std::ostringstream trace;
    trace << "epoch,fixed_temperature,fixed_loss,annealing_temperature,annealing_loss\n";
    for (size_t e = 0; e < demo.fixed.loss.size(); ++e)
        trace << e << ',' << csvio::fmt(demo.fixed.temperature[e]) << ','
              << csvio::fmt(demo.fixed.loss[e]) << ',' << csvio::fmt(demo.annealing.temperature[e])
              << ',' << csvio::fmt(demo.annealing.loss[e]) << '\n';
    csvio::write_text((fs::path(out_dir) / "demo_loss_trace.csv").string(), trace.str());

    auto dump_snapshots = [&](const DemoSchedule& schedule, const std::string& tag) {
        for (const auto& [epoch, coords] : schedule.snapshots) {
            const auto path =
                fs::path(out_dir) / ("coords_" + tag + "_epoch" + std::to_string(epoch) + ".csv");
            csvio::write_text(path.string(), coords_csv(coords, demo.labels));
        }
    };
    dump_snapshots(demo.fixed, "fixed");
    dump_snapshots(demo.annealing, "annealing");

    const double fixed_final = demo.fixed.loss.back();
    int reach_epoch = -1;
    for (size_t e = 0; e < demo.annealing.loss.size(); ++e) {
        if (demo.annealing.loss[e] <= fixed_final) {
            reach_epoch = int(e);
            break;
        }
    }
    std::printf("fixed schedule:     loss %.6f -> %.6f, k-means ACC %.4f\n", demo.fixed.loss.front(),
                demo.fixed.loss.back(), demo.fixed.kmeans_accuracy);
    std::printf("annealing schedule: loss %.6f -> %.6f, k-means ACC %.4f\n",
                demo.annealing.loss.front(), demo.annealing.loss.back(),
                demo.annealing.kmeans_accuracy);
    if (reach_epoch >= 0)
        std::printf("annealing reached the fixed schedule's final loss at epoch %d\n", reach_epoch);
    return 0;
}

int run_export(const std::string& checkpoint_path, const ConfigCli& cc, const std::string& split,
               const std::string& out_path, const std::string& format) {
    const ExperimentConfig config = build_config(cc);
    const nn::ModelParams params = nn::load_checkpoint(checkpoint_path);
    const Dataset ds = load_configured_dataset(config, split);
    if (ds.dim() != params.input_dim())
        throw ArgumentError("export: checkpoint input dim " + std::to_string(params.input_dim()) +
                            " does not match dataset dim " + std::to_string(ds.dim()));
    const Matrix codes = nn::encode(params, ds.features);
    if (format == "bin")
        write_embeddings_bin(out_path, codes, ds.labels);
    else
        write_embeddings_csv(out_path, codes, ds.labels);
    std::printf("wrote %d x %d embeddings to %s\n", codes.rows(), codes.cols(), out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"disentangled-representation clustering experiments"};
    app.require_subcommand(1);

    ConfigCli train_cc, exp_cc, sweep_cc, export_cc;
    std::string embeddings_path, assignments_path, out_path, out_dir = "runs/out";
    std::string checkpoint_path, split = "test", format = "csv";
    std::vector<int> sweep_sizes = {1000, 3000, 6000};
    int k = 0;
    uint64_t seed = 1;
    DemoOptions demo_options;

    auto* train_cmd = app.add_subcommand("train", "train an autoencoder, write a checkpoint");
    add_config_options(train_cmd, train_cc);

    auto* experiment_cmd =
        app.add_subcommand("experiment", "train, cluster and evaluate across seeds");
    add_config_options(experiment_cmd, exp_cc);

    auto* cluster_cmd = app.add_subcommand("cluster", "nine-run k-means on stored embeddings");
    cluster_cmd->add_option("--embeddings", embeddings_path, "embeddings .csv or .bin")->required();
    cluster_cmd->add_option("--k", k, "number of clusters (default: from labels)");
    cluster_cmd->add_option("--seed", seed, "base seed");
    cluster_cmd->add_option("--out", out_dir, "output directory");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "score a clustering with all six metrics");
    evaluate_cmd->add_option("--embeddings", embeddings_path, "embeddings with labels")->required();
    evaluate_cmd->add_option("--assignments", assignments_path, "assignments.csv")->required();
    evaluate_cmd->add_option("--out", out_path, "write metrics JSON here");

    auto* sweep_cmd = app.add_subcommand("sweep", "few-labels sweep over subset sizes");
    add_config_options(sweep_cmd, sweep_cc);
    sweep_cmd->add_option("--sizes", sweep_sizes, "labelled subset sizes")->delimiter(',');

    auto* demo_cmd = app.add_subcommand("demo", "synthetic Gaussian disentanglement demo");
    demo_cmd->add_option("--n", demo_options.n, "number of points");
    demo_cmd->add_option("--classes", demo_options.classes, "number of classes");
    demo_cmd->add_option("--epochs", demo_options.epochs, "epochs");
    demo_cmd->add_option("--steps-per-epoch", demo_options.steps_per_epoch, "descent steps per epoch");
    demo_cmd->add_option("--lr", demo_options.learning_rate, "descent step size");
    demo_cmd->add_option("--fixed-temperature", demo_options.fixed_temperature, "fixed T");
    demo_cmd->add_option("--eta", demo_options.eta, "annealing eta");
    demo_cmd->add_option("--gamma", demo_options.gamma, "annealing gamma");
    demo_cmd->add_option("--seed", demo_options.seed, "seed");
    demo_cmd->add_option("--out", out_dir, "output directory");

    auto* export_cmd = app.add_subcommand("export", "encode a dataset with a checkpoint");
    export_cmd->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
    add_config_options(export_cmd, export_cc);
    export_cmd->add_option("--split", split, "train or test");
    export_cmd->add_option("--out", out_path, "output file")->required();
    export_cmd->add_option("--format", format, "csv or bin");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return run_train(train_cc);
        if (experiment_cmd->parsed()) return run_experiment_cmd(exp_cc);
        if (cluster_cmd->parsed()) return run_cluster(embeddings_path, k, seed, out_dir);
        if (evaluate_cmd->parsed()) return run_evaluate(embeddings_path, assignments_path, out_path);
        if (sweep_cmd->parsed()) return run_sweep(sweep_cc, sweep_sizes);
        if (demo_cmd->parsed()) return run_demo(demo_options, out_dir);
        if (export_cmd->parsed())
            return run_export(checkpoint_path, export_cc, split, out_path, format);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
