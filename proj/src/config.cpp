#include "disent/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "disent/csvio.hpp"
#include "disent/errors.hpp"

namespace disent {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ArgumentError("expected boolean, got: " + v);
}

}  // namespace

losses::LossConfig ExperimentConfig::loss_config() const {
    if (model == "original-pca")
        throw ArgumentError("original-pca has no training loss configuration");
    losses::LossConfig cfg = losses::LossConfig::from_shorthand(model);
    if (!cfg.use_snnl) return cfg;
    cfg.alpha = alpha;
    cfg.snnl_layers = snnl_layers;
    if (cfg.schedule.mode == losses::TemperatureMode::Fixed)
        cfg.schedule = losses::TemperatureSchedule::fixed(fixed_temperature);
    else
        cfg.schedule = losses::TemperatureSchedule::annealing(eta, gamma);
    return cfg;
}

std::string ExperimentConfig::resolved_data_dir() const {
    if (!data_dir.empty()) return data_dir;
    if (const char* env = std::getenv("DISENT_DATA_DIR"); env && *env) return env;
    return "data";
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> datasets = {"mnist", "fashion-mnist", "emnist-balanced",
                                                      "synthetic-gaussian", "csv"};
    bool ok = false;
    for (const auto& d : datasets) ok = ok || d == dataset;
    if (!ok) throw ArgumentError("unknown dataset: " + dataset);
    if (model != "original-pca") (void)loss_config();  // validates the model name
    if (epochs < 0) throw ArgumentError("epochs must be >= 0");
    if (batch_size < 2) throw ArgumentError("batch_size must be >= 2");
    if (latent_dim < 1) throw ArgumentError("latent_dim must be >= 1");
    if (seeds.empty()) throw ArgumentError("need at least one seed");
    if (labelled_subset_size < 0) throw ArgumentError("labelled_subset_size must be >= 0");
    if (dataset == "csv" && (csv_train.empty() || csv_test.empty()))
        throw ArgumentError("csv dataset needs csv_train and csv_test paths");
}

void apply_config_entry(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "dataset") c.dataset = value;
    else if (key == "model") c.model = value;
    else if (key == "data_dir") c.data_dir = value;
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "labelled_subset_size") c.labelled_subset_size = std::stoi(value);
    else if (key == "subset_all_models") c.subset_all_models = parse_bool(value);
    else if (key == "latent_dim") c.latent_dim = std::stoi(value);
    else if (key == "epochs") c.epochs = std::stoi(value);
    else if (key == "batch_size") c.batch_size = std::stoi(value);
    else if (key == "learning_rate") c.learning_rate = std::stod(value);
    else if (key == "alpha") c.alpha = std::stod(value);
    else if (key == "fixed_temperature") c.fixed_temperature = std::stod(value);
    else if (key == "eta") c.eta = std::stod(value);
    else if (key == "gamma") c.gamma = std::stod(value);
    else if (key == "snnl_layers") {
        c.snnl_layers.clear();
        for (const auto& item : split_list(value)) c.snnl_layers.push_back(std::stoi(item));
    } else if (key == "clusters") c.clusters = std::stoi(value);
    else if (key == "seeds") {
        c.seeds.clear();
        for (const auto& item : split_list(value)) c.seeds.push_back(std::stoull(item));
    } else if (key == "synth_train") c.synth_train = std::stoi(value);
    else if (key == "synth_test") c.synth_test = std::stoi(value);
    else if (key == "synth_classes") c.synth_classes = std::stoi(value);
    else if (key == "synth_dim") c.synth_dim = std::stoi(value);
    else if (key == "synth_spread") c.synth_spread = std::stod(value);
    else if (key == "synth_seed") c.synth_seed = std::stoull(value);
    else if (key == "csv_train") c.csv_train = value;
    else if (key == "csv_test") c.csv_test = value;
    else if (key == "sil_full_limit") c.sil_full_limit = std::stoi(value);
    else if (key == "sil_sample_size") c.sil_sample_size = std::stoi(value);
    else throw ArgumentError("unknown config key: " + key);
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open config file: " + path);
    ExperimentConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected key = value");
        apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

std::string config_to_string(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "dataset = " << c.dataset << "\n";
    out << "model = " << c.model << "\n";
    if (!c.data_dir.empty()) out << "data_dir = " << c.data_dir << "\n";
    out << "output_dir = " << c.output_dir << "\n";
    out << "labelled_subset_size = " << c.labelled_subset_size << "\n";
    out << "subset_all_models = " << (c.subset_all_models ? "true" : "false") << "\n";
    out << "latent_dim = " << c.latent_dim << "\n";
    out << "epochs = " << c.epochs << "\n";
    out << "batch_size = " << c.batch_size << "\n";
    out << "learning_rate = " << csvio::fmt(c.learning_rate) << "\n";
    out << "alpha = " << csvio::fmt(c.alpha) << "\n";
    out << "fixed_temperature = " << csvio::fmt(c.fixed_temperature) << "\n";
    out << "eta = " << csvio::fmt(c.eta) << "\n";
    out << "gamma = " << csvio::fmt(c.gamma) << "\n";
    out << "snnl_layers = ";
    for (size_t i = 0; i < c.snnl_layers.size(); ++i)
        out << (i ? "," : "") << c.snnl_layers[i];
    out << "\n";
    out << "clusters = " << c.clusters << "\n";
    out << "seeds = ";
    for (size_t i = 0; i < c.seeds.size(); ++i) out << (i ? "," : "") << c.seeds[i];
    out << "\n";
    if (c.dataset == "synthetic-gaussian") {
        out << "synth_train = " << c.synth_train << "\n";
        out << "synth_test = " << c.synth_test << "\n";
        out << "synth_classes = " << c.synth_classes << "\n";
        out << "synth_dim = " << c.synth_dim << "\n";
        out << "synth_spread = " << csvio::fmt(c.synth_spread) << "\n";
        out << "synth_seed = " << c.synth_seed << "\n";
    }
    if (c.dataset == "csv") {
        out << "csv_train = " << c.csv_train << "\n";
        out << "csv_test = " << c.csv_test << "\n";
    }
    out << "sil_full_limit = " << c.sil_full_limit << "\n";
    out << "sil_sample_size = " << c.sil_sample_size << "\n";
    return out.str();
}

}  // namespace disent
