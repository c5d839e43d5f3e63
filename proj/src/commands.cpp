#include "eegpref/commands.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "eegpref/io.hpp"
#include "eegpref/rng.hpp"
#include "eegpref/synthgen.hpp"

namespace eegpref {

namespace fs = std::filesystem;

namespace {

template <typename F>
auto run_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error("[" + std::string(stage) + "] " + e.what());
    }
}

std::string dataset_dir(const ExperimentConfig& config) { return config.out_dir + "/dataset"; }

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + path + "' failed");
}

struct DatasetPaths {
    std::vector<std::string> recordings;
    std::string labels_csv;
};

DatasetPaths locate_dataset(const ExperimentConfig& config) {
    if (!config.data_recordings.empty()) {
        return {config.data_recordings, config.data_labels_csv};
    }
    const std::string manifest_path = dataset_dir(config) + "/manifest.json";
    std::ifstream in(manifest_path);
    if (!in) {
        throw IoError("no dataset: missing '" + manifest_path +
                      "' (run the synth subcommand or set data paths)");
    }
    nlohmann::json m = nlohmann::json::parse(in, nullptr, false);
    if (m.is_discarded()) throw FormatError("manifest '" + manifest_path + "' is not valid JSON");
    DatasetPaths paths;
    for (const auto& f : m.at("recordings")) {
        paths.recordings.push_back(dataset_dir(config) + "/" + f.get<std::string>());
    }
    paths.labels_csv = dataset_dir(config) + "/" + m.at("labels_csv").get<std::string>();
    return paths;
}

}  // namespace

void cmd_synth(const ExperimentConfig& config) {
    run_stage("synth", [&] {
        const SynthDataset data = generate(config.synth);
        fs::create_directories(dataset_dir(config));

        nlohmann::json manifest;
        manifest["config_digest"] = config.digest();
        manifest["labels_csv"] = "labels.csv";
        manifest["n_label_rows"] = data.labels.size();
        std::vector<std::string> files;
        for (const auto& rec : data.recordings) {
            const std::string name = rec.subject_id + ".eegr";
            write_recording(rec, dataset_dir(config) + "/" + name);
            files.push_back(name);
        }
        manifest["recordings"] = files;
        write_labels(data.labels, dataset_dir(config) + "/labels.csv");
        write_text(dataset_dir(config) + "/manifest.json", manifest.dump(2) + "\n");
        return 0;
    });
}

std::vector<Epoch> preprocess_recording(Recording rec, const std::vector<LabelRow>& labels,
                                        const ExperimentConfig& config, RejectionReport& report) {
    FilterSpec band;
    band.kind = config.bandpass_low_hz > 0.0 ? FilterKind::bandpass : FilterKind::lowpass;
    band.low_hz = config.bandpass_low_hz;
    band.high_hz = config.bandpass_high_hz;
    band.order = config.filter_order;
    const SosFilter bandpass = design_butterworth(band, rec.fs_hz);
    filter_recording(rec, bandpass);
    if (config.notch_50hz) {
        const SosFilter notch =
            design_butterworth({FilterKind::bandstop, 48.0, 52.0, config.filter_order}, rec.fs_hz);
        filter_recording(rec, notch);
    }

    RejectionReport channels =
        detect_bad_channels(rec, config.flat_fraction, config.var_lo, config.var_hi);
    for (auto& ch : channels.rejected_channels) {
        ch.subject_id = rec.subject_id;
        report.rejected_channels.push_back(std::move(ch));
    }

    auto epochs = slice_epochs(rec, labels);
    auto [kept, dropped] = reject_epochs(epochs, config.peak_uv);
    report.rejected_epochs.insert(report.rejected_epochs.end(), dropped.rejected_epochs.begin(),
                                  dropped.rejected_epochs.end());

    std::vector<Epoch> referenced;
    referenced.reserve(kept.size());
    for (auto& ep : kept) referenced.push_back(common_average_reference(ep));
    return referenced;
}

FeatureMatrix cmd_features(const ExperimentConfig& config) {
    const DatasetPaths paths = locate_dataset(config);
    const auto labels = run_stage("load", [&] { return load_labels(paths.labels_csv); });

    RejectionReport report;
    std::vector<Epoch> epochs;
    for (const auto& rec_path : paths.recordings) {
        auto rec = run_stage("load", [&] { return load_recording(rec_path); });
        auto part = run_stage("preprocess",
                              [&] { return preprocess_recording(std::move(rec), labels, config, report); });
        for (auto& ep : part) epochs.push_back(std::move(ep));
    }

    const FeatureMatrix matrix = run_stage("features", [&] {
        return assemble_matrix(epochs, config.scheme, config.threshold, config.channel_policy,
                               config.power_mode);
    });

    fs::create_directories(config.out_dir);
    write_feature_csv(matrix, config.out_dir + "/features.csv");
    write_rejection_report(report, config.out_dir + "/rejection_report.json", config.digest());
    return matrix;
}

EvalReport cmd_evaluate(const ExperimentConfig& config, int threads) {
    FeatureMatrix matrix;
    const std::string features_path = config.out_dir + "/features.csv";
    if (fs::exists(features_path)) {
        matrix = run_stage("load", [&] { return load_feature_csv(features_path); });
    } else {
        matrix = cmd_features(config);
    }

    if (config.shuffle_labels) {
        // Null-model mode: destroy any feature-label association, seeded.
        Rng rng(derive_seed(config.seed, 0x10ab));
        rng.shuffle(matrix.labels);
    }

    struct Cell {
        ClassifierSpec classifier;
        SelectorConfig selector;
        EvalParams params;
    };
    std::vector<Cell> cells;
    std::uint64_t cell_index = 0;
    for (const auto& method : config.selector_methods) {
        for (int k : config.k_values) {
            for (const auto& clf : config.classifiers) {
                SelectorConfig sel;
                sel.method = method;
                sel.k = k;
                sel.rfe_ranker = ClassifierSpec::create(config.rfe_ranker);
                sel.sbs_folds = config.sbs_folds;
                EvalParams params;
                params.test_fraction = config.test_fraction;
                params.folds = config.folds;
                params.seed = derive_seed(config.seed, cell_index++);
                cells.push_back({clf, sel, params});
            }
        }
    }

    std::vector<EvalRow> rows(cells.size());
    std::vector<std::string> failures(cells.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            try {
                rows[i] = evaluate(matrix, cells[i].classifier, cells[i].selector, cells[i].params);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!failures[i].empty()) {
            throw Error("[evaluate] cell " + std::to_string(i) + " (" +
                        classifier_kind_name(cells[i].classifier.kind()) + " + " +
                        selector_method_name(cells[i].selector.method) + "): " + failures[i]);
        }
    }

    EvalReport report;
    report.rows = std::move(rows);
    report.seed = config.seed;
    report.config_digest = config.digest();
    sort_report(report);

    fs::create_directories(config.out_dir);
    write_text(config.out_dir + "/eval_report.txt", render_text_table(report));
    write_text(config.out_dir + "/eval_report.json", report_json(report) + "\n");
    return report;
}

std::string cmd_report(const ExperimentConfig& config) {
    const std::string path = config.out_dir + "/eval_report.json";
    std::ifstream in(path);
    if (!in) throw IoError("no report: missing '" + path + "' (run the evaluate subcommand)");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw FormatError("report '" + path + "' is not valid JSON");

    EvalReport report;
    report.seed = j.value("seed", 0ULL);
    report.config_digest = j.value("config_digest", "");
    for (const auto& r : j.at("rows")) {
        EvalRow row;
        row.classifier = r.at("classifier").get<std::string>();
        row.selector = r.at("selector").get<std::string>();
        row.k = r.at("k").get<int>();
        row.test_accuracy = r.at("test_accuracy").get<double>();
        row.cv_mean = r.at("cv_mean_accuracy").get<double>();
        report.rows.push_back(std::move(row));
    }
    sort_report(report);
    return render_text_table(report);
}

}  // namespace eegpref
