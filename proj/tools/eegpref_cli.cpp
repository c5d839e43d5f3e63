// Command-line runner for the EEG preference-classification pipeline.
//
//   eegpref synth    --config cfg.json            generate a synthetic dataset
//   eegpref features --config cfg.json            preprocess + extract features
//   eegpref evaluate --config cfg.json            run the selector x classifier grid
//   eegpref report   --config cfg.json            re-render the result table

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "eegpref/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"EEG movie-trailer preference classification pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", seed, "seed (overrides config)")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--threads", threads, "worker threads for the evaluation grid")
            ->check(CLI::PositiveNumber);
    };

    auto* synth = app.add_subcommand("synth", "generate a synthetic EEG dataset");
    auto* features = app.add_subcommand("features", "preprocess and extract wavelet features");
    auto* evaluate = app.add_subcommand("evaluate", "train and score the classifier grid");
    auto* report = app.add_subcommand("report", "print the result table from a previous run");
    for (auto* cmd : {synth, features, evaluate, report}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = eegpref::ExperimentConfig::from_file(config_path);
        if (seed_set) {
            config.seed = seed;
            config.synth.seed = seed;
            std::vector<eegpref::ClassifierSpec> reseeded;
            for (const auto& spec : config.classifiers) reseeded.push_back(spec.with_seed(seed));
            config.classifiers = std::move(reseeded);
        }
        if (!out_dir.empty()) config.out_dir = out_dir;

        if (synth->parsed()) {
            eegpref::cmd_synth(config);
            std::printf("dataset written to %s/dataset (digest %s)\n", config.out_dir.c_str(),
                        config.digest().c_str());
        } else if (features->parsed()) {
            const auto matrix = eegpref::cmd_features(config);
            std::printf("features: %ld rows x %ld features -> %s/features.csv\n",
                        static_cast<long>(matrix.n_rows()), static_cast<long>(matrix.n_features()),
                        config.out_dir.c_str());
        } else if (evaluate->parsed()) {
            const auto rep = eegpref::cmd_evaluate(config, threads);
            std::cout << eegpref::render_text_table(rep);
        } else if (report->parsed()) {
            std::cout << eegpref::cmd_report(config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
