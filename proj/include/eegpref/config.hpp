#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "eegpref/classifiers.hpp"
#include "eegpref/evaluation.hpp"
#include "eegpref/features.hpp"
#include "eegpref/synthgen.hpp"

namespace eegpref {

// Whole-experiment configuration, parsed from a JSON file. Every field has a
// default; unknown keys are rejected. The digest is a hash of the fully
// resolved configuration and is stamped into every artifact.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    SynthConfig synth;

    // Explicit dataset paths; when empty the synth output under
    // out_dir/dataset is used.
    std::vector<std::string> data_recordings;
    std::string data_labels_csv;

    // preprocess
    double bandpass_low_hz = 0.5;
    double bandpass_high_hz = 60.0;
    int filter_order = 4;
    bool notch_50hz = false;
    double flat_fraction = 0.5;
    double var_lo = 0.1;
    double var_hi = 10.0;
    double peak_uv = 150.0;

    // labeling
    LabelScheme scheme = LabelScheme::binary_like_dislike;
    int threshold = 4;

    // features
    PowerMode power_mode = PowerMode::relative;
    ChannelPolicy channel_policy = ChannelPolicy::average;

    // selection grid
    std::vector<SelectorMethod> selector_methods = {SelectorMethod::rfe, SelectorMethod::sbs};
    std::vector<int> k_values = {4};
    ClassifierKind rfe_ranker = ClassifierKind::ridge;
    int sbs_folds = 10;

    // classifier grid
    std::vector<ClassifierSpec> classifiers;

    // evaluation
    int folds = 10;
    double test_fraction = 0.30;
    bool shuffle_labels = false;

    static ExperimentConfig defaults();
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);

    nlohmann::json to_json() const;  // fully resolved
    std::string digest() const;
};

}  // namespace eegpref
