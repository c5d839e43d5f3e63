#include "eegpref/config.hpp"

#include <fstream>
#include <set>

namespace eegpref {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) {
            throw ConfigError("config: unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
    }
}

void parse_synth(const json& obj, SynthConfig& synth) {
    reject_unknown_keys(obj,
                        {"n_subjects", "n_trials", "fs_hz", "n_channels", "epoch_seconds",
                         "band_amplitudes_uv", "pink_noise_uv", "beta_effect", "artifact_rate"},
                        "synth");
    read(obj, "n_subjects", synth.n_subjects);
    read(obj, "n_trials", synth.n_trials);
    read(obj, "fs_hz", synth.fs_hz);
    read(obj, "n_channels", synth.n_channels);
    read(obj, "epoch_seconds", synth.epoch_seconds);
    read(obj, "pink_noise_uv", synth.pink_noise_uv);
    read(obj, "beta_effect", synth.beta_effect);
    read(obj, "artifact_rate", synth.artifact_rate);
    if (obj.contains("band_amplitudes_uv")) {
        const auto& bands = obj.at("band_amplitudes_uv");
        reject_unknown_keys(bands, {"delta", "theta", "alpha", "beta", "gamma"},
                            "synth.band_amplitudes_uv");
        for (int b = 0; b < 5; ++b) {
            read(bands, kBandNames[static_cast<std::size_t>(b)],
                 synth.band_amplitudes_uv[static_cast<std::size_t>(b)]);
        }
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    for (int i = 0; i <= static_cast<int>(ClassifierKind::mlp); ++i) {
        cfg.classifiers.push_back(ClassifierSpec::create(static_cast<ClassifierKind>(i)));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    reject_unknown_keys(j,
                        {"seed", "out_dir", "synth", "data", "preprocess", "labeling", "features",
                         "selection", "classifiers", "evaluation"},
                        "the top level");

    ExperimentConfig cfg = defaults();
    read(j, "seed", cfg.seed);
    read(j, "out_dir", cfg.out_dir);
    if (j.contains("synth")) parse_synth(j.at("synth"), cfg.synth);
    cfg.synth.seed = cfg.seed;

    if (j.contains("data")) {
        const auto& d = j.at("data");
        reject_unknown_keys(d, {"recordings", "labels_csv"}, "data");
        read(d, "recordings", cfg.data_recordings);
        read(d, "labels_csv", cfg.data_labels_csv);
        if (cfg.data_recordings.empty() != cfg.data_labels_csv.empty()) {
            throw ConfigError("config: data.recordings and data.labels_csv go together");
        }
    }

    if (j.contains("preprocess")) {
        const auto& p = j.at("preprocess");
        reject_unknown_keys(p,
                            {"bandpass_low_hz", "bandpass_high_hz", "filter_order", "notch_50hz",
                             "flat_fraction", "var_lo", "var_hi", "peak_uv"},
                            "preprocess");
        read(p, "bandpass_low_hz", cfg.bandpass_low_hz);
        read(p, "bandpass_high_hz", cfg.bandpass_high_hz);
        read(p, "filter_order", cfg.filter_order);
        read(p, "notch_50hz", cfg.notch_50hz);
        read(p, "flat_fraction", cfg.flat_fraction);
        read(p, "var_lo", cfg.var_lo);
        read(p, "var_hi", cfg.var_hi);
        read(p, "peak_uv", cfg.peak_uv);
        if (cfg.bandpass_low_hz < 0.0 || cfg.bandpass_high_hz <= cfg.bandpass_low_hz) {
            throw ConfigError("config: need 0 <= bandpass_low_hz < bandpass_high_hz");
        }
        if (cfg.filter_order < 2 || cfg.filter_order > 8 || cfg.filter_order % 2 != 0) {
            throw ConfigError("config: filter_order must be one of {2,4,6,8}");
        }
        if (cfg.flat_fraction < 0.0 || cfg.flat_fraction > 1.0) {
            throw ConfigError("config: flat_fraction must lie in [0, 1]");
        }
        if (cfg.var_lo <= 0.0 || cfg.var_hi <= cfg.var_lo) {
            throw ConfigError("config: need 0 < var_lo < var_hi");
        }
        if (cfg.peak_uv <= 0.0) {
            throw ConfigError("config: peak_uv must be > 0");
        }
    }

    if (j.contains("labeling")) {
        const auto& l = j.at("labeling");
        reject_unknown_keys(l, {"scheme", "threshold"}, "labeling");
        std::string scheme = "binary_like_dislike";
        read(l, "scheme", scheme);
        if (scheme == "binary_like_dislike") {
            cfg.scheme = LabelScheme::binary_like_dislike;
        } else if (scheme == "multiclass_rating") {
            cfg.scheme = LabelScheme::multiclass_rating;
        } else {
            throw ConfigError("config: unknown labeling scheme '" + scheme + "'");
        }
        read(l, "threshold", cfg.threshold);
        if (cfg.threshold < 2 || cfg.threshold > 5) {
            throw ConfigError("config: labeling.threshold must lie in 2..5");
        }
    }

    if (j.contains("features")) {
        const auto& f = j.at("features");
        reject_unknown_keys(f, {"power_mode", "channel_policy"}, "features");
        std::string mode = "relative", policy = "average";
        read(f, "power_mode", mode);
        read(f, "channel_policy", policy);
        if (mode == "relative") cfg.power_mode = PowerMode::relative;
        else if (mode == "log_absolute") cfg.power_mode = PowerMode::log_absolute;
        else throw ConfigError("config: unknown power_mode '" + mode + "'");
        if (policy == "average") cfg.channel_policy = ChannelPolicy::average;
        else if (policy == "per_channel") cfg.channel_policy = ChannelPolicy::per_channel;
        else throw ConfigError("config: unknown channel_policy '" + policy + "'");
    }

    if (j.contains("selection")) {
        const auto& s = j.at("selection");
        reject_unknown_keys(s, {"methods", "k_values", "rfe_ranker", "sbs_folds"}, "selection");
        if (s.contains("methods")) {
            std::vector<std::string> methods;
            read(s, "methods", methods);
            cfg.selector_methods.clear();
            for (const auto& m : methods) {
                cfg.selector_methods.push_back(selector_method_from_name(m));
            }
            if (cfg.selector_methods.empty()) {
                throw ConfigError("config: selection.methods must not be empty");
            }
        }
        read(s, "k_values", cfg.k_values);
        if (cfg.k_values.empty()) throw ConfigError("config: selection.k_values must not be empty");
        for (int k : cfg.k_values) {
            if (k < 1) throw ConfigError("config: selection k values must be >= 1");
        }
        if (s.contains("rfe_ranker")) {
            std::string ranker;
            read(s, "rfe_ranker", ranker);
            cfg.rfe_ranker = classifier_kind_from_name(ranker);
            if (cfg.rfe_ranker != ClassifierKind::ridge &&
                cfg.rfe_ranker != ClassifierKind::random_forest) {
                throw ConfigError("config: rfe_ranker must be ridge or random_forest");
            }
        }
        read(s, "sbs_folds", cfg.sbs_folds);
        if (cfg.sbs_folds < 2) throw ConfigError("config: sbs_folds must be >= 2");
    }

    if (j.contains("classifiers")) {
        if (!j.at("classifiers").is_array() || j.at("classifiers").empty()) {
            throw ConfigError("config: classifiers must be a non-empty array");
        }
        cfg.classifiers.clear();
        for (const auto& c : j.at("classifiers")) {
            if (!c.is_object() || !c.contains("kind")) {
                throw ConfigError("config: each classifier needs a 'kind'");
            }
            const auto kind = classifier_kind_from_name(c.at("kind").get<std::string>());
            std::map<std::string, double> hyper;
            for (const auto& [key, value] : c.items()) {
                if (key == "kind") continue;
                if (!value.is_number()) {
                    throw ConfigError("config: classifier hyperparameter '" + key +
                                      "' must be numeric");
                }
                hyper[key] = value.get<double>();
            }
            try {
                cfg.classifiers.push_back(ClassifierSpec::create(kind, hyper, cfg.seed));
            } catch (const ValidationError& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
    } else {
        for (auto& spec : cfg.classifiers) spec = spec.with_seed(cfg.seed);
    }

    if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        reject_unknown_keys(e, {"folds", "test_fraction", "shuffle_labels"}, "evaluation");
        read(e, "folds", cfg.folds);
        read(e, "test_fraction", cfg.test_fraction);
        read(e, "shuffle_labels", cfg.shuffle_labels);
        if (cfg.folds < 2) throw ConfigError("config: evaluation.folds must be >= 2");
        if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
            throw ConfigError("config: evaluation.test_fraction must lie in (0, 1)");
        }
    }

    try {
        validate(cfg.synth);
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file '" + path + "' is not valid JSON");
    return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["synth"] = {{"n_subjects", synth.n_subjects},
                  {"n_trials", synth.n_trials},
                  {"fs_hz", synth.fs_hz},
                  {"n_channels", synth.n_channels},
                  {"epoch_seconds", synth.epoch_seconds},
                  {"band_amplitudes_uv",
                   {{"delta", synth.band_amplitudes_uv[0]},
                    {"theta", synth.band_amplitudes_uv[1]},
                    {"alpha", synth.band_amplitudes_uv[2]},
                    {"beta", synth.band_amplitudes_uv[3]},
                    {"gamma", synth.band_amplitudes_uv[4]}}},
                  {"pink_noise_uv", synth.pink_noise_uv},
                  {"beta_effect", synth.beta_effect},
                  {"artifact_rate", synth.artifact_rate}};
    j["data"] = {{"recordings", data_recordings}, {"labels_csv", data_labels_csv}};
    j["preprocess"] = {{"bandpass_low_hz", bandpass_low_hz},
                       {"bandpass_high_hz", bandpass_high_hz},
                       {"filter_order", filter_order},
                       {"notch_50hz", notch_50hz},
                       {"flat_fraction", flat_fraction},
                       {"var_lo", var_lo},
                       {"var_hi", var_hi},
                       {"peak_uv", peak_uv}};
    j["labeling"] = {
        {"scheme",
         scheme == LabelScheme::binary_like_dislike ? "binary_like_dislike" : "multiclass_rating"},
        {"threshold", threshold}};
    j["features"] = {
        {"power_mode", power_mode == PowerMode::relative ? "relative" : "log_absolute"},
        {"channel_policy", channel_policy == ChannelPolicy::average ? "average" : "per_channel"}};
    std::vector<std::string> methods;
    for (auto m : selector_methods) methods.emplace_back(selector_method_name(m));
    j["selection"] = {{"methods", methods},
                      {"k_values", k_values},
                      {"rfe_ranker", classifier_kind_name(rfe_ranker)},
                      {"sbs_folds", sbs_folds}};
    j["classifiers"] = json::array();
    for (const auto& spec : classifiers) {
        json c;
        c["kind"] = classifier_kind_name(spec.kind());
        for (const auto& [name, value] : spec.hyperparameters()) c[name] = value;
        j["classifiers"].push_back(c);
    }
    j["evaluation"] = {{"folds", folds},
                       {"test_fraction", test_fraction},
                       {"shuffle_labels", shuffle_labels}};
    return j;
}

std::string ExperimentConfig::digest() const {
    const std::string canonical = to_json().dump();
    return digest_hex(fnv1a64(canonical.data(), canonical.size()));
}

}  // namespace eegpref
