#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eegpref/classifiers.hpp"
#include "eegpref/features.hpp"
#include "eegpref/selection.hpp"
#include "eegpref/splits.hpp"

namespace eegpref {

enum class SelectorMethod { rfe, sbs };

const char* selector_method_name(SelectorMethod m);
SelectorMethod selector_method_from_name(const std::string& name);

struct SelectorConfig {
    SelectorMethod method = SelectorMethod::rfe;
    int k = 4;
    ClassifierSpec rfe_ranker = ClassifierSpec::create(ClassifierKind::ridge);
    int sbs_folds = 10;
};

struct EvalParams {
    double test_fraction = 0.30;
    int folds = 10;
    std::uint64_t seed = 0;
};

struct EvalRow {
    std::string classifier;          // display name
    std::string selector;            // "RFE" / "SBS"
    int k = 0;
    std::vector<std::string> kept_features;
    std::vector<SelectionStep> selection_trace;
    std::vector<double> fold_accuracies;
    double cv_mean = 0.0;
    double test_accuracy = 0.0;
    std::vector<std::vector<int>> confusion;  // rows = true class, over the full class set
    std::vector<int> class_list;
    std::uint64_t model_digest = 0;  // digest of the final trained parameters
};

// Selection plus final fit on training rows only; the building block of
// evaluate() and of the leakage test.
struct TrainOutcome {
    SelectionResult selection;
    TrainedModel model;
};
TrainOutcome fit_selected(const FeatureMatrix& train, const ClassifierSpec& classifier,
                          const SelectorConfig& selector, std::uint64_t seed);

// Leakage-free pipeline: stratified holdout first; selection, CV and the
// final fit see training rows only. CV accuracies come from a stratified
// k-fold inside the training split; test accuracy from the holdout.
EvalRow evaluate(const FeatureMatrix& matrix, const ClassifierSpec& classifier,
                 const SelectorConfig& selector, const EvalParams& params);

struct EvalReport {
    std::vector<EvalRow> rows;  // sorted by descending test accuracy
    std::uint64_t seed = 0;
    std::string config_digest;
};

void sort_report(EvalReport& report);

// Aligned Classifier | Feature Elimination | Test Accuracy table, best first.
std::string render_text_table(const EvalReport& report);

// Full fold-level detail.
std::string report_json(const EvalReport& report);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string digest_hex(std::uint64_t digest);

}  // namespace eegpref
