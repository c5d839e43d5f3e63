#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eegpref/classifiers.hpp"
#include "eegpref/features.hpp"

namespace eegpref {

struct SelectionStep {
    int step;                 // 1-based removal step
    int removed_index;        // original column index
    std::string removed_name;
    double criterion;         // importance (RFE) or best CV accuracy (SBS)
};

struct SelectionResult {
    std::vector<int> kept_indices;  // ascending original column indices
    std::vector<std::string> kept_names;
    std::vector<SelectionStep> trace;  // p - k entries
};

// Recursive feature elimination: refit the ranker on the surviving features
// and drop the one with the smallest importance until k remain. Importance
// ties drop the highest feature index. The matrix is standardized once up
// front (constant features get unit variance). The ranker must be a ridge or
// random_forest spec.
SelectionResult rfe(const FeatureMatrix& matrix, int k, const ClassifierSpec& ranker);

// Sequential backward selection: at each step drop the feature whose removal
// gives the best stratified CV accuracy for the given classifier. Accuracy
// ties drop the highest feature index. The fold plan is built once from
// `seed` and reused for every candidate.
SelectionResult sbs(const FeatureMatrix& matrix, int k, const ClassifierSpec& classifier,
                    int folds, std::uint64_t seed);

// Mean stratified CV accuracy of `classifier` on the given feature subset.
double cv_accuracy(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                   const std::vector<int>& feature_subset, const ClassifierSpec& classifier,
                   const std::vector<struct SplitPlan>& folds);

}  // namespace eegpref
