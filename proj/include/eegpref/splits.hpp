#pragma once

#include <cstdint>
#include <vector>

#include "eegpref/errors.hpp"

namespace eegpref {

struct SplitPlan {
    std::vector<int> train_indices;  // ascending
    std::vector<int> test_indices;   // ascending
    std::uint64_t seed = 0;
    bool stratified = true;
};

// Seeded stratified holdout. The test set receives round(n * test_fraction)
// members; per class, floor(count * test_fraction) plus largest-remainder
// top-ups (remainder ties go to the smaller class label), members chosen by
// seeded shuffle within the class. Every class needs >= 2 members.
SplitPlan stratified_split(int n, const std::vector<int>& labels, double test_fraction,
                           std::uint64_t seed);

// Seeded stratified k-fold partition. Fold sizes differ by at most one, as
// does every class's spread across folds; per class, surplus members go to
// the currently least-loaded folds. Every class needs >= folds members.
std::vector<SplitPlan> stratified_kfold(const std::vector<int>& labels, int folds,
                                        std::uint64_t seed);

}  // namespace eegpref
