#include "eegpref/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "eegpref/rng.hpp"

namespace eegpref {

namespace {

std::map<int, std::vector<int>> members_by_class(const std::vector<int>& labels) {
    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(static_cast<int>(i));
    }
    return by_class;
}

}  // namespace

SplitPlan stratified_split(int n, const std::vector<int>& labels, double test_fraction,
                           std::uint64_t seed) {
    if (n <= 0 || static_cast<std::size_t>(n) != labels.size()) {
        throw ValidationError("stratified_split: n does not match label count");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ValidationError("stratified_split: test_fraction must lie in (0, 1)");
    }
    auto by_class = members_by_class(labels);
    for (const auto& [label, members] : by_class) {
        if (members.size() < 2) {
            throw ValidationError("stratified_split: class " + std::to_string(label) +
                                  " has fewer than 2 members");
        }
    }

    const int target_test = static_cast<int>(std::llround(n * test_fraction));
    // Largest-remainder apportionment of the test quota across classes.
    struct ClassQuota {
        int label;
        int base;
        double remainder;
    };
    std::vector<ClassQuota> quotas;
    int base_total = 0;
    for (const auto& [label, members] : by_class) {
        const double exact = static_cast<double>(members.size()) * test_fraction;
        const int base = static_cast<int>(std::floor(exact));
        quotas.push_back({label, base, exact - base});
        base_total += base;
    }
    std::vector<int> order(quotas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (quotas[a].remainder != quotas[b].remainder) {
            return quotas[a].remainder > quotas[b].remainder;
        }
        return quotas[a].label < quotas[b].label;
    });
    std::map<int, int> test_count;
    for (const auto& q : quotas) test_count[q.label] = q.base;
    for (int extra = target_test - base_total, i = 0; extra > 0 && i < static_cast<int>(order.size());
         ++i, --extra) {
        test_count[quotas[order[i]].label]++;
    }

    SplitPlan plan;
    plan.seed = seed;
    plan.stratified = true;
    Rng rng(seed);
    for (auto& [label, members] : by_class) {
        rng.shuffle(members);
        const int t = std::min<int>(test_count[label], static_cast<int>(members.size()));
        for (std::size_t i = 0; i < members.size(); ++i) {
            (static_cast<int>(i) < t ? plan.test_indices : plan.train_indices)
                .push_back(members[i]);
        }
    }
    std::sort(plan.train_indices.begin(), plan.train_indices.end());
    std::sort(plan.test_indices.begin(), plan.test_indices.end());
    return plan;
}

std::vector<SplitPlan> stratified_kfold(const std::vector<int>& labels, int folds,
                                        std::uint64_t seed) {
    if (folds < 2) {
        throw ValidationError("stratified_kfold: folds must be >= 2");
    }
    auto by_class = members_by_class(labels);
    for (const auto& [label, members] : by_class) {
        if (static_cast<int>(members.size()) < folds) {
            throw ValidationError("stratified_kfold: class " + std::to_string(label) + " has " +
                                  std::to_string(members.size()) + " members, fewer than " +
                                  std::to_string(folds) + " folds");
        }
    }

    Rng rng(seed);
    std::vector<std::vector<int>> fold_members(folds);
    std::vector<int> fold_load(folds, 0);
    for (auto& [label, members] : by_class) {
        rng.shuffle(members);
        const int base = static_cast<int>(members.size()) / folds;
        const int extra = static_cast<int>(members.size()) % folds;
        // surplus goes to the least-loaded folds (ties to the lower index)
        std::vector<int> fold_order(folds);
        for (int f = 0; f < folds; ++f) fold_order[f] = f;
        std::stable_sort(fold_order.begin(), fold_order.end(),
                         [&](int a, int b) { return fold_load[a] < fold_load[b]; });
        std::vector<int> take(folds, base);
        for (int i = 0; i < extra; ++i) take[fold_order[i]]++;
        std::size_t pos = 0;
        for (int f = 0; f < folds; ++f) {
            for (int i = 0; i < take[f]; ++i) fold_members[f].push_back(members[pos++]);
            fold_load[f] += take[f];
        }
    }

    std::vector<SplitPlan> plans(folds);
    for (int f = 0; f < folds; ++f) {
        plans[f].seed = seed;
        plans[f].stratified = true;
        plans[f].test_indices = fold_members[f];
        std::sort(plans[f].test_indices.begin(), plans[f].test_indices.end());
        for (int g = 0; g < folds; ++g) {
            if (g == f) continue;
            plans[f].train_indices.insert(plans[f].train_indices.end(), fold_members[g].begin(),
                                          fold_members[g].end());
        }
        std::sort(plans[f].train_indices.begin(), plans[f].train_indices.end());
    }
    return plans;
}

}  // namespace eegpref
