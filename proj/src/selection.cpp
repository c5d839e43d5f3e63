#include "eegpref/selection.hpp"

#include <algorithm>

#include "eegpref/splits.hpp"

namespace eegpref {

namespace {

void check_k(int k, Eigen::Index p) {
    if (k < 1 || k > p) {
        throw ValidationError("selection: k = " + std::to_string(k) + " outside 1.." +
                              std::to_string(p));
    }
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& X, const std::vector<int>& cols) {
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = X.col(cols[j]);
    }
    return out;
}

Eigen::MatrixXd rows(const Eigen::MatrixXd& X, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
    }
    return out;
}

std::vector<int> gather(const std::vector<int>& v, const std::vector<int>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(v[static_cast<std::size_t>(i)]);
    return out;
}

SelectionResult finish(const FeatureMatrix& matrix, std::vector<int> remaining,
                       std::vector<SelectionStep> trace) {
    SelectionResult res;
    res.kept_indices = std::move(remaining);
    for (int j : res.kept_indices) {
        res.kept_names.push_back(matrix.feature_names[static_cast<std::size_t>(j)]);
    }
    res.trace = std::move(trace);
    return res;
}

}  // namespace

SelectionResult rfe(const FeatureMatrix& matrix, int k, const ClassifierSpec& ranker) {
    check_k(k, matrix.n_features());
    if (ranker.kind() != ClassifierKind::ridge && ranker.kind() != ClassifierKind::random_forest) {
        throw ValidationError("rfe: ranker must be ridge or random_forest, got " +
                              std::string(classifier_kind_name(ranker.kind())));
    }
    const Eigen::MatrixXd Z = Standardizer::fit(matrix.X).apply(matrix.X);

    std::vector<int> remaining(matrix.n_features());
    for (std::size_t j = 0; j < remaining.size(); ++j) remaining[j] = static_cast<int>(j);
    std::vector<SelectionStep> trace;
    int step = 0;
    while (static_cast<int>(remaining.size()) > k) {
        const TrainedModel model = fit(ranker, columns(Z, remaining), matrix.labels);
        const Eigen::VectorXd imp = feature_importances(model);
        // smallest importance goes; ties remove the highest original index
        std::size_t worst = 0;
        for (std::size_t j = 1; j < remaining.size(); ++j) {
            if (imp[static_cast<Eigen::Index>(j)] <= imp[static_cast<Eigen::Index>(worst)]) {
                worst = j;
            }
        }
        ++step;
        trace.push_back({step, remaining[worst],
                         matrix.feature_names[static_cast<std::size_t>(remaining[worst])],
                         imp[static_cast<Eigen::Index>(worst)]});
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    return finish(matrix, std::move(remaining), std::move(trace));
}

double cv_accuracy(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                   const std::vector<int>& feature_subset, const ClassifierSpec& classifier,
                   const std::vector<SplitPlan>& folds) {
    const Eigen::MatrixXd Xs = columns(X, feature_subset);
    double acc_sum = 0.0;
    for (const auto& fold : folds) {
        const TrainedModel model =
            fit(classifier, rows(Xs, fold.train_indices), gather(labels, fold.train_indices));
        const std::vector<int> pred = predict(model, rows(Xs, fold.test_indices));
        const std::vector<int> truth = gather(labels, fold.test_indices);
        int correct = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (pred[i] == truth[i]) ++correct;
        }
        acc_sum += static_cast<double>(correct) / static_cast<double>(pred.size());
    }
    return acc_sum / static_cast<double>(folds.size());
}

SelectionResult sbs(const FeatureMatrix& matrix, int k, const ClassifierSpec& classifier,
                    int folds, std::uint64_t seed) {
    check_k(k, matrix.n_features());
    std::vector<int> remaining(matrix.n_features());
    for (std::size_t j = 0; j < remaining.size(); ++j) remaining[j] = static_cast<int>(j);
    std::vector<SelectionStep> trace;
    if (static_cast<int>(remaining.size()) == k) {
        return finish(matrix, std::move(remaining), std::move(trace));
    }

    const std::vector<SplitPlan> plan = stratified_kfold(matrix.labels, folds, seed);
    int step = 0;
    while (static_cast<int>(remaining.size()) > k) {
        double best_acc = -1.0;
        std::size_t best_pos = 0;
        for (std::size_t c = 0; c < remaining.size(); ++c) {
            std::vector<int> candidate = remaining;
            candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(c));
            const double acc = cv_accuracy(matrix.X, matrix.labels, candidate, classifier, plan);
            // >= keeps the last max, i.e. ties remove the highest index
            if (acc >= best_acc) {
                best_acc = acc;
                best_pos = c;
            }
        }
        ++step;
        trace.push_back({step, remaining[best_pos],
                         matrix.feature_names[static_cast<std::size_t>(remaining[best_pos])],
                         best_acc});
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
    }
    return finish(matrix, std::move(remaining), std::move(trace));
}

}  // namespace eegpref
