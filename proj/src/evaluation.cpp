#include "eegpref/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "eegpref/rng.hpp"

namespace eegpref {

const char* selector_method_name(SelectorMethod m) {
    return m == SelectorMethod::rfe ? "rfe" : "sbs";
}

SelectorMethod selector_method_from_name(const std::string& name) {
    if (name == "rfe") return SelectorMethod::rfe;
    if (name == "sbs") return SelectorMethod::sbs;
    throw ValidationError("unknown selector method '" + name + "'");
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string digest_hex(std::uint64_t digest) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

namespace {

FeatureMatrix take_rows(const FeatureMatrix& m, const std::vector<int>& idx) {
    FeatureMatrix out;
    out.feature_names = m.feature_names;
    out.scheme = m.scheme;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), m.X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = m.X.row(idx[i]);
        out.labels.push_back(m.labels[static_cast<std::size_t>(idx[i])]);
        out.keys.push_back(m.keys[static_cast<std::size_t>(idx[i])]);
    }
    return out;
}

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& X, const std::vector<int>& cols) {
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = X.col(cols[j]);
    }
    return out;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    int correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == truth[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace

TrainOutcome fit_selected(const FeatureMatrix& train, const ClassifierSpec& classifier,
                          const SelectorConfig& selector, std::uint64_t seed) {
    TrainOutcome out;
    if (selector.method == SelectorMethod::rfe) {
        out.selection = rfe(train, selector.k, selector.rfe_ranker.with_seed(derive_seed(seed, 1)));
    } else {
        out.selection = sbs(train, selector.k, classifier.with_seed(derive_seed(seed, 1)),
                            selector.sbs_folds, derive_seed(seed, 2));
    }
    out.model = fit(classifier.with_seed(derive_seed(seed, 3)),
                    take_columns(train.X, out.selection.kept_indices), train.labels);
    return out;
}

EvalRow evaluate(const FeatureMatrix& matrix, const ClassifierSpec& classifier,
                 const SelectorConfig& selector, const EvalParams& params) {
    const SplitPlan holdout = stratified_split(static_cast<int>(matrix.n_rows()), matrix.labels,
                                               params.test_fraction, params.seed);
    const FeatureMatrix train = take_rows(matrix, holdout.train_indices);
    const FeatureMatrix test = take_rows(matrix, holdout.test_indices);

    const TrainOutcome outcome = fit_selected(train, classifier, selector, params.seed);
    const auto& kept = outcome.selection.kept_indices;

    EvalRow row;
    row.classifier = classifier_display_name(classifier.kind());
    row.selector = selector.method == SelectorMethod::rfe ? "RFE" : "SBS";
    row.k = selector.k;
    row.kept_features = outcome.selection.kept_names;
    row.selection_trace = outcome.selection.trace;

    // 10-fold CV inside the training split, on the selected features.
    const auto folds = stratified_kfold(train.labels, params.folds, derive_seed(params.seed, 4));
    const Eigen::MatrixXd train_X = take_columns(train.X, kept);
    for (const auto& fold : folds) {
        Eigen::MatrixXd Xf(static_cast<Eigen::Index>(fold.train_indices.size()), train_X.cols());
        std::vector<int> yf;
        for (std::size_t i = 0; i < fold.train_indices.size(); ++i) {
            Xf.row(static_cast<Eigen::Index>(i)) = train_X.row(fold.train_indices[i]);
            yf.push_back(train.labels[static_cast<std::size_t>(fold.train_indices[i])]);
        }
        Eigen::MatrixXd Xt(static_cast<Eigen::Index>(fold.test_indices.size()), train_X.cols());
        std::vector<int> yt;
        for (std::size_t i = 0; i < fold.test_indices.size(); ++i) {
            Xt.row(static_cast<Eigen::Index>(i)) = train_X.row(fold.test_indices[i]);
            yt.push_back(train.labels[static_cast<std::size_t>(fold.test_indices[i])]);
        }
        const TrainedModel fold_model =
            fit(classifier.with_seed(derive_seed(params.seed, 3)), Xf, yf);
        row.fold_accuracies.push_back(accuracy(predict(fold_model, Xt), yt));
    }
    double s = 0.0;
    for (double a : row.fold_accuracies) s += a;
    row.cv_mean = s / static_cast<double>(row.fold_accuracies.size());

    // Held-out evaluation with the model trained on the full training split.
    const std::vector<int> pred = predict(outcome.model, take_columns(test.X, kept));
    row.test_accuracy = accuracy(pred, test.labels);

    std::set<int> classes(matrix.labels.begin(), matrix.labels.end());
    row.class_list.assign(classes.begin(), classes.end());
    const auto class_pos = [&](int label) {
        return static_cast<std::size_t>(
            std::lower_bound(row.class_list.begin(), row.class_list.end(), label) -
            row.class_list.begin());
    };
    row.confusion.assign(row.class_list.size(), std::vector<int>(row.class_list.size(), 0));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        row.confusion[class_pos(test.labels[i])][class_pos(pred[i])]++;
    }

    const auto bytes = serialize_model(outcome.model);
    row.model_digest = fnv1a64(bytes.data(), bytes.size());
    return row;
}

void sort_report(EvalReport& report) {
    std::stable_sort(report.rows.begin(), report.rows.end(), [](const EvalRow& a, const EvalRow& b) {
        if (a.test_accuracy != b.test_accuracy) return a.test_accuracy > b.test_accuracy;
        if (a.classifier != b.classifier) return a.classifier < b.classifier;
        if (a.selector != b.selector) return a.selector < b.selector;
        return a.k < b.k;
    });
}

std::string render_text_table(const EvalReport& report) {
    std::size_t name_w = std::string("Classifier").size();
    std::size_t sel_w = std::string("Feature Elimination").size();
    std::vector<std::string> sel_cells;
    for (const auto& r : report.rows) {
        name_w = std::max(name_w, r.classifier.size());
        sel_cells.push_back(r.selector + " (k=" + std::to_string(r.k) + ")");
        sel_w = std::max(sel_w, sel_cells.back().size());
    }
    std::string out;
    const auto pad = [](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    out += pad("Classifier", name_w) + " | " + pad("Feature Elimination", sel_w) +
           " | Test Accuracy\n";
    out += std::string(name_w, '-') + "-|-" + std::string(sel_w, '-') + "-|--------------\n";
    char buf[32];
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        std::snprintf(buf, sizeof(buf), "%.4f", r.test_accuracy);
        out += pad(r.classifier, name_w) + " | " + pad(sel_cells[i], sel_w) + " | " + buf + "\n";
    }
    if (!report.config_digest.empty()) {
        out += "\nseed " + std::to_string(report.seed) + ", config " + report.config_digest + "\n";
    }
    return out;
}

std::string report_json(const EvalReport& report) {
    nlohmann::json j;
    j["seed"] = report.seed;
    j["config_digest"] = report.config_digest;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["classifier"] = r.classifier;
        row["selector"] = r.selector;
        row["k"] = r.k;
        row["kept_features"] = r.kept_features;
        row["selection_trace"] = nlohmann::json::array();
        for (const auto& step : r.selection_trace) {
            row["selection_trace"].push_back(
                {{"step", step.step}, {"removed", step.removed_name}, {"criterion", step.criterion}});
        }
        row["fold_accuracies"] = r.fold_accuracies;
        row["cv_mean_accuracy"] = r.cv_mean;
        row["test_accuracy"] = r.test_accuracy;
        row["confusion_matrix"] = r.confusion;
        row["class_list"] = r.class_list;
        row["per_class"] = nlohmann::json::array();
        for (std::size_t c = 0; c < r.class_list.size(); ++c) {
            int row_sum = 0, col_sum = 0;
            for (std::size_t j = 0; j < r.class_list.size(); ++j) {
                row_sum += r.confusion[c][j];
                col_sum += r.confusion[j][c];
            }
            const int hit = r.confusion[c][c];
            row["per_class"].push_back(
                {{"label", r.class_list[c]},
                 {"precision", col_sum > 0 ? static_cast<double>(hit) / col_sum : 0.0},
                 {"recall", row_sum > 0 ? static_cast<double>(hit) / row_sum : 0.0}});
        }
        row["model_digest"] = digest_hex(r.model_digest);
        j["rows"].push_back(row);
    }
    return j.dump(2);
}

}  // namespace eegpref
