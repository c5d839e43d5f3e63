#include "eegpref/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "eegpref/rng.hpp"

namespace eegpref {

namespace {

struct HyperRule {
    double def;
    double lo, hi;
    bool integer;
};

const std::map<std::string, HyperRule>& hyper_rules(ClassifierKind kind) {
    static const std::map<ClassifierKind, std::map<std::string, HyperRule>> rules = {
        {ClassifierKind::knn, {{"k", {5, 1, 1e9, true}}}},
        {ClassifierKind::decision_tree,
         {{"max_depth", {10, 1, 1e9, true}}, {"min_samples_split", {2, 2, 1e9, true}}}},
        {ClassifierKind::random_forest,
         {{"n_trees", {100, 1, 1e9, true}},
          {"max_depth", {10, 1, 1e9, true}},
          {"min_samples_split", {2, 2, 1e9, true}},
          {"max_features", {0, 0, 1e9, true}},  // 0 = ceil(sqrt(p))
          {"bootstrap", {1, 0, 1, true}}}},
        {ClassifierKind::gaussian_nb, {}},
        {ClassifierKind::ridge, {{"lambda", {1.0, 0.0, 1e12, false}}}},
        {ClassifierKind::qda, {{"gamma", {0.1, 0.0, 1.0, false}}}},
        {ClassifierKind::mlp,
         {{"hidden", {16, 1, 1e6, true}},
          {"epochs", {500, 1, 1e9, true}},
          {"learning_rate", {0.01, 1e-12, 1e3, false}},
          {"init_scale", {0.5, 0.0, 1e3, false}}}},
    };
    return rules.at(kind);
}

}  // namespace

const char* classifier_kind_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::decision_tree: return "decision_tree";
        case ClassifierKind::random_forest: return "random_forest";
        case ClassifierKind::gaussian_nb: return "gaussian_nb";
        case ClassifierKind::ridge: return "ridge";
        case ClassifierKind::qda: return "qda";
        case ClassifierKind::mlp: return "mlp";
    }
    return "?";
}

const char* classifier_display_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::knn: return "kNN";
        case ClassifierKind::decision_tree: return "Decision Tree";
        case ClassifierKind::random_forest: return "Random Forest";
        case ClassifierKind::gaussian_nb: return "Gaussian Naive Bayes";
        case ClassifierKind::ridge: return "Ridge";
        case ClassifierKind::qda: return "QDA";
        case ClassifierKind::mlp: return "Multi-layer Perceptron";
    }
    return "?";
}

ClassifierKind classifier_kind_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(ClassifierKind::mlp); ++i) {
        const auto k = static_cast<ClassifierKind>(i);
        if (name == classifier_kind_name(k)) return k;
    }
    throw ValidationError("unknown classifier kind '" + name + "'");
}

std::map<std::string, double> default_hyperparameters(ClassifierKind kind) {
    std::map<std::string, double> out;
    for (const auto& [name, rule] : hyper_rules(kind)) out[name] = rule.def;
    return out;
}

ClassifierSpec ClassifierSpec::create(ClassifierKind kind,
                                      const std::map<std::string, double>& hyper,
                                      std::uint64_t seed) {
    ClassifierSpec spec;
    spec.kind_ = kind;
    spec.seed_ = seed;
    spec.hyper_ = default_hyperparameters(kind);
    const auto& rules = hyper_rules(kind);
    for (const auto& [name, value] : hyper) {
        const auto it = rules.find(name);
        if (it == rules.end()) {
            throw ValidationError(std::string(classifier_kind_name(kind)) +
                                  ": unknown hyperparameter '" + name + "'");
        }
        const auto& rule = it->second;
        if (value < rule.lo || value > rule.hi ||
            (rule.integer && value != std::floor(value))) {
            throw ValidationError(std::string(classifier_kind_name(kind)) + "." + name + " = " +
                                  std::to_string(value) + " is out of range");
        }
        spec.hyper_[name] = value;
    }
    return spec;
}

double ClassifierSpec::hyper(const std::string& name) const {
    const auto it = hyper_.find(name);
    if (it != hyper_.end()) return it->second;
    const auto& rules = hyper_rules(kind_);
    const auto rule = rules.find(name);
    if (rule == rules.end()) {
        throw ValidationError(std::string(classifier_kind_name(kind_)) +
                              ": no hyperparameter '" + name + "'");
    }
    return rule->second.def;
}

ClassifierSpec ClassifierSpec::with_seed(std::uint64_t seed) const {
    ClassifierSpec spec = *this;
    spec.seed_ = seed;
    return spec;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
    Standardizer s;
    s.mean = X.colwise().mean();
    s.scale.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var =
            (X.col(j).array() - s.mean[j]).square().sum() / static_cast<double>(X.rows());
        s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
    return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

namespace {

std::vector<int> class_indices(const std::vector<int>& y, std::vector<int>& class_list) {
    std::set<int> classes(y.begin(), y.end());
    class_list.assign(classes.begin(), classes.end());
    std::vector<int> idx(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        idx[i] = static_cast<int>(
            std::lower_bound(class_list.begin(), class_list.end(), y[i]) - class_list.begin());
    }
    return idx;
}

double gini(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (int c : counts) {
        const double p = static_cast<double>(c) / total;
        g -= p * p;
    }
    return g;
}

int majority_label(const std::vector<int>& counts) {
    int best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = static_cast<int>(c);  // tie -> smaller class
    }
    return best;
}

struct TreeBuilder {
    const Eigen::MatrixXd& X;
    const std::vector<int>& y;
    int n_classes;
    int max_depth;
    int min_samples_split;
    int max_features;  // 0 = all
    Rng* rng;          // only for feature subsampling
    TreeParams tree;
    double n_total;

    int build(std::vector<int>& rows, int depth) {
        std::vector<int> counts(n_classes, 0);
        for (int r : rows) counts[y[r]]++;
        const int n = static_cast<int>(rows.size());
        const double node_gini = gini(counts, n);

        const bool stop = depth >= max_depth || n < min_samples_split || node_gini == 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        // zero-gain splits are allowed (XOR-style nodes need them); pure nodes
        // already stopped above
        double best_decrease = -std::numeric_limits<double>::infinity();
        if (!stop) {
            std::vector<int> features(X.cols());
            std::iota(features.begin(), features.end(), 0);
            if (max_features > 0 && max_features < static_cast<int>(features.size())) {
                // Partial Fisher-Yates, then ascending so tie-breaks stay index-ordered.
                for (int i = 0; i < max_features; ++i) {
                    std::swap(features[i],
                              features[i + static_cast<int>(rng->below(features.size() - i))]);
                }
                features.resize(max_features);
                std::sort(features.begin(), features.end());
            }
            std::vector<std::pair<double, int>> vals(n);
            for (int f : features) {
                for (int i = 0; i < n; ++i) vals[i] = {X(rows[i], f), y[rows[i]]};
                std::sort(vals.begin(), vals.end());
                std::vector<int> left_counts(n_classes, 0);
                int n_left = 0;
                for (int i = 0; i + 1 < n; ++i) {
                    left_counts[vals[i].second]++;
                    ++n_left;
                    if (vals[i].first == vals[i + 1].first) continue;
                    std::vector<int> right_counts(n_classes);
                    for (int c = 0; c < n_classes; ++c) right_counts[c] = counts[c] - left_counts[c];
                    const double wimp = (n_left * gini(left_counts, n_left) +
                                         (n - n_left) * gini(right_counts, n - n_left)) /
                                        n;
                    const double decrease = node_gini - wimp;
                    // strict > keeps the lowest feature index and lowest threshold on ties
                    if (decrease > best_decrease) {
                        double mid = 0.5 * (vals[i].first + vals[i + 1].first);
                        // adjacent floats can round the midpoint onto an endpoint
                        if (!(vals[i].first < mid && mid < vals[i + 1].first)) {
                            mid = vals[i].first;
                        }
                        best_decrease = decrease;
                        best_feature = f;
                        best_threshold = mid;
                    }
                }
            }
        }

        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (best_feature < 0) {
            tree.nodes[node_id].label = majority_label(counts);
            return node_id;
        }
        tree.importances[best_feature] += (n / n_total) * std::max(best_decrease, 0.0);
        std::vector<int> left_rows, right_rows;
        for (int r : rows) {
            (X(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
        }
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        const int left = build(left_rows, depth + 1);
        tree.nodes[node_id].left = left;
        const int right = build(right_rows, depth + 1);
        tree.nodes[node_id].right = right;
        return node_id;
    }
};

TreeParams fit_tree(const Eigen::MatrixXd& X, const std::vector<int>& y_idx, int n_classes,
                    const ClassifierSpec& spec, const std::vector<int>& rows, int max_features,
                    Rng* rng) {
    TreeBuilder builder{X,
                        y_idx,
                        n_classes,
                        static_cast<int>(spec.hyper("max_depth")),
                        static_cast<int>(spec.hyper("min_samples_split")),
                        max_features,
                        rng,
                        {},
                        static_cast<double>(rows.size())};
    builder.tree.importances = Eigen::VectorXd::Zero(X.cols());
    std::vector<int> r = rows;
    builder.build(r, 0);
    const double total = builder.tree.importances.sum();
    if (total > 0.0) builder.tree.importances /= total;
    return std::move(builder.tree);
}

int tree_predict_row(const TreeParams& tree, const Eigen::RowVectorXd& x) {
    int node = 0;
    while (tree.nodes[node].feature >= 0) {
        node = x[tree.nodes[node].feature] <= tree.nodes[node].threshold ? tree.nodes[node].left
                                                                         : tree.nodes[node].right;
    }
    return tree.nodes[node].label;
}

NbParams fit_nb(const Eigen::MatrixXd& X, const std::vector<int>& y_idx, int n_classes) {
    NbParams nb;
    const Eigen::Index p = X.cols();
    nb.mean = Eigen::MatrixXd::Zero(n_classes, p);
    nb.var = Eigen::MatrixXd::Zero(n_classes, p);
    nb.log_prior.resize(n_classes);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_classes);
    for (std::size_t i = 0; i < y_idx.size(); ++i) {
        counts[y_idx[i]] += 1.0;
        nb.mean.row(y_idx[i]) += X.row(static_cast<Eigen::Index>(i));
    }
    for (int c = 0; c < n_classes; ++c) nb.mean.row(c) /= counts[c];
    for (std::size_t i = 0; i < y_idx.size(); ++i) {
        nb.var.row(y_idx[i]) +=
            (X.row(static_cast<Eigen::Index>(i)) - nb.mean.row(y_idx[i])).array().square().matrix();
    }
    for (int c = 0; c < n_classes; ++c) nb.var.row(c) /= counts[c];

    // Variance floor relative to the widest feature, so degenerate
    // per-class variances cannot blow up the likelihood.
    double max_var = 0.0;
    const Eigen::RowVectorXd pooled_mean = X.colwise().mean();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double v = (X.col(j).array() - pooled_mean[j]).square().sum() / X.rows();
        max_var = std::max(max_var, v);
    }
    const double floor = max_var > 0.0 ? 1e-9 * max_var : 1e-12;
    nb.var = nb.var.cwiseMax(floor);
    for (int c = 0; c < n_classes; ++c) {
        nb.log_prior[c] = std::log(counts[c] / static_cast<double>(y_idx.size()));
    }
    return nb;
}

Eigen::MatrixXd nb_log_likelihood(const NbParams& nb, const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    const int n_classes = static_cast<int>(nb.mean.rows());
    Eigen::MatrixXd ll(n, n_classes);
    for (int c = 0; c < n_classes; ++c) {
        const auto mu = nb.mean.row(c).array();
        const auto var = nb.var.row(c).array();
        const double norm = -0.5 * (var * 2.0 * std::numbers::pi).log().sum();
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto d = X.row(i).array() - mu;
            ll(i, c) = nb.log_prior[c] + norm - 0.5 * (d.square() / var).sum();
        }
    }
    return ll;
}

RidgeParams fit_ridge(const Eigen::MatrixXd& X, const std::vector<int>& y_idx, int n_classes,
                      double lambda) {
    RidgeParams r;
    r.std = Standardizer::fit(X);
    const Eigen::MatrixXd Z = r.std.apply(X);
    const Eigen::Index p = Z.cols();
    const int n_problems = n_classes == 2 ? 1 : n_classes;
    r.weights.resize(n_problems, p);
    r.intercept.resize(n_problems);

    Eigen::MatrixXd gram = Z.transpose() * Z;
    gram.diagonal().array() += lambda;
    const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("ridge: normal equations not solvable");
    }
    for (int prob = 0; prob < n_problems; ++prob) {
        const int positive = n_classes == 2 ? 1 : prob;
        Eigen::VectorXd t(Z.rows());
        for (Eigen::Index i = 0; i < Z.rows(); ++i) {
            t[i] = y_idx[static_cast<std::size_t>(i)] == positive ? 1.0 : -1.0;
        }
        const double b = t.mean();
        r.weights.row(prob) = solver.solve(Z.transpose() * (t.array() - b).matrix()).transpose();
        r.intercept[prob] = b;
    }
    return r;
}

QdaParams fit_qda(const Eigen::MatrixXd& X, const std::vector<int>& y_idx, int n_classes,
                  double gamma, const std::vector<int>& class_list) {
    QdaParams q;
    q.std = Standardizer::fit(X);
    const Eigen::MatrixXd Z = q.std.apply(X);
    const Eigen::Index p = Z.cols();
    q.log_det.resize(n_classes);
    q.log_prior.resize(n_classes);
    for (int c = 0; c < n_classes; ++c) {
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < y_idx.size(); ++i) {
            if (y_idx[i] == c) rows.push_back(static_cast<Eigen::Index>(i));
        }
        const auto nc = static_cast<double>(rows.size());
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
        for (auto i : rows) mu += Z.row(i).transpose();
        mu /= nc;
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
        for (auto i : rows) {
            const Eigen::VectorXd d = Z.row(i).transpose() - mu;
            cov += d * d.transpose();
        }
        cov /= std::max(nc - 1.0, 1.0);
        Eigen::MatrixXd shrunk = (1.0 - gamma) * cov;
        shrunk.diagonal() += gamma * cov.diagonal();

        const Eigen::LLT<Eigen::MatrixXd> llt(shrunk);
        const double pivot_floor = 1e-12 * std::max(shrunk.diagonal().maxCoeff(), 1e-300);
        const Eigen::MatrixXd L = llt.matrixL();
        double log_det = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            // an exactly singular matrix can round to a tiny positive pivot,
            // so a relative floor backs up the factorization's own check
            if (llt.info() != Eigen::Success || L(j, j) * L(j, j) <= pivot_floor) {
                throw NumericalError("qda: singular covariance for class " +
                                     std::to_string(class_list[c]) + " after shrinkage");
            }
            log_det += 2.0 * std::log(L(j, j));
        }
        q.mean.push_back(std::move(mu));
        q.precision.push_back(llt.solve(Eigen::MatrixXd::Identity(p, p)));
        q.log_det[c] = log_det;
        q.log_prior[c] = std::log(nc / static_cast<double>(y_idx.size()));
    }
    return q;
}

struct MlpWorkspace {
    Eigen::MatrixXd z;  // standardized inputs, n x p
    Eigen::MatrixXd onehot;  // classes x n
};

MlpParams init_mlp(const ClassifierSpec& spec, Eigen::Index p, int n_classes) {
    MlpParams m;
    const int hidden = static_cast<int>(spec.hyper("hidden"));
    const double s = spec.hyper("init_scale");
    Rng rng(spec.seed());
    const auto draw = [&] { return s * (2.0 * rng.u01() - 1.0); };
    m.w1.resize(hidden, p);
    for (Eigen::Index i = 0; i < m.w1.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.w1.cols(); ++j) m.w1(i, j) = draw();
    }
    m.b1.resize(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) m.b1[i] = draw();
    m.w2.resize(n_classes, hidden);
    for (Eigen::Index i = 0; i < m.w2.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.w2.cols(); ++j) m.w2(i, j) = draw();
    }
    m.b2.resize(n_classes);
    for (Eigen::Index i = 0; i < n_classes; ++i) m.b2[i] = draw();
    return m;
}

Eigen::MatrixXd softmax_cols(Eigen::MatrixXd scores) {
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
        const double m = scores.col(j).maxCoeff();
        scores.col(j) = (scores.col(j).array() - m).exp();
        scores.col(j) /= scores.col(j).sum();
    }
    return scores;
}

// Mean cross-entropy and its gradient at the given parameters.
double mlp_loss_grad(const MlpParams& m, const MlpWorkspace& ws, MlpParams* grad) {
    const Eigen::Index n = ws.z.rows();
    const Eigen::MatrixXd z1 = (m.w1 * ws.z.transpose()).colwise() + m.b1;
    const Eigen::MatrixXd a1 = z1.array().tanh();
    const Eigen::MatrixXd z2 = (m.w2 * a1).colwise() + m.b2;
    const Eigen::MatrixXd prob = softmax_cols(z2);

    double loss = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index c = 0; c < prob.rows(); ++c) {
            if (ws.onehot(c, j) > 0.0) loss -= std::log(std::max(prob(c, j), 1e-300));
        }
    }
    loss /= static_cast<double>(n);

    if (grad) {
        const Eigen::MatrixXd dz2 = (prob - ws.onehot) / static_cast<double>(n);
        grad->w2 = dz2 * a1.transpose();
        grad->b2 = dz2.rowwise().sum();
        const Eigen::MatrixXd da1 = m.w2.transpose() * dz2;
        const Eigen::MatrixXd dz1 = da1.array() * (1.0 - a1.array().square());
        grad->w1 = dz1 * ws.z;
        grad->b1 = dz1.rowwise().sum();
    }
    return loss;
}

MlpParams fit_mlp(const ClassifierSpec& spec, const Eigen::MatrixXd& X,
                  const std::vector<int>& y_idx, int n_classes) {
    MlpParams m = init_mlp(spec, X.cols(), n_classes);
    m.std = Standardizer::fit(X);
    MlpWorkspace ws;
    ws.z = m.std.apply(X);
    ws.onehot = Eigen::MatrixXd::Zero(n_classes, X.rows());
    for (std::size_t i = 0; i < y_idx.size(); ++i) {
        ws.onehot(y_idx[i], static_cast<Eigen::Index>(i)) = 1.0;
    }
    const int epochs = static_cast<int>(spec.hyper("epochs"));
    const double lr = spec.hyper("learning_rate");
    MlpParams grad;
    for (int e = 0; e < epochs; ++e) {
        mlp_loss_grad(m, ws, &grad);
        m.w1 -= lr * grad.w1;
        m.b1 -= lr * grad.b1;
        m.w2 -= lr * grad.w2;
        m.b2 -= lr * grad.b2;
    }
    return m;
}

void check_training_inputs(const Eigen::MatrixXd& X, const std::vector<int>& y) {
    if (X.rows() == 0 || X.cols() == 0) {
        throw ValidationError("fit: empty training matrix");
    }
    if (static_cast<std::size_t>(X.rows()) != y.size()) {
        throw ValidationError("fit: " + std::to_string(X.rows()) + " rows vs " +
                              std::to_string(y.size()) + " labels");
    }
    if (!X.allFinite()) {
        throw ValidationError("fit: non-finite values in training matrix");
    }
}

}  // namespace

TrainedModel fit(const ClassifierSpec& spec, const Eigen::MatrixXd& X, const std::vector<int>& y) {
    check_training_inputs(X, y);
    TrainedModel model;
    model.spec = spec;
    const std::vector<int> y_idx = class_indices(y, model.class_list);
    const int n_classes = static_cast<int>(model.class_list.size());
    // kNN is a pure memorizer and can legitimately train on one point; every
    // model-based kind needs at least two classes.
    if (n_classes < 2 && spec.kind() != ClassifierKind::knn) {
        throw ValidationError("fit: training set has a single class");
    }

    switch (spec.kind()) {
        case ClassifierKind::knn: {
            KnnParams knn;
            knn.std = Standardizer::fit(X);
            knn.X = knn.std.apply(X);
            knn.y = y_idx;
            model.params = std::move(knn);
            break;
        }
        case ClassifierKind::decision_tree: {
            std::vector<int> rows(X.rows());
            std::iota(rows.begin(), rows.end(), 0);
            model.params = fit_tree(X, y_idx, n_classes, spec, rows, 0, nullptr);
            break;
        }
        case ClassifierKind::random_forest: {
            ForestParams forest;
            const int n_trees = static_cast<int>(spec.hyper("n_trees"));
            const bool bootstrap = spec.hyper("bootstrap") != 0.0;
            int max_features = static_cast<int>(spec.hyper("max_features"));
            if (max_features == 0) {
                max_features = static_cast<int>(
                    std::ceil(std::sqrt(static_cast<double>(X.cols()))));
            }
            max_features = std::min<int>(max_features, static_cast<int>(X.cols()));
            forest.importances = Eigen::VectorXd::Zero(X.cols());
            for (int t = 0; t < n_trees; ++t) {
                Rng rng(spec.seed() + static_cast<std::uint64_t>(t));
                std::vector<int> rows(X.rows());
                if (bootstrap) {
                    for (auto& r : rows) r = static_cast<int>(rng.below(X.rows()));
                } else {
                    std::iota(rows.begin(), rows.end(), 0);
                }
                const int mf = max_features == static_cast<int>(X.cols()) ? 0 : max_features;
                forest.trees.push_back(fit_tree(X, y_idx, n_classes, spec, rows, mf, &rng));
                forest.importances += forest.trees.back().importances;
            }
            forest.importances /= static_cast<double>(n_trees);
            model.params = std::move(forest);
            break;
        }
        case ClassifierKind::gaussian_nb:
            model.params = fit_nb(X, y_idx, n_classes);
            break;
        case ClassifierKind::ridge:
            model.params = fit_ridge(X, y_idx, n_classes, spec.hyper("lambda"));
            break;
        case ClassifierKind::qda:
            model.params = fit_qda(X, y_idx, n_classes, spec.hyper("gamma"), model.class_list);
            break;
        case ClassifierKind::mlp:
            model.params = fit_mlp(spec, X, y_idx, n_classes);
            break;
    }
    return model;
}

namespace {

void check_predict_inputs(const TrainedModel& model, const Eigen::MatrixXd& X) {
    Eigen::Index expected = 0;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KnnParams>) expected = p.X.cols();
            else if constexpr (std::is_same_v<T, TreeParams>) expected = p.importances.size();
            else if constexpr (std::is_same_v<T, ForestParams>) expected = p.importances.size();
            else if constexpr (std::is_same_v<T, NbParams>) expected = p.mean.cols();
            else if constexpr (std::is_same_v<T, RidgeParams>) expected = p.weights.cols();
            else if constexpr (std::is_same_v<T, QdaParams>) expected = p.mean.at(0).size();
            else if constexpr (std::is_same_v<T, MlpParams>) expected = p.w1.cols();
        },
        model.params);
    if (X.cols() != expected) {
        throw ValidationError("predict: got " + std::to_string(X.cols()) + " features, model has " +
                              std::to_string(expected));
    }
}

int knn_predict_row(const KnnParams& knn, int k, const Eigen::RowVectorXd& x, int n_classes) {
    const Eigen::Index n = knn.X.rows();
    std::vector<std::pair<double, int>> dist(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist[i] = {(knn.X.row(i) - x).squaredNorm(), static_cast<int>(i)};
    }
    const int kk = std::min<int>(k, static_cast<int>(n));
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    std::vector<int> votes(n_classes, 0);
    for (int i = 0; i < kk; ++i) votes[knn.y[dist[i].second]]++;
    int best = 0;
    bool tie = false;
    for (int c = 1; c < n_classes; ++c) {
        if (votes[c] > votes[best]) {
            best = c;
            tie = false;
        } else if (votes[c] == votes[best]) {
            tie = true;
        }
    }
    // vote tie -> label of the single nearest neighbor
    return tie ? knn.y[dist[0].second] : best;
}

}  // namespace

std::vector<int> predict(const TrainedModel& model, const Eigen::MatrixXd& X) {
    check_predict_inputs(model, X);
    const int n_classes = static_cast<int>(model.class_list.size());
    std::vector<int> out(static_cast<std::size_t>(X.rows()));

    if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
        const Eigen::MatrixXd Z = knn->std.apply(X);
        const int k = static_cast<int>(model.spec.hyper("k"));
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            out[i] = knn_predict_row(*knn, k, Z.row(i), n_classes);
        }
    } else if (const auto* tree = std::get_if<TreeParams>(&model.params)) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = tree_predict_row(*tree, X.row(i));
    } else if (const auto* forest = std::get_if<ForestParams>(&model.params)) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            std::vector<int> votes(n_classes, 0);
            for (const auto& t : forest->trees) votes[tree_predict_row(t, X.row(i))]++;
            out[i] = majority_label(votes);  // tie -> smaller class label
        }
    } else if (const auto* nb = std::get_if<NbParams>(&model.params)) {
        const Eigen::MatrixXd ll = nb_log_likelihood(*nb, X);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            Eigen::Index best;
            ll.row(i).maxCoeff(&best);
            out[i] = static_cast<int>(best);
        }
    } else if (const auto* ridge = std::get_if<RidgeParams>(&model.params)) {
        const Eigen::MatrixXd Z = ridge->std.apply(X);
        if (n_classes == 2) {
            const Eigen::VectorXd score =
                Z * ridge->weights.row(0).transpose() + Eigen::VectorXd::Constant(Z.rows(), ridge->intercept[0]);
            for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = score[i] > 0.0 ? 1 : 0;
        } else {
            const Eigen::MatrixXd scores =
                (Z * ridge->weights.transpose()).rowwise() + ridge->intercept.transpose();
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                Eigen::Index best;
                scores.row(i).maxCoeff(&best);
                out[i] = static_cast<int>(best);
            }
        }
    } else if (const auto* qda = std::get_if<QdaParams>(&model.params)) {
        const Eigen::MatrixXd Z = qda->std.apply(X);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            int best = 0;
            double best_score = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < n_classes; ++c) {
                const Eigen::VectorXd d = Z.row(i).transpose() - qda->mean[c];
                const double score = qda->log_prior[c] - 0.5 * qda->log_det[c] -
                                     0.5 * d.dot(qda->precision[c] * d);
                if (score > best_score) {
                    best_score = score;
                    best = c;
                }
            }
            out[i] = best;
        }
    } else if (const auto* mlp = std::get_if<MlpParams>(&model.params)) {
        const Eigen::MatrixXd Z = mlp->std.apply(X);
        const Eigen::MatrixXd a1 = ((mlp->w1 * Z.transpose()).colwise() + mlp->b1).array().tanh();
        const Eigen::MatrixXd scores = (mlp->w2 * a1).colwise() + mlp->b2;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            Eigen::Index best;
            scores.col(i).maxCoeff(&best);
            out[i] = static_cast<int>(best);
        }
    }

    for (auto& v : out) v = model.class_list[static_cast<std::size_t>(v)];
    return out;
}

Eigen::MatrixXd predict_proba(const TrainedModel& model, const Eigen::MatrixXd& X) {
    check_predict_inputs(model, X);
    const auto* nb = std::get_if<NbParams>(&model.params);
    if (!nb) {
        throw ValidationError("predict_proba: only supported for gaussian_nb");
    }
    Eigen::MatrixXd ll = nb_log_likelihood(*nb, X);
    for (Eigen::Index i = 0; i < ll.rows(); ++i) {
        const double m = ll.row(i).maxCoeff();
        ll.row(i) = (ll.row(i).array() - m).exp();
        ll.row(i) /= ll.row(i).sum();
    }
    return ll;
}

Eigen::VectorXd feature_importances(const TrainedModel& model) {
    if (const auto* ridge = std::get_if<RidgeParams>(&model.params)) {
        return ridge->weights.cwiseAbs().colwise().maxCoeff().transpose();
    }
    if (const auto* tree = std::get_if<TreeParams>(&model.params)) {
        return tree->importances;
    }
    if (const auto* forest = std::get_if<ForestParams>(&model.params)) {
        return forest->importances;
    }
    throw ValidationError(std::string("feature_importances: not defined for ") +
                          classifier_kind_name(model.spec.kind()));
}

namespace {

struct ByteSink {
    std::vector<std::uint8_t> bytes;

    void add(double v) {
        std::uint8_t buf[8];
        std::memcpy(buf, &v, 8);
        bytes.insert(bytes.end(), buf, buf + 8);
    }
    void add(int v) { add(static_cast<double>(v)); }
    void add(const Eigen::MatrixXd& m) {
        add(static_cast<double>(m.rows()));
        add(static_cast<double>(m.cols()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) add(m(i, j));
        }
    }
    void add(const Eigen::VectorXd& v) {
        add(static_cast<double>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) add(v[i]);
    }
};

}  // namespace

std::vector<std::uint8_t> serialize_model(const TrainedModel& model) {
    ByteSink sink;
    sink.add(static_cast<int>(model.spec.kind()));
    for (int c : model.class_list) sink.add(c);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KnnParams>) {
                sink.add(p.std.mean);
                sink.add(p.std.scale);
                sink.add(p.X);
                for (int v : p.y) sink.add(v);
            } else if constexpr (std::is_same_v<T, TreeParams>) {
                for (const auto& n : p.nodes) {
                    sink.add(n.feature);
                    sink.add(n.threshold);
                    sink.add(n.left);
                    sink.add(n.right);
                    sink.add(n.label);
                }
            } else if constexpr (std::is_same_v<T, ForestParams>) {
                for (const auto& t : p.trees) {
                    for (const auto& n : t.nodes) {
                        sink.add(n.feature);
                        sink.add(n.threshold);
                        sink.add(n.left);
                        sink.add(n.right);
                        sink.add(n.label);
                    }
                }
            } else if constexpr (std::is_same_v<T, NbParams>) {
                sink.add(p.mean);
                sink.add(p.var);
                sink.add(p.log_prior);
            } else if constexpr (std::is_same_v<T, RidgeParams>) {
                sink.add(p.std.mean);
                sink.add(p.std.scale);
                sink.add(p.weights);
                sink.add(p.intercept);
            } else if constexpr (std::is_same_v<T, QdaParams>) {
                sink.add(p.std.mean);
                sink.add(p.std.scale);
                for (const auto& m : p.mean) sink.add(m);
                for (const auto& prec : p.precision) sink.add(prec);
                sink.add(p.log_det);
                sink.add(p.log_prior);
            } else if constexpr (std::is_same_v<T, MlpParams>) {
                sink.add(p.std.mean);
                sink.add(p.std.scale);
                sink.add(p.w1);
                sink.add(p.b1);
                sink.add(p.w2);
                sink.add(p.b2);
            }
        },
        model.params);
    return std::move(sink.bytes);
}

double gradient_check(const ClassifierSpec& spec, const Eigen::MatrixXd& X,
                      const std::vector<int>& y) {
    if (spec.kind() != ClassifierKind::mlp) {
        throw ValidationError("gradient_check: spec must be an mlp");
    }
    if (X.rows() > 20 || X.cols() > 5) {
        throw ValidationError("gradient_check: needs <= 20 samples and <= 5 features");
    }
    check_training_inputs(X, y);
    std::vector<int> class_list;
    const std::vector<int> y_idx = class_indices(y, class_list);
    const int n_classes = std::max<int>(2, static_cast<int>(class_list.size()));

    MlpParams m = init_mlp(spec, X.cols(), n_classes);
    m.std = Standardizer::fit(X);
    MlpWorkspace ws;
    ws.z = m.std.apply(X);
    ws.onehot = Eigen::MatrixXd::Zero(n_classes, X.rows());
    for (std::size_t i = 0; i < y_idx.size(); ++i) {
        ws.onehot(y_idx[i], static_cast<Eigen::Index>(i)) = 1.0;
    }

    MlpParams grad;
    mlp_loss_grad(m, ws, &grad);

    const double eps = 1e-5;
    double worst = 0.0;
    const auto check_block = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& analytic) {
        for (Eigen::Index i = 0; i < param.rows(); ++i) {
            for (Eigen::Index j = 0; j < param.cols(); ++j) {
                const double orig = param(i, j);
                param(i, j) = orig + eps;
                const double lp = mlp_loss_grad(m, ws, nullptr);
                param(i, j) = orig - eps;
                const double lm = mlp_loss_grad(m, ws, nullptr);
                param(i, j) = orig;
                const double numeric = (lp - lm) / (2.0 * eps);
                const double a = analytic(i, j);
                const double rel =
                    std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
                worst = std::max(worst, rel);
            }
        }
    };
    check_block(m.w1, grad.w1);
    check_block(m.w2, grad.w2);
    const auto check_vec = [&](Eigen::VectorXd& param, const Eigen::VectorXd& analytic) {
        for (Eigen::Index i = 0; i < param.size(); ++i) {
            const double orig = param[i];
            param[i] = orig + eps;
            const double lp = mlp_loss_grad(m, ws, nullptr);
            param[i] = orig - eps;
            const double lm = mlp_loss_grad(m, ws, nullptr);
            param[i] = orig;
            const double numeric = (lp - lm) / (2.0 * eps);
            const double rel = std::abs(analytic[i] - numeric) /
                               std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
            worst = std::max(worst, rel);
        }
    };
    check_vec(m.b1, grad.b1);
    check_vec(m.b2, grad.b2);
    return worst;
}

}  // namespace eegpref
