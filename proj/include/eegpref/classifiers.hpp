#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "eegpref/errors.hpp"

namespace eegpref {

enum class ClassifierKind { knn, decision_tree, random_forest, gaussian_nb, ridge, qda, mlp };

const char* classifier_kind_name(ClassifierKind k);
const char* classifier_display_name(ClassifierKind k);
ClassifierKind classifier_kind_from_name(const std::string& name);

// Classifier description: kind, hyperparameters, seed. Hyperparameters are
// validated per kind at construction; unspecified ones take the defaults
// listed in default_hyperparameters().
class ClassifierSpec {
  public:
    ClassifierSpec() = default;  // default knn spec; create() is the validated path

    static ClassifierSpec create(ClassifierKind kind,
                                 const std::map<std::string, double>& hyper = {},
                                 std::uint64_t seed = 0);

    ClassifierKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    double hyper(const std::string& name) const;  // falls back to the kind's default
    const std::map<std::string, double>& hyperparameters() const { return hyper_; }
    ClassifierSpec with_seed(std::uint64_t seed) const;

  private:
    ClassifierKind kind_ = ClassifierKind::knn;
    std::map<std::string, double> hyper_;
    std::uint64_t seed_ = 0;
};

std::map<std::string, double> default_hyperparameters(ClassifierKind kind);

// z-score parameters learned from a training split.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  // population std; constant features get 1

    static Standardizer fit(const Eigen::MatrixXd& X);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

struct KnnParams {
    Standardizer std;
    Eigen::MatrixXd X;  // standardized training rows
    std::vector<int> y; // class indices
};

struct TreeNode {
    int feature = -1;        // -1 for leaves
    double threshold = 0.0;  // go left when x <= threshold
    int left = -1, right = -1;
    int label = -1;          // class index at leaves
};

struct TreeParams {
    std::vector<TreeNode> nodes;
    Eigen::VectorXd importances;  // normalized mean impurity decrease
};

struct ForestParams {
    std::vector<TreeParams> trees;
    Eigen::VectorXd importances;
};

struct NbParams {
    Eigen::MatrixXd mean, var;  // class x feature
    Eigen::VectorXd log_prior;
};

struct RidgeParams {
    Standardizer std;
    Eigen::MatrixXd weights;    // one row per one-vs-rest problem (1 row when binary)
    Eigen::VectorXd intercept;
};

struct QdaParams {
    Standardizer std;
    std::vector<Eigen::VectorXd> mean;
    std::vector<Eigen::MatrixXd> precision;  // inverse of shrunk covariance
    Eigen::VectorXd log_det;                 // of the shrunk covariance
    Eigen::VectorXd log_prior;
};

struct MlpParams {
    Standardizer std;
    Eigen::MatrixXd w1;  // hidden x features
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;  // classes x hidden
    Eigen::VectorXd b2;
};

struct TrainedModel {
    ClassifierSpec spec;
    std::vector<int> class_list;  // ascending distinct training labels
    std::variant<KnnParams, TreeParams, ForestParams, NbParams, RidgeParams, QdaParams, MlpParams>
        params;
};

// Deterministic given (spec, X, y). Requires >= 2 classes and finite values.
TrainedModel fit(const ClassifierSpec& spec, const Eigen::MatrixXd& X, const std::vector<int>& y);

// One label per row, always from class_list.
std::vector<int> predict(const TrainedModel& model, const Eigen::MatrixXd& X);

// Class-posterior rows (gaussian_nb only); each row sums to 1.
Eigen::MatrixXd predict_proba(const TrainedModel& model, const Eigen::MatrixXd& X);

// Per-feature importance for ranking (ridge: max |standardized coefficient|
// across one-vs-rest rows; forest/tree: normalized mean impurity decrease).
Eigen::VectorXd feature_importances(const TrainedModel& model);

// Flat parameter dump in a fixed order; byte-compare two fits with it.
std::vector<std::uint8_t> serialize_model(const TrainedModel& model);

// Compares the analytic MLP loss gradient at the seeded initial weights
// against central finite differences (step 1e-5) over every parameter and
// returns the largest relative error |ga-gn| / max(1, |ga|, |gn|).
double gradient_check(const ClassifierSpec& spec, const Eigen::MatrixXd& X,
                      const std::vector<int>& y);

}  // namespace eegpref
