#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eegpref/classifiers.hpp"
#include "eegpref/rng.hpp"

using namespace eegpref;

namespace {

Eigen::MatrixXd random_matrix(std::uint64_t seed, Eigen::Index n, Eigen::Index p) {
    Rng rng(seed);
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
    }
    return X;
}

std::vector<int> alternating_labels(int n) {
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = i % 2;
    return y;
}

double train_accuracy(const TrainedModel& model, const Eigen::MatrixXd& X,
                      const std::vector<int>& y) {
    const auto pred = predict(model, X);
    int ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (pred[i] == y[i]) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("spec validation catches bad hyperparameters") {
    CHECK_THROWS_AS(ClassifierSpec::create(ClassifierKind::knn, {{"k", 0.0}}), ValidationError);
    CHECK_THROWS_AS(ClassifierSpec::create(ClassifierKind::knn, {{"neighbors", 3.0}}),
                    ValidationError);
    CHECK_THROWS_AS(ClassifierSpec::create(ClassifierKind::knn, {{"k", 2.5}}), ValidationError);
    CHECK_THROWS_AS(ClassifierSpec::create(ClassifierKind::qda, {{"gamma", 1.5}}), ValidationError);
    CHECK_THROWS_AS(ClassifierSpec::create(ClassifierKind::mlp, {{"hidden", 0.0}}),
                    ValidationError);
    const auto spec = ClassifierSpec::create(ClassifierKind::knn, {{"k", 3.0}}, 7);
    CHECK(spec.hyper("k") == 3.0);
    CHECK(spec.seed() == 7);
}

TEST_CASE("knn memorizes a single training point") {
    Eigen::MatrixXd X(1, 2);
    X << 0.3, -0.7;
    const auto model = fit(ClassifierSpec::create(ClassifierKind::knn), X, {4});
    const auto pred = predict(model, random_matrix(1, 10, 2));
    for (int v : pred) CHECK(v == 4);
}

TEST_CASE("knn k=1 returns the training row's own label") {
    const Eigen::MatrixXd X = random_matrix(2, 20, 3);
    const auto y = alternating_labels(20);
    const auto model = fit(ClassifierSpec::create(ClassifierKind::knn, {{"k", 1.0}}), X, y);
    CHECK(predict(model, X) == y);
}

TEST_CASE("3-NN matches the hand-computed distance table") {
    // Both feature columns have mean 0.2 and identical variance, so internal
    // standardization rescales distances uniformly and the raw-space distance
    // order below is the standardized order too.
    //   row  point      label
    //   0    ( 0,  0)   0
    //   1    ( 1,  0)   1
    //   2    ( 0,  1)   1
    //   3    ( 4,  4)   0
    //   4    (-4, -4)   0
    Eigen::MatrixXd X(5, 2);
    X << 0, 0, 1, 0, 0, 1, 4, 4, -4, -4;
    const std::vector<int> y = {0, 1, 1, 0, 0};
    const auto m3 = fit(ClassifierSpec::create(ClassifierKind::knn, {{"k", 3.0}}), X, y);

    // query (0.6, 0): d(B)=0.4 < d(A)=0.6 < d(C)=1.166 < d(D) < d(E)
    // 3 nearest = {B:1, A:0, C:1} -> majority 1
    Eigen::MatrixXd q(1, 2);
    q << 0.6, 0.0;
    CHECK(predict(m3, q)[0] == 1);

    // query (0.1, 0.9): d(C)=0.141 < d(A)=0.906 < d(B)=1.27; k=2 -> votes
    // {C:1, A:0} tie -> label of the single nearest neighbor C -> 1
    const auto m2 = fit(ClassifierSpec::create(ClassifierKind::knn, {{"k", 2.0}}), X, y);
    q << 0.1, 0.9;
    CHECK(predict(m2, q)[0] == 1);

    // query (0.5, 0): d(A) = d(B) = 0.5 exactly; distance tie -> lower row
    // index A -> 0
    const auto m1 = fit(ClassifierSpec::create(ClassifierKind::knn, {{"k", 1.0}}), X, y);
    q << 0.5, 0.0;
    CHECK(predict(m1, q)[0] == 0);
}

TEST_CASE("decision tree solves XOR at depth two") {
    Eigen::MatrixXd X(4, 2);
    X << 0, 0, 0, 1, 1, 0, 1, 1;
    const std::vector<int> y = {0, 1, 1, 0};
    const auto deep =
        fit(ClassifierSpec::create(ClassifierKind::decision_tree, {{"max_depth", 2.0}}), X, y);
    CHECK(train_accuracy(deep, X, y) == 1.0);

    const auto stump =
        fit(ClassifierSpec::create(ClassifierKind::decision_tree, {{"max_depth", 1.0}}), X, y);
    CHECK(train_accuracy(stump, X, y) <= 0.75);
}

TEST_CASE("forest with one tree and no bootstrap equals the tree") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Eigen::MatrixXd X = random_matrix(seed, 30, 4);
        std::vector<int> y;
        Rng rng(seed + 50);
        for (int i = 0; i < 30; ++i) y.push_back(static_cast<int>(rng.below(2)));
        y[0] = 0;
        y[1] = 1;  // both classes present

        const auto tree = fit(ClassifierSpec::create(ClassifierKind::decision_tree), X, y);
        const auto forest = fit(ClassifierSpec::create(ClassifierKind::random_forest,
                                                       {{"n_trees", 1.0},
                                                        {"bootstrap", 0.0},
                                                        {"max_features", 4.0}}),
                                X, y);
        const Eigen::MatrixXd probe = random_matrix(seed + 99, 50, 4);
        CHECK(predict(tree, X) == predict(forest, X));
        CHECK(predict(tree, probe) == predict(forest, probe));
    }
}

TEST_CASE("forest defaults separate an easy problem") {
    Eigen::MatrixXd X = random_matrix(1, 80, 3);
    std::vector<int> y;
    for (int i = 0; i < 80; ++i) {
        y.push_back(i < 40 ? 0 : 1);
        X(i, 1) += i < 40 ? -3.0 : 3.0;
    }
    const auto model =
        fit(ClassifierSpec::create(ClassifierKind::random_forest, {{"n_trees", 25.0}}, 3), X, y);
    CHECK(train_accuracy(model, X, y) >= 0.95);
}

TEST_CASE("gaussian nb separates two unit gaussians at +-5") {
    Rng rng(11);
    Eigen::MatrixXd X(200, 1);
    std::vector<int> y;
    for (int i = 0; i < 200; ++i) {
        const int cls = i < 100 ? 0 : 1;
        X(i, 0) = (cls == 0 ? -5.0 : 5.0) + rng.normal();
        y.push_back(cls);
    }
    const auto model = fit(ClassifierSpec::create(ClassifierKind::gaussian_nb), X, y);
    CHECK(train_accuracy(model, X, y) >= 0.99);

    const Eigen::MatrixXd proba = predict_proba(model, X);
    for (Eigen::Index i = 0; i < proba.rows(); ++i) {
        CHECK(std::abs(proba.row(i).sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("ridge resolves the symmetric midpoint to the smaller label") {
    Eigen::MatrixXd X(4, 1);
    X << -2, -1, 1, 2;
    const std::vector<int> y = {0, 0, 1, 1};
    const auto model = fit(ClassifierSpec::create(ClassifierKind::ridge), X, y);
    Eigen::MatrixXd q(1, 1);
    q << 0.0;
    CHECK(predict(model, q)[0] == 0);  // score exactly 0 -> smaller class
    q << 0.4;
    CHECK(predict(model, q)[0] == 1);
    q << -0.4;
    CHECK(predict(model, q)[0] == 0);
}

TEST_CASE("ridge handles three classes one-vs-rest") {
    Rng rng(13);
    // blobs at triangle corners: each class is linearly separable from the
    // rest, which one-vs-rest ridge needs
    const double cx[3] = {0.0, 6.0, 3.0};
    const double cy[3] = {0.0, 0.0, 5.0};
    Eigen::MatrixXd X(90, 2);
    std::vector<int> y;
    for (int i = 0; i < 90; ++i) {
        const int cls = i / 30;
        X(i, 0) = cx[cls] + rng.normal();
        X(i, 1) = cy[cls] + rng.normal();
        y.push_back(cls + 5);  // non-contiguous labels
    }
    const auto model = fit(ClassifierSpec::create(ClassifierKind::ridge), X, y);
    CHECK(train_accuracy(model, X, y) >= 0.95);
    for (int v : predict(model, X)) {
        CHECK((v == 5 || v == 6 || v == 7));
    }
}

TEST_CASE("qda separates classes by covariance and flags singular ones") {
    Rng rng(17);
    Eigen::MatrixXd X(160, 2);
    std::vector<int> y;
    for (int i = 0; i < 160; ++i) {
        const int cls = i < 80 ? 0 : 1;
        const double s = cls == 0 ? 0.5 : 3.0;  // same mean, different spread
        X(i, 0) = s * rng.normal();
        X(i, 1) = s * rng.normal();
        y.push_back(cls);
    }
    const auto model = fit(ClassifierSpec::create(ClassifierKind::qda), X, y);
    CHECK(train_accuracy(model, X, y) >= 0.85);

    Eigen::MatrixXd bad(3, 2);
    bad << 0, 0, 1, 1, 2, 2;
    CHECK_THROWS_WITH_AS(fit(ClassifierSpec::create(ClassifierKind::qda), bad, {9, 0, 0}),
                         doctest::Contains("class 9"), NumericalError);
}

TEST_CASE("qda shrinkage rescues rank-deficient class covariances") {
    // within each class the two features are perfectly correlated, so the raw
    // covariance is singular; diagonal shrinkage must make it usable
    Rng rng(53);
    Eigen::MatrixXd X(40, 2);
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        const int cls = i % 2;
        const double v = (cls ? 4.0 : -4.0) + rng.normal();
        X(i, 0) = v;
        X(i, 1) = 2.0 * v;
        y.push_back(cls);
    }
    const auto model = fit(ClassifierSpec::create(ClassifierKind::qda), X, y);
    CHECK(train_accuracy(model, X, y) >= 0.95);

    // with zero shrinkage the same data must fail
    CHECK_THROWS_AS(fit(ClassifierSpec::create(ClassifierKind::qda, {{"gamma", 0.0}}), X, y),
                    NumericalError);
}

TEST_CASE("mlp gradient check") {
    const Eigen::MatrixXd X = random_matrix(19, 10, 3);
    std::vector<int> y;
    for (int i = 0; i < 10; ++i) y.push_back(i % 2);

    const auto zero_init =
        ClassifierSpec::create(ClassifierKind::mlp, {{"init_scale", 0.0}, {"hidden", 4.0}}, 1);
    CHECK(gradient_check(zero_init, X, y) < 1e-6);

    const auto seeded = ClassifierSpec::create(ClassifierKind::mlp, {{"hidden", 5.0}}, 21);
    CHECK(gradient_check(seeded, X, y) < 1e-4);

    Eigen::MatrixXd one(1, 2);
    one << 0.5, -1.0;
    CHECK(gradient_check(seeded, one, {0}) < 1e-4);
}

TEST_CASE("mlp learns a separable problem") {
    Rng rng(23);
    Eigen::MatrixXd X(60, 2);
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        const int cls = i % 2;
        X(i, 0) = (cls ? 2.0 : -2.0) + 0.5 * rng.normal();
        X(i, 1) = rng.normal();
        y.push_back(cls);
    }
    const auto model = fit(ClassifierSpec::create(ClassifierKind::mlp, {}, 5), X, y);
    CHECK(train_accuracy(model, X, y) >= 0.95);
}

TEST_CASE("fits are deterministic given the seed") {
    const Eigen::MatrixXd X = random_matrix(29, 40, 5);
    const auto y = alternating_labels(40);
    for (auto kind : {ClassifierKind::random_forest, ClassifierKind::mlp, ClassifierKind::knn,
                      ClassifierKind::ridge, ClassifierKind::qda, ClassifierKind::gaussian_nb,
                      ClassifierKind::decision_tree}) {
        const auto spec = ClassifierSpec::create(kind, {}, 31);
        const auto a = fit(spec, X, y);
        const auto b = fit(spec, X, y);
        CHECK(serialize_model(a) == serialize_model(b));
        const Eigen::MatrixXd probe = random_matrix(30, 15, 5);
        CHECK(predict(a, probe) == predict(b, probe));
    }
}

TEST_CASE("predictions stay inside the training label set") {
    const Eigen::MatrixXd X = random_matrix(37, 30, 4);
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) y.push_back(i % 3 == 0 ? 3 : 7);
    const Eigen::MatrixXd probe = 10.0 * random_matrix(38, 25, 4);
    for (auto kind : {ClassifierKind::knn, ClassifierKind::decision_tree,
                      ClassifierKind::random_forest, ClassifierKind::gaussian_nb,
                      ClassifierKind::ridge, ClassifierKind::qda, ClassifierKind::mlp}) {
        const auto model = fit(ClassifierSpec::create(kind, {}, 41), X, y);
        for (int v : predict(model, probe)) {
            CHECK((v == 3 || v == 7));
        }
    }
}

TEST_CASE("standardizing kinds ignore per-feature scaling") {
    Eigen::MatrixXd X = random_matrix(43, 50, 3);
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
        y.push_back(X(i, 2) > 0 ? 1 : 0);
    }
    Eigen::MatrixXd probe = random_matrix(44, 20, 3);
    for (auto kind : {ClassifierKind::knn, ClassifierKind::ridge}) {
        const auto spec = ClassifierSpec::create(kind, {}, 45);
        const auto base = predict(fit(spec, X, y), probe);
        Eigen::MatrixXd Xs = X;
        Eigen::MatrixXd ps = probe;
        Xs.col(1) *= 1000.0;
        ps.col(1) *= 1000.0;
        CHECK(predict(fit(spec, Xs, y), ps) == base);
    }
}

TEST_CASE("training errors") {
    const Eigen::MatrixXd X = random_matrix(47, 10, 2);
    CHECK_THROWS_AS(fit(ClassifierSpec::create(ClassifierKind::ridge), X, std::vector<int>(10, 1)),
                    ValidationError);
    Eigen::MatrixXd bad = X;
    bad(3, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit(ClassifierSpec::create(ClassifierKind::ridge), bad, alternating_labels(10)),
                    ValidationError);

    const auto model = fit(ClassifierSpec::create(ClassifierKind::ridge), X, alternating_labels(10));
    CHECK_THROWS_AS(predict(model, random_matrix(48, 5, 3)), ValidationError);
}
