#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "eegpref/types.hpp"
#include "eegpref/wavelet.hpp"

namespace eegpref {

enum class PowerMode { relative, log_absolute };
enum class ChannelPolicy { average, per_channel };

// Band energy as a feature. Relative mode divides by the five-band total
// (sum over the named bands is 1); log_absolute returns log10(E + 1e-12).
double band_power(const BandDecomposition& decomp, Band band,
                  PowerMode mode = PowerMode::relative);

// Normalized Shannon entropy of the band's squared-coefficient distribution:
// p_i = c_i^2 / E, H = -sum p ln p, returned as H / ln(N) in [0, 1].
// A zero-energy band has entropy 0.
double band_entropy(const BandDecomposition& decomp, Band band);

struct FeatureVector {
    std::vector<double> values;
    std::vector<std::string> names;
    std::string subject_id;
    int trial_index = 0;
};

// Per-epoch features over good channels: 5 bands x {power, entropy}.
// average: one 10-entry vector (arithmetic mean over good channels).
// per_channel: one vector per good channel, names suffixed "@<channel>".
std::vector<FeatureVector> epoch_features(const Epoch& epoch,
                                          ChannelPolicy policy = ChannelPolicy::average,
                                          PowerMode mode = PowerMode::relative);

struct FeatureMatrix {
    Eigen::MatrixXd X;                      // n_epochs x n_features
    std::vector<std::string> feature_names;
    std::vector<int> labels;                // aligned to rows
    LabelScheme scheme = LabelScheme::binary_like_dislike;
    std::vector<std::pair<std::string, int>> keys;  // (subject_id, trial_index)

    Eigen::Index n_rows() const { return X.rows(); }
    Eigen::Index n_features() const { return X.cols(); }
};

// One row per epoch in stable (subject, trial) order; labels via
// make_class_label. Throws on empty input or non-finite features.
FeatureMatrix assemble_matrix(const std::vector<Epoch>& epochs, LabelScheme scheme,
                              int threshold = 4, ChannelPolicy policy = ChannelPolicy::average,
                              PowerMode mode = PowerMode::relative);

// CSV with a header of feature names plus "label"; one row per epoch.
void write_feature_csv(const FeatureMatrix& m, const std::string& path);
FeatureMatrix load_feature_csv(const std::string& path);

}  // namespace eegpref
