#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "eegpref/errors.hpp"

namespace eegpref {

enum class ChannelStatus { good, rejected };

struct ChannelInfo {
    std::string name;
    ChannelStatus status = ChannelStatus::good;
};

// One subject's raw multi-channel recording. Samples are stored as float32
// (row = channel), matching the on-disk payload exactly so that a
// write/load round trip is bit-identical.
struct Recording {
    std::string subject_id;
    double fs_hz = 0.0;
    std::vector<ChannelInfo> channels;
    Eigen::MatrixXf samples;  // n_channels x n_samples, microvolts

    Eigen::Index n_channels() const { return samples.rows(); }
    Eigen::Index n_samples() const { return samples.cols(); }
};

// Throws ValidationError if any Recording invariant is broken.
void validate(const Recording& rec);

// Behavioral responses for one trial, likert 1..5 each. preference_rank is
// the subject's ordering of all trials (1 = most liked); stored but not used
// by the classification pipeline.
struct BehavioralLabels {
    int rating = 0;
    int familiarity = 0;
    int purchase_intent = 0;
    int willingness_to_spend = 0;
    std::optional<int> preference_rank;
};

// One trial's window of the recording plus its labels. Samples are double
// from here on; all downstream signal processing is double precision.
struct Epoch {
    std::string subject_id;
    int trial_index = 0;  // 1-based
    Eigen::MatrixXd samples;  // n_channels x n_samples, microvolts
    double fs_hz = 0.0;
    std::vector<ChannelInfo> channels;
    BehavioralLabels labels;
};

enum class LabelScheme { binary_like_dislike, multiclass_rating };

struct ClassLabel {
    int value = 0;
    LabelScheme scheme = LabelScheme::binary_like_dislike;
};

// Binary: 1 iff rating >= threshold (threshold in 2..5).
// Multiclass: rating - 1 (threshold ignored).
ClassLabel make_class_label(const BehavioralLabels& labels, LabelScheme scheme, int threshold = 4);

struct LabelRow {
    std::string subject_id;
    int trial_index = 0;
    BehavioralLabels labels;
};

// Cuts a recording of n_trials equal contiguous windows into epochs and
// attaches the matching labels. The recording length must divide evenly.
std::vector<Epoch> slice_epochs(const Recording& rec, const std::vector<LabelRow>& labels);

}  // namespace eegpref
