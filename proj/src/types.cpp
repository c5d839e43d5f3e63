#include "eegpref/types.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace eegpref {

void validate(const Recording& rec) {
    if (rec.fs_hz <= 0.0) {
        throw ValidationError("recording '" + rec.subject_id + "': fs_hz must be > 0");
    }
    if (rec.samples.rows() < 1) {
        throw ValidationError("recording '" + rec.subject_id + "': n_channels must be >= 1");
    }
    if (static_cast<Eigen::Index>(rec.channels.size()) != rec.samples.rows()) {
        throw ValidationError("recording '" + rec.subject_id + "': channel metadata count " +
                              std::to_string(rec.channels.size()) + " != sample rows " +
                              std::to_string(rec.samples.rows()));
    }
    std::set<std::string> names;
    for (const auto& ch : rec.channels) {
        if (ch.name.empty()) {
            throw ValidationError("recording '" + rec.subject_id + "': empty channel name");
        }
        if (!names.insert(ch.name).second) {
            throw ValidationError("recording '" + rec.subject_id + "': duplicate channel name '" +
                                  ch.name + "'");
        }
    }
}

ClassLabel make_class_label(const BehavioralLabels& labels, LabelScheme scheme, int threshold) {
    if (labels.rating < 1 || labels.rating > 5) {
        throw ValidationError("rating " + std::to_string(labels.rating) + " outside 1..5");
    }
    if (scheme == LabelScheme::binary_like_dislike) {
        if (threshold < 2 || threshold > 5) {
            throw ValidationError("binary threshold " + std::to_string(threshold) +
                                  " outside 2..5");
        }
        return {labels.rating >= threshold ? 1 : 0, scheme};
    }
    return {labels.rating - 1, scheme};
}

std::vector<Epoch> slice_epochs(const Recording& rec, const std::vector<LabelRow>& labels) {
    validate(rec);
    std::map<int, const BehavioralLabels*> by_trial;
    for (const auto& row : labels) {
        if (row.subject_id != rec.subject_id) continue;
        if (!by_trial.emplace(row.trial_index, &row.labels).second) {
            throw ValidationError("subject '" + rec.subject_id + "': duplicate trial " +
                                  std::to_string(row.trial_index));
        }
    }
    if (by_trial.empty()) {
        throw ValidationError("no label rows for subject '" + rec.subject_id + "'");
    }
    const int n_trials = static_cast<int>(by_trial.size());
    if (by_trial.begin()->first != 1 || by_trial.rbegin()->first != n_trials) {
        throw ValidationError("subject '" + rec.subject_id + "': trial indices must be 1.." +
                              std::to_string(n_trials));
    }
    if (rec.n_samples() % n_trials != 0) {
        throw ValidationError("subject '" + rec.subject_id + "': " +
                              std::to_string(rec.n_samples()) + " samples not divisible by " +
                              std::to_string(n_trials) + " trials");
    }
    const Eigen::Index win = rec.n_samples() / n_trials;

    std::vector<Epoch> epochs;
    epochs.reserve(by_trial.size());
    for (const auto& [trial, lab] : by_trial) {
        Epoch ep;
        ep.subject_id = rec.subject_id;
        ep.trial_index = trial;
        ep.fs_hz = rec.fs_hz;
        ep.channels = rec.channels;
        ep.samples = rec.samples.middleCols((trial - 1) * win, win).cast<double>();
        ep.labels = *lab;
        epochs.push_back(std::move(ep));
    }
    return epochs;
}

}  // namespace eegpref
