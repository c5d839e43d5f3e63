#pragma once

#include <string>
#include <vector>

#include "eegpref/types.hpp"

namespace eegpref {

// EEGR container: one JSON header line
//   {"magic":"EEGR","version":1,"subject_id":...,"fs_hz":...,"n_channels":...,
//    "n_samples":...,"channel_names":[...]}
// terminated by '\n', followed by n_channels * n_samples little-endian
// IEEE-754 float32 values, channel-major.
Recording load_recording(const std::string& path);
void write_recording(const Recording& rec, const std::string& path);

// Labels CSV with header
//   subject_id,trial_index,rating,familiarity,purchase_intent,willingness_to_spend,preference_rank
// preference_rank may be empty. Within one subject, ranks must be absent as a
// block or form a permutation of 1..n_trials.
std::vector<LabelRow> load_labels(const std::string& path);
void write_labels(const std::vector<LabelRow>& rows, const std::string& path);

}  // namespace eegpref
