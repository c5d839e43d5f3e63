#pragma once

#include <string>
#include <vector>

#include "eegpref/filter.hpp"
#include "eegpref/types.hpp"

namespace eegpref {

enum class ChannelRejectReason { flat, extreme_variance };

struct RejectedChannel {
    std::string name;
    ChannelRejectReason reason;
    double value;  // the triggering statistic
    std::string subject_id;  // filled when reports from several recordings merge
};

struct RejectedEpoch {
    std::string subject_id;
    int trial_index;
    double peak_uv;  // the triggering amplitude
};

struct RejectionReport {
    std::vector<RejectedChannel> rejected_channels;
    std::vector<RejectedEpoch> rejected_epochs;
};

// JSON schema:
// {"rejected_channels":[{"name":...,"reason":...,"value":...}],
//  "rejected_epochs":[{"subject_id":...,"trial_index":...,"peak_uv":...}]}
// plus a "config_digest" field when one is supplied.
std::string rejection_report_json(const RejectionReport& report,
                                  const std::string& config_digest = "");
void write_rejection_report(const RejectionReport& report, const std::string& path,
                            const std::string& config_digest = "");

// Applies a zero-phase filter to every channel of a recording in place.
void filter_recording(Recording& rec, const SosFilter& filt);
void filter_epoch(Epoch& epoch, const SosFilter& filt);

// Flags a channel as flat when more than flat_fraction of consecutive sample
// pairs are identical, and as extreme_variance when its standard deviation
// falls outside [var_lo, var_hi] times the median channel standard deviation.
// Flagged channels get status=rejected. Throws if nothing survives.
RejectionReport detect_bad_channels(Recording& rec, double flat_fraction = 0.5,
                                    double var_lo = 0.1, double var_hi = 10.0);

// Drops every epoch whose good channels contain a sample with |amplitude|
// above peak_uv. Kept order is preserved.
std::pair<std::vector<Epoch>, RejectionReport> reject_epochs(const std::vector<Epoch>& epochs,
                                                             double peak_uv = 150.0);

// Subtracts the instantaneous mean over good channels from each good channel;
// rejected channels pass through unchanged. Needs >= 2 good channels.
Epoch common_average_reference(const Epoch& epoch);

}  // namespace eegpref
