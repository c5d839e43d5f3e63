#include "eegpref/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace eegpref {

namespace {

double channel_std(const Eigen::VectorXd& x) {
    const double mean = x.mean();
    return std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size()));
}

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        return 0.5 * (hi + v[mid - 1]);
    }
    return hi;
}

}  // namespace

std::string rejection_report_json(const RejectionReport& report,
                                  const std::string& config_digest) {
    nlohmann::json j;
    if (!config_digest.empty()) j["config_digest"] = config_digest;
    j["rejected_channels"] = nlohmann::json::array();
    for (const auto& ch : report.rejected_channels) {
        nlohmann::json entry = {
            {"name", ch.name},
            {"reason", ch.reason == ChannelRejectReason::flat ? "flat" : "extreme_variance"},
            {"value", ch.value}};
        if (!ch.subject_id.empty()) entry["subject_id"] = ch.subject_id;
        j["rejected_channels"].push_back(entry);
    }
    j["rejected_epochs"] = nlohmann::json::array();
    for (const auto& ep : report.rejected_epochs) {
        j["rejected_epochs"].push_back({{"subject_id", ep.subject_id},
                                        {"trial_index", ep.trial_index},
                                        {"peak_uv", ep.peak_uv}});
    }
    return j.dump(2);
}

void write_rejection_report(const RejectionReport& report, const std::string& path,
                            const std::string& config_digest) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << rejection_report_json(report, config_digest) << '\n';
}

void filter_recording(Recording& rec, const SosFilter& filt) {
    for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
        const Eigen::VectorXd x = rec.samples.row(c).cast<double>();
        rec.samples.row(c) = filtfilt(filt, x).cast<float>();
    }
}

void filter_epoch(Epoch& epoch, const SosFilter& filt) {
    for (Eigen::Index c = 0; c < epoch.samples.rows(); ++c) {
        epoch.samples.row(c) = filtfilt(filt, epoch.samples.row(c).transpose()).transpose();
    }
}

RejectionReport detect_bad_channels(Recording& rec, double flat_fraction, double var_lo,
                                    double var_hi) {
    if (rec.n_channels() < 2) {
        throw ValidationError("detect_bad_channels: need >= 2 channels");
    }
    const Eigen::Index n = rec.n_samples();
    RejectionReport report;

    std::vector<double> stds(rec.n_channels());
    for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
        stds[c] = channel_std(rec.samples.row(c).cast<double>());
    }
    const double med = median(stds);

    for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
        Eigen::Index identical = 0;
        for (Eigen::Index s = 0; s + 1 < n; ++s) {
            if (rec.samples(c, s) == rec.samples(c, s + 1)) ++identical;
        }
        const double frac = n > 1 ? static_cast<double>(identical) / static_cast<double>(n - 1)
                                  : 0.0;
        if (frac > flat_fraction) {
            rec.channels[c].status = ChannelStatus::rejected;
            report.rejected_channels.push_back(
                {rec.channels[c].name, ChannelRejectReason::flat, frac});
            continue;
        }
        if (med > 0.0 && (stds[c] < var_lo * med || stds[c] > var_hi * med)) {
            rec.channels[c].status = ChannelStatus::rejected;
            report.rejected_channels.push_back(
                {rec.channels[c].name, ChannelRejectReason::extreme_variance, stds[c] / med});
        }
    }

    const bool any_good = std::any_of(rec.channels.begin(), rec.channels.end(), [](const auto& ch) {
        return ch.status == ChannelStatus::good;
    });
    if (!any_good) {
        throw ValidationError("detect_bad_channels: no usable channels in recording '" +
                              rec.subject_id + "'");
    }
    return report;
}

std::pair<std::vector<Epoch>, RejectionReport> reject_epochs(const std::vector<Epoch>& epochs,
                                                             double peak_uv) {
    std::vector<Epoch> kept;
    RejectionReport report;
    for (const auto& ep : epochs) {
        double peak = 0.0;
        for (Eigen::Index c = 0; c < ep.samples.rows(); ++c) {
            if (ep.channels[c].status != ChannelStatus::good) continue;
            peak = std::max(peak, ep.samples.row(c).cwiseAbs().maxCoeff());
        }
        if (peak > peak_uv) {
            report.rejected_epochs.push_back({ep.subject_id, ep.trial_index, peak});
        } else {
            kept.push_back(ep);
        }
    }
    return {std::move(kept), std::move(report)};
}

Epoch common_average_reference(const Epoch& epoch) {
    std::vector<Eigen::Index> good;
    for (Eigen::Index c = 0; c < epoch.samples.rows(); ++c) {
        if (epoch.channels[c].status == ChannelStatus::good) good.push_back(c);
    }
    if (good.size() < 2) {
        throw ValidationError("common_average_reference: need >= 2 good channels, have " +
                              std::to_string(good.size()));
    }
    Epoch out = epoch;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(epoch.samples.cols());
    for (Eigen::Index c : good) mean += epoch.samples.row(c);
    mean /= static_cast<double>(good.size());
    for (Eigen::Index c : good) out.samples.row(c) -= mean;
    return out;
}

}  // namespace eegpref
