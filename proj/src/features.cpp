#include "eegpref/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eegpref {

double band_power(const BandDecomposition& decomp, Band band, PowerMode mode) {
    const double eb = decomp.band_energy(band);
    if (mode == PowerMode::log_absolute) {
        return std::log10(eb + 1e-12);
    }
    double total = 0.0;
    for (int i = 0; i < 5; ++i) total += decomp.band_energy(static_cast<Band>(i));
    if (total == 0.0) {
        throw NumericalError("band_power: degenerate signal with zero five-band energy");
    }
    return eb / total;
}

double band_entropy(const BandDecomposition& decomp, Band band) {
    const auto& c = decomp.band(band);
    if (c.size() < 2) {
        throw ValidationError("band_entropy: band needs >= 2 coefficients");
    }
    const double eb = c.squaredNorm();
    if (eb == 0.0) return 0.0;
    double h = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double p = c[i] * c[i] / eb;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h / std::log(static_cast<double>(c.size()));
}

namespace {

constexpr std::array<const char*, 2> kFeatureKinds = {"power", "entropy"};

std::vector<std::string> base_feature_names() {
    std::vector<std::string> names;
    for (int b = 0; b < 5; ++b) {
        for (const char* kind : kFeatureKinds) {
            names.push_back(std::string(kBandNames[b]) + "_" + kind);
        }
    }
    return names;
}

std::vector<double> channel_features(const Eigen::VectorXd& signal, double fs_hz, PowerMode mode) {
    const BandDecomposition decomp = decompose_bands(signal, fs_hz);
    std::vector<double> vals;
    vals.reserve(10);
    for (int b = 0; b < 5; ++b) {
        vals.push_back(band_power(decomp, static_cast<Band>(b), mode));
        vals.push_back(band_entropy(decomp, static_cast<Band>(b)));
    }
    return vals;
}

}  // namespace

std::vector<FeatureVector> epoch_features(const Epoch& epoch, ChannelPolicy policy,
                                          PowerMode mode) {
    std::vector<Eigen::Index> good;
    for (Eigen::Index c = 0; c < epoch.samples.rows(); ++c) {
        if (epoch.channels[c].status == ChannelStatus::good) good.push_back(c);
    }
    if (good.empty()) {
        throw ValidationError("epoch_features: epoch (" + epoch.subject_id + ", " +
                              std::to_string(epoch.trial_index) + ") has no good channels");
    }
    const auto base_names = base_feature_names();

    std::vector<FeatureVector> out;
    if (policy == ChannelPolicy::average) {
        FeatureVector fv;
        fv.subject_id = epoch.subject_id;
        fv.trial_index = epoch.trial_index;
        fv.names = base_names;
        fv.values.assign(base_names.size(), 0.0);
        for (Eigen::Index c : good) {
            const auto vals = channel_features(epoch.samples.row(c).transpose(), epoch.fs_hz, mode);
            for (std::size_t i = 0; i < vals.size(); ++i) fv.values[i] += vals[i];
        }
        for (auto& v : fv.values) v /= static_cast<double>(good.size());
        out.push_back(std::move(fv));
    } else {
        for (Eigen::Index c : good) {
            FeatureVector fv;
            fv.subject_id = epoch.subject_id;
            fv.trial_index = epoch.trial_index;
            fv.values = channel_features(epoch.samples.row(c).transpose(), epoch.fs_hz, mode);
            for (const auto& n : base_names) {
                fv.names.push_back(n + "@" + epoch.channels[c].name);
            }
            out.push_back(std::move(fv));
        }
    }
    return out;
}

FeatureMatrix assemble_matrix(const std::vector<Epoch>& epochs, LabelScheme scheme, int threshold,
                              ChannelPolicy policy, PowerMode mode) {
    if (epochs.empty()) {
        throw ValidationError("assemble_matrix: empty epoch list");
    }
    std::vector<const Epoch*> order;
    for (const auto& ep : epochs) order.push_back(&ep);
    std::stable_sort(order.begin(), order.end(), [](const Epoch* a, const Epoch* b) {
        if (a->subject_id != b->subject_id) return a->subject_id < b->subject_id;
        return a->trial_index < b->trial_index;
    });

    FeatureMatrix m;
    m.scheme = scheme;
    std::vector<std::vector<double>> rows;
    for (const Epoch* ep : order) {
        // per_channel yields one block per channel; concatenate into one row
        // so rows stay aligned with epochs either way.
        std::vector<double> row;
        std::vector<std::string> row_names;
        for (auto& fv : epoch_features(*ep, policy, mode)) {
            row.insert(row.end(), fv.values.begin(), fv.values.end());
            row_names.insert(row_names.end(), fv.names.begin(), fv.names.end());
        }
        if (m.feature_names.empty()) {
            m.feature_names = row_names;
        } else if (row_names != m.feature_names) {
            throw ValidationError("assemble_matrix: feature layout differs at epoch (" +
                                  ep->subject_id + ", " + std::to_string(ep->trial_index) + ")");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!std::isfinite(row[i])) {
                throw NumericalError("assemble_matrix: non-finite feature '" + row_names[i] +
                                     "' in epoch (" + ep->subject_id + ", " +
                                     std::to_string(ep->trial_index) + ")");
            }
        }
        rows.push_back(std::move(row));
        m.labels.push_back(make_class_label(ep->labels, scheme, threshold).value);
        m.keys.emplace_back(ep->subject_id, ep->trial_index);
    }

    m.X.resize(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(m.feature_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.feature_names.size()) {
            throw ValidationError("assemble_matrix: ragged feature rows");
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_feature_csv(const FeatureMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const auto& n : m.feature_names) out << n << ',';
    out << "label\n";
    for (Eigen::Index r = 0; r < m.n_rows(); ++r) {
        for (Eigen::Index c = 0; c < m.n_features(); ++c) {
            out << fmt_double(m.X(r, c)) << ',';
        }
        out << m.labels[static_cast<std::size_t>(r)] << '\n';
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

FeatureMatrix load_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw FormatError("feature file '" + path + "': empty");

    FeatureMatrix m;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty() && tok.back() == '\r') tok.pop_back();
            m.feature_names.push_back(tok);
        }
    }
    if (m.feature_names.empty() || m.feature_names.back() != "label") {
        throw FormatError("feature file '" + path + "': last column must be 'label'");
    }
    m.feature_names.pop_back();

    std::vector<std::vector<double>> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty() && tok.back() == '\r') tok.pop_back();
            try {
                vals.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw FormatError("feature file '" + path + "' row " + std::to_string(row_no) +
                                  ": '" + tok + "' is not a number");
            }
        }
        if (vals.size() != m.feature_names.size() + 1) {
            throw FormatError("feature file '" + path + "' row " + std::to_string(row_no) +
                              ": expected " + std::to_string(m.feature_names.size() + 1) +
                              " columns");
        }
        const double label = vals.back();
        if (label != std::floor(label)) {
            throw FormatError("feature file '" + path + "' row " + std::to_string(row_no) +
                              ": label must be an integer");
        }
        m.labels.push_back(static_cast<int>(label));
        vals.pop_back();
        rows.push_back(std::move(vals));
        m.keys.emplace_back("row", static_cast<int>(row_no - 1));
    }
    m.X.resize(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(m.feature_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

}  // namespace eegpref
