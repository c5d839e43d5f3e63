#include "eegpref/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace eegpref {

namespace {

using nlohmann::json;

void put_f32_le(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    char b[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                 static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
    out.write(b, 4);
}

float get_f32_le(const unsigned char* p) {
    std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                         (static_cast<std::uint32_t>(p[2]) << 16) |
                         (static_cast<std::uint32_t>(p[3]) << 24);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

template <typename T>
T header_field(const json& h, const char* key) {
    if (!h.contains(key)) {
        throw FormatError(std::string("EEGR header missing field '") + key + "'");
    }
    try {
        return h.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(std::string("EEGR header field '") + key + "' has wrong type");
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

int parse_int_field(const std::string& s, const char* what, std::size_t row) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (pos != s.size() || s.empty()) {
        throw ValidationError("labels row " + std::to_string(row) + ": " + what + " '" + s +
                              "' is not an integer");
    }
    return v;
}

int parse_likert(const std::string& s, const char* what, std::size_t row) {
    const int v = parse_int_field(s, what, row);
    if (v < 1 || v > 5) {
        throw ValidationError("labels row " + std::to_string(row) + ": " + what + " " +
                              std::to_string(v) + " outside 1..5");
    }
    return v;
}

constexpr const char* kLabelsHeader =
    "subject_id,trial_index,rating,familiarity,purchase_intent,willingness_to_spend,"
    "preference_rank";

}  // namespace

Recording load_recording(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open recording file '" + path + "'");
    }
    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw FormatError("EEGR file '" + path + "': missing header line");
    }
    json h = json::parse(header_line, nullptr, false);
    if (h.is_discarded() || !h.is_object()) {
        throw FormatError("EEGR file '" + path + "': header is not a JSON object");
    }
    if (header_field<std::string>(h, "magic") != "EEGR") {
        throw FormatError("EEGR file '" + path + "': bad magic");
    }
    if (header_field<int>(h, "version") != 1) {
        throw FormatError("EEGR file '" + path + "': unsupported version");
    }

    Recording rec;
    rec.subject_id = header_field<std::string>(h, "subject_id");
    rec.fs_hz = header_field<double>(h, "fs_hz");
    const auto n_channels = header_field<std::int64_t>(h, "n_channels");
    const auto n_samples = header_field<std::int64_t>(h, "n_samples");
    const auto names = header_field<std::vector<std::string>>(h, "channel_names");
    if (rec.fs_hz <= 0.0) {
        throw ValidationError("EEGR file '" + path + "': fs_hz must be > 0");
    }
    if (n_channels < 1) {
        throw FormatError("EEGR file '" + path + "': n_channels must be >= 1");
    }
    if (n_samples < 0) {
        throw FormatError("EEGR file '" + path + "': negative n_samples");
    }
    if (static_cast<std::int64_t>(names.size()) != n_channels) {
        throw FormatError("EEGR file '" + path + "': channel_names length " +
                          std::to_string(names.size()) + " != n_channels " +
                          std::to_string(n_channels));
    }
    for (const auto& n : names) rec.channels.push_back({n, ChannelStatus::good});

    const std::size_t count = static_cast<std::size_t>(n_channels * n_samples);
    std::vector<unsigned char> payload(count * 4);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
        throw FormatError("EEGR file '" + path + "': payload holds " +
                          std::to_string(in.gcount() / 4) + " values, header declares " +
                          std::to_string(count));
    }
    rec.samples.resize(n_channels, n_samples);
    for (std::int64_t c = 0; c < n_channels; ++c) {
        for (std::int64_t s = 0; s < n_samples; ++s) {
            rec.samples(c, s) = get_f32_le(payload.data() + 4 * (c * n_samples + s));
        }
    }
    validate(rec);
    return rec;
}

void write_recording(const Recording& rec, const std::string& path) {
    validate(rec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    json h;
    h["magic"] = "EEGR";
    h["version"] = 1;
    h["subject_id"] = rec.subject_id;
    h["fs_hz"] = rec.fs_hz;
    h["n_channels"] = rec.n_channels();
    h["n_samples"] = rec.n_samples();
    std::vector<std::string> names;
    for (const auto& ch : rec.channels) names.push_back(ch.name);
    h["channel_names"] = names;
    out << h.dump() << '\n';
    for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
        for (Eigen::Index s = 0; s < rec.n_samples(); ++s) {
            put_f32_le(out, rec.samples(c, s));
        }
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

std::vector<LabelRow> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open labels file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kLabelsHeader)) {
        throw FormatError("labels file '" + path + "': bad or missing header");
    }

    std::vector<LabelRow> rows;
    std::map<std::pair<std::string, int>, std::size_t> seen;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7) {
            throw FormatError("labels row " + std::to_string(row_no) + ": expected 7 fields, got " +
                              std::to_string(f.size()));
        }
        LabelRow row;
        row.subject_id = f[0];
        if (row.subject_id.empty()) {
            throw ValidationError("labels row " + std::to_string(row_no) + ": empty subject_id");
        }
        row.trial_index = parse_int_field(f[1], "trial_index", row_no);
        if (row.trial_index < 1) {
            throw ValidationError("labels row " + std::to_string(row_no) +
                                  ": trial_index must be >= 1");
        }
        row.labels.rating = parse_likert(f[2], "rating", row_no);
        row.labels.familiarity = parse_likert(f[3], "familiarity", row_no);
        row.labels.purchase_intent = parse_likert(f[4], "purchase_intent", row_no);
        row.labels.willingness_to_spend = parse_likert(f[5], "willingness_to_spend", row_no);
        if (!f[6].empty()) {
            row.labels.preference_rank = parse_int_field(f[6], "preference_rank", row_no);
        }
        if (!seen.emplace(std::make_pair(row.subject_id, row.trial_index), row_no).second) {
            throw ValidationError("labels row " + std::to_string(row_no) + ": duplicate key (" +
                                  row.subject_id + ", " + std::to_string(row.trial_index) + ")");
        }
        rows.push_back(std::move(row));
    }

    // Per subject: ranks absent as a block, or a permutation of 1..n_trials.
    std::map<std::string, std::vector<const LabelRow*>> by_subject;
    for (const auto& r : rows) by_subject[r.subject_id].push_back(&r);
    for (const auto& [subj, list] : by_subject) {
        std::size_t with_rank = 0;
        std::vector<bool> present(list.size(), false);
        for (const auto* r : list) {
            if (!r->labels.preference_rank) continue;
            ++with_rank;
            const int rank = *r->labels.preference_rank;
            if (rank < 1 || rank > static_cast<int>(list.size()) || present[rank - 1]) {
                throw ValidationError("subject '" + subj + "': preference ranks are not a " +
                                      "permutation of 1.." + std::to_string(list.size()));
            }
            present[rank - 1] = true;
        }
        if (with_rank != 0 && with_rank != list.size()) {
            throw ValidationError("subject '" + subj +
                                  "': preference ranks must be all present or all absent");
        }
    }
    return rows;
}

void write_labels(const std::vector<LabelRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << kLabelsHeader << '\n';
    for (const auto& r : rows) {
        out << r.subject_id << ',' << r.trial_index << ',' << r.labels.rating << ','
            << r.labels.familiarity << ',' << r.labels.purchase_intent << ','
            << r.labels.willingness_to_spend << ',';
        if (r.labels.preference_rank) out << *r.labels.preference_rank;
        out << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

}  // namespace eegpref
