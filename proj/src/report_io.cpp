#include "hubprior/report_io.hpp"

#include "hubprior/error.hpp"
#include "hubprior/latent_io.hpp"

#include <charconv>
#include <map>
#include <sstream>
#include <string_view>

namespace hubprior {

namespace {

std::string comment(const std::string& run_id) {
    return "# run=" + run_id;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

struct CsvRow {
    std::size_t line;
    std::vector<std::string_view> fields;
};

/// Splits into comment lines and data rows; drops blank lines.
void split_csv(const std::string& text, std::vector<std::string_view>& comments, std::vector<CsvRow>& rows) {
    std::string_view rest(text);
    std::size_t line_no = 0;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        std::string_view line = trim(rest.substr(0, nl));
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++line_no;
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            comments.push_back(line);
            continue;
        }
        CsvRow row{line_no, {}};
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            row.fields.push_back(trim(line.substr(start, comma - start)));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
}

[[noreturn]] void bad_row(const CsvRow& row, const std::string& why) {
    throw Error(ErrorCode::BadCsv, "line " + std::to_string(row.line) + ": " + why);
}

} // namespace

std::string hubs_csv(const HubProfile& profile, const std::string& run_id) {
    std::ostringstream out;
    out << comment(run_id) << " k=" << profile.k << " n=" << profile.n() << '\n';
    out << "index,m\n";
    for (std::size_t i = 0; i < profile.n(); ++i) {
        out << i << ',' << profile.hub_values[i] << '\n';
    }
    return out.str();
}

std::string histogram_csv(const HubProfile& profile, const std::string& run_id) {
    std::ostringstream out;
    out << comment(run_id) << " k=" << profile.k << " n=" << profile.n() << '\n';
    out << "m,count\n";
    for (const auto& [m, count] : profile.histogram) {
        out << m << ',' << count << '\n';
    }
    return out.str();
}

std::string spectrum_csv(const HubProfile& profile, const std::string& run_id) {
    std::ostringstream out;
    out << comment(run_id) << " k=" << profile.k << " n=" << profile.n() << '\n';
    out << "rank,index,m\n";
    const auto order = spectrum(profile);
    for (std::size_t r = 0; r < order.size(); ++r) {
        out << r << ',' << order[r] << ',' << profile.hub_values[order[r]] << '\n';
    }
    return out.str();
}

std::string selection_csv(const SelectionResult& selection, const std::string& run_id) {
    std::ostringstream out;
    out << comment(run_id) << " rule=" << selection_rule_name(selection.rule) << " threshold=" << selection.threshold;
    if (selection.rule == SelectionRule::Top) {
        out << " requested=" << selection.requested;
    }
    out << " batches_drawn=" << selection.batches_drawn << '\n';
    out << "rank,batch,index,m\n";
    for (std::size_t r = 0; r < selection.entries.size(); ++r) {
        const auto& e = selection.entries[r];
        out << r << ',' << e.batch << ',' << e.index << ',' << e.m << '\n';
    }
    return out.str();
}

std::string distance_histogram_csv(const DistanceHistogram& hist, const std::string& run_id) {
    std::ostringstream out;
    out.precision(17);
    out << comment(run_id) << " reference=" << reference_name(hist.reference) << " group=" << group_name(hist.group);
    if (hist.group == GroupKind::Truncated) {
        out << " psi=" << hist.psi;
    }
    out << '\n' << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        out << hist.bin_edges[b] << ',' << hist.bin_edges[b + 1] << ',' << hist.counts[b] << '\n';
    }
    return out.str();
}

HubProfile parse_hubs_csv(const std::string& text) {
    std::vector<std::string_view> comments;
    std::vector<CsvRow> rows;
    split_csv(text, comments, rows);

    std::size_t k = 0;
    for (std::string_view c : comments) {
        const std::size_t pos = c.find(" k=");
        if (pos != std::string_view::npos) {
            std::string_view rest = c.substr(pos + 3);
            rest = rest.substr(0, rest.find(' '));
            if (!parse_uint(rest, k)) {
                throw Error(ErrorCode::BadCsv, "malformed k in hubs.csv comment");
            }
        }
    }

    std::size_t start = 0;
    if (!rows.empty() && rows.front().fields.size() == 2 && rows.front().fields[0] == "index") {
        start = 1;
    }
    std::vector<HubValue> m(rows.size() - start);
    std::vector<bool> seen(m.size(), false);
    std::uint64_t total = 0;
    for (std::size_t r = start; r < rows.size(); ++r) {
        const auto& row = rows[r];
        std::size_t index = 0;
        HubValue value = 0;
        if (row.fields.size() != 2 || !parse_uint(row.fields[0], index) || !parse_uint(row.fields[1], value)) {
            bad_row(row, "expected index,m");
        }
        if (index >= m.size() || seen[index]) {
            bad_row(row, "index " + std::to_string(index) + " is out of range or repeated");
        }
        seen[index] = true;
        m[index] = value;
        total += value;
    }
    if (m.empty()) {
        throw Error(ErrorCode::BadCsv, "hubs.csv has no rows");
    }
    if (k == 0) {
        k = static_cast<std::size_t>(total / m.size());
    }
    return make_profile(k, std::move(m));
}

HubProfile read_hubs_csv(const std::filesystem::path& path) {
    try {
        return parse_hubs_csv(read_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BadCsv) {
            throw Error(ErrorCode::BadCsv, path.string() + ": " + e.what());
        }
        throw;
    }
}

std::vector<std::uint64_t> parse_class_counts(const std::string& text) {
    std::vector<std::string_view> comments;
    std::vector<CsvRow> rows;
    split_csv(text, comments, rows);
    std::map<std::size_t, std::uint64_t> by_class;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        std::size_t index = 0;
        std::uint64_t count = 0;
        if (row.fields.size() != 2) {
            bad_row(row, "expected class_index,count");
        }
        if (!parse_uint(row.fields[0], index) || !parse_uint(row.fields[1], count)) {
            if (r == 0) {
                continue; // header
            }
            bad_row(row, "expected non-negative integers");
        }
        if (!by_class.emplace(index, count).second) {
            bad_row(row, "class " + std::to_string(index) + " listed twice");
        }
    }
    if (by_class.empty()) {
        throw Error(ErrorCode::BadCsv, "class count file has no rows");
    }
    std::vector<std::uint64_t> counts(by_class.rbegin()->first + 1, 0);
    for (const auto& [index, count] : by_class) {
        counts[index] = count;
    }
    return counts;
}

std::vector<std::uint64_t> read_class_counts(const std::filesystem::path& path) {
    return parse_class_counts(read_file(path));
}

nlohmann::json to_json(const HubStats& stats) {
    return {{"max", stats.max},
            {"mean", stats.mean},
            {"median", stats.median},
            {"skewness", stats.skewness},
            {"skewness_estimator", kSkewnessEstimator}};
}

namespace {

nlohmann::json to_json(const DistanceSummary& s) {
    return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

} // namespace

nlohmann::json to_json(const TruncationReport& report, bool per_latent) {
    nlohmann::json j = {{"psi", report.psi},
                        {"mean_vector", report.mean_vector},
                        {"pre_distance_summary", to_json(report.pre_summary)},
                        {"post_distance_summary", to_json(report.post_summary)}};
    if (per_latent) {
        j["pre_distance"] = report.pre_distance;
        j["post_distance"] = report.post_distance;
    }
    return j;
}

nlohmann::json to_json(const DistanceHistogram& hist) {
    nlohmann::json j = {{"reference", reference_name(hist.reference)},
                        {"group", group_name(hist.group)},
                        {"size", hist.size},
                        {"distance", to_json(hist.summary)},
                        {"bin_edges", hist.bin_edges},
                        {"counts", hist.counts}};
    if (hist.group == GroupKind::Truncated) {
        j["psi"] = hist.psi;
    }
    return j;
}

nlohmann::json to_json(const CentralClusteringReport& report) {
    nlohmann::json hists = nlohmann::json::array();
    for (const auto& h : report.histograms) {
        hists.push_back(to_json(h));
    }
    const double random = report.find(DistanceReference::AllMean, GroupKind::Random).summary.mean;
    const double hubs = report.find(DistanceReference::AllMean, GroupKind::Hubs).summary.mean;
    return {{"t", report.t},
            {"hub_count", report.hub_count},
            {"binning", "freedman-diaconis"},
            {"dist2mean", {{"random", random}, {"hubs", hubs}, {"hub_to_random_ratio", hubs / random}}},
            {"histograms", hists}};
}

nlohmann::json to_json(const ClassHistogram& hist) {
    return {{"label", hist.label}, {"classes", hist.classes()}, {"probs", hist.probs}};
}

std::string dump_json(const nlohmann::json& value) {
    return value.dump(2) + "\n";
}

} // namespace hubprior
