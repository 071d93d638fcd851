#pragma once

#include "traclets/error.hpp"
#include "traclets/geo.hpp"
#include "traclets/model.hpp"
#include "traclets/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace traclets {

namespace fs = std::filesystem;

/// Per-run counters for everything an adapter dropped and why.
struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_malformed = 0;  ///< line could not be parsed
    std::size_t rows_rejected = 0;   ///< parsed, but violates Position invariants
    std::size_t rows_skipped = 0;    ///< valid but excluded (unknown code, before epoch, ...)
    std::size_t rows_unlabeled = 0;  ///< outside every label interval
    std::size_t duplicates_dropped = 0;
    std::size_t groups_skipped = 0;  ///< whole user / storm dropped
    std::size_t short_dropped = 0;   ///< grouped track had fewer than 2 points
    std::vector<std::string> warnings;

    void merge(const IngestReport& o) {
        rows_read += o.rows_read;
        rows_malformed += o.rows_malformed;
        rows_rejected += o.rows_rejected;
        rows_skipped += o.rows_skipped;
        rows_unlabeled += o.rows_unlabeled;
        duplicates_dropped += o.duplicates_dropped;
        groups_skipped += o.groups_skipped;
        short_dropped += o.short_dropped;
        warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
    }

    friend void to_json(nlohmann::json& j, const IngestReport& r) {
        j = nlohmann::json{{"rows_read", r.rows_read},
                           {"rows_malformed", r.rows_malformed},
                           {"rows_rejected", r.rows_rejected},
                           {"rows_skipped", r.rows_skipped},
                           {"rows_unlabeled", r.rows_unlabeled},
                           {"duplicates_dropped", r.duplicates_dropped},
                           {"groups_skipped", r.groups_skipped},
                           {"short_dropped", r.short_dropped},
                           {"warnings", r.warnings}};
    }
};

struct IngestResult {
    std::vector<Trajectory> trajectories;
    IngestReport report;
};

namespace detail {

/// Time-sorts, drops later rows sharing a timestamp, and emits the track if it
/// still has two points.
inline std::optional<Trajectory> finalize_track(std::string id, std::string label,
                                                std::vector<Position> points,
                                                IngestReport& report) {
    std::stable_sort(points.begin(), points.end(),
                     [](const Position& a, const Position& b) { return a.t < b.t; });
    const auto before = points.size();
    points.erase(std::unique(points.begin(), points.end(),
                             [](const Position& a, const Position& b) { return a.t == b.t; }),
                 points.end());
    report.duplicates_dropped += before - points.size();
    if (points.size() < 2) {
        ++report.short_dropped;
        return std::nullopt;
    }
    Trajectory traj{std::move(id), std::move(label), std::move(points)};
    if (auto v = check(traj)) throw InvariantError("ingest produced invalid trajectory '" +
                                                   traj.id + "': " + std::string(to_string(*v)));
    return traj;
}

inline std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return in;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Generic CSV

enum class LabelSource { column, directory, sidecar };

/// A column addressed by 0-based index or by header name.
using ColumnRef = std::variant<std::size_t, std::string>;

struct SchemaSpec {
    std::optional<ColumnRef> lon;
    std::optional<ColumnRef> lat;
    std::optional<ColumnRef> timestamp;
    std::optional<ColumnRef> label;
    std::optional<ColumnRef> traj_id;
    char delimiter = ',';
    bool header = true;
    std::string time_format = "epoch";
    LabelSource label_source = LabelSource::column;

    /// Layout of the interchange file written by write_canonical_csv.
    static SchemaSpec canonical() {
        SchemaSpec s;
        s.traj_id = std::string("traj_id");
        s.label = std::string("label");
        s.timestamp = std::string("t_epoch_s");
        s.lon = std::string("lon");
        s.lat = std::string("lat");
        return s;
    }
};

/// Reads a schema file:
///   {"roles": {"<column name or #index>": "lon|lat|timestamp|label|traj_id", ...},
///    "delimiter": ",", "header": true, "time_format": "epoch",
///    "label_source": "column|directory|sidecar"}
/// Every role may be bound to at most one column.
inline SchemaSpec schema_from_json(const nlohmann::json& j) {
    SchemaSpec s;
    if (!j.contains("roles") || !j["roles"].is_object())
        throw ValidationError(Violation::bad_schema, "schema needs a 'roles' object");
    for (const auto& [column, role_json] : j["roles"].items()) {
        const auto role = role_json.get<std::string>();
        ColumnRef ref = column;
        if (!column.empty() && column.front() == '#') {
            auto idx = text::parse_int(std::string_view(column).substr(1));
            if (!idx || *idx < 0)
                throw ValidationError(Violation::bad_schema, "bad column index '" + column + "'");
            ref = static_cast<std::size_t>(*idx);
        }
        std::optional<ColumnRef>* slot = nullptr;
        if (role == "lon") slot = &s.lon;
        else if (role == "lat") slot = &s.lat;
        else if (role == "timestamp") slot = &s.timestamp;
        else if (role == "label") slot = &s.label;
        else if (role == "traj_id") slot = &s.traj_id;
        else if (role == "ignore") continue;
        else throw ValidationError(Violation::bad_schema, "unknown role '" + role + "'");
        if (slot->has_value())
            throw ValidationError(Violation::bad_schema, "role '" + role + "' assigned twice");
        *slot = ref;
    }
    if (j.contains("delimiter")) {
        const auto d = j["delimiter"].get<std::string>();
        if (d.size() != 1) throw ValidationError(Violation::bad_schema, "delimiter must be one char");
        s.delimiter = d.front();
    }
    s.header = j.value("header", true);
    s.time_format = j.value("time_format", std::string("epoch"));
    const auto source = j.value("label_source", std::string("column"));
    if (source == "column") s.label_source = LabelSource::column;
    else if (source == "directory") s.label_source = LabelSource::directory;
    else if (source == "sidecar") s.label_source = LabelSource::sidecar;
    else throw ValidationError(Violation::bad_schema, "unknown label_source '" + source + "'");
    return s;
}

namespace detail {

inline std::size_t resolve_column(const ColumnRef& ref, const std::vector<std::string>* header,
                                  const char* role) {
    if (const auto* idx = std::get_if<std::size_t>(&ref)) {
        if (header && *idx >= header->size())
            throw InputError(std::string("column index for role '") + role + "' out of range");
        return *idx;
    }
    const auto& name = std::get<std::string>(ref);
    if (!header)
        throw InputError(std::string("role '") + role + "' names column '" + name +
                         "' but the file has no header");
    for (std::size_t i = 0; i < header->size(); ++i)
        if ((*header)[i] == name) return i;
    const auto wanted = text::lower(name);
    for (std::size_t i = 0; i < header->size(); ++i)
        if (text::lower((*header)[i]) == wanted) return i;
    throw InputError(std::string("role '") + role + "': no column named '" + name + "'");
}

} // namespace detail

/// Rows grouped by trajectory id (first-appearance order), time-sorted,
/// validated. A file without an id role is a single trajectory named after
/// the file stem.
inline IngestResult parse_csv(const fs::path& path, const SchemaSpec& schema) {
    if (!schema.lon || !schema.lat || !schema.timestamp)
        throw ValidationError(Violation::bad_schema, "lon, lat and timestamp roles are required");
    if (schema.label_source == LabelSource::column && !schema.label)
        throw ValidationError(Violation::bad_schema, "label_source=column needs a label role");

    std::string fixed_label;
    if (schema.label_source == LabelSource::directory) {
        fixed_label = path.parent_path().filename().string();
    } else if (schema.label_source == LabelSource::sidecar) {
        auto side = path;
        side += ".label";
        auto in = detail::open_input(side);
        std::string line;
        std::getline(in, line);
        fixed_label = std::string(text::trim(line));
        if (fixed_label.empty()) throw InputError("empty label sidecar '" + side.string() + "'");
    }

    auto in = detail::open_input(path);
    IngestResult result;
    auto& report = result.report;

    std::string line;
    std::vector<std::string> header;
    bool have_header = false;
    if (schema.header) {
        if (!std::getline(in, line)) throw InputError("'" + path.string() + "' is empty");
        header = text::split_fields(line, schema.delimiter);
        if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
        have_header = true;
    }
    const auto* hdr = have_header ? &header : nullptr;
    const auto lon_col = detail::resolve_column(*schema.lon, hdr, "lon");
    const auto lat_col = detail::resolve_column(*schema.lat, hdr, "lat");
    const auto t_col = detail::resolve_column(*schema.timestamp, hdr, "timestamp");
    if (lon_col == lat_col || lon_col == t_col || lat_col == t_col)
        throw ValidationError(Violation::bad_schema, "lon, lat and timestamp share a column");
    std::optional<std::size_t> label_col, id_col;
    if (schema.label_source == LabelSource::column)
        label_col = detail::resolve_column(*schema.label, hdr, "label");
    if (schema.traj_id) id_col = detail::resolve_column(*schema.traj_id, hdr, "traj_id");

    std::size_t needed = std::max({lon_col, lat_col, t_col});
    if (label_col) needed = std::max(needed, *label_col);
    if (id_col) needed = std::max(needed, *id_col);

    struct Group {
        std::string label;
        std::vector<Position> points;
    };
    std::vector<std::pair<std::string, Group>> groups;
    std::map<std::string, std::size_t> index;
    const std::string default_id = path.stem().string();

    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        ++report.rows_read;
        const auto fields = text::split_fields(line, schema.delimiter);
        if (fields.size() <= needed) {
            ++report.rows_malformed;
            continue;
        }
        const auto lon = text::parse_double(fields[lon_col]);
        const auto lat = text::parse_double(fields[lat_col]);
        const auto t = text::parse_time(fields[t_col], schema.time_format);
        if (!lon || !lat || !t) {
            ++report.rows_malformed;
            continue;
        }
        const Position p{*lon, *lat, *t, std::nullopt};
        const std::string label = label_col ? fields[*label_col] : fixed_label;
        if (check(p) || label.empty()) {
            ++report.rows_rejected;
            continue;
        }
        const std::string id = id_col ? fields[*id_col] : default_id;
        auto [it, inserted] = index.try_emplace(id, groups.size());
        if (inserted) groups.push_back({id, Group{label, {}}});
        auto& group = groups[it->second].second;
        if (group.label != label) {
            ++report.rows_rejected;
            continue;
        }
        group.points.push_back(p);
    }

    for (auto& [id, group] : groups)
        if (auto traj = detail::finalize_track(id, group.label, std::move(group.points), report))
            result.trajectories.push_back(std::move(*traj));
    return result;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos && s == text::trim(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

/// Interchange format: `traj_id,label,t_epoch_s,lon,lat`, LF endings, values
/// in shortest round-trip form. Altitude is not carried.
inline void write_canonical_csv(std::ostream& out, const std::vector<Trajectory>& trajs) {
    out << "traj_id,label,t_epoch_s,lon,lat\n";
    for (const auto& traj : trajs) {
        const auto id = detail::csv_field(traj.id);
        const auto label = detail::csv_field(traj.label);
        for (const auto& p : traj.points)
            out << id << ',' << label << ',' << text::format_double(p.t) << ','
                << text::format_double(p.lon) << ',' << text::format_double(p.lat) << '\n';
    }
}

inline void write_canonical_csv(const fs::path& path, const std::vector<Trajectory>& trajs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    write_canonical_csv(out, trajs);
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

inline IngestResult parse_canonical_csv(const fs::path& path) {
    return parse_csv(path, SchemaSpec::canonical());
}

// ---------------------------------------------------------------------------
// GeoLife

namespace detail {

struct LabelInterval {
    double start = 0.0;
    double end = 0.0;
    std::string mode;
};

/// "2008/04/02 11:24:21" (GeoLife labels) or "2008-04-02 11:24:21".
inline std::optional<double> parse_geolife_datetime(std::string_view s) {
    s = text::trim(s);
    if (s.size() < 19) return std::nullopt;
    const auto y = text::parse_int(s.substr(0, 4));
    const auto mo = text::parse_int(s.substr(5, 2));
    const auto d = text::parse_int(s.substr(8, 2));
    const auto h = text::parse_int(s.substr(11, 2));
    const auto mi = text::parse_int(s.substr(14, 2));
    const auto se = text::parse_double(s.substr(17));
    if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
    return text::epoch_from_civil(static_cast<int>(*y), static_cast<int>(*mo), static_cast<int>(*d),
                                  static_cast<int>(*h), static_cast<int>(*mi), *se);
}

inline std::vector<LabelInterval> read_geolife_labels(const fs::path& path, IngestReport& report) {
    auto in = open_input(path);
    std::vector<LabelInterval> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            if (line.find("Start") != std::string::npos) continue;
        }
        if (text::trim(line).empty()) continue;
        const auto fields = text::split_fields(line, '\t');
        if (fields.size() < 3) {
            ++report.rows_malformed;
            continue;
        }
        const auto start = parse_geolife_datetime(fields[0]);
        const auto end = parse_geolife_datetime(fields[1]);
        if (!start || !end || *end < *start || fields[2].empty()) {
            ++report.rows_malformed;
            continue;
        }
        out.push_back({*start, *end, fields[2]});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LabelInterval& a, const LabelInterval& b) { return a.start < b.start; });
    return out;
}

/// Index of the interval containing t, if any. Where intervals overlap, the
/// later-starting one wins.
inline std::optional<std::size_t> find_interval(const std::vector<LabelInterval>& intervals,
                                                double t) {
    auto it = std::upper_bound(intervals.begin(), intervals.end(), t,
                               [](double v, const LabelInterval& iv) { return v < iv.start; });
    if (it == intervals.begin()) return std::nullopt;
    --it;
    if (t > it->end) return std::nullopt;
    return static_cast<std::size_t>(it - intervals.begin());
}

inline void parse_plt(const fs::path& plt, const std::string& user,
                      const std::vector<LabelInterval>& intervals, IngestResult& result) {
    auto in = open_input(plt);
    auto& report = result.report;
    std::string line;
    for (int i = 0; i < 6 && std::getline(in, line); ++i) {}

    std::optional<std::size_t> current;
    std::vector<Position> points;
    std::size_t segment = 0;
    const auto stem = plt.stem().string();
    auto flush = [&] {
        if (current && !points.empty()) {
            auto id = user + "/" + stem + "#" + std::to_string(segment++);
            if (auto traj = finalize_track(std::move(id), intervals[*current].mode,
                                           std::move(points), report))
                result.trajectories.push_back(std::move(*traj));
        }
        points.clear();
    };

    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        ++report.rows_read;
        const auto f = text::split_fields(line, ',');
        if (f.size() < 7) {
            ++report.rows_malformed;
            continue;
        }
        const auto lat = text::parse_double(f[0]);
        const auto lon = text::parse_double(f[1]);
        const auto alt_ft = text::parse_double(f[3]);
        const auto t = parse_geolife_datetime(f[5] + " " + f[6]);
        if (!lat || !lon || !t) {
            ++report.rows_malformed;
            continue;
        }
        Position p{*lon, *lat, *t, std::nullopt};
        if (alt_ft && *alt_ft != -777.0) p.alt = *alt_ft * 0.3048;
        if (check(p)) {
            ++report.rows_rejected;
            continue;
        }
        const auto iv = find_interval(intervals, p.t);
        if (iv != current) {
            flush();
            current = iv;
        }
        if (!iv) {
            ++report.rows_unlabeled;
            continue;
        }
        points.push_back(p);
    }
    flush();
}

template <typename Pred>
std::vector<fs::path> sorted_entries(const fs::path& dir, Pred pred) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (pred(entry)) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// Walks `<root>[/Data]/<user>/{labels.txt, Trajectory/*.plt}`. Each maximal
/// run of consecutive PLT points inside one label interval becomes a
/// trajectory labeled with that interval's mode; unlabeled points are dropped.
inline IngestResult parse_geolife(const fs::path& root) {
    if (!fs::is_directory(root)) throw InputError("'" + root.string() + "' is not a directory");
    const auto base = fs::is_directory(root / "Data") ? root / "Data" : root;
    IngestResult result;
    const auto users =
        detail::sorted_entries(base, [](const fs::directory_entry& e) { return e.is_directory(); });
    for (const auto& user_dir : users) {
        const auto user = user_dir.filename().string();
        const auto labels_path = user_dir / "labels.txt";
        if (!fs::exists(labels_path)) {
            ++result.report.groups_skipped;
            result.report.warnings.push_back("user " + user + ": no labels.txt");
            continue;
        }
        const auto intervals = detail::read_geolife_labels(labels_path, result.report);
        const auto traj_dir = user_dir / "Trajectory";
        if (!fs::is_directory(traj_dir)) continue;
        const auto plts = detail::sorted_entries(traj_dir, [](const fs::directory_entry& e) {
            return e.is_regular_file() && text::lower(e.path().extension().string()) == ".plt";
        });
        for (const auto& plt : plts) detail::parse_plt(plt, user, intervals, result);
    }
    return result;
}

// ---------------------------------------------------------------------------
// HURDAT2

/// Saffir-Simpson class from maximum sustained wind in knots.
inline std::string hurricane_class(double max_wind_kt) {
    if (max_wind_kt < 34.0) return "TD";
    if (max_wind_kt < 64.0) return "TS";
    if (max_wind_kt < 83.0) return "H1";
    if (max_wind_kt < 96.0) return "H2";
    if (max_wind_kt < 113.0) return "H3";
    if (max_wind_kt < 137.0) return "H4";
    return "H5";
}

namespace detail {

/// "28.0N" -> 28.0, "94.8W" -> -94.8.
inline std::optional<double> parse_hemisphere(std::string_view s) {
    s = text::trim(s);
    if (s.size() < 2) return std::nullopt;
    const char hemi = s.back();
    const auto v = text::parse_double(s.substr(0, s.size() - 1));
    if (!v || *v < 0.0) return std::nullopt;
    switch (hemi) {
        case 'N': case 'E': return *v;
        case 'S': case 'W': return -*v;
        default: return std::nullopt;
    }
}

inline bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline bool is_hurdat_header(const std::vector<std::string>& f) {
    if (f.size() < 3 || f.size() > 4 || f[0].size() != 8) return false;
    return std::isalpha(static_cast<unsigned char>(f[0][0])) &&
           std::isalpha(static_cast<unsigned char>(f[0][1])) &&
           all_digits(std::string_view(f[0]).substr(2));
}

} // namespace detail

/// One trajectory per storm, labeled by the lifetime-maximum wind class.
/// A storm is skipped when its header is unparseable, its data line count
/// disagrees with the header, or it has no valid wind observation.
inline IngestResult parse_hurdat(const fs::path& path) {
    auto in = detail::open_input(path);
    IngestResult result;
    auto& report = result.report;

    struct Storm {
        std::string id;
        long long expected = 0;
        long long seen = 0;
        double max_wind = -1.0;
        std::vector<Position> points;
    };
    std::optional<Storm> storm;
    bool skipping = false;

    auto finish = [&] {
        if (!storm) return;
        if (storm->seen != storm->expected) {
            ++report.groups_skipped;
            report.warnings.push_back("storm " + storm->id + ": header says " +
                                      std::to_string(storm->expected) + " lines, found " +
                                      std::to_string(storm->seen));
        } else if (storm->max_wind < 0.0) {
            ++report.groups_skipped;
            report.warnings.push_back("storm " + storm->id + ": no wind observations");
        } else if (auto traj = detail::finalize_track(storm->id, hurricane_class(storm->max_wind),
                                                      std::move(storm->points), report)) {
            result.trajectories.push_back(std::move(*traj));
        }
        storm.reset();
    };

    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        auto f = text::split_fields(line, ',');
        if (!f.empty() && f.back().empty()) f.pop_back();

        if (detail::is_hurdat_header(f)) {
            finish();
            const auto count = text::parse_int(f[2]);
            if (!count || *count < 0) {
                ++report.groups_skipped;
                report.warnings.push_back("unparseable storm header: " + line);
                skipping = true;
                continue;
            }
            skipping = false;
            storm = Storm{f[0], *count, 0, -1.0, {}};
            continue;
        }
        if (f.size() >= 2 && detail::all_digits(f[0]) && f[0].size() == 8) {
            ++report.rows_read;
            if (skipping || !storm) {
                ++report.rows_skipped;
                continue;
            }
            ++storm->seen;
            if (f.size() < 7 || f[1].size() != 4 || !detail::all_digits(f[1])) {
                ++report.rows_malformed;
                continue;
            }
            const auto ymd = text::parse_int(f[0]);
            const auto hm = text::parse_int(f[1]);
            const auto lat = detail::parse_hemisphere(f[4]);
            const auto lon = detail::parse_hemisphere(f[5]);
            const auto wind = text::parse_double(f[6]);
            std::optional<double> t;
            if (ymd && hm)
                t = text::epoch_from_civil(static_cast<int>(*ymd / 10000),
                                           static_cast<int>(*ymd / 100 % 100),
                                           static_cast<int>(*ymd % 100), static_cast<int>(*hm / 100),
                                           static_cast<int>(*hm % 100), 0.0);
            if (!t || !lat || !lon || !wind) {
                ++report.rows_malformed;
                continue;
            }
            const Position p{*lon, *lat, *t, std::nullopt};
            if (check(p)) {
                ++report.rows_rejected;
                continue;
            }
            if (*wind >= 0.0) storm->max_wind = std::max(storm->max_wind, *wind);
            storm->points.push_back(p);
            continue;
        }
        ++report.rows_malformed;
    }
    finish();
    return result;
}

// ---------------------------------------------------------------------------
// Starkey

struct StarkeyOptions {
    int utm_zone = 11;
    bool northern = true;
    /// Records stamped before this instant (1989-01-01T00:00:00Z) are skipped.
    double project_start_epoch = 599'616'000.0;
};

/// Maps a species code or name to its class label.
inline std::optional<std::string> starkey_species(std::string_view code) {
    const auto c = text::lower(text::trim(code));
    if (c == "e" || c == "elk") return "elk";
    if (c == "d" || c == "deer" || c == "mule deer" || c == "mule_deer" || c == "muledeer")
        return "mule deer";
    if (c == "c" || c == "cattle" || c == "cow") return "cattle";
    return std::nullopt;
}

namespace detail {

inline std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                              std::initializer_list<std::string_view> aliases) {
    for (auto alias : aliases)
        for (std::size_t i = 0; i < header.size(); ++i)
            if (text::lower(header[i]) == alias) return i;
    return std::nullopt;
}

inline std::optional<double> parse_starkey_time(std::string_view s) {
    if (auto v = text::parse_double(s)) return v;
    for (const char* fmt : {"%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%m/%d/%Y %H:%M:%S",
                            "%m/%d/%Y %H:%M"})
        if (auto v = text::parse_time(s, fmt)) return v;
    return std::nullopt;
}

inline int utc_year(double epoch) {
    using namespace std::chrono;
    const auto days = sys_days{} + std::chrono::days{static_cast<long>(std::floor(epoch / 86400.0))};
    return static_cast<int>(year_month_day{days}.year());
}

} // namespace detail

/// Header-driven telemetry export. Recognized columns (case-insensitive):
/// id | animalid | animal_id | animal | tid; species | label | class;
/// datetime | timestamp | time | t_epoch_s | epoch; and either lon/lat
/// (longitude/latitude) or utmgrideast/utmgridnorth (easting/northing).
/// One trajectory per (animal, species, calendar year).
inline IngestResult parse_starkey(const fs::path& path, const StarkeyOptions& opts = {}) {
    auto in = detail::open_input(path);
    IngestResult result;
    auto& report = result.report;

    std::string line;
    if (!std::getline(in, line)) throw InputError("'" + path.string() + "' is empty");
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    const auto header = text::split_fields(line, delim);
    const auto id_col = detail::find_column(header, {"id", "animalid", "animal_id", "animal", "tid"});
    const auto sp_col = detail::find_column(header, {"species", "label", "class"});
    const auto t_col =
        detail::find_column(header, {"datetime", "timestamp", "time", "t_epoch_s", "epoch"});
    const auto lon_col = detail::find_column(header, {"lon", "longitude"});
    const auto lat_col = detail::find_column(header, {"lat", "latitude"});
    const auto e_col = detail::find_column(header, {"utmgrideast", "easting", "utm_e"});
    const auto n_col = detail::find_column(header, {"utmgridnorth", "northing", "utm_n"});
    const bool geographic = lon_col && lat_col;
    if (!id_col || !sp_col || !t_col || (!geographic && !(e_col && n_col)))
        throw InputError("'" + path.string() + "': missing id, species, time or coordinate columns");

    struct Group {
        std::string label;
        std::vector<Position> points;
    };
    std::vector<std::pair<std::string, Group>> groups;
    std::map<std::string, std::size_t> index;

    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        ++report.rows_read;
        const auto f = text::split_fields(line, delim);
        const auto need = std::max({*id_col, *sp_col, *t_col, geographic ? *lon_col : *e_col,
                                    geographic ? *lat_col : *n_col});
        if (f.size() <= need) {
            ++report.rows_malformed;
            continue;
        }
        const auto species = starkey_species(f[*sp_col]);
        if (!species) {
            ++report.rows_skipped;
            continue;
        }
        const auto t = detail::parse_starkey_time(f[*t_col]);
        std::optional<double> lon, lat;
        if (geographic) {
            lon = text::parse_double(f[*lon_col]);
            lat = text::parse_double(f[*lat_col]);
        } else {
            const auto e = text::parse_double(f[*e_col]);
            const auto n = text::parse_double(f[*n_col]);
            if (e && n) {
                const auto ll = utm_to_lonlat(*e, *n, opts.utm_zone, opts.northern);
                lon = ll.lon;
                lat = ll.lat;
            }
        }
        if (!t || !lon || !lat || f[*id_col].empty()) {
            ++report.rows_malformed;
            continue;
        }
        if (*t < opts.project_start_epoch) {
            ++report.rows_skipped;
            continue;
        }
        const Position p{*lon, *lat, *t, std::nullopt};
        if (check(p)) {
            ++report.rows_rejected;
            continue;
        }
        const auto key = f[*id_col] + "/" + std::to_string(detail::utc_year(*t));
        auto [it, inserted] = index.try_emplace(key, groups.size());
        if (inserted) groups.push_back({key, Group{*species, {}}});
        auto& group = groups[it->second].second;
        if (group.label != *species) {
            ++report.rows_rejected;
            continue;
        }
        group.points.push_back(p);
    }

    for (auto& [id, group] : groups)
        if (auto traj = detail::finalize_track(id, group.label, std::move(group.points), report))
            result.trajectories.push_back(std::move(*traj));
    return result;
}

} // namespace traclets
