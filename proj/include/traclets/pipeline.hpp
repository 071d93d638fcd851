#pragma once

#include "traclets/config.hpp"
#include "traclets/error.hpp"
#include "traclets/ingest.hpp"
#include "traclets/kinematics.hpp"
#include "traclets/manifest.hpp"
#include "traclets/model.hpp"
#include "traclets/parallel.hpp"
#include "traclets/png.hpp"
#include "traclets/preprocess.hpp"
#include "traclets/raster.hpp"
#include "traclets/version.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace traclets {

enum class DatasetKind { geolife, hurdat, starkey, csv, canonical };

inline std::string_view to_string(DatasetKind k) {
    switch (k) {
        case DatasetKind::geolife: return "geolife";
        case DatasetKind::hurdat: return "hurdat";
        case DatasetKind::starkey: return "starkey";
        case DatasetKind::csv: return "csv";
        case DatasetKind::canonical: return "canonical";
    }
    return "unknown";
}

inline std::optional<DatasetKind> parse_dataset_kind(std::string_view s) {
    for (auto k : {DatasetKind::geolife, DatasetKind::hurdat, DatasetKind::starkey, DatasetKind::csv,
                   DatasetKind::canonical})
        if (to_string(k) == s) return k;
    if (s == "animals") return DatasetKind::starkey;
    if (s == "hurricanes") return DatasetKind::hurdat;
    return std::nullopt;
}

inline PreprocessConfig default_preprocess(DatasetKind k) {
    return k == DatasetKind::geolife ? PreprocessConfig::geolife() : PreprocessConfig::sparse();
}

/// Parses `input` with the adapter for `kind`. For csv/canonical a directory
/// input means every *.csv beneath it, in sorted path order.
inline IngestResult ingest_dataset(DatasetKind kind, const fs::path& input,
                                   const std::optional<SchemaSpec>& schema = std::nullopt) {
    switch (kind) {
        case DatasetKind::geolife: return parse_geolife(input);
        case DatasetKind::hurdat: return parse_hurdat(input);
        case DatasetKind::starkey: return parse_starkey(input);
        case DatasetKind::csv:
        case DatasetKind::canonical: {
            SchemaSpec spec = SchemaSpec::canonical();
            if (kind == DatasetKind::csv) {
                if (!schema) throw InputError("dataset kind 'csv' needs a schema");
                spec = *schema;
            }
            if (!fs::is_directory(input)) return parse_csv(input, spec);
            std::vector<fs::path> files;
            for (const auto& e : fs::recursive_directory_iterator(input))
                if (e.is_regular_file() && text::lower(e.path().extension().string()) == ".csv")
                    files.push_back(e.path());
            std::sort(files.begin(), files.end());
            IngestResult all;
            for (const auto& f : files) {
                auto part = parse_csv(f, spec);
                all.report.merge(part.report);
                for (auto& t : part.trajectories) all.trajectories.push_back(std::move(t));
            }
            return all;
        }
    }
    throw InvariantError("unhandled dataset kind");
}

/// Rasterizes and PNG-encodes every track.
inline std::vector<std::vector<std::uint8_t>> render_pngs(std::span<const KinematicTrack> tracks,
                                                          const RasterConfig& cfg, unsigned workers) {
    std::vector<std::vector<std::uint8_t>> out(tracks.size());
    parallel_for(tracks.size(), workers, [&](std::size_t i) { out[i] = encode_png(rasterize(tracks[i], cfg)); });
    return out;
}

/// Filesystem-safe name: [A-Za-z0-9._-] kept, everything else becomes '_'.
inline std::string sanitize_name(std::string_view s) {
    std::string out;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '.' || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

struct BuildOptions {
    DatasetKind kind = DatasetKind::canonical;
    fs::path input;
    std::optional<SchemaSpec> schema;
    PreprocessConfig preprocess = PreprocessConfig::sparse();
    RasterSettings raster;
    std::uint64_t seed = 0;
    fs::path out_dir;
    unsigned workers = 1;
};

inline constexpr const char* kManifestName = "manifest.tsv";
inline constexpr const char* kAuditName = "preprocess_audit.json";
inline constexpr const char* kTracksName = "tracks.csv";

namespace detail {

inline std::map<std::string, std::string> build_conventions(DatasetKind kind, double percentile) {
    std::map<std::string, std::string> c{
        {"distance", "haversine_r6371000"},
        {"last_point_speed", "copy_predecessor"},
        {"accel_definition", "speed_diff_over_segment_dt"},
        {"ceiling_population", "train_split"},
        {"ceiling_percentile", text::format_double(percentile)},
        {"split", "stratified_per_class_0.70"},
        {"draw_order", "lines_then_points"},
        {"bresenham_tie", "toward_destination"},
        {"degenerate_axis", "center"},
    };
    if (kind == DatasetKind::hurdat) c["hurricane_label"] = "lifetime_max_wind_saffir_simpson";
    if (kind == DatasetKind::starkey) c["starkey_track"] = "animal_calendar_year";
    return c;
}

} // namespace detail

/// ingest -> preprocess -> kinematics -> split -> ceilings (train only) ->
/// rasterize. Writes `<out>/<class>/<id>.png`, the manifest, the audit
/// report, and the preprocessed tracks. `out_dir` must be absent or empty.
inline DatasetManifest build_dataset(const BuildOptions& opts) {
    if (fs::exists(opts.out_dir) && !fs::is_empty(opts.out_dir))
        throw InputError("output directory '" + opts.out_dir.string() + "' is not empty");
    if (auto v = check(opts.preprocess)) throw ValidationError(*v, "preprocess config");

    auto ingested = ingest_dataset(opts.kind, opts.input, opts.schema);
    std::set<std::string> expected_labels;
    for (const auto& t : ingested.trajectories)
        if (!opts.preprocess.excluded_classes.contains(t.label)) expected_labels.insert(t.label);
    if (expected_labels.empty())
        throw InputError("no trajectories ingested from '" + opts.input.string() + "'");

    auto pre = run_preprocess(std::move(ingested.trajectories), opts.preprocess);
    auto& trajs = pre.trajectories;
    std::set<std::string> surviving;
    for (const auto& t : trajs) surviving.insert(t.label);
    for (const auto& label : expected_labels)
        if (!surviving.contains(label))
            throw InputError("class '" + label + "' has no surviving trajectories");

    std::vector<KinematicTrack> tracks(trajs.size());
    parallel_for(trajs.size(), opts.workers, [&](std::size_t i) { tracks[i] = derive_kinematics(trajs[i]); });

    std::vector<std::string> labels;
    for (const auto& t : trajs) labels.push_back(t.label);
    const auto splits = stratified_split(labels, kTrainFraction, opts.seed);

    std::vector<KinematicTrack> train;
    for (std::size_t i = 0; i < tracks.size(); ++i)
        if (splits[i] == Split::train) train.push_back(tracks[i]);
    if (train.empty()) throw InputError("training split is empty");
    const auto ceilings = reference_ceilings(train, opts.raster.ceiling_percentile);
    const auto cfg = opts.raster.resolve(ceilings);

    DatasetManifest m;
    m.tool_version = kToolVersion;
    m.dataset = std::string(to_string(opts.kind));
    m.rng_seed = opts.seed;
    m.raster_config = opts.raster;
    m.preprocess_config = opts.preprocess;
    m.ceilings = {cfg.max_speed, cfg.max_accel};
    m.stats = compute_stats(train);
    m.conventions = detail::build_conventions(opts.kind, opts.raster.ceiling_percentile);
    m.tracks_file = kTracksName;
    m.config_hash = sha256_hex(nlohmann::json{{"dataset", m.dataset},
                                              {"raster", m.raster_config},
                                              {"preprocess", m.preprocess_config},
                                              {"seed", opts.seed},
                                              {"conventions", m.conventions}}
                                   .dump());

    std::set<std::string> used;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        const auto dir = sanitize_name(trajs[i].label);
        const auto stem = sanitize_name(trajs[i].id);
        std::string path = dir + "/" + stem + ".png";
        for (int k = 2; used.contains(path); ++k) path = dir + "/" + stem + "-" + std::to_string(k) + ".png";
        used.insert(path);
        m.entries.push_back({path, trajs[i].label, splits[i], trajs[i].id});
    }
    if (auto problem = check_manifest(m)) throw InvariantError("manifest: " + *problem);

    nlohmann::json audit{{"ingest", ingested.report}, {"passes", pre.audit}};
    m.audit = nlohmann::json{{"ingested_trajectories", pre.audit.front().trajectories_in},
                             {"kept_trajectories", trajs.size()},
                             {"train", train.size()},
                             {"test", trajs.size() - train.size()}};

    fs::create_directories(opts.out_dir);
    for (const auto& label : surviving) fs::create_directories(opts.out_dir / sanitize_name(label));
    parallel_for(tracks.size(), opts.workers, [&](std::size_t i) {
        encode_png(rasterize(tracks[i], cfg), opts.out_dir / m.entries[i].path);
    });
    write_canonical_csv(opts.out_dir / kTracksName, trajs);
    {
        std::ofstream out(opts.out_dir / kAuditName, std::ios::binary);
        out << audit.dump(2) << '\n';
        if (!out) throw InputError("cannot write audit report");
    }
    write_manifest(m, opts.out_dir / kManifestName);
    return m;
}

/// Raster config that produced the manifest's images.
inline RasterConfig manifest_raster_config(const DatasetManifest& m) {
    auto cfg = raster_settings_from_json(m.raster_config).base;
    cfg.max_speed = m.ceilings.speed;
    cfg.max_accel = m.ceilings.accel;
    return cfg;
}

/// Human-readable dump of one trajectory of a built dataset.
inline std::string inspect(const fs::path& manifest_path, std::string_view traj_id) {
    const auto m = read_manifest(manifest_path);
    const auto* entry = m.find_id(traj_id);
    if (!entry) throw InputError("unknown trajectory id '" + std::string(traj_id) + "'");
    const auto base = manifest_path.parent_path();
    const auto tracks = parse_canonical_csv(base / m.tracks_file);
    const Trajectory* traj = nullptr;
    for (const auto& t : tracks.trajectories)
        if (t.id == traj_id) traj = &t;
    if (!traj) throw InputError("trajectory '" + std::string(traj_id) + "' missing from " + m.tracks_file);

    const auto cfg = manifest_raster_config(m);
    const auto track = derive_kinematics(*traj);
    const auto box = bounding_box(traj->points);
    const auto pixels = position_pixels(traj->points, cfg);
    const BinScheme speed_bins(cfg.max_speed);
    const BinScheme accel_bins(cfg.max_accel);
    std::array<std::size_t, kBucketCount> speed_hist{}, accel_hist{};
    for (double s : track.speeds) ++speed_hist[speed_bins.bucket(s) - 1];
    for (double a : track.accels) ++accel_hist[accel_bins.bucket(std::abs(a)) - 1];

    std::ostringstream out;
    out << "id: " << traj->id << '\n'
        << "label: " << traj->label << '\n'
        << "split: " << to_string(entry->split) << '\n'
        << "image: " << (base / entry->path).string() << '\n'
        << "points: " << traj->points.size() << '\n'
        << "bbox: lon [" << text::format_double(box.lon_min) << ", " << text::format_double(box.lon_max)
        << "] lat [" << text::format_double(box.lat_min) << ", " << text::format_double(box.lat_max) << "]\n"
        << "n=" << cfg.n << '\n'
        << "speed ceiling: " << text::format_double(cfg.max_speed)
        << " m/s, accel ceiling: " << text::format_double(cfg.max_accel) << " m/s^2\n";
    auto hist_line = [&](const char* name, const auto& h) {
        out << name << " buckets:";
        for (auto c : h) out << ' ' << c;
        out << '\n';
    };
    hist_line("speed", speed_hist);
    hist_line("accel", accel_hist);
    out << "positions (x,y):";
    for (const auto& p : pixels) out << " (" << p.x << ',' << p.y << ')';
    out << '\n';
    return out.str();
}

inline std::string format_stats(const KinematicStats& s) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-16s %8s %10s %14s %16s\n", "class", "tracks", "points",
                  "max_speed", "max_abs_accel");
    out << buf;
    auto row = [&](const std::string& name, const KinematicSummary& k) {
        std::snprintf(buf, sizeof buf, "%-16s %8llu %10llu %14.4f %16.4f\n", name.c_str(),
                      static_cast<unsigned long long>(k.tracks), static_cast<unsigned long long>(k.points),
                      k.max_speed, k.max_abs_accel);
        out << buf;
    };
    for (const auto& [label, k] : s.per_class) row(label, k);
    row("(all)", s.global);
    return out.str();
}

} // namespace traclets
