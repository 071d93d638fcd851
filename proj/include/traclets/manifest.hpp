#pragma once

#include "traclets/error.hpp"
#include "traclets/kinematics.hpp"
#include "traclets/rng.hpp"
#include "traclets/text.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace traclets {

enum class Split { train, test };

inline std::string_view to_string(Split s) { return s == Split::train ? "train" : "test"; }

inline constexpr double kTrainFraction = 0.70;

/// Per label (in input order), a seeded permutation sends the first
/// round(fraction * count) members to train and the rest to test.
inline std::vector<Split> stratified_split(const std::vector<std::string>& labels, double fraction,
                                           std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InputError("train fraction must be in [0, 1]");
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
    std::vector<Split> out(labels.size(), Split::test);
    std::mt19937_64 rng(seed);
    for (const auto& [label, members] : by_label) {
        const auto quota = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(members.size())));
        const auto order = seeded_permutation(members.size(), rng);
        for (std::size_t k = 0; k < quota; ++k) out[members[order[k]]] = Split::train;
    }
    return out;
}

struct ManifestEntry {
    std::string path; ///< relative to the manifest's directory
    std::string label;
    Split split = Split::train;
    std::string traj_id;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Authoritative record of one dataset build.
struct DatasetManifest {
    static constexpr int kVersion = 1;

    std::string tool_version;
    std::string dataset;
    std::uint64_t rng_seed = 0;
    std::string config_hash;
    nlohmann::json raster_config = nlohmann::json::object();     ///< as resolved for this build
    nlohmann::json preprocess_config = nlohmann::json::object();
    Ceilings ceilings;
    KinematicStats stats;  ///< training split only
    nlohmann::json audit = nlohmann::json::object();
    std::map<std::string, std::string> conventions;
    std::string tracks_file;
    std::vector<ManifestEntry> entries;

    std::set<std::string> labels() const {
        std::set<std::string> out;
        for (const auto& e : entries) out.insert(e.label);
        return out;
    }

    const ManifestEntry* find_path(std::string_view path) const {
        for (const auto& e : entries)
            if (e.path == path) return &e;
        return nullptr;
    }

    const ManifestEntry* find_id(std::string_view id) const {
        for (const auto& e : entries)
            if (e.traj_id == id) return &e;
        return nullptr;
    }
};

/// Unique paths, and per label a train share within one trajectory of
/// kTrainFraction.
inline std::optional<std::string> check_manifest(const DatasetManifest& m) {
    std::set<std::string> paths;
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts; // train, total
    for (const auto& e : m.entries) {
        if (!paths.insert(e.path).second) return "duplicate path '" + e.path + "'";
        auto& c = counts[e.label];
        c.second += 1;
        if (e.split == Split::train) c.first += 1;
    }
    for (const auto& [label, c] : counts) {
        const double expected = kTrainFraction * static_cast<double>(c.second);
        if (std::abs(static_cast<double>(c.first) - expected) > 1.0)
            return "label '" + label + "' has " + std::to_string(c.first) + " of " +
                   std::to_string(c.second) + " in train";
    }
    return std::nullopt;
}

namespace detail {

inline void require_plain(const std::string& s, const char* what) {
    if (s.find_first_of("\t\r\n") != std::string::npos)
        throw InputError(std::string(what) + " '" + s + "' contains a tab or newline");
}

inline constexpr std::string_view kManifestMagic = "#traclets-manifest";

} // namespace detail

/// Line format: a magic/version line, `key<TAB>value` header lines (JSON
/// for structured values), a `#entries<TAB>count` line, a column header,
/// then one `path<TAB>label<TAB>split<TAB>traj_id` row per image.
inline void write_manifest(const DatasetManifest& m, std::ostream& out) {
    out << detail::kManifestMagic << ' ' << DatasetManifest::kVersion << '\n';
    auto kv = [&](std::string_view key, const std::string& value) {
        detail::require_plain(value, "manifest value");
        out << key << '\t' << value << '\n';
    };
    kv("tool_version", m.tool_version);
    kv("dataset", m.dataset);
    kv("rng_seed", std::to_string(m.rng_seed));
    kv("config_hash", m.config_hash);
    kv("raster_config", m.raster_config.dump());
    kv("preprocess_config", m.preprocess_config.dump());
    kv("ceiling_speed", text::format_double(m.ceilings.speed));
    kv("ceiling_accel", text::format_double(m.ceilings.accel));
    kv("kinematic_stats", nlohmann::json(m.stats).dump());
    kv("audit", m.audit.dump());
    for (const auto& [k, v] : m.conventions) kv("convention." + k, v);
    kv("tracks_file", m.tracks_file);
    out << "#entries\t" << m.entries.size() << '\n';
    out << "path\tlabel\tsplit\ttraj_id\n";
    for (const auto& e : m.entries) {
        detail::require_plain(e.path, "path");
        detail::require_plain(e.label, "label");
        detail::require_plain(e.traj_id, "trajectory id");
        out << e.path << '\t' << e.label << '\t' << to_string(e.split) << '\t' << e.traj_id << '\n';
    }
}

inline void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    write_manifest(m, out);
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

inline DatasetManifest read_manifest(std::istream& in, const std::string& origin = "manifest") {
    auto fail = [&](const std::string& why) -> InputError {
        return InputError(origin + ": " + why);
    };
    std::string line;
    if (!std::getline(in, line) || !line.starts_with(detail::kManifestMagic))
        throw fail("missing manifest header");
    const auto version = text::parse_int(std::string_view(line).substr(detail::kManifestMagic.size()));
    if (!version || *version != DatasetManifest::kVersion)
        throw fail("unsupported manifest version");

    DatasetManifest m;
    std::optional<std::size_t> expected;
    try {
        while (std::getline(in, line)) {
            const auto tab = line.find('\t');
            if (tab == std::string::npos) throw fail("bad header line '" + line + "'");
            const auto key = line.substr(0, tab);
            const auto value = line.substr(tab + 1);
            if (key == "#entries") {
                const auto n = text::parse_int(value);
                if (!n || *n < 0) throw fail("bad entry count");
                expected = static_cast<std::size_t>(*n);
                break;
            }
            if (key == "tool_version") m.tool_version = value;
            else if (key == "dataset") m.dataset = value;
            else if (key == "rng_seed") m.rng_seed = std::stoull(value);
            else if (key == "config_hash") m.config_hash = value;
            else if (key == "raster_config") m.raster_config = nlohmann::json::parse(value);
            else if (key == "preprocess_config") m.preprocess_config = nlohmann::json::parse(value);
            else if (key == "ceiling_speed") m.ceilings.speed = text::parse_double(value).value();
            else if (key == "ceiling_accel") m.ceilings.accel = text::parse_double(value).value();
            else if (key == "kinematic_stats") m.stats = nlohmann::json::parse(value).get<KinematicStats>();
            else if (key == "audit") m.audit = nlohmann::json::parse(value);
            else if (key == "tracks_file") m.tracks_file = value;
            else if (key.starts_with("convention.")) m.conventions[key.substr(11)] = value;
            // Unknown keys are ignored for forward compatibility.
        }
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw fail(std::string("bad header value: ") + e.what());
    }
    if (!expected) throw fail("missing #entries line");
    if (!std::getline(in, line) || line != "path\tlabel\tsplit\ttraj_id")
        throw fail("missing entry column header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream row(line);
        for (std::string cell; std::getline(row, cell, '\t');) f.push_back(cell);
        if (f.size() != 4) throw fail("bad entry row '" + line + "'");
        Split split;
        if (f[2] == "train") split = Split::train;
        else if (f[2] == "test") split = Split::test;
        else throw fail("bad split '" + f[2] + "'");
        m.entries.push_back({f[0], f[1], split, f[3]});
    }
    if (m.entries.size() != *expected) throw fail("entry count does not match header");
    return m;
}

inline DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return read_manifest(in, path.string());
}

} // namespace traclets
