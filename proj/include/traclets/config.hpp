#pragma once

#include "traclets/error.hpp"
#include "traclets/kinematics.hpp"
#include "traclets/model.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>

namespace traclets {

inline constexpr int kRasterConfigSchemaVersion = 1;

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        throw InvariantError("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

inline std::string to_hex(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

inline Rgb rgb_from_hex(std::string_view s) {
    if (s.size() != 7 || s[0] != '#') throw InputError("bad color '" + std::string(s) + "'");
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw InputError("bad color '" + std::string(s) + "'");
    };
    auto byte = [&](std::size_t i) {
        return static_cast<std::uint8_t>(nibble(s[i]) * 16 + nibble(s[i + 1]));
    };
    return {byte(1), byte(3), byte(5)};
}

/// Raster settings as stored on disk. Ceilings left unset are computed from
/// the training split at build time.
struct RasterSettings {
    RasterConfig base;
    std::optional<double> max_speed;
    std::optional<double> max_accel;
    double ceiling_percentile = 100.0;

    RasterConfig resolve(const Ceilings& auto_ceilings) const {
        RasterConfig cfg = base;
        cfg.max_speed = max_speed.value_or(auto_ceilings.speed);
        cfg.max_accel = max_accel.value_or(auto_ceilings.accel);
        if (auto v = check(cfg)) throw ValidationError(*v, "resolved raster config");
        return cfg;
    }
};

inline void to_json(nlohmann::json& j, const RasterSettings& s) {
    nlohmann::json palette = nlohmann::json::array();
    for (const auto& c : s.base.palette) palette.push_back(to_hex(c));
    auto ceiling = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json("auto");
    };
    j = nlohmann::json{
        {"schema_version", kRasterConfigSchemaVersion},
        {"n", s.base.n},
        {"rounding", s.base.rounding == Rounding::floor     ? "floor"
                     : s.base.rounding == Rounding::nearest ? "nearest"
                                                            : "ceil"},
        {"orientation", s.base.orientation == Orientation::min_lat_top ? "min_lat_top" : "north_up"},
        {"palette", palette},
        {"background", to_hex(s.base.background)},
        {"max_speed", ceiling(s.max_speed)},
        {"max_accel", ceiling(s.max_accel)},
        {"ceiling_percentile", s.ceiling_percentile},
    };
}

inline RasterSettings raster_settings_from_json(const nlohmann::json& j) {
    const int version = j.value("schema_version", kRasterConfigSchemaVersion);
    if (version != kRasterConfigSchemaVersion)
        throw InputError("unsupported raster config schema_version " + std::to_string(version));
    RasterSettings s;
    s.base.n = j.value("n", 224);
    const auto rounding = j.value("rounding", std::string("floor"));
    if (rounding == "floor") s.base.rounding = Rounding::floor;
    else if (rounding == "nearest") s.base.rounding = Rounding::nearest;
    else if (rounding == "ceil") s.base.rounding = Rounding::ceil;
    else throw InputError("unknown rounding '" + rounding + "'");
    const auto orientation = j.value("orientation", std::string("min_lat_top"));
    if (orientation == "min_lat_top") s.base.orientation = Orientation::min_lat_top;
    else if (orientation == "north_up") s.base.orientation = Orientation::north_up;
    else throw InputError("unknown orientation '" + orientation + "'");
    if (j.contains("palette")) {
        const auto& p = j["palette"];
        if (!p.is_array() || p.size() != kBucketCount)
            throw ValidationError(Violation::bad_bucket_count, "palette needs 11 colors");
        for (std::size_t i = 0; i < kBucketCount; ++i)
            s.base.palette[i] = rgb_from_hex(p[i].get<std::string>());
    }
    if (j.contains("background")) s.base.background = rgb_from_hex(j["background"].get<std::string>());
    auto ceiling = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key) || (j[key].is_string() && j[key] == "auto")) return std::nullopt;
        const double v = j[key].get<double>();
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError(Violation::bad_ceiling, std::string(key) + " must be > 0 or \"auto\"");
        return v;
    };
    s.max_speed = ceiling("max_speed");
    s.max_accel = ceiling("max_accel");
    s.ceiling_percentile = j.value("ceiling_percentile", 100.0);
    if (!(s.ceiling_percentile > 0.0 && s.ceiling_percentile <= 100.0))
        throw InputError("ceiling_percentile must be in (0, 100]");
    RasterConfig probe = s.base;
    probe.max_speed = 1.0;
    probe.max_accel = 1.0;
    if (auto v = check(probe)) throw ValidationError(*v, "raster config");
    for (const auto& c : s.base.palette)
        if (c == s.base.background)
            throw ValidationError(Violation::palette_not_distinct, "palette color equals background");
    return s;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

} // namespace traclets
