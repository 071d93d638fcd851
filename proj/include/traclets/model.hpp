#pragma once

#include "traclets/error.hpp"

#include <algorithm>
#include <array>
#include <compare>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace traclets {

/// One timestamped geographic sample. `t` is UTC epoch seconds.
struct Position {
    double lon = 0.0;
    double lat = 0.0;
    double t = 0.0;
    std::optional<double> alt; ///< meters

    friend bool operator==(const Position&, const Position&) = default;
};

/// True when two samples share location and time (altitude ignored).
inline bool same_fix(const Position& a, const Position& b) noexcept {
    return a.lon == b.lon && a.lat == b.lat && a.t == b.t;
}

struct Trajectory {
    std::string id;
    std::string label;
    std::vector<Position> points;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct BoundingBox {
    double lon_min = 0.0;
    double lon_max = 0.0;
    double lat_min = 0.0;
    double lat_max = 0.0;

    double width() const noexcept { return lon_max - lon_min; }
    double height() const noexcept { return lat_max - lat_min; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct KinematicTrack {
    Trajectory trajectory;
    std::vector<double> speeds; ///< m/s, one per point
    std::vector<double> accels; ///< m/s^2, signed, one per segment
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

inline constexpr std::size_t kBucketCount = 11;

using Palette = std::array<Rgb, kBucketCount>;

/// Cold-to-hot ramp, bucket 1 first.
inline constexpr Palette kDefaultPalette = {{
    {0x31, 0x36, 0x95}, {0x45, 0x75, 0xb4}, {0x74, 0xad, 0xd1}, {0xab, 0xd9, 0xe9},
    {0xe0, 0xf3, 0xf8}, {0xff, 0xff, 0xbf}, {0xfe, 0xe0, 0x90}, {0xfd, 0xae, 0x61},
    {0xf4, 0x6d, 0x43}, {0xd7, 0x30, 0x27}, {0xa5, 0x00, 0x26},
}};

inline constexpr Rgb kWhite{0xff, 0xff, 0xff};

/// How normalized coordinates become pixel indices before clamping.
enum class Rounding { floor, nearest, ceil };

/// Which image row holds the minimum latitude.
enum class Orientation {
    min_lat_top, ///< v = 0 is row 1 (top)
    north_up,    ///< v = 0 is row n (bottom)
};

struct RasterConfig {
    int n = 224;
    std::size_t buckets = kBucketCount;
    double max_speed = 1.0; ///< 0 collapses every speed into bucket 1
    double max_accel = 1.0; ///< applied to |a|
    Palette palette = kDefaultPalette;
    Rgb background = kWhite;
    Rounding rounding = Rounding::floor;
    Orientation orientation = Orientation::min_lat_top;
};

/// N x N RGB grid, row-major, row 1 at the top.
struct TracletImage {
    int n = 0;
    std::vector<Rgb> pixels;

    TracletImage() = default;
    TracletImage(int side, Rgb fill)
        : n(side), pixels(static_cast<std::size_t>(side) * static_cast<std::size_t>(side), fill) {}

    /// 1-based column x, row y.
    Rgb& at(int x, int y) { return pixels[index(x, y)]; }
    const Rgb& at(int x, int y) const { return pixels[index(x, y)]; }

    friend bool operator==(const TracletImage&, const TracletImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y - 1) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(x - 1);
    }
};

// ---------------------------------------------------------------------------
// Validation. Each check() returns the first violated invariant, if any; the
// matching validate() throws ValidationError carrying that reason.

inline std::optional<Violation> check(const Position& p) {
    if (!std::isfinite(p.lon) || !std::isfinite(p.lat) || !std::isfinite(p.t) ||
        (p.alt && !std::isfinite(*p.alt)))
        return Violation::non_finite_value;
    if (p.lon < -180.0 || p.lon > 180.0) return Violation::lon_out_of_range;
    if (p.lat < -90.0 || p.lat > 90.0) return Violation::lat_out_of_range;
    return std::nullopt;
}

inline std::optional<Violation> check(const Trajectory& traj) {
    if (traj.label.empty()) return Violation::empty_label;
    if (traj.points.size() < 2) return Violation::too_few_points;
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        if (auto v = check(traj.points[i])) return v;
        if (i > 0 && !(traj.points[i].t > traj.points[i - 1].t))
            return Violation::time_not_increasing;
    }
    return std::nullopt;
}

inline std::optional<Violation> check(const BoundingBox& box) {
    if (!std::isfinite(box.lon_min) || !std::isfinite(box.lon_max) ||
        !std::isfinite(box.lat_min) || !std::isfinite(box.lat_max))
        return Violation::non_finite_value;
    if (box.lon_min > box.lon_max || box.lat_min > box.lat_max)
        return Violation::bad_bounding_box;
    return std::nullopt;
}

inline std::optional<Violation> check(const KinematicTrack& track) {
    if (auto v = check(track.trajectory)) return v;
    const auto count = track.trajectory.points.size();
    if (track.speeds.size() != count || track.accels.size() + 1 != count)
        return Violation::length_mismatch;
    for (double s : track.speeds) {
        if (!std::isfinite(s)) return Violation::non_finite_value;
        if (s < 0.0) return Violation::negative_speed;
    }
    for (double a : track.accels)
        if (!std::isfinite(a)) return Violation::non_finite_value;
    return std::nullopt;
}

inline std::optional<Violation> check(const RasterConfig& cfg) {
    if (cfg.n < 2) return Violation::image_too_small;
    if (cfg.buckets != kBucketCount) return Violation::bad_bucket_count;
    if (!std::isfinite(cfg.max_speed) || cfg.max_speed < 0.0 || !std::isfinite(cfg.max_accel) ||
        cfg.max_accel < 0.0)
        return Violation::bad_ceiling;
    for (std::size_t i = 0; i < cfg.palette.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.palette.size(); ++j)
            if (cfg.palette[i] == cfg.palette[j]) return Violation::palette_not_distinct;
    return std::nullopt;
}

inline std::optional<Violation> check(const TracletImage& img, const RasterConfig& cfg) {
    if (img.n < 2) return Violation::image_too_small;
    if (img.pixels.size() != static_cast<std::size_t>(img.n) * static_cast<std::size_t>(img.n))
        return Violation::length_mismatch;
    for (const Rgb& px : img.pixels) {
        if (px == cfg.background) continue;
        bool found = false;
        for (const Rgb& c : cfg.palette) found = found || c == px;
        if (!found) return Violation::pixel_not_in_palette;
    }
    return std::nullopt;
}

template <typename... Args>
void validate(const Args&... args) {
    if (auto v = check(args...)) throw ValidationError(*v, "invariant violated");
}

inline void validate(const Trajectory& traj) {
    if (auto v = check(traj)) throw ValidationError(*v, "trajectory '" + traj.id + "'");
}

inline void validate(const KinematicTrack& track) {
    if (auto v = check(track))
        throw ValidationError(*v, "kinematic track '" + track.trajectory.id + "'");
}

/// Tight bounds over all points. Requires a non-empty trajectory.
inline BoundingBox bounding_box(const std::vector<Position>& points) {
    if (points.empty()) throw InvariantError("bounding_box of empty point list");
    BoundingBox box{points[0].lon, points[0].lon, points[0].lat, points[0].lat};
    for (const auto& p : points) {
        box.lon_min = std::min(box.lon_min, p.lon);
        box.lon_max = std::max(box.lon_max, p.lon);
        box.lat_min = std::min(box.lat_min, p.lat);
        box.lat_max = std::max(box.lat_max, p.lat);
    }
    return box;
}

} // namespace traclets
