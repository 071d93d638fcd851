#pragma once

#include "traclets/error.hpp"
#include "traclets/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace traclets {

/// 1-based column (x) and row (y) inside an N x N image.
struct PixelCoord {
    int x = 1;
    int y = 1;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Position as a fraction of the bounding box extent on each axis.
struct UnitCoord {
    double u = 0.0;
    double v = 0.0;

    friend bool operator==(const UnitCoord&, const UnitCoord&) = default;
};

/// Offset of `m` from the box minimum divided by the box extent, per axis.
/// A zero-extent axis places every position at its center (0.5).
inline UnitCoord normalize_position(const Position& m, const BoundingBox& box) {
    const double dx = box.width();
    const double dy = box.height();
    const double u = dx > 0.0 ? (m.lon - box.lon_min) / dx : 0.5;
    const double v = dy > 0.0 ? (m.lat - box.lat_min) / dy : 0.5;
    return {u, v};
}

namespace detail {

inline int scale_to_pixel(double c, int n, Rounding rounding) {
    const double raw = c * static_cast<double>(n);
    double r = 0.0;
    switch (rounding) {
        case Rounding::floor: r = std::floor(raw); break;
        case Rounding::nearest: r = std::round(raw); break;
        case Rounding::ceil: r = std::ceil(raw); break;
    }
    if (!(r >= 1.0)) return 1; // also catches NaN
    if (r > static_cast<double>(n)) return n;
    return static_cast<int>(r);
}

} // namespace detail

/// Scales by n under the rounding rule, then clamps into [1, n].
inline PixelCoord to_pixel(const UnitCoord& c, int n, Rounding rounding = Rounding::floor) {
    return {detail::scale_to_pixel(c.u, n, rounding), detail::scale_to_pixel(c.v, n, rounding)};
}

/// Image row for a pixel row index under the configured orientation.
inline int image_row(int y, int n, Orientation orientation) {
    return orientation == Orientation::min_lat_top ? y : n + 1 - y;
}

/// Eleven equal-width buckets over [0, ceiling]; boundary i is
/// (i - 1) * ceiling / 11.
class BinScheme {
public:
    explicit BinScheme(double ceiling) : ceiling_(ceiling), increment_(ceiling / kBucketCount) {
        if (!std::isfinite(ceiling) || ceiling < 0.0)
            throw ValidationError(Violation::bad_ceiling, "bin ceiling must be finite and >= 0");
        for (std::size_t i = 0; i < kBucketCount; ++i)
            boundaries_[i] = 0.0 + static_cast<double>(i) * increment_;
    }

    double ceiling() const noexcept { return ceiling_; }
    double increment() const noexcept { return increment_; }
    const std::array<double, kBucketCount>& boundaries() const noexcept { return boundaries_; }

    /// 1-based bucket. Values at or above the last boundary (the ceiling
    /// included) land in bucket 11; a zero ceiling puts everything in bucket 1.
    std::size_t bucket(double value) const noexcept {
        if (!(ceiling_ > 0.0)) return 1;
        const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), value);
        const auto idx = static_cast<std::size_t>(it - boundaries_.begin());
        return std::max<std::size_t>(idx, 1);
    }

private:
    double ceiling_;
    double increment_;
    std::array<double, kBucketCount> boundaries_{};
};

inline std::size_t bucket(double value, const BinScheme& scheme) { return scheme.bucket(value); }

/// Integer Bresenham from a to b inclusive. When the ideal line passes exactly
/// halfway between two candidate pixels, the step toward b is taken.
inline std::vector<PixelCoord> bresenham_line(PixelCoord a, PixelCoord b) {
    const int dx = std::abs(b.x - a.x);
    const int dy = std::abs(b.y - a.y);
    const int sx = b.x >= a.x ? 1 : -1;
    const int sy = b.y >= a.y ? 1 : -1;
    const bool x_major = dx >= dy;
    const int major = x_major ? dx : dy;
    const int minor = x_major ? dy : dx;

    std::vector<PixelCoord> out;
    out.reserve(static_cast<std::size_t>(major) + 1);
    PixelCoord p = a;
    int err = 2 * minor - major;
    for (int k = 0; k <= major; ++k) {
        out.push_back(p);
        if (err >= 0) {
            (x_major ? p.y : p.x) += x_major ? sy : sx;
            err -= 2 * major;
        }
        err += 2 * minor;
        (x_major ? p.x : p.y) += x_major ? sx : sy;
    }
    return out;
}

/// Pixel of every position of `points` under `cfg` (before orientation).
inline std::vector<PixelCoord> position_pixels(const std::vector<Position>& points,
                                               const RasterConfig& cfg) {
    const auto box = bounding_box(points);
    std::vector<PixelCoord> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(to_pixel(normalize_position(p, box), cfg.n, cfg.rounding));
    return out;
}

/// Paints the acceleration lines (bucket of |accel| per segment), then each
/// position pixel (bucket of its speed) over them.
inline TracletImage rasterize(const KinematicTrack& track, const RasterConfig& cfg) {
    if (auto v = check(cfg)) throw ValidationError(*v, "raster config");
    if (track.trajectory.points.size() < 2)
        throw ValidationError(Violation::too_few_points, "trajectory '" + track.trajectory.id + "'");
    if (track.speeds.size() != track.trajectory.points.size() ||
        track.accels.size() + 1 != track.trajectory.points.size())
        throw ValidationError(Violation::length_mismatch, "trajectory '" + track.trajectory.id + "'");

    const BinScheme speed_bins(cfg.max_speed);
    const BinScheme accel_bins(cfg.max_accel);
    const auto pixels = position_pixels(track.trajectory.points, cfg);

    TracletImage img(cfg.n, cfg.background);
    auto paint = [&](PixelCoord p, const Rgb& color) {
        img.at(p.x, image_row(p.y, cfg.n, cfg.orientation)) = color;
    };

    for (std::size_t i = 0; i + 1 < pixels.size(); ++i) {
        const auto& color = cfg.palette[accel_bins.bucket(std::abs(track.accels[i])) - 1];
        for (const auto& p : bresenham_line(pixels[i], pixels[i + 1])) paint(p, color);
    }
    for (std::size_t i = 0; i < pixels.size(); ++i)
        paint(pixels[i], cfg.palette[speed_bins.bucket(track.speeds[i]) - 1]);
    return img;
}

} // namespace traclets
