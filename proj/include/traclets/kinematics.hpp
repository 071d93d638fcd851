#pragma once

#include "traclets/error.hpp"
#include "traclets/geo.hpp"
#include "traclets/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace traclets {

/// accel[i] = (speed[i+1] - speed[i]) / dt[i]; dt has speeds.size() - 1 entries.
inline std::vector<double> accelerations(std::span<const double> speeds,
                                         std::span<const double> dts) {
    if (speeds.size() != dts.size() + 1) throw InvariantError("accelerations: length mismatch");
    std::vector<double> out(dts.size());
    for (std::size_t i = 0; i < dts.size(); ++i) out[i] = (speeds[i + 1] - speeds[i]) / dts[i];
    return out;
}

/// Per-point speed (segment speed forward, last point copies its predecessor)
/// and per-segment signed acceleration. Throws on a non-positive time step.
inline KinematicTrack derive_kinematics(const Trajectory& traj) {
    const auto& pts = traj.points;
    if (pts.size() < 2) throw ValidationError(Violation::too_few_points, "trajectory '" + traj.id + "'");
    std::vector<double> dts(pts.size() - 1);
    std::vector<double> speeds(pts.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        dts[i] = pts[i + 1].t - pts[i].t;
        if (!(dts[i] > 0.0))
            throw ValidationError(Violation::time_not_increasing,
                                  "trajectory '" + traj.id + "' has a zero time step at index " +
                                      std::to_string(i));
        speeds[i] = haversine_m(pts[i], pts[i + 1]) / dts[i];
    }
    speeds.back() = speeds[speeds.size() - 2];
    auto accels = accelerations(speeds, dts);
    KinematicTrack track{traj, std::move(speeds), std::move(accels)};
    validate(track);
    return track;
}

/// Sparse fixed-width histogram of non-negative values.
struct Histogram {
    double bin_width = 1.0;
    std::map<std::int64_t, std::uint64_t> counts; ///< bin index -> count
    double max = 0.0;
    std::uint64_t total = 0;

    void add(double v) {
        counts[static_cast<std::int64_t>(std::floor(v / bin_width))] += 1;
        max = std::max(max, v);
        ++total;
    }

    void merge(const Histogram& o) {
        if (o.bin_width != bin_width) throw InvariantError("merging histograms of different widths");
        for (const auto& [bin, c] : o.counts) counts[bin] += c;
        max = std::max(max, o.max);
        total += o.total;
    }

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

inline constexpr double kSpeedBinWidth = 0.5;  // m/s
inline constexpr double kAccelBinWidth = 0.05; // m/s^2

struct KinematicSummary {
    std::uint64_t tracks = 0;
    std::uint64_t points = 0;
    double max_speed = 0.0;
    double max_abs_accel = 0.0;
    Histogram speed_hist{kSpeedBinWidth, {}, 0.0, 0};
    Histogram accel_hist{kAccelBinWidth, {}, 0.0, 0}; ///< of |accel|

    void add(const KinematicTrack& t) {
        ++tracks;
        points += t.speeds.size();
        for (double s : t.speeds) speed_hist.add(s);
        for (double a : t.accels) accel_hist.add(std::abs(a));
        max_speed = speed_hist.max;
        max_abs_accel = accel_hist.max;
    }

    void merge(const KinematicSummary& o) {
        tracks += o.tracks;
        points += o.points;
        speed_hist.merge(o.speed_hist);
        accel_hist.merge(o.accel_hist);
        max_speed = speed_hist.max;
        max_abs_accel = accel_hist.max;
    }

    friend bool operator==(const KinematicSummary&, const KinematicSummary&) = default;
};

struct KinematicStats {
    KinematicSummary global;
    std::map<std::string, KinematicSummary> per_class;

    double max_speed() const noexcept { return global.max_speed; }
    double max_abs_accel() const noexcept { return global.max_abs_accel; }

    void merge(const KinematicStats& o) {
        global.merge(o.global);
        for (const auto& [label, s] : o.per_class) per_class[label].merge(s);
    }

    friend bool operator==(const KinematicStats&, const KinematicStats&) = default;
};

inline KinematicStats compute_stats(std::span<const KinematicTrack> tracks) {
    if (tracks.empty()) throw InputError("compute_stats needs at least one track");
    KinematicStats stats;
    for (const auto& t : tracks) {
        stats.global.add(t);
        stats.per_class[t.trajectory.label].add(t);
    }
    return stats;
}

/// Reference ceilings used to bin speed and |accel|.
struct Ceilings {
    double speed = 0.0;
    double accel = 0.0;
};

/// Nearest-rank percentile ceilings over all per-point speeds and all
/// |accel| values; percentile 100 is the true maximum.
inline Ceilings reference_ceilings(std::span<const KinematicTrack> tracks, double percentile = 100.0) {
    if (tracks.empty()) throw InputError("reference_ceilings needs at least one track");
    if (!(percentile > 0.0 && percentile <= 100.0))
        throw InputError("ceiling percentile must be in (0, 100]");
    std::vector<double> speeds, accels;
    for (const auto& t : tracks) {
        speeds.insert(speeds.end(), t.speeds.begin(), t.speeds.end());
        for (double a : t.accels) accels.push_back(std::abs(a));
    }
    auto rank = [&](std::vector<double>& v) {
        if (v.empty()) return 0.0;
        if (percentile == 100.0) return *std::max_element(v.begin(), v.end());
        const auto k = static_cast<std::size_t>(
            std::ceil(percentile / 100.0 * static_cast<double>(v.size())));
        const auto idx = std::clamp<std::size_t>(k, 1, v.size()) - 1;
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
        return v[idx];
    };
    return {rank(speeds), rank(accels)};
}

inline void to_json(nlohmann::json& j, const Histogram& h) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& [bin, c] : h.counts) bins.push_back({bin, c});
    j = nlohmann::json{{"bin_width", h.bin_width}, {"max", h.max}, {"total", h.total}, {"bins", bins}};
}

inline void from_json(const nlohmann::json& j, Histogram& h) {
    h.bin_width = j.at("bin_width").get<double>();
    h.max = j.at("max").get<double>();
    h.total = j.at("total").get<std::uint64_t>();
    h.counts.clear();
    for (const auto& b : j.at("bins")) h.counts[b.at(0).get<std::int64_t>()] = b.at(1).get<std::uint64_t>();
}

inline void to_json(nlohmann::json& j, const KinematicSummary& s) {
    j = nlohmann::json{{"tracks", s.tracks},          {"points", s.points},
                       {"max_speed", s.max_speed},    {"max_abs_accel", s.max_abs_accel},
                       {"speed_hist", s.speed_hist}, {"accel_hist", s.accel_hist}};
}

inline void from_json(const nlohmann::json& j, KinematicSummary& s) {
    s.tracks = j.at("tracks").get<std::uint64_t>();
    s.points = j.at("points").get<std::uint64_t>();
    s.max_speed = j.at("max_speed").get<double>();
    s.max_abs_accel = j.at("max_abs_accel").get<double>();
    s.speed_hist = j.at("speed_hist").get<Histogram>();
    s.accel_hist = j.at("accel_hist").get<Histogram>();
}

inline void to_json(nlohmann::json& j, const KinematicStats& s) {
    j = nlohmann::json{{"global", s.global}, {"per_class", s.per_class}};
}

inline void from_json(const nlohmann::json& j, KinematicStats& s) {
    s.global = j.at("global").get<KinematicSummary>();
    s.per_class = j.at("per_class").get<std::map<std::string, KinematicSummary>>();
}

} // namespace traclets
