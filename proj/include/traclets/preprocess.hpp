#pragma once

#include "traclets/error.hpp"
#include "traclets/geo.hpp"
#include "traclets/model.hpp"
#include "traclets/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace traclets {

struct PreprocessConfig {
    std::optional<double> gap_split_s = 300.0; ///< nullopt disables gap splitting
    std::size_t min_points = 100;
    std::set<std::string> excluded_classes;
    std::map<std::string, double> velocity_caps; ///< label -> max mean speed, m/s
    double subsample_fraction = 1.0;
    std::uint64_t rng_seed = 0;

    /// Cleaning for dense GPS logs.
    static PreprocessConfig geolife() {
        PreprocessConfig c;
        c.gap_split_s = 300.0;
        c.min_points = 100;
        c.excluded_classes = {"airplane", "boat", "run", "running", "motorcycle"};
        c.velocity_caps = {{"walk", 10.0}, {"bike", 15.0}, {"bus", 30.0}, {"car", 50.0},
                           {"train", 70.0}};
        c.subsample_fraction = 0.2;
        return c;
    }

    /// Sparse datasets: only dedup; every trajectory with two points survives.
    static PreprocessConfig sparse() {
        PreprocessConfig c;
        c.gap_split_s.reset();
        c.min_points = 2;
        c.subsample_fraction = 1.0;
        return c;
    }
};

inline std::optional<Violation> check(const PreprocessConfig& c) {
    if (c.gap_split_s && !(*c.gap_split_s > 0.0)) return Violation::bad_preprocess_config;
    if (c.min_points < 2) return Violation::bad_preprocess_config;
    if (!(c.subsample_fraction > 0.0 && c.subsample_fraction <= 1.0))
        return Violation::bad_preprocess_config;
    for (const auto& [label, cap] : c.velocity_caps)
        if (!(cap > 0.0)) return Violation::bad_preprocess_config;
    return std::nullopt;
}

inline void to_json(nlohmann::json& j, const PreprocessConfig& c) {
    j = nlohmann::json{{"gap_split_s", c.gap_split_s ? nlohmann::json(*c.gap_split_s) : nlohmann::json()},
                       {"min_points", c.min_points},
                       {"excluded_classes", c.excluded_classes},
                       {"velocity_caps", c.velocity_caps},
                       {"subsample_fraction", c.subsample_fraction},
                       {"rng_seed", c.rng_seed}};
}

/// Missing keys keep the values of `base`.
inline PreprocessConfig preprocess_config_from_json(const nlohmann::json& j,
                                                    PreprocessConfig base = {}) {
    if (j.contains("gap_split_s")) {
        if (j["gap_split_s"].is_null()) base.gap_split_s.reset();
        else base.gap_split_s = j["gap_split_s"].get<double>();
    }
    if (j.contains("min_points")) base.min_points = j["min_points"].get<std::size_t>();
    if (j.contains("excluded_classes"))
        base.excluded_classes = j["excluded_classes"].get<std::set<std::string>>();
    if (j.contains("velocity_caps"))
        base.velocity_caps = j["velocity_caps"].get<std::map<std::string, double>>();
    if (j.contains("subsample_fraction"))
        base.subsample_fraction = j["subsample_fraction"].get<double>();
    if (j.contains("rng_seed")) base.rng_seed = j["rng_seed"].get<std::uint64_t>();
    if (auto v = check(base)) throw ValidationError(*v, "preprocess config");
    return base;
}

// ---------------------------------------------------------------------------
// Passes. None of them touches coordinates or timestamps.

/// Drops each point identical in (lon, lat, t) to its predecessor.
inline Trajectory dedup(Trajectory traj) {
    auto& pts = traj.points;
    pts.erase(std::unique(pts.begin(), pts.end(), same_fix), pts.end());
    return traj;
}

/// Cuts wherever consecutive points are strictly more than `gap_s` apart.
/// Segment i of trajectory "x" is named "x~i" when a split happens.
inline std::vector<Trajectory> split_on_gaps(const Trajectory& traj, double gap_s) {
    std::vector<Trajectory> out;
    std::size_t begin = 0;
    const auto& pts = traj.points;
    auto emit = [&](std::size_t end) {
        Trajectory seg{traj.id, traj.label, {pts.begin() + static_cast<std::ptrdiff_t>(begin),
                                             pts.begin() + static_cast<std::ptrdiff_t>(end)}};
        out.push_back(std::move(seg));
        begin = end;
    };
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].t - pts[i - 1].t > gap_s) emit(i);
    if (begin < pts.size() || pts.empty()) emit(pts.size());
    if (out.size() > 1)
        for (std::size_t i = 0; i < out.size(); ++i) out[i].id = traj.id + "~" + std::to_string(i);
    return out;
}

inline std::vector<Trajectory> filter_min_points(std::vector<Trajectory> trajs,
                                                 std::size_t min_points) {
    std::erase_if(trajs, [&](const Trajectory& t) { return t.points.size() < min_points; });
    return trajs;
}

inline std::vector<Trajectory> filter_classes(std::vector<Trajectory> trajs,
                                              const std::set<std::string>& excluded) {
    std::erase_if(trajs, [&](const Trajectory& t) { return excluded.contains(t.label); });
    return trajs;
}

/// Total great-circle length over total duration; nullopt for zero duration.
inline std::optional<double> mean_speed_mps(const Trajectory& traj) {
    if (traj.points.size() < 2) return std::nullopt;
    const double duration = traj.points.back().t - traj.points.front().t;
    if (!(duration > 0.0)) return std::nullopt;
    double length = 0.0;
    for (std::size_t i = 1; i < traj.points.size(); ++i)
        length += haversine_m(traj.points[i - 1], traj.points[i]);
    return length / duration;
}

/// Drops trajectories whose mean speed exceeds their label's cap, and any
/// trajectory spanning zero time (counted in `zero_duration_dropped`).
inline std::vector<Trajectory> filter_unreal_velocity(std::vector<Trajectory> trajs,
                                                      const std::map<std::string, double>& caps,
                                                      std::size_t* zero_duration_dropped = nullptr) {
    std::erase_if(trajs, [&](const Trajectory& t) {
        const auto speed = mean_speed_mps(t);
        if (!speed) {
            if (zero_duration_dropped) ++*zero_duration_dropped;
            return true;
        }
        const auto cap = caps.find(t.label);
        return cap != caps.end() && *speed > cap->second;
    });
    return trajs;
}

/// Keeps round(fraction * count) trajectories of each label, chosen by a
/// seeded permutation; survivors keep their input order.
inline std::vector<Trajectory> subsample_stratified(std::vector<Trajectory> trajs, double fraction,
                                                    std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ValidationError(Violation::bad_preprocess_config, "subsample fraction");
    if (fraction == 1.0) return trajs;
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < trajs.size(); ++i) by_label[trajs[i].label].push_back(i);

    std::mt19937_64 rng(seed);
    std::vector<bool> keep(trajs.size(), false);
    for (const auto& [label, members] : by_label) {
        const auto quota = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(members.size())));
        const auto order = seeded_permutation(members.size(), rng);
        for (std::size_t k = 0; k < quota; ++k) keep[members[order[k]]] = true;
    }
    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < trajs.size(); ++i)
        if (keep[i]) out.push_back(std::move(trajs[i]));
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline

struct AuditEntry {
    std::string pass;
    bool applied = false;
    std::size_t trajectories_in = 0;
    std::size_t trajectories_out = 0;
    std::size_t points_in = 0;
    std::size_t points_out = 0;
    std::size_t dropped = 0;         ///< trajectories removed
    std::size_t splits_added = 0;    ///< extra trajectories created by splitting
    std::size_t zero_duration = 0;

    friend void to_json(nlohmann::json& j, const AuditEntry& e) {
        j = nlohmann::json{{"pass", e.pass},
                           {"applied", e.applied},
                           {"trajectories_in", e.trajectories_in},
                           {"trajectories_out", e.trajectories_out},
                           {"points_in", e.points_in},
                           {"points_out", e.points_out},
                           {"dropped", e.dropped},
                           {"splits_added", e.splits_added},
                           {"zero_duration", e.zero_duration}};
    }
};

struct PreprocessResult {
    std::vector<Trajectory> trajectories;
    std::vector<AuditEntry> audit; ///< one entry per pass, in execution order
};

namespace detail {

inline std::size_t point_count(const std::vector<Trajectory>& trajs) {
    std::size_t n = 0;
    for (const auto& t : trajs) n += t.points.size();
    return n;
}

} // namespace detail

/// Passes run in fixed order: dedup, split_on_gaps, filter_min_points,
/// filter_classes, filter_unreal_velocity, subsample_stratified.
inline PreprocessResult run_preprocess(std::vector<Trajectory> trajs, const PreprocessConfig& cfg) {
    if (auto v = check(cfg)) throw ValidationError(*v, "preprocess config");
    PreprocessResult result;

    auto record = [&](const char* name, bool applied, auto&& pass) {
        AuditEntry e;
        e.pass = name;
        e.applied = applied;
        e.trajectories_in = trajs.size();
        e.points_in = detail::point_count(trajs);
        if (applied) pass(e);
        e.trajectories_out = trajs.size();
        e.points_out = detail::point_count(trajs);
        if (e.trajectories_in > e.trajectories_out) e.dropped = e.trajectories_in - e.trajectories_out;
        result.audit.push_back(std::move(e));
    };

    record("dedup", true, [&](AuditEntry&) {
        for (auto& t : trajs) t = dedup(std::move(t));
    });
    record("split_on_gaps", cfg.gap_split_s.has_value(), [&](AuditEntry& e) {
        std::vector<Trajectory> out;
        for (const auto& t : trajs) {
            auto parts = split_on_gaps(t, *cfg.gap_split_s);
            e.splits_added += parts.size() - 1;
            for (auto& p : parts) out.push_back(std::move(p));
        }
        trajs = std::move(out);
    });
    record("filter_min_points", true,
           [&](AuditEntry&) { trajs = filter_min_points(std::move(trajs), cfg.min_points); });
    record("filter_classes", !cfg.excluded_classes.empty(), [&](AuditEntry&) {
        trajs = filter_classes(std::move(trajs), cfg.excluded_classes);
    });
    record("filter_unreal_velocity", true, [&](AuditEntry& e) {
        trajs = filter_unreal_velocity(std::move(trajs), cfg.velocity_caps, &e.zero_duration);
    });
    record("subsample_stratified", cfg.subsample_fraction < 1.0, [&](AuditEntry&) {
        trajs = subsample_stratified(std::move(trajs), cfg.subsample_fraction, cfg.rng_seed);
    });

    result.trajectories = std::move(trajs);
    return result;
}

} // namespace traclets
