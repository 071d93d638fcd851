#include "traclets/kinematics.hpp"

#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace traclets;

namespace {

double metres_to_lat_deg(double m) { return m / 6371000.0 * 180.0 / std::numbers::pi; }

KinematicTrack track_with_speeds(std::vector<double> speeds, std::string label = "walk") {
    Trajectory t{"s", std::move(label), {}};
    for (std::size_t i = 0; i < speeds.size(); ++i)
        t.points.push_back({0.0, 0.0, static_cast<double>(i), std::nullopt});
    std::vector<double> accels(speeds.size() - 1);
    for (std::size_t i = 0; i + 1 < speeds.size(); ++i) accels[i] = speeds[i + 1] - speeds[i];
    return {std::move(t), std::move(speeds), std::move(accels)};
}

} // namespace

TEST(Kinematics, StationaryTrack) {
    Trajectory t{"a", "walk", {{1, 1, 0, {}}, {1, 1, 5, {}}, {1, 1, 9, {}}}};
    const auto k = derive_kinematics(t);
    EXPECT_EQ(k.speeds, (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(k.accels, (std::vector<double>{0, 0}));
}

TEST(Kinematics, HundredMetresEveryTenSeconds) {
    Trajectory t{"a", "walk", {}};
    for (int i = 0; i < 5; ++i) t.points.push_back({3.0, metres_to_lat_deg(100.0 * i), 10.0 * i, {}});
    const auto k = derive_kinematics(t);
    for (double s : k.speeds) EXPECT_NEAR(s, 10.0, 1e-6);
    for (double a : k.accels) EXPECT_NEAR(a, 0.0, 1e-6);
}

TEST(Kinematics, AccelerationDefinition) {
    const std::vector<double> speeds{0.0, 10.0};
    const std::vector<double> dts{5.0};
    EXPECT_EQ(accelerations(speeds, dts), (std::vector<double>{2.0}));
}

TEST(Kinematics, LastSpeedCopiesPredecessor) {
    std::mt19937_64 rng(3);
    const auto t = testgen::random_trajectory(rng, 30);
    const auto k = derive_kinematics(t);
    ASSERT_EQ(k.speeds.size(), 30u);
    ASSERT_EQ(k.accels.size(), 29u);
    EXPECT_EQ(k.speeds[29], k.speeds[28]);
    EXPECT_EQ(k.accels[28], 0.0);
}

TEST(Kinematics, ZeroTimeStepIsHardError) {
    Trajectory t{"a", "walk", {{1, 1, 0, {}}, {2, 2, 0, {}}}};
    try {
        derive_kinematics(t);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.reason(), Violation::time_not_increasing);
    }
}

TEST(Kinematics, MatchesIndependentRecomputation) {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 200; ++round) {
        const auto t = testgen::random_trajectory(rng, 2 + rng() % 100);
        const auto k = derive_kinematics(t);
        EXPECT_FALSE(check(k));
        const auto& p = t.points;
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            const double d = haversine_m(p[i].lon, p[i].lat, p[i + 1].lon, p[i + 1].lat);
            EXPECT_DOUBLE_EQ(k.speeds[i], d / (p[i + 1].t - p[i].t));
        }
        for (std::size_t i = 0; i + 1 < p.size(); ++i)
            EXPECT_DOUBLE_EQ(k.accels[i], (k.speeds[i + 1] - k.speeds[i]) / (p[i + 1].t - p[i].t));
    }
}

TEST(Kinematics, TimeScalingDividesSpeedAndAcceleration) {
    std::mt19937_64 rng(12);
    for (int round = 0; round < 200; ++round) {
        const double k = 1.5 + static_cast<double>(rng() % 100) / 10.0;
        auto t = testgen::random_trajectory(rng, 2 + rng() % 100);
        const double t0 = t.points.front().t;
        for (auto& p : t.points) p.t -= t0;
        auto scaled = t;
        for (auto& p : scaled.points) p.t *= k;
        const auto a = derive_kinematics(t);
        const auto b = derive_kinematics(scaled);
        for (std::size_t i = 0; i < a.speeds.size(); ++i)
            EXPECT_NEAR(b.speeds[i], a.speeds[i] / k, 1e-9 * (1.0 + a.speeds[i]));
        for (std::size_t i = 0; i < a.accels.size(); ++i)
            EXPECT_NEAR(b.accels[i], a.accels[i] / (k * k), 1e-9 * (1.0 + std::abs(a.accels[i])));
    }
}

TEST(Stats, MaxSpeed) {
    const std::vector<KinematicTrack> tracks{track_with_speeds({0, 5, 22})};
    const auto s = compute_stats(tracks);
    EXPECT_EQ(s.max_speed(), 22.0);
    EXPECT_EQ(s.max_abs_accel(), 17.0);
    EXPECT_EQ(s.global.speed_hist.total, 3u);
}

TEST(Stats, StationaryGivesZero) {
    const std::vector<KinematicTrack> tracks{track_with_speeds({0, 0, 0})};
    EXPECT_EQ(compute_stats(tracks).max_speed(), 0.0);
    const auto c = reference_ceilings(tracks);
    EXPECT_EQ(c.speed, 0.0);
    EXPECT_EQ(c.accel, 0.0);
}

TEST(Stats, EmptyIsHardError) {
    EXPECT_THROW(compute_stats({}), InputError);
}

TEST(Stats, UnionEqualsMergeAndElementwiseMax) {
    std::mt19937_64 rng(21);
    for (int round = 0; round < 50; ++round) {
        std::vector<KinematicTrack> a, b;
        for (int i = 0; i < 5; ++i) {
            a.push_back(derive_kinematics(testgen::random_trajectory(rng, 2 + rng() % 40, i % 2 ? "x" : "y")));
            b.push_back(derive_kinematics(testgen::random_trajectory(rng, 2 + rng() % 40, "z")));
        }
        auto all = a;
        all.insert(all.end(), b.begin(), b.end());
        const auto sa = compute_stats(a), sb = compute_stats(b), su = compute_stats(all);

        double brute_speed = 0, brute_accel = 0;
        for (const auto& t : all) {
            for (double s : t.speeds) brute_speed = std::max(brute_speed, s);
            for (double x : t.accels) brute_accel = std::max(brute_accel, std::abs(x));
        }
        EXPECT_EQ(su.max_speed(), brute_speed);
        EXPECT_EQ(su.max_abs_accel(), brute_accel);
        EXPECT_EQ(su.max_speed(), std::max(sa.max_speed(), sb.max_speed()));
        EXPECT_EQ(su.max_abs_accel(), std::max(sa.max_abs_accel(), sb.max_abs_accel()));

        auto merged = sa;
        merged.merge(sb);
        EXPECT_EQ(merged, su);
    }
}

TEST(Stats, JsonRoundTrip) {
    std::mt19937_64 rng(8);
    std::vector<KinematicTrack> tracks;
    for (int i = 0; i < 6; ++i)
        tracks.push_back(derive_kinematics(testgen::random_trajectory(rng, 20, i % 2 ? "a" : "b")));
    const auto s = compute_stats(tracks);
    EXPECT_EQ(nlohmann::json(s).get<KinematicStats>(), s);
}

TEST(Ceilings, NearestRankPercentile) {
    std::vector<double> speeds;
    for (int i = 1; i <= 100; ++i) speeds.push_back(i);
    const std::vector<KinematicTrack> tracks{track_with_speeds(speeds)};
    EXPECT_EQ(reference_ceilings(tracks).speed, 100.0);
    EXPECT_EQ(reference_ceilings(tracks, 95.0).speed, 95.0);
    EXPECT_EQ(reference_ceilings(tracks, 0.5).speed, 1.0);
    EXPECT_EQ(reference_ceilings(tracks).accel, 1.0);
    EXPECT_THROW(reference_ceilings(tracks, 0.0), InputError);
}
