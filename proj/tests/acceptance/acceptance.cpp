// Acceptance gate. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero when any criterion fails.

#include "traclets/traclets.hpp"

#include "support/generators.hpp"
#include "support/naive_raster.hpp"
#include "support/tempdir.hpp"
#include "support/tree_hash.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace traclets;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::fail;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

RasterConfig raster_config(int n, double max_speed, double max_accel) {
    RasterConfig c;
    c.n = n;
    c.max_speed = max_speed;
    c.max_accel = max_accel;
    return c;
}

Ceilings own_ceilings(const KinematicTrack& k) { return reference_ceilings(std::span(&k, 1)); }

// --- 1 --------------------------------------------------------------------------

Outcome worked_example() {
    const auto parsed = parse_canonical_csv(fs::path(TRACLETS_FIXTURES) / "worked_example.csv");
    if (parsed.trajectories.size() != 1) return {Status::fail, "fixture did not parse to one trajectory"};
    const auto track = derive_kinematics(parsed.trajectories[0]);
    const auto c = own_ceilings(track);
    const auto cfg = raster_config(10, c.speed, c.accel);

    const auto start = Clock::now();
    const auto img = rasterize(track, cfg);
    const auto pixels = position_pixels(track.trajectory.points, cfg);
    const double elapsed = seconds_since(start);

    // the literal bounding box of the worked example
    const BoundingBox box{2.875, 28.75, 9.25, 92.5};
    const auto literal = to_pixel(normalize_position({23.0, 9.25, 0.0, std::nullopt}, box), 10);

    std::size_t idx = 0;
    for (; idx < track.trajectory.points.size(); ++idx)
        if (track.trajectory.points[idx].lon == 23.0) break;
    const bool fixture_ok = idx < pixels.size() && pixels[idx] == PixelCoord{7, 1} &&
                            img.at(7, 1) == cfg.palette[BinScheme(cfg.max_speed).bucket(track.speeds[idx]) - 1];
    const bool ok = literal == PixelCoord{7, 1} && fixture_ok && elapsed < 1e-3;
    return {ok ? Status::pass : Status::fail,
            fmt("literal bbox -> (%d,%d); fixture pixel %s; %.3f ms (limit 1 ms)", literal.x, literal.y,
                fixture_ok ? "(7,1) painted" : "WRONG", elapsed * 1e3)};
}

// --- 2 --------------------------------------------------------------------------

Outcome oracle_equivalence() {
    std::mt19937_64 rng(20240501);
    std::size_t mismatches = 0, pixels = 0;
    const auto start = Clock::now();
    for (int i = 0; i < 1000; ++i) {
        const auto points = 5 + static_cast<std::size_t>(rng() % 496);
        const double step = i % 5 == 0 ? 1e-5 : (i % 5 == 1 ? 0.05 : 0.001);
        const auto t = testgen::random_trajectory(rng, points, "walk", step);
        const auto k = derive_kinematics(t);
        const auto c = own_ceilings(k);
        const int n = i % 2 == 0 ? 224 : 8 + static_cast<int>(rng() % 120);
        const auto img = rasterize(k, raster_config(n, c.speed, c.accel));
        auto grid = oracle::rasterize(t.points, k.speeds, k.accels, n, c.speed, c.accel, kDefaultPalette, kWhite);
        for (int y = 1; y <= n; ++y)
            for (int x = 1; x <= n; ++x) mismatches += !(img.at(x, y) == grid.at(x, y));
        pixels += static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }
    const double elapsed = seconds_since(start);
    const bool ok = mismatches == 0 && elapsed < 30.0;
    return {ok ? Status::pass : Status::fail,
            fmt("1000 tracks, %zu pixels compared, %zu mismatches; %.2f s (limit 30 s)", pixels, mismatches, elapsed)};
}

// --- 3 --------------------------------------------------------------------------

Outcome invariances() {
    constexpr int kCases = 200;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> offset(-0.1, 0.1);
    int translation = 0, scaling = 0, closure = 0, connectivity = 0, arithmetic = 0;
    const std::set<Rgb> palette(kDefaultPalette.begin(), kDefaultPalette.end());
    const auto start = Clock::now();

    for (int i = 0; i < kCases; ++i) {
        const auto k = derive_kinematics(testgen::snapped(testgen::random_trajectory(rng, 2 + rng() % 300)));
        const auto c = own_ceilings(k);
        const int n = 16 + static_cast<int>(rng() % 209);
        const auto cfg = raster_config(n, c.speed, c.accel);
        const auto img = rasterize(k, cfg);

        auto moved = k;
        const double dlon = testgen::snap(offset(rng)), dlat = testgen::snap(offset(rng));
        for (auto& p : moved.trajectory.points) {
            p.lon += dlon;
            p.lat += dlat;
        }
        translation += rasterize(moved, cfg).pixels != img.pixels;

        const double factor = std::ldexp(1.0, static_cast<int>(rng() % 30) - 15);
        auto scaled = k;
        for (auto& v : scaled.speeds) v *= factor;
        for (auto& v : scaled.accels) v *= factor;
        scaling += rasterize(scaled, raster_config(n, c.speed * factor, c.accel * factor)).pixels != img.pixels;

        // every pixel the oracle leaves untouched must stay background
        auto g = oracle::rasterize(k.trajectory.points, k.speeds, k.accels, n, 1.0, 1.0, kDefaultPalette, kWhite);
        bool closed = true;
        for (int y = 1; y <= n; ++y)
            for (int x = 1; x <= n; ++x) {
                const auto& p = img.at(x, y);
                const bool painted = !(g.at(x, y) == kWhite);
                closed = closed && (painted ? palette.contains(p) : p == kWhite);
            }
        closure += !closed;

        auto r = [&] { return 1 + static_cast<int>(rng() % static_cast<unsigned>(n)); };
        const auto line = bresenham_line({r(), r()}, {r(), r()});
        bool connected = true;
        for (std::size_t j = 1; j < line.size(); ++j)
            connected = connected && std::abs(line[j].x - line[j - 1].x) <= 1 &&
                        std::abs(line[j].y - line[j - 1].y) <= 1;
        connectivity += !connected;

        const double ceiling = 22.0 * static_cast<double>(1 + rng() % 50);
        const BinScheme s(ceiling);
        const double inc = ceiling / 11.0;
        bool arith = s.increment() == inc && BinScheme(22.0).increment() == 2.0 &&
                     BinScheme(22.0).bucket(3.0) == 2;
        for (std::size_t b = 0; b < kBucketCount; ++b)
            arith = arith && s.boundaries()[b] == static_cast<double>(b) * inc;
        arithmetic += !arith;
    }
    const double elapsed = seconds_since(start);
    const int failures = translation + scaling + closure + connectivity + arithmetic;
    const bool ok = failures == 0 && elapsed < 10.0;
    return {ok ? Status::pass : Status::fail,
            fmt("%d cases each; failures: translation %d, scaling %d, closure %d, connectivity %d, "
                "increment %d; %.2f s (limit 10 s)",
                kCases, translation, scaling, closure, connectivity, arithmetic, elapsed)};
}

// --- 4 --------------------------------------------------------------------------

Trajectory straight(std::size_t n, double dt, double mps, const std::string& label) {
    const double deg = mps * dt / kEarthRadiusM * 180.0 / std::numbers::pi;
    Trajectory t{"fixture", label, {}};
    for (std::size_t i = 0; i < n; ++i)
        t.points.push_back({7.0, 45.0 + deg * static_cast<double>(i), dt * static_cast<double>(i), std::nullopt});
    return t;
}

Outcome preprocess_fixtures() {
    const auto start = Clock::now();
    const auto cfg = PreprocessConfig::geolife();
    const auto gap = *cfg.gap_split_s;
    const bool no_split = split_on_gaps(straight(2, 300.0, 1.0, "walk"), gap).size() == 1;
    const bool split = split_on_gaps(straight(2, 301.0, 1.0, "walk"), gap).size() == 2;
    const bool boundary = filter_min_points({straight(100, 1.0, 1.0, "walk")}, cfg.min_points).size() == 1 &&
                          filter_min_points({straight(99, 1.0, 1.0, "walk")}, cfg.min_points).empty();
    const bool capped = filter_unreal_velocity({straight(100, 1.0, 12.0, "walk")}, cfg.velocity_caps).empty() &&
                        filter_unreal_velocity({straight(100, 1.0, 1.5, "walk")}, cfg.velocity_caps).size() == 1;
    const double elapsed = seconds_since(start);
    const bool ok = no_split && split && boundary && capped && elapsed < 1.0;
    return {ok ? Status::pass : Status::fail,
            fmt("dt 300 no split %s, dt 301 split %s, 100 points kept %s, walk 12 m/s dropped %s; %.3f s",
                no_split ? "ok" : "NO", split ? "ok" : "NO", boundary ? "ok" : "NO", capped ? "ok" : "NO",
                elapsed)};
}

// --- 5 --------------------------------------------------------------------------

Outcome metrics() {
    const auto start = Clock::now();
    testgen::TempDir dir;
    std::mt19937_64 rng(11);
    int accuracy_mismatch = 0;
    for (int f = 0; f < 100; ++f) {
        const int k = 2 + static_cast<int>(rng() % 5);
        std::vector<PredictionRow> rows;
        DatasetManifest m;
        const int n = 1 + static_cast<int>(rng() % 300);
        for (int i = 0; i < n; ++i) {
            const auto truth = "c" + std::to_string(rng() % k);
            const auto pred = "c" + std::to_string(rng() % k);
            const auto path = truth + "/" + std::to_string(i) + ".png";
            rows.push_back({path, truth, pred});
            m.entries.push_back({path, truth, Split::test, std::to_string(i)});
        }
        for (int c = 0; c < k; ++c) m.entries.push_back({"l" + std::to_string(c), "c" + std::to_string(c), Split::train, ""});
        const auto file = dir / ("p" + std::to_string(f) + ".csv");
        write_predictions(file, rows);
        const auto r = evaluate(read_predictions(file), m);
        std::uint64_t trace = 0, total = 0, correct = 0;
        for (std::size_t i = 0; i < r.confusion.size(); ++i)
            for (std::size_t j = 0; j < r.confusion.size(); ++j) {
                total += r.confusion[i][j];
                if (i == j) trace += r.confusion[i][j];
            }
        for (const auto& row : rows) correct += row.truth == row.predicted;
        const double eq11 = static_cast<double>(correct) / static_cast<double>(rows.size());
        accuracy_mismatch += !(r.accuracy == eq11 && eq11 == static_cast<double>(trace) / static_cast<double>(total));
    }

    std::vector<PredictionRow> binary;
    auto add = [&](const char* t, const char* p, int count) {
        for (int i = 0; i < count; ++i) binary.push_back({std::to_string(binary.size()), t, p});
    };
    add("pos", "pos", 3);
    add("neg", "pos", 1);
    add("pos", "neg", 2);
    const auto r = compute_metrics(binary, {"neg", "pos"});
    const auto& pos = r.per_class[1];
    const bool hand = std::abs(pos.precision - 0.75) <= 1e-9 && std::abs(pos.recall - 0.6) <= 1e-9 &&
                      std::abs(pos.f1 - 2.0 / 3.0) <= 1e-9;
    const double elapsed = seconds_since(start);
    const bool ok = accuracy_mismatch == 0 && hand && elapsed < 1.0;
    return {ok ? Status::pass : Status::fail,
            fmt("100 files, %d accuracy mismatches; binary P %.12f R %.12f F1 %.12f; %.3f s", accuracy_mismatch,
                pos.precision, pos.recall, pos.f1, elapsed)};
}

// --- 6 --------------------------------------------------------------------------

std::vector<KinematicTrack> synthetic_tracks(std::size_t total_points, std::size_t per_track, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<KinematicTrack> out;
    for (std::size_t made = 0; made < total_points; made += per_track)
        out.push_back(derive_kinematics(testgen::random_trajectory(rng, std::min(per_track, total_points - made))));
    return out;
}

Outcome determinism_and_throughput() {
    // byte-identical output tree across runs and worker counts
    testgen::TempDir dir;
    {
        std::mt19937_64 rng(5);
        std::vector<Trajectory> trajs;
        for (int i = 0; i < 120; ++i) {
            auto t = testgen::random_trajectory(rng, 20 + rng() % 200, i % 3 == 0 ? "bus" : (i % 3 == 1 ? "walk" : "car"));
            t.id = "t" + std::to_string(i);
            trajs.push_back(std::move(t));
        }
        write_canonical_csv(dir / "in.csv", trajs);
    }
    BuildOptions o;
    o.kind = DatasetKind::canonical;
    o.input = dir / "in.csv";
    o.seed = 99;
    o.out_dir = dir / "a";
    o.workers = 1;
    build_dataset(o);
    o.out_dir = dir / "b";
    o.workers = 4;
    build_dataset(o);
    const bool identical = testgen::hash_tree(dir / "a") == testgen::hash_tree(dir / "b");

    // 1,000,000 points rasterized and encoded at n = 224
    const auto tracks = synthetic_tracks(1'000'000, 500, 123);
    std::vector<KinematicTrack> all(tracks.begin(), tracks.end());
    const auto c = reference_ceilings(all);
    const auto cfg = raster_config(224, c.speed, c.accel);

    auto timed = [&](unsigned workers, std::vector<std::vector<std::uint8_t>>& out) {
        const auto start = Clock::now();
        out = render_pngs(tracks, cfg, workers);
        return seconds_since(start);
    };
    std::vector<std::vector<std::uint8_t>> four, one;
    const double t4 = timed(4, four);
    const double t1 = timed(1, one);
    const bool same_bytes = four == one;
    const double speedup = t1 / t4;
    const bool fast = t4 < 60.0;
    const bool scales = speedup >= 2.0;
    const bool ok = identical && same_bytes && fast && scales;
    return {ok ? Status::pass : Status::fail,
            fmt("tree identical %s, 1M-point images identical across worker counts %s; 4 workers %.2f s "
                "(limit 60 s) %s; 1 worker %.2f s; speedup %.2fx (need 2x) %s; hardware threads %u",
                identical ? "yes" : "NO", same_bytes ? "yes" : "NO", t4, fast ? "ok" : "FAIL", t1, speedup,
                scales ? "ok" : "FAIL", std::thread::hardware_concurrency())};
}

// --- 7 --------------------------------------------------------------------------

struct ScaleTarget {
    const char* name;
    DatasetKind kind;
    const char* relative;
    double trajectories;
    double points;
    double tolerance;
};

Outcome ingestion_scale() {
    const char* root = std::getenv("TRACLETS_DATA_DIR");
    if (!root) return {Status::skip, "TRACLETS_DATA_DIR not set; public datasets absent"};
    const ScaleTarget targets[] = {
        {"geolife", DatasetKind::geolife, "geolife", 1763, 953966, 0.10},
        {"hurricanes", DatasetKind::hurdat, "hurdat2.txt", 1003, 26783, 0.05},
        {"animals", DatasetKind::starkey, "starkey.csv", 253, 287136, 0.10},
    };
    std::ostringstream report;
    bool any = false, ok = true;
    for (const auto& target : targets) {
        const auto path = fs::path(root) / target.relative;
        if (!fs::exists(path)) {
            report << target.name << " absent; ";
            continue;
        }
        any = true;
        auto cfg = target.kind == DatasetKind::geolife ? PreprocessConfig::geolife() : PreprocessConfig::sparse();
        cfg.rng_seed = 0;
        const auto pre = run_preprocess(ingest_dataset(target.kind, path).trajectories, cfg);
        const auto n = static_cast<double>(pre.trajectories.size());
        const auto p = static_cast<double>(detail::point_count(pre.trajectories));
        const bool within = std::abs(n - target.trajectories) <= target.tolerance * target.trajectories &&
                            std::abs(p - target.points) <= target.tolerance * target.points;
        ok = ok && within;
        report << fmt("%s %.0f traj / %.0f pts vs %.0f / %.0f (+-%.0f%%) %s; ", target.name, n, p,
                      target.trajectories, target.points, target.tolerance * 100, within ? "ok" : "FAIL");
    }
    if (!any) return {Status::skip, report.str() + "no dataset present"};
    return {ok ? Status::pass : Status::fail, report.str()};
}

} // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"worked_example_fixture", worked_example},
        {"oracle_equivalence", oracle_equivalence},
        {"invariance_suite", invariances},
        {"preprocess_fixtures", preprocess_fixtures},
        {"metrics_correctness", metrics},
        {"determinism_throughput", determinism_and_throughput},
        {"ingestion_scale", ingestion_scale},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::skip ? "SKIP" : "FAIL";
        failed += o.status == Status::fail;
        std::printf("%s %s: %s\n", tag, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
