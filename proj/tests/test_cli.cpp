#include "traclets/metrics.hpp"
#include "traclets/pipeline.hpp"

#include "support/generators.hpp"
#include "support/tempdir.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <random>

using namespace traclets;
using testgen::TempDir;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(TRACLETS_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (const auto n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

/// Builds a small two-class dataset through the CLI.
std::filesystem::path build(const TempDir& dir) {
    std::mt19937_64 rng(5);
    std::vector<Trajectory> trajs;
    for (int i = 0; i < 20; ++i) {
        auto t = testgen::random_trajectory(rng, 10, i % 2 ? "elk" : "cattle");
        t.id = "t" + std::to_string(i);
        trajs.push_back(std::move(t));
    }
    write_canonical_csv(dir / "in.csv", trajs);
    testgen::write_text(dir / "raster.json", R"({"n": 16})");
    const auto r = run("build --dataset canonical --input " + q(dir / "in.csv") + " --raster-config " +
                       q(dir / "raster.json") + " --seed 3 --out " + q(dir / "out"));
    EXPECT_EQ(r.code, 0) << r.out;
    return dir / "out" / kManifestName;
}

} // namespace

TEST(Cli, BuildEvaluateRoundTrip) {
    TempDir dir;
    const auto manifest_path = build(dir);
    const auto m = read_manifest(manifest_path);
    std::vector<PredictionRow> rows;
    for (const auto& e : m.entries)
        if (e.split == Split::test) rows.push_back({e.path, e.label, e.label});
    write_predictions(dir / "pred.csv", rows);
    const auto r = run("evaluate --manifest " + q(manifest_path) + " --predictions " + q(dir / "pred.csv") +
                       " --json " + q(dir / "report.json"));
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("accuracy 1.0000"), std::string::npos) << r.out;
    EXPECT_EQ(read_json_file(dir / "report.json")["accuracy"], 1.0);
}

TEST(Cli, EvaluateRejectsUnknownPathWithInputExit) {
    TempDir dir;
    const auto manifest_path = build(dir);
    write_predictions(dir / "pred.csv", {{"nope.png", "elk", "elk"}});
    const auto r = run("evaluate --manifest " + q(manifest_path) + " --predictions " + q(dir / "pred.csv"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("nope.png"), std::string::npos);
}

TEST(Cli, InspectKnownAndUnknownId) {
    TempDir dir;
    const auto manifest_path = build(dir);
    const auto ok = run("inspect --manifest " + q(manifest_path) + " --id t4");
    EXPECT_EQ(ok.code, 0) << ok.out;
    EXPECT_NE(ok.out.find("cattle/t4.png"), std::string::npos);
    const auto before = std::distance(std::filesystem::directory_iterator(dir.path()), {});
    const auto bad = run("inspect --manifest " + q(manifest_path) + " --id missing");
    EXPECT_EQ(bad.code, 2);
    EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir.path()), {}), before);
}

TEST(Cli, StatsFromManifestAndFromInput) {
    TempDir dir;
    const auto manifest_path = build(dir);
    const auto a = run("stats --manifest " + q(manifest_path));
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_NE(a.out.find("(all)"), std::string::npos);
    const auto b = run("stats --dataset canonical --input " + q(dir / "in.csv") + " --json " + q(dir / "s.json"));
    EXPECT_EQ(b.code, 0) << b.out;
    EXPECT_TRUE(read_json_file(dir / "s.json").contains("global"));
}

TEST(Cli, ExitCodes) {
    TempDir dir;
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("build --dataset nosuch --input x --out " + q(dir / "o")).code, 2);
    EXPECT_EQ(run("build --dataset canonical --input " + q(dir / "missing.csv") + " --out " + q(dir / "o")).code, 2);
    EXPECT_EQ(run("--version").code, 0);
}
