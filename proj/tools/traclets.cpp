// traclets: build TraClet image datasets from trajectory files, inspect
// them, and score prediction files against a dataset manifest.
//
// Exit codes: 0 success, 2 input/validation error, 3 internal invariant failure.

#include "traclets/traclets.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace traclets;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

DatasetKind require_kind(const std::string& name) {
    auto kind = parse_dataset_kind(name);
    if (!kind) throw InputError("unknown dataset kind '" + name + "'");
    return *kind;
}

PreprocessConfig load_preprocess(DatasetKind kind, const std::string& path, std::uint64_t seed) {
    auto cfg = default_preprocess(kind);
    cfg.rng_seed = seed;
    if (!path.empty()) cfg = preprocess_config_from_json(read_json_file(path), cfg);
    return cfg;
}

std::optional<SchemaSpec> load_schema(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return schema_from_json(read_json_file(path));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TraClet trajectory-image dataset tool"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string dataset, input, schema_path, preprocess_path, raster_path, out_dir;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    auto* build = app.add_subcommand("build", "ingest, preprocess and rasterize a dataset");
    build->add_option("--dataset", dataset, "geolife | hurdat | starkey | csv | canonical")->required();
    build->add_option("--input", input, "dataset file or directory")->required();
    build->add_option("--schema", schema_path, "column schema JSON (dataset csv)");
    build->add_option("--preprocess-config", preprocess_path, "preprocess config JSON");
    build->add_option("--raster-config", raster_path, "raster config JSON");
    build->add_option("--seed", seed, "RNG seed for subsampling and the train/test split");
    build->add_option("--out", out_dir, "output directory (absent or empty)")->required();
    build->add_option("--workers", workers, "worker threads, 0 = all cores");

    std::string manifest_path, predictions_path, json_out;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score a prediction file");
    evaluate_cmd->add_option("--manifest", manifest_path)->required();
    evaluate_cmd->add_option("--predictions", predictions_path, "CSV path,true,pred")->required();
    evaluate_cmd->add_option("--json", json_out, "also write the report as JSON");

    std::string traj_id;
    auto* inspect_cmd = app.add_subcommand("inspect", "dump one trajectory of a built dataset");
    inspect_cmd->add_option("--manifest", manifest_path)->required();
    inspect_cmd->add_option("--id", traj_id)->required();

    auto* stats_cmd = app.add_subcommand("stats", "kinematic statistics");
    stats_cmd->add_option("--manifest", manifest_path, "print the stats recorded in a manifest");
    stats_cmd->add_option("--dataset", dataset);
    stats_cmd->add_option("--input", input);
    stats_cmd->add_option("--schema", schema_path);
    stats_cmd->add_option("--preprocess-config", preprocess_path);
    stats_cmd->add_option("--json", json_out, "write stats as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (*build) {
            BuildOptions opts;
            opts.kind = require_kind(dataset);
            opts.input = input;
            opts.schema = load_schema(schema_path);
            opts.preprocess = load_preprocess(opts.kind, preprocess_path, seed);
            if (!raster_path.empty()) opts.raster = raster_settings_from_json(read_json_file(raster_path));
            opts.seed = seed;
            opts.out_dir = out_dir;
            opts.workers = workers;
            const auto m = build_dataset(opts);
            std::size_t train = 0;
            for (const auto& e : m.entries) train += e.split == Split::train;
            std::cout << "wrote " << m.entries.size() << " images (" << train << " train, "
                      << m.entries.size() - train << " test) to " << out_dir << '\n'
                      << "manifest: " << (fs::path(out_dir) / kManifestName).string() << '\n';
        } else if (*evaluate_cmd) {
            const auto manifest = read_manifest(fs::path(manifest_path));
            const auto report = evaluate(read_predictions(predictions_path), manifest);
            std::cout << format_table(report);
            if (!json_out.empty()) {
                std::ofstream out(json_out);
                out << nlohmann::json(report).dump(2) << '\n';
                if (!out) throw InputError("cannot write '" + json_out + "'");
            }
        } else if (*inspect_cmd) {
            std::cout << inspect(manifest_path, traj_id);
        } else if (*stats_cmd) {
            KinematicStats stats;
            if (!manifest_path.empty()) {
                stats = read_manifest(fs::path(manifest_path)).stats;
            } else {
                if (dataset.empty() || input.empty())
                    throw InputError("stats needs --manifest or --dataset with --input");
                const auto kind = require_kind(dataset);
                auto ingested = ingest_dataset(kind, input, load_schema(schema_path));
                auto pre = run_preprocess(std::move(ingested.trajectories),
                                          load_preprocess(kind, preprocess_path, seed));
                std::vector<KinematicTrack> tracks;
                for (const auto& t : pre.trajectories) tracks.push_back(derive_kinematics(t));
                stats = compute_stats(tracks);
            }
            std::cout << format_stats(stats);
            if (!json_out.empty()) {
                std::ofstream out(json_out);
                out << nlohmann::json(stats).dump(2) << '\n';
                if (!out) throw InputError("cannot write '" + json_out + "'");
            }
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return 0;
}
