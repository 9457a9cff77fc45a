#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "wofe3d/config.hpp"
#include "wofe3d/csv.hpp"
#include "wofe3d/fixture.hpp"
#include "wofe3d/pipeline.hpp"

namespace {

void print_report_summary(const wofe3d::RunReport& report) {
    std::size_t included_binary = 0, total_binary = 0;
    std::size_t included_classes = 0, total_classes = 0;
    for (const auto& layer : report.layers) {
        if (layer.kind == wofe3d::LayerKind::binary) {
            ++total_binary;
            included_binary += layer.included ? 1 : 0;
        } else {
            for (const auto& c : layer.classes) {
                ++total_classes;
                included_classes += c.included ? 1 : 0;
            }
        }
    }
    std::printf("active voxels: %zu, training voxels: %zu, prior %s\n", report.space_voxels,
                report.training_voxels, wofe3d::fmt_digits(report.prior, 6).c_str());
    std::printf("binary evidence: %zu/%zu included; continuous classes: %zu/%zu included\n",
                included_binary, total_binary, included_classes, total_classes);
    auto thresholds = [](const std::vector<double>& ts) {
        std::string s;
        for (const double t : ts) s += (s.empty() ? "" : ", ") + wofe3d::fmt_digits(t, 6);
        return s;
    };
    std::printf("posterior thresholds: %s\n", thresholds(report.posterior_thresholds).c_str());
    std::printf("studentized thresholds: %s\n", thresholds(report.studentized_thresholds).c_str());
    std::printf("P-V intersection (posterior):   P = %s%%, V = %s%%\n",
                wofe3d::fmt_digits(100.0 * report.pv_posterior.p_star, 4).c_str(),
                wofe3d::fmt_digits(100.0 * report.pv_posterior.v_star, 4).c_str());
    std::printf("P-V intersection (studentized): P = %s%%, V = %s%%\n",
                wofe3d::fmt_digits(100.0 * report.pv_studentized.p_star, 4).c_str(),
                wofe3d::fmt_digits(100.0 * report.pv_studentized.v_star, 4).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D voxel weights-of-evidence prospectivity modeling"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    unsigned threads = 0;
    std::string stage;

    auto* run = app.add_subcommand("run", "run the full pipeline");
    run->add_option("--config", config_path, "pipeline config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--threads", threads, "worker threads (0 = auto)");
    run->add_option("--stage", stage, "run a single stage instead of all");

    for (const auto& name : wofe3d::stage_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " stage");
        sub->add_option("--config", config_path, "pipeline config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (0 = auto)");
    }

    std::uint64_t seed = 42;
    auto* fixture = app.add_subcommand("fixture", "generate the synthetic demo dataset");
    fixture->add_option("--out", out_dir, "output directory");
    fixture->add_option("--seed", seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fixture->parsed()) {
            wofe3d::FixtureParams params;
            params.seed = seed;
            const auto paths = wofe3d::generate_fixture(params, out_dir);
            std::printf("fixture written; config: %s\n", paths.config.string().c_str());
            return 0;
        }
        const wofe3d::PipelineConfig cfg = wofe3d::load_config(config_path);
        if (run->parsed()) {
            if (!stage.empty()) {
                wofe3d::run_stage(stage, cfg, out_dir, threads);
                std::printf("stage %s done\n", stage.c_str());
            } else {
                const auto report = wofe3d::run_pipeline(cfg, out_dir, threads);
                print_report_summary(report);
                std::printf("full report: %s\n", (std::filesystem::path(out_dir) / "run_report.txt").string().c_str());
            }
            return 0;
        }
        for (const auto& name : wofe3d::stage_names()) {
            if (app.get_subcommand(name)->parsed()) {
                wofe3d::run_stage(name, cfg, out_dir, threads);
                std::printf("stage %s done\n", name.c_str());
                return 0;
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
