#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wofe3d/config.hpp"
#include "wofe3d/validate.hpp"
#include "wofe3d/wofe.hpp"

namespace wofe3d {

struct RunReport {
    std::size_t space_voxels = 0;
    std::size_t training_voxels = 0;
    double prior = 0.0;
    std::vector<EvidenceLayer> layers;  // weight records only, no voxel data
    std::vector<std::string> ci_warnings;
    std::vector<double> posterior_thresholds;
    std::vector<double> studentized_thresholds;
    PVCurves pv_posterior;
    PVCurves pv_studentized;
};

// Resumable stages; each reads the previous stage's files from `out` and
// writes its own. Stage errors surface as PipelineError with a step label.
void stage_ingest(const PipelineConfig& cfg, const std::filesystem::path& out, unsigned threads);
void stage_interp(const PipelineConfig& cfg, const std::filesystem::path& out, unsigned threads);
void stage_evidence(const PipelineConfig& cfg, const std::filesystem::path& out, unsigned threads);
void stage_weights(const PipelineConfig& cfg, const std::filesystem::path& out, unsigned threads);
void stage_integrate(const PipelineConfig& cfg, const std::filesystem::path& out, unsigned threads);
void stage_threshold(const PipelineConfig& cfg, const std::filesystem::path& out, unsigned threads);
void stage_validate(const PipelineConfig& cfg, const std::filesystem::path& out, unsigned threads);
RunReport stage_export(const PipelineConfig& cfg, const std::filesystem::path& out,
                       unsigned threads);

const std::vector<std::string>& stage_names();
void run_stage(const std::string& name, const PipelineConfig& cfg,
               const std::filesystem::path& out, unsigned threads);

// Runs every stage in order. On failure a FAILED marker file with the stage
// label and cause is left in `out` and the error is rethrown.
RunReport run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out,
                       unsigned threads = 0);

}  // namespace wofe3d
