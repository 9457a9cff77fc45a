#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wofe3d/grid.hpp"
#include "wofe3d/model_space.hpp"
#include "wofe3d/wofe.hpp"

namespace wofe3d {

// Parsed pipeline configuration. Relative input paths are resolved against
// the config file's directory.
struct PipelineConfig {
    std::filesystem::path collars;
    std::filesystem::path intervals;
    std::filesystem::path assays;
    std::filesystem::path faults;      // optional
    std::filesystem::path map_raster;  // optional
    std::filesystem::path sections;    // optional

    GridSpec grid;
    std::vector<Vec2> hull;  // empty: convex hull of the collars

    std::string training_element = "Cu";
    double training_cutoff = 0.4;
    std::string training_unit = "%";

    std::vector<std::string> evidence_elements{"Fe", "Mo", "Zn"};
    std::vector<std::string> categorical_attributes{"lithology", "alteration", "rock_type"};

    double idw_power = 2.0;
    int idw_sectors = 4;
    double z_anisotropy = 1.0;
    double desurvey_step = 0.0;  // 0: use grid dz

    int classes = 10;
    std::optional<double> prior;  // empty: training fraction of the space
    FuzzifyOptions fuzzify;
    double missing_variance = 0.0;
    SurfaceMethod surface_method = SurfaceMethod::nearest_collar;

    std::vector<double> buffer_radii{25.0, 50.0};
    int cv_segments = 4;
    int pv_thresholds = 200;

    double step() const { return desurvey_step > 0.0 ? desurvey_step : grid.dz; }
};

PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace wofe3d
