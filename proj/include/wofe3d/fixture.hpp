#pragma once

#include <cstdint>
#include <filesystem>

#include "wofe3d/geometry.hpp"

namespace wofe3d {

// Parameters of the synthetic drilling fixture: a vertical ore pipe with
// concentric geological and geochemical halos, one fault well away from the
// pipe, and a quasi-regular collar pattern.
struct FixtureParams {
    std::uint64_t seed = 42;
    int nx = 40, ny = 40, nz = 40;
    double spacing = 10.0;

    double pipe_cx = 200.0, pipe_cy = 200.0;
    double pipe_radius = 44.0;
    double pipe_z_min = 90.0, pipe_z_max = 310.0;

    int collar_count = 113;
};

// Ground truth of the planted ore body.
bool fixture_in_planted_body(const FixtureParams& params, double x, double y, double z);

struct FixturePaths {
    std::filesystem::path config;
    std::filesystem::path truth;
};

// Writes collars.csv, intervals.csv, assays.csv, faults.csv, map.csv,
// sections.csv, truth.csv and a config.ini wired to them.
FixturePaths generate_fixture(const FixtureParams& params, const std::filesystem::path& dir);

}  // namespace wofe3d
