#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wofe3d/borehole.hpp"
#include "wofe3d/grid.hpp"

namespace wofe3d {

// Categorical voxel model. codes[voxel] indexes into dictionary; -1 marks
// voxels outside the active mask.
struct CategoricalModel {
    GridSpec grid;
    VolumeMask mask;
    std::vector<std::int16_t> codes;
    std::vector<std::string> dictionary;

    const std::string& code_at(std::size_t idx) const { return dictionary[codes[idx]]; }
    std::int16_t dictionary_index(const std::string& code) const;  // -1 if absent
    std::int16_t intern(const std::string& code);                  // adds when absent
};

// Continuous voxel model; NaN marks voxels outside the active mask.
struct ContinuousModel {
    GridSpec grid;
    VolumeMask mask;
    std::vector<double> values;
    std::string unit;
};

// Per-column categorical codes (map units); empty string marks a gap.
struct MapRaster {
    int nx = 0, ny = 0;
    std::vector<std::string> codes;

    const std::string& at(int i, int j) const { return codes[static_cast<std::size_t>(j) * nx + i]; }
};

// Assigns each active voxel the value of its Euclidean-nearest sample; a voxel
// that contains a sample takes that sample's value. Ties resolve to the lowest
// sample index after sorting samples by (x,y,z).
CategoricalModel nearest_value(std::vector<PointSample> samples, const VolumeMask& mask,
                               unsigned threads = 0);

// Overwrites the top active voxel of every column with the mapped unit.
// Throws when the raster has a gap over a column with active voxels.
CategoricalModel constrain_surface(CategoricalModel model, const MapRaster& map_units);

struct IdwParams {
    double power = 2.0;
    int sectors = 4;
    // Vertical distances are divided by this factor before weighting.
    double z_anisotropy = 1.0;
    unsigned threads = 0;
};

// Anisotropic inverse-distance interpolation: neighbours are split by
// horizontal azimuth (0 degrees = grid east, sectors closed on their lower
// edge) into equal sectors around the voxel, the closest sample of each
// non-empty sector is kept, and the estimate is the d^-power weighted mean of
// those samples. A voxel coincident with a sample takes its value exactly.
ContinuousModel idw_anisotropic(std::vector<PointSample> samples, const VolumeMask& mask,
                                const IdwParams& params = {});

}  // namespace wofe3d
