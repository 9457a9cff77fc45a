#pragma once

#include <span>
#include <vector>

#include "wofe3d/borehole.hpp"
#include "wofe3d/grid.hpp"

namespace wofe3d {

// Per-column top (super) and bottom (sub) elevation bounds over the grid's
// horizontal cells; NaN marks undefined columns.
struct SurfacePair {
    int nx = 0, ny = 0;
    std::vector<double> super;
    std::vector<double> sub;

    bool defined(int i, int j) const;
    double super_at(int i, int j) const { return super[static_cast<std::size_t>(j) * nx + i]; }
    double sub_at(int i, int j) const { return sub[static_cast<std::size_t>(j) * nx + i]; }
};

enum class SurfaceMethod { nearest_collar, inverse_distance };

// super = collar elevation, sub = collar elevation minus hole depth, assigned
// per column from the nearest collar (or inverse-distance weighted).
SurfacePair surfaces_from_collars(std::span<const Collar> collars, const GridSpec& grid,
                                  SurfaceMethod method = SurfaceMethod::nearest_collar);

// Active voxels: centroid (x,y) inside the hull (boundary inclusive) and
// sub <= centroid z <= super on the voxel's column.
VolumeMask build_model_space(const GridSpec& grid, const Polygon2D& hull,
                             const SurfacePair& surfaces);

}  // namespace wofe3d
