#include "wofe3d/model_space.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wofe3d {

bool SurfacePair::defined(int i, int j) const {
    const std::size_t c = static_cast<std::size_t>(j) * nx + i;
    return !std::isnan(super[c]) && !std::isnan(sub[c]);
}

SurfacePair surfaces_from_collars(std::span<const Collar> collars, const GridSpec& grid,
                                  SurfaceMethod method) {
    grid.validate();
    if (collars.empty()) throw std::invalid_argument("surfaces_from_collars: no collars");

    SurfacePair out;
    out.nx = grid.nx;
    out.ny = grid.ny;
    out.super.assign(grid.column_count(), std::numeric_limits<double>::quiet_NaN());
    out.sub.assign(grid.column_count(), std::numeric_limits<double>::quiet_NaN());

    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Vec3 c = grid.centroid(i, j, 0);
            const std::size_t col = grid.column_index(i, j);
            if (method == SurfaceMethod::nearest_collar) {
                std::size_t best = 0;
                double best_d2 = std::numeric_limits<double>::infinity();
                for (std::size_t s = 0; s < collars.size(); ++s) {
                    const double dx = collars[s].x - c.x;
                    const double dy = collars[s].y - c.y;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best = s;
                    }
                }
                out.super[col] = collars[best].z;
                out.sub[col] = collars[best].z - collars[best].total_depth;
            } else {
                double wsum = 0.0, top = 0.0, bottom = 0.0;
                bool exact = false;
                for (const auto& collar : collars) {
                    const double dx = collar.x - c.x;
                    const double dy = collar.y - c.y;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 == 0.0) {
                        out.super[col] = collar.z;
                        out.sub[col] = collar.z - collar.total_depth;
                        exact = true;
                        break;
                    }
                    const double w = 1.0 / d2;
                    wsum += w;
                    top += w * collar.z;
                    bottom += w * (collar.z - collar.total_depth);
                }
                if (!exact) {
                    out.super[col] = top / wsum;
                    out.sub[col] = bottom / wsum;
                }
            }
        }
    }
    return out;
}

VolumeMask build_model_space(const GridSpec& grid, const Polygon2D& hull,
                             const SurfacePair& surfaces) {
    grid.validate();
    if (surfaces.nx != grid.nx || surfaces.ny != grid.ny) {
        throw std::invalid_argument("build_model_space: surface dimensions do not match the grid");
    }
    VolumeMask mask(grid);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Vec3 c0 = grid.centroid(i, j, 0);
            if (!hull.contains({c0.x, c0.y})) continue;
            if (!surfaces.defined(i, j)) {
                throw std::runtime_error("build_model_space: surfaces undefined on in-hull column (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
            }
            const double top = surfaces.super_at(i, j);
            const double bottom = surfaces.sub_at(i, j);
            for (int k = 0; k < grid.nz; ++k) {
                const double z = grid.centroid(i, j, k).z;
                if (z >= bottom && z <= top) mask.set(i, j, k, true);
            }
        }
    }
    return mask;
}

}  // namespace wofe3d
