#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wofe3d/geometry.hpp"

namespace wofe3d {

// Regular voxel lattice. `origin` is the minimum corner of voxel (0,0,0);
// centroids sit at origin + (index + 0.5) * spacing along each axis.
struct GridSpec {
    Vec3 origin;
    int nx = 0, ny = 0, nz = 0;
    double dx = 10.0, dy = 10.0, dz = 10.0;

    void validate() const;

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
    }
    std::size_t column_count() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    }
    std::size_t linear_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    std::size_t column_index(int i, int j) const {
        return static_cast<std::size_t>(j) * nx + i;
    }
    void from_linear(std::size_t idx, int& i, int& j, int& k) const;

    Vec3 centroid(int i, int j, int k) const;
    Vec3 centroid(std::size_t idx) const;

    // Voxel containing p (floor rule on each axis); false when outside.
    bool locate(const Vec3& p, int& i, int& j, int& k) const;

    double voxel_diagonal() const;

    bool operator==(const GridSpec&) const = default;
};

// Boolean flag per voxel of a GridSpec, with a cached count of set voxels.
class VolumeMask {
public:
    VolumeMask() = default;
    explicit VolumeMask(const GridSpec& grid, bool value = false);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return flags_.size(); }
    std::size_t active_count() const { return active_; }
    bool empty() const { return active_ == 0; }

    bool test(std::size_t idx) const { return flags_[idx] != 0; }
    bool test(int i, int j, int k) const { return test(grid_.linear_index(i, j, k)); }
    void set(std::size_t idx, bool value);
    void set(int i, int j, int k, bool value) { set(grid_.linear_index(i, j, k), value); }

    VolumeMask operator&(const VolumeMask& other) const;
    VolumeMask operator|(const VolumeMask& other) const;
    VolumeMask complement() const;
    bool is_subset_of(const VolumeMask& other) const;
    bool operator==(const VolumeMask&) const = default;

private:
    void require_same_grid(const VolumeMask& other) const;

    GridSpec grid_;
    std::vector<std::uint8_t> flags_;
    std::size_t active_ = 0;
};

}  // namespace wofe3d
