#include "wofe3d/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace wofe3d {

void GridSpec::validate() const {
    if (nx <= 0 || ny <= 0 || nz <= 0) throw std::invalid_argument("grid counts must be positive");
    if (dx <= 0.0 || dy <= 0.0 || dz <= 0.0) throw std::invalid_argument("grid spacing must be positive");
}

void GridSpec::from_linear(std::size_t idx, int& i, int& j, int& k) const {
    i = static_cast<int>(idx % nx);
    j = static_cast<int>((idx / nx) % ny);
    k = static_cast<int>(idx / (static_cast<std::size_t>(nx) * ny));
}

Vec3 GridSpec::centroid(int i, int j, int k) const {
    return {origin.x + (i + 0.5) * dx, origin.y + (j + 0.5) * dy, origin.z + (k + 0.5) * dz};
}

Vec3 GridSpec::centroid(std::size_t idx) const {
    int i, j, k;
    from_linear(idx, i, j, k);
    return centroid(i, j, k);
}

bool GridSpec::locate(const Vec3& p, int& i, int& j, int& k) const {
    const double fi = std::floor((p.x - origin.x) / dx);
    const double fj = std::floor((p.y - origin.y) / dy);
    const double fk = std::floor((p.z - origin.z) / dz);
    if (fi < 0 || fj < 0 || fk < 0 || fi >= nx || fj >= ny || fk >= nz) return false;
    i = static_cast<int>(fi);
    j = static_cast<int>(fj);
    k = static_cast<int>(fk);
    return true;
}

double GridSpec::voxel_diagonal() const { return std::sqrt(dx * dx + dy * dy + dz * dz); }

VolumeMask::VolumeMask(const GridSpec& grid, bool value) : grid_(grid) {
    grid_.validate();
    flags_.assign(grid_.voxel_count(), value ? 1 : 0);
    active_ = value ? flags_.size() : 0;
}

void VolumeMask::set(std::size_t idx, bool value) {
    const std::uint8_t v = value ? 1 : 0;
    if (flags_[idx] == v) return;
    flags_[idx] = v;
    active_ += value ? 1 : -1;
}

void VolumeMask::require_same_grid(const VolumeMask& other) const {
    if (!(grid_ == other.grid_)) throw std::invalid_argument("mask grids differ");
}

VolumeMask VolumeMask::operator&(const VolumeMask& other) const {
    require_same_grid(other);
    VolumeMask out(grid_);
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (flags_[i] && other.flags_[i]) out.set(i, true);
    }
    return out;
}

VolumeMask VolumeMask::operator|(const VolumeMask& other) const {
    require_same_grid(other);
    VolumeMask out(grid_);
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (flags_[i] || other.flags_[i]) out.set(i, true);
    }
    return out;
}

VolumeMask VolumeMask::complement() const {
    VolumeMask out(grid_);
    for (std::size_t i = 0; i < flags_.size(); ++i) out.set(i, !flags_[i]);
    return out;
}

bool VolumeMask::is_subset_of(const VolumeMask& other) const {
    require_same_grid(other);
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (flags_[i] && !other.flags_[i]) return false;
    }
    return true;
}

}  // namespace wofe3d
