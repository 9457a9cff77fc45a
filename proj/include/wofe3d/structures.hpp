#pragma once

#include <span>
#include <string>
#include <vector>

#include "wofe3d/csv.hpp"
#include "wofe3d/grid.hpp"

namespace wofe3d {

// Surficial fault trace with the attitude used to extrude it down-dip.
struct FaultTrace {
    std::string fault_id;
    std::vector<Vec2> polyline;
    double dip_deg = 90.0;            // (0, 90]
    double dip_direction_deg = 0.0;   // [0, 360), azimuth clockwise from north
    double depth = 0.0;               // vertical extrusion depth, meters
};

// Fault surface as connected quadrilateral facets (parallelograms by
// construction, hence planar).
struct RibbonMesh {
    struct Quad {
        Vec3 corner[4];
    };
    std::vector<Quad> quads;
};

// Offsets each trace segment down-dip: horizontal shift depth/tan(dip) along
// the dip direction, vertical shift -depth. surface_z gives the elevation of
// each polyline vertex.
RibbonMesh extrude_ribbon(const FaultTrace& trace, std::span<const double> surface_z);

// Voxels whose centroid lies within half a voxel diagonal of the mesh,
// intersected with `mask`.
VolumeMask voxelize_mesh(const RibbonMesh& mesh, const VolumeMask& mask, unsigned threads = 0);

// Voxels whose centroid is within `radius` of a set voxel's centroid
// (src is always contained in the result).
VolumeMask buffer_mask(const VolumeMask& src, double radius);

// CSV columns: fault_id,vertex_order,x,y,dip,dip_direction. Traces come back
// in order of first appearance with vertices sorted by vertex_order; depth is
// left 0 for the caller to assign.
std::vector<FaultTrace> read_fault_traces(const CsvTable& table);

}  // namespace wofe3d
