#include "wofe3d/structures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "wofe3d/parallel.hpp"

namespace wofe3d {

RibbonMesh extrude_ribbon(const FaultTrace& trace, std::span<const double> surface_z) {
    if (trace.polyline.size() < 2) throw std::invalid_argument("extrude_ribbon: trace needs >= 2 vertices");
    if (surface_z.size() != trace.polyline.size()) {
        throw std::invalid_argument("extrude_ribbon: one elevation per trace vertex required");
    }
    if (!(trace.dip_deg > 0.0) || trace.dip_deg > 90.0) {
        throw std::invalid_argument("extrude_ribbon: dip must be in (0, 90] degrees");
    }
    if (!(trace.depth > 0.0)) throw std::invalid_argument("extrude_ribbon: depth must be positive");

    const double deg = std::numbers::pi / 180.0;
    const double horizontal =
        trace.dip_deg == 90.0 ? 0.0 : trace.depth / std::tan(trace.dip_deg * deg);
    // azimuth measured clockwise from grid north
    const Vec3 offset{horizontal * std::sin(trace.dip_direction_deg * deg),
                      horizontal * std::cos(trace.dip_direction_deg * deg), -trace.depth};

    RibbonMesh mesh;
    mesh.quads.reserve(trace.polyline.size() - 1);
    for (std::size_t v = 0; v + 1 < trace.polyline.size(); ++v) {
        const Vec3 upper_a{trace.polyline[v].x, trace.polyline[v].y, surface_z[v]};
        const Vec3 upper_b{trace.polyline[v + 1].x, trace.polyline[v + 1].y, surface_z[v + 1]};
        RibbonMesh::Quad quad;
        quad.corner[0] = upper_a;
        quad.corner[1] = upper_b;
        quad.corner[2] = upper_b + offset;
        quad.corner[3] = upper_a + offset;
        mesh.quads.push_back(quad);
    }
    return mesh;
}

VolumeMask voxelize_mesh(const RibbonMesh& mesh, const VolumeMask& mask, unsigned threads) {
    if (mesh.quads.empty()) throw std::invalid_argument("voxelize_mesh: empty mesh");
    const GridSpec& grid = mask.grid();
    const double reach = 0.5 * grid.voxel_diagonal();
    std::vector<std::uint8_t> hit(mask.size(), 0);
    parallel_for(mask.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            if (!mask.test(idx)) continue;
            const Vec3 c = grid.centroid(idx);
            for (const auto& quad : mesh.quads) {
                const double d =
                    std::min(point_triangle_distance(c, quad.corner[0], quad.corner[1], quad.corner[2]),
                             point_triangle_distance(c, quad.corner[0], quad.corner[2], quad.corner[3]));
                if (d <= reach) {
                    hit[idx] = 1;
                    break;
                }
            }
        }
    });
    VolumeMask out(grid);
    for (std::size_t idx = 0; idx < hit.size(); ++idx) {
        if (hit[idx]) out.set(idx, true);
    }
    return out;
}

VolumeMask buffer_mask(const VolumeMask& src, double radius) {
    if (radius < 0.0) throw std::invalid_argument("buffer_mask: radius must be >= 0");
    const GridSpec& grid = src.grid();
    if (radius == 0.0) return src;

    struct Offset {
        int di, dj, dk;
    };
    std::vector<Offset> ball;
    const int ri = static_cast<int>(std::floor(radius / grid.dx));
    const int rj = static_cast<int>(std::floor(radius / grid.dy));
    const int rk = static_cast<int>(std::floor(radius / grid.dz));
    const double r2 = radius * radius;
    for (int dk = -rk; dk <= rk; ++dk) {
        for (int dj = -rj; dj <= rj; ++dj) {
            for (int di = -ri; di <= ri; ++di) {
                const double ox = di * grid.dx;
                const double oy = dj * grid.dy;
                const double oz = dk * grid.dz;
                if (ox * ox + oy * oy + oz * oz <= r2) ball.push_back({di, dj, dk});
            }
        }
    }

    VolumeMask out(grid);
    for (int k = 0; k < grid.nz; ++k) {
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                if (!src.test(i, j, k)) continue;
                for (const auto& o : ball) {
                    const int ii = i + o.di;
                    const int jj = j + o.dj;
                    const int kk = k + o.dk;
                    if (ii < 0 || jj < 0 || kk < 0 || ii >= grid.nx || jj >= grid.ny || kk >= grid.nz) {
                        continue;
                    }
                    out.set(ii, jj, kk, true);
                }
            }
        }
    }
    return out;
}

std::vector<FaultTrace> read_fault_traces(const CsvTable& table) {
    const int c_id = table.require_column("fault_id");
    const int c_order = table.require_column("vertex_order");
    const int c_x = table.require_column("x");
    const int c_y = table.require_column("y");
    const int c_dip = table.require_column("dip");
    const int c_dir = table.require_column("dip_direction");

    struct Vertex {
        long long order;
        Vec2 p;
    };
    std::vector<std::string> ids;  // first-appearance order
    std::map<std::string, std::vector<Vertex>> vertices;
    std::map<std::string, std::pair<double, double>> attitude;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::size_t line = table.lines[r];
        const std::string& id = table.cell(r, c_id);
        if (id.empty()) throw std::runtime_error(table.source + ":" + std::to_string(line) + ": empty fault_id");
        long long order;
        double x, y, dip, dir;
        if (!parse_int(table.cell(r, c_order), order) || !parse_number(table.cell(r, c_x), x) ||
            !parse_number(table.cell(r, c_y), y) || !parse_number(table.cell(r, c_dip), dip) ||
            !parse_number(table.cell(r, c_dir), dir)) {
            throw std::runtime_error(table.source + ":" + std::to_string(line) + ": non-numeric fault field");
        }
        auto [it, inserted] = attitude.emplace(id, std::make_pair(dip, dir));
        if (inserted) {
            ids.push_back(id);
        } else if (it->second != std::make_pair(dip, dir)) {
            throw std::runtime_error(table.source + ":" + std::to_string(line) +
                                     ": inconsistent dip/dip_direction for fault '" + id + "'");
        }
        vertices[id].push_back({order, {x, y}});
    }

    std::vector<FaultTrace> traces;
    for (const auto& id : ids) {
        auto& verts = vertices[id];
        std::sort(verts.begin(), verts.end(),
                  [](const Vertex& a, const Vertex& b) { return a.order < b.order; });
        FaultTrace trace;
        trace.fault_id = id;
        for (const auto& v : verts) trace.polyline.push_back(v.p);
        trace.dip_deg = attitude[id].first;
        trace.dip_direction_deg = attitude[id].second;
        traces.push_back(std::move(trace));
    }
    return traces;
}

}  // namespace wofe3d
