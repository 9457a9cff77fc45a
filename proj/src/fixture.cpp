#include "wofe3d/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wofe3d/csv.hpp"
#include "wofe3d/grid.hpp"

namespace wofe3d {

namespace {

// Raw-bits uniform doubles; mt19937_64 output is standardized, distribution
// adapters are not.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double unit() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct Field {
    const FixtureParams& p;

    double radial(double x, double y) const {
        const double dx = x - p.pipe_cx;
        const double dy = y - p.pipe_cy;
        return std::sqrt(dx * dx + dy * dy);
    }
    double azimuth_deg(double x, double y) const {
        double a = std::atan2(y - p.pipe_cy, x - p.pipe_cx) * 180.0 / 3.14159265358979324;
        if (a < 0.0) a += 360.0;
        return a;
    }
    // 1 inside the pipe z-window, linear falloff outside over `width` meters
    double axial(double z, double width) const {
        const double outside = std::max({0.0, p.pipe_z_min - z, z - p.pipe_z_max});
        return clamp01(1.0 - outside / width);
    }
    // smooth variant for the geochemical halos
    double axial_smooth(double z, double width) const {
        const double outside = std::max({0.0, p.pipe_z_min - z, z - p.pipe_z_max});
        return std::exp(-(outside / width) * (outside / width));
    }
    // 1 inside the pipe radius, linear falloff outside over `width` meters
    double halo(double r, double width) const {
        return clamp01(1.0 - std::max(0.0, r - p.pipe_radius) / width);
    }
    bool in_cylinder(double x, double y, double z, double cx, double cy, double radius,
                     double z_lo, double z_hi) const {
        const double dx = x - cx, dy = y - cy;
        return dx * dx + dy * dy <= radius * radius && z >= z_lo && z <= z_hi;
    }

    double cu_percent(double x, double y, double z, double noise) const {
        const double shape = halo(radial(x, y), 9.0) * axial(z, 11.0);
        return std::max(0.003, 0.10 + 0.75 * shape + 0.05 * (noise - 0.5));
    }
    // halo amplitudes sit near the noise level, so class weights stay moderate
    // and the ten classes pick up a mix of signs
    double fe_ppm(double x, double y, double z, double noise) const {
        const double r = radial(x, y);
        const double shape = std::exp(-(r / 60.0) * (r / 60.0)) * axial_smooth(z, 60.0);
        return 34000.0 + 20000.0 * shape + 22000.0 * (noise - 0.5);
    }
    double mo_ppm(double x, double y, double z, double noise) const {
        const double r = radial(x, y);
        const double shape = std::exp(-(r / 55.0) * (r / 55.0)) * axial_smooth(z, 50.0);
        return 95.0 + 180.0 * shape + 160.0 * (noise - 0.5);
    }
    double zn_ppm(double x, double y, double z, double noise) const {
        const double r = radial(x, y);
        const double ring = std::exp(-((r - 70.0) / 70.0) * ((r - 70.0) / 70.0));
        return 130.0 + 140.0 * ring * axial_smooth(z, 60.0) + 220.0 * (noise - 0.5);
    }

    // The pipe-related units follow the ore closely; each also appears in a
    // barren satellite body so every contingency cell stays populated.
    std::string lithology(double x, double y, double z) const {
        if (in_cylinder(x, y, z, p.pipe_cx, p.pipe_cy, p.pipe_radius, p.pipe_z_min - 2.0,
                        p.pipe_z_max + 2.0)) {
            return "quartzolite";
        }
        if (in_cylinder(x, y, z, 320.0, 320.0, 38.0, 100.0, 300.0)) return "quartzolite";
        if (x < 100.0) return "granodiorite";
        return "andesite";
    }
    std::string alteration(double x, double y, double z) const {
        if (in_cylinder(x, y, z, p.pipe_cx, p.pipe_cy, p.pipe_radius + 1.0, p.pipe_z_min - 2.0,
                        p.pipe_z_max + 2.0)) {
            return "silicified";
        }
        if (in_cylinder(x, y, z, 80.0, 320.0, 38.0, 100.0, 300.0)) return "silicified";
        const double r = radial(x, y);
        if (r <= 85.0 && z >= 70.0 && z <= 330.0) return "potassic";
        if (r <= 140.0 && z >= 40.0 && z <= 360.0) return "propylitic";
        return "fresh";
    }
    std::string rock_type(double /*x*/, double /*y*/, double z) const {
        if (z > 330.0) return "tuff";
        if (z >= 70.0) return "lava";
        return "basement";
    }
};

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    return out;
}

}  // namespace

bool fixture_in_planted_body(const FixtureParams& p, double x, double y, double z) {
    const double dx = x - p.pipe_cx;
    const double dy = y - p.pipe_cy;
    return dx * dx + dy * dy <= p.pipe_radius * p.pipe_radius && z >= p.pipe_z_min &&
           z <= p.pipe_z_max;
}

FixturePaths generate_fixture(const FixtureParams& params, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    Rng rng(params.seed);
    const Field field{params};
    const double top = params.nz * params.spacing;
    const double extent_x = params.nx * params.spacing;
    const double extent_y = params.ny * params.spacing;

    struct Hole {
        std::string id;
        double x, y, z, depth;
    };
    std::vector<Hole> holes;
    holes.reserve(params.collar_count);
    // 9 x 9 jittered pattern, dense infill over the pipe, a few random holes
    const int grid_n = 9;
    const double margin = 40.0;
    const double pitch_x = (extent_x - 2.0 * margin) / (grid_n - 1);
    const double pitch_y = (extent_y - 2.0 * margin) / (grid_n - 1);
    int id = 0;
    auto push_hole = [&](double x, double y) {
        Hole h;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "BH%03d", ++id);
        h.id = buf;
        h.x = x;
        h.y = y;
        h.z = top - 2.0 - 6.0 * rng.unit();
        h.depth = h.z - (4.0 + 8.0 * rng.unit());
        holes.push_back(h);
    };
    for (int gj = 0; gj < grid_n; ++gj) {
        for (int gi = 0; gi < grid_n; ++gi) {
            push_hole(margin + gi * pitch_x + rng.range(-8.0, 8.0),
                      margin + gj * pitch_y + rng.range(-8.0, 8.0));
        }
    }
    // delineation rings just inside and just outside the pipe contact, then
    // inner infill
    const int ring_holes = 12;
    for (int n = 0; n < ring_holes; ++n) {
        const double angle = (n + 0.5) * 6.28318530717958648 / ring_holes;
        const double r = params.pipe_radius - 6.0 + rng.range(-2.0, 2.0);
        push_hole(params.pipe_cx + r * std::cos(angle), params.pipe_cy + r * std::sin(angle));
    }
    for (int n = 0; n < ring_holes; ++n) {
        const double angle = n * 6.28318530717958648 / ring_holes;
        const double r = params.pipe_radius + 8.0 + rng.range(-2.0, 2.0);
        push_hole(params.pipe_cx + r * std::cos(angle), params.pipe_cy + r * std::sin(angle));
    }
    const int inner_holes = 6;
    for (int n = 0; n < inner_holes; ++n) {
        const double angle = rng.range(0.0, 6.28318530717958648);
        const double r = (params.pipe_radius - 14.0) * std::sqrt(rng.unit());
        push_hole(params.pipe_cx + r * std::cos(angle), params.pipe_cy + r * std::sin(angle));
    }
    while (static_cast<int>(holes.size()) < params.collar_count) {
        push_hole(rng.range(margin, extent_x - margin), rng.range(margin, extent_y - margin));
    }

    {
        auto out = open_out(dir / "collars.csv");
        out << "hole_id,x,y,z,total_depth\n";
        for (const auto& h : holes) {
            out << h.id << ',' << fmt_digits(h.x, 10) << ',' << fmt_digits(h.y, 10) << ','
                << fmt_digits(h.z, 10) << ',' << fmt_digits(h.depth, 10) << "\n";
        }
    }

    const double cell = 10.0;
    {
        auto out = open_out(dir / "intervals.csv");
        out << "hole_id,from,to,attribute,code\n";
        for (const auto& h : holes) {
            for (const char* attribute : {"lithology", "alteration", "rock_type"}) {
                double from = 0.0;
                std::string current;
                for (double d = 0.0; d < h.depth; d += cell) {
                    const double to = std::min(d + cell, h.depth);
                    const double z = h.z - 0.5 * (d + to);
                    std::string code;
                    if (attribute[0] == 'l') code = field.lithology(h.x, h.y, z);
                    else if (attribute[0] == 'a') code = field.alteration(h.x, h.y, z);
                    else code = field.rock_type(h.x, h.y, z);
                    if (current.empty()) {
                        current = code;
                    } else if (code != current) {
                        out << h.id << ',' << fmt_digits(from, 10) << ',' << fmt_digits(d, 10) << ','
                            << attribute << ',' << current << "\n";
                        from = d;
                        current = code;
                    }
                }
                out << h.id << ',' << fmt_digits(from, 10) << ',' << fmt_digits(h.depth, 10) << ','
                    << attribute << ',' << current << "\n";
            }
        }
    }

    {
        auto out = open_out(dir / "assays.csv");
        out << "hole_id,from,to,element,value,unit\n";
        for (const auto& h : holes) {
            for (double d = 0.0; d < h.depth; d += cell) {
                const double to = std::min(d + cell, h.depth);
                const double z = h.z - 0.5 * (d + to);
                const double cu = field.cu_percent(h.x, h.y, z, rng.unit());
                const double fe = field.fe_ppm(h.x, h.y, z, rng.unit());
                const double mo = field.mo_ppm(h.x, h.y, z, rng.unit());
                const double zn = field.zn_ppm(h.x, h.y, z, rng.unit());
                const std::string span = fmt_digits(d, 10) + "," + fmt_digits(to, 10);
                out << h.id << ',' << span << ",Cu," << fmt_digits(cu, 10) << ",%\n";
                out << h.id << ',' << span << ",Fe," << fmt_digits(fe, 10) << ",ppm\n";
                out << h.id << ',' << span << ",Mo," << fmt_digits(mo, 10) << ",ppm\n";
                out << h.id << ',' << span << ",Zn," << fmt_digits(zn, 10) << ",ppm\n";
            }
        }
    }

    {
        // dips away from the pipe so neither the blocks nor their buffers reach
        // the mineralized volume at depth
        auto out = open_out(dir / "faults.csv");
        out << "fault_id,vertex_order,x,y,dip,dip_direction\n";
        out << "F1,0,60,40,75,270\n";
        out << "F1,1,64,160,75,270\n";
        out << "F1,2,70,280,75,270\n";
        out << "F1,3,74,360,75,270\n";
    }

    {
        // surface map: the pipe never reaches the surface, so map units are the
        // shallow lithologies plus a small alluvium patch
        auto out = open_out(dir / "map.csv");
        out << "i,j,code\n";
        for (int j = 0; j < params.ny; ++j) {
            for (int i = 0; i < params.nx; ++i) {
                const double x = (i + 0.5) * params.spacing;
                const double y = (j + 0.5) * params.spacing;
                const double ax = x - 320.0, ay = y - 80.0;
                std::string code;
                if (ax * ax + ay * ay <= 30.0 * 30.0) code = "alluvium";
                else if (x < 100.0) code = "granodiorite";
                else code = "andesite";
                out << i << ',' << j << ',' << code << "\n";
            }
        }
    }

    {
        // lithology section traces through the pipe along both section planes
        auto out = open_out(dir / "sections.csv");
        out << "x,y,z,attribute,code\n";
        for (double x = 50.0; x <= extent_x - 50.0; x += 25.0) {
            for (double z = 50.0; z <= top - 30.0; z += 40.0) {
                out << fmt_digits(x, 10) << ',' << fmt_digits(params.pipe_cy, 10) << ','
                    << fmt_digits(z, 10) << ",lithology," << field.lithology(x, params.pipe_cy, z)
                    << "\n";
            }
        }
        for (double y = 50.0; y <= extent_y - 50.0; y += 25.0) {
            for (double z = 50.0; z <= top - 30.0; z += 40.0) {
                out << fmt_digits(params.pipe_cx, 10) << ',' << fmt_digits(y, 10) << ','
                    << fmt_digits(z, 10) << ",lithology," << field.lithology(params.pipe_cx, y, z)
                    << "\n";
            }
        }
    }

    FixturePaths paths;
    paths.truth = dir / "truth.csv";
    {
        GridSpec grid;
        grid.nx = params.nx;
        grid.ny = params.ny;
        grid.nz = params.nz;
        grid.dx = grid.dy = grid.dz = params.spacing;
        auto out = open_out(paths.truth);
        out << schema_line("truth", 1) << "\n";
        out << "i,j,k\n";
        for (int k = 0; k < grid.nz; ++k) {
            for (int j = 0; j < grid.ny; ++j) {
                for (int i = 0; i < grid.nx; ++i) {
                    const Vec3 c = grid.centroid(i, j, k);
                    if (fixture_in_planted_body(params, c.x, c.y, c.z)) {
                        out << i << ',' << j << ',' << k << "\n";
                    }
                }
            }
        }
    }

    paths.config = dir / "config.ini";
    {
        auto out = open_out(paths.config);
        out << "[inputs]\n";
        out << "collars = collars.csv\n";
        out << "intervals = intervals.csv\n";
        out << "assays = assays.csv\n";
        out << "faults = faults.csv\n";
        out << "map = map.csv\n";
        out << "sections = sections.csv\n\n";
        out << "[grid]\n";
        out << "origin = 0 0 0\n";
        out << "counts = " << params.nx << ' ' << params.ny << ' ' << params.nz << "\n";
        out << "spacing = " << fmt_digits(params.spacing, 10) << ' ' << fmt_digits(params.spacing, 10)
            << ' ' << fmt_digits(params.spacing, 10) << "\n\n";
        out << "[training]\n";
        out << "element = Cu\n";
        out << "cutoff = 0.4\n";
        out << "unit = %\n\n";
        out << "[evidence]\n";
        out << "elements = Fe Mo Zn\n";
        out << "categorical = lithology alteration rock_type\n\n";
        out << "[interpolation]\n";
        out << "power = 2\n";
        out << "sectors = 4\n\n";
        out << "[wofe]\n";
        out << "classes = 10\n";
        out << "prior = auto\n\n";
        out << "[structures]\n";
        out << "buffer_radii = 25 50\n\n";
        out << "[threshold]\n";
        out << "segments = 4\n\n";
        out << "[validation]\n";
        out << "thresholds = 200\n";
    }
    return paths;
}

}  // namespace wofe3d
