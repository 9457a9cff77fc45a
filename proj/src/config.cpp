#include "wofe3d/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wofe3d/csv.hpp"

namespace wofe3d {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    std::string token;
    while (ss >> token) out.push_back(token);
    return out;
}

double to_number(const std::string& value, const std::string& where) {
    double v;
    if (!parse_number(value, v)) throw std::runtime_error(where + ": expected a number, found '" + value + "'");
    return v;
}

int to_int(const std::string& value, const std::string& where) {
    long long v;
    if (!parse_int(value, v)) throw std::runtime_error(where + ": expected an integer, found '" + value + "'");
    return static_cast<int>(v);
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";

    PipelineConfig cfg;
    bool grid_seen = false;
    std::string section;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const std::string where = path.filename().string() + ":" + std::to_string(line_no);
        if (text.front() == '[') {
            if (text.back() != ']') throw std::runtime_error(where + ": malformed section header");
            section = text.substr(1, text.size() - 2);
            continue;
        }
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos) throw std::runtime_error(where + ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));

        auto resolve = [&](const std::string& rel) { return base / rel; };

        if (section == "inputs") {
            if (key == "collars") cfg.collars = resolve(value);
            else if (key == "intervals") cfg.intervals = resolve(value);
            else if (key == "assays") cfg.assays = resolve(value);
            else if (key == "faults") cfg.faults = resolve(value);
            else if (key == "map") cfg.map_raster = resolve(value);
            else if (key == "sections") cfg.sections = resolve(value);
            else throw std::runtime_error(where + ": unknown key '" + key + "' in [inputs]");
        } else if (section == "grid") {
            grid_seen = true;
            const auto parts = split_ws(value);
            if (parts.size() != 3) throw std::runtime_error(where + ": expected three values");
            if (key == "origin") {
                cfg.grid.origin = {to_number(parts[0], where), to_number(parts[1], where),
                                   to_number(parts[2], where)};
            } else if (key == "counts") {
                cfg.grid.nx = to_int(parts[0], where);
                cfg.grid.ny = to_int(parts[1], where);
                cfg.grid.nz = to_int(parts[2], where);
            } else if (key == "spacing") {
                cfg.grid.dx = to_number(parts[0], where);
                cfg.grid.dy = to_number(parts[1], where);
                cfg.grid.dz = to_number(parts[2], where);
            } else {
                throw std::runtime_error(where + ": unknown key '" + key + "' in [grid]");
            }
        } else if (section == "hull") {
            if (key != "vertex") throw std::runtime_error(where + ": unknown key '" + key + "' in [hull]");
            const auto parts = split_ws(value);
            if (parts.size() != 2) throw std::runtime_error(where + ": expected 'vertex = x y'");
            cfg.hull.push_back({to_number(parts[0], where), to_number(parts[1], where)});
        } else if (section == "training") {
            if (key == "element") cfg.training_element = value;
            else if (key == "cutoff") cfg.training_cutoff = to_number(value, where);
            else if (key == "unit") cfg.training_unit = value;
            else throw std::runtime_error(where + ": unknown key '" + key + "' in [training]");
        } else if (section == "evidence") {
            if (key == "elements") cfg.evidence_elements = split_ws(value);
            else if (key == "categorical") cfg.categorical_attributes = split_ws(value);
            else throw std::runtime_error(where + ": unknown key '" + key + "' in [evidence]");
        } else if (section == "interpolation") {
            if (key == "power") cfg.idw_power = to_number(value, where);
            else if (key == "sectors") cfg.idw_sectors = to_int(value, where);
            else if (key == "z_anisotropy") cfg.z_anisotropy = to_number(value, where);
            else if (key == "step") cfg.desurvey_step = to_number(value, where);
            else if (key == "surface_method") {
                if (value == "nearest") cfg.surface_method = SurfaceMethod::nearest_collar;
                else if (value == "idw") cfg.surface_method = SurfaceMethod::inverse_distance;
                else throw std::runtime_error(where + ": surface_method must be 'nearest' or 'idw'");
            } else {
                throw std::runtime_error(where + ": unknown key '" + key + "' in [interpolation]");
            }
        } else if (section == "wofe") {
            if (key == "classes") cfg.classes = to_int(value, where);
            else if (key == "prior") {
                if (value != "auto") cfg.prior = to_number(value, where);
            } else if (key == "fuzzify_slope") {
                if (value != "auto") cfg.fuzzify.slope = to_number(value, where);
            } else if (key == "fuzzify_center") {
                if (value != "auto") cfg.fuzzify.center = to_number(value, where);
            } else if (key == "missing_variance") {
                cfg.missing_variance = to_number(value, where);
            } else {
                throw std::runtime_error(where + ": unknown key '" + key + "' in [wofe]");
            }
        } else if (section == "structures") {
            if (key == "buffer_radii") {
                cfg.buffer_radii.clear();
                for (const auto& r : split_ws(value)) cfg.buffer_radii.push_back(to_number(r, where));
            } else {
                throw std::runtime_error(where + ": unknown key '" + key + "' in [structures]");
            }
        } else if (section == "threshold") {
            if (key == "segments") cfg.cv_segments = to_int(value, where);
            else throw std::runtime_error(where + ": unknown key '" + key + "' in [threshold]");
        } else if (section == "validation") {
            if (key == "thresholds") cfg.pv_thresholds = to_int(value, where);
            else throw std::runtime_error(where + ": unknown key '" + key + "' in [validation]");
        } else {
            throw std::runtime_error(where + ": unknown section '" + section + "'");
        }
    }

    if (cfg.collars.empty() || cfg.intervals.empty() || cfg.assays.empty()) {
        throw std::runtime_error(path.string() + ": [inputs] must define collars, intervals and assays");
    }
    if (!grid_seen) throw std::runtime_error(path.string() + ": missing [grid] section");
    cfg.grid.validate();
    if (!(cfg.training_cutoff > 0.0)) throw std::runtime_error(path.string() + ": training cutoff must be positive");
    return cfg;
}

}  // namespace wofe3d
