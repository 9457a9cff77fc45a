#include "wofe3d/export.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wofe3d/csv.hpp"
#include "wofe3d/error.hpp"

namespace wofe3d {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    return out;
}

double num(const CsvTable& t, std::size_t row, int col) {
    double v;
    if (!parse_number(t.cell(row, col), v)) {
        throw std::runtime_error(t.source + ":" + std::to_string(t.lines[row]) +
                                 ": expected a number, found '" + t.cell(row, col) + "'");
    }
    return v;
}

long long inum(const CsvTable& t, std::size_t row, int col) {
    long long v;
    if (!parse_int(t.cell(row, col), v)) {
        throw std::runtime_error(t.source + ":" + std::to_string(t.lines[row]) +
                                 ": expected an integer, found '" + t.cell(row, col) + "'");
    }
    return v;
}

void check_index(const GridSpec& grid, long long i, long long j, long long k,
                 const std::string& source) {
    if (i < 0 || j < 0 || k < 0 || i >= grid.nx || j >= grid.ny || k >= grid.nz) {
        throw std::runtime_error(source + ": voxel index out of range");
    }
}

}  // namespace

std::string sanitize_name(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (const char c : name) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    }
    return out;
}

void write_mask_csv(const std::filesystem::path& path, const VolumeMask& mask) {
    auto out = open_out(path);
    const GridSpec& g = mask.grid();
    out << schema_line("mask", 1) << "\n";
    out << "i,j,k,flag\n";
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                out << i << ',' << j << ',' << k << ',' << (mask.test(i, j, k) ? 1 : 0) << "\n";
            }
        }
    }
}

VolumeMask read_mask_csv(const std::filesystem::path& path, const GridSpec& grid) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "mask", 1);
    const int ci = t.require_column("i");
    const int cj = t.require_column("j");
    const int ck = t.require_column("k");
    const int cf = t.require_column("flag");
    VolumeMask mask(grid);
    if (t.rows.size() != grid.voxel_count()) {
        throw std::runtime_error(t.source + ": row count does not match the grid");
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const long long i = inum(t, r, ci), j = inum(t, r, cj), k = inum(t, r, ck);
        check_index(grid, i, j, k, t.source);
        if (inum(t, r, cf) != 0) {
            mask.set(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k), true);
        }
    }
    return mask;
}

namespace {

template <typename ValueWriter>
void write_model_rows(std::ofstream& out, const GridSpec& g, const VolumeMask& mask,
                      ValueWriter&& value) {
    out << "i,j,k,x,y,z,value\n";
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                if (!mask.test(i, j, k)) continue;
                const Vec3 c = g.centroid(i, j, k);
                out << i << ',' << j << ',' << k << ',' << fmt_full(c.x) << ',' << fmt_full(c.y)
                    << ',' << fmt_full(c.z) << ',' << value(g.linear_index(i, j, k)) << "\n";
            }
        }
    }
}

}  // namespace

void write_categorical_csv(const std::filesystem::path& path, const CategoricalModel& model) {
    auto out = open_out(path);
    out << schema_line("model", 1) << "\n";
    write_model_rows(out, model.grid, model.mask,
                     [&](std::size_t idx) { return model.dictionary[model.codes[idx]]; });
}

CategoricalModel read_categorical_csv(const std::filesystem::path& path, const VolumeMask& mask) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "model", 1);
    const int ci = t.require_column("i");
    const int cj = t.require_column("j");
    const int ck = t.require_column("k");
    const int cv = t.require_column("value");
    CategoricalModel model;
    model.grid = mask.grid();
    model.mask = mask;
    model.codes.assign(mask.size(), -1);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const long long i = inum(t, r, ci), j = inum(t, r, cj), k = inum(t, r, ck);
        check_index(model.grid, i, j, k, t.source);
        model.codes[model.grid.linear_index(static_cast<int>(i), static_cast<int>(j),
                                            static_cast<int>(k))] = model.intern(t.cell(r, cv));
    }
    if (t.rows.size() != mask.active_count()) {
        throw std::runtime_error(t.source + ": row count does not match the active mask");
    }
    return model;
}

void write_continuous_csv(const std::filesystem::path& path, const ContinuousModel& model) {
    auto out = open_out(path);
    out << schema_line("model", 1) << "\n";
    out << "# unit: " << model.unit << "\n";
    write_model_rows(out, model.grid, model.mask,
                     [&](std::size_t idx) { return fmt_full(model.values[idx]); });
}

ContinuousModel read_continuous_csv(const std::filesystem::path& path, const VolumeMask& mask) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "model", 1);
    const int ci = t.require_column("i");
    const int cj = t.require_column("j");
    const int ck = t.require_column("k");
    const int cv = t.require_column("value");
    ContinuousModel model;
    model.grid = mask.grid();
    model.mask = mask;
    model.values.assign(mask.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const long long i = inum(t, r, ci), j = inum(t, r, cj), k = inum(t, r, ck);
        check_index(model.grid, i, j, k, t.source);
        model.values[model.grid.linear_index(static_cast<int>(i), static_cast<int>(j),
                                             static_cast<int>(k))] = num(t, r, cv);
    }
    if (t.rows.size() != mask.active_count()) {
        throw std::runtime_error(t.source + ": row count does not match the active mask");
    }
    // unit survives in a comment only; recover it from the raw file
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# unit: ", 0) == 0) {
            model.unit = line.substr(8);
            if (!model.unit.empty() && model.unit.back() == '\r') model.unit.pop_back();
            break;
        }
        if (!line.empty() && line[0] != '#') break;
    }
    return model;
}

void write_class_index_csv(const std::filesystem::path& path, const GridSpec& grid,
                           std::span<const std::int32_t> class_index) {
    auto out = open_out(path);
    out << schema_line("classes", 1) << "\n";
    out << "i,j,k,class\n";
    for (int k = 0; k < grid.nz; ++k) {
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                const std::int32_t c = class_index[grid.linear_index(i, j, k)];
                if (c < 0) continue;
                out << i << ',' << j << ',' << k << ',' << c << "\n";
            }
        }
    }
}

std::vector<std::int32_t> read_class_index_csv(const std::filesystem::path& path,
                                               const GridSpec& grid) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "classes", 1);
    const int ci = t.require_column("i");
    const int cj = t.require_column("j");
    const int ck = t.require_column("k");
    const int cc = t.require_column("class");
    std::vector<std::int32_t> out(grid.voxel_count(), -1);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const long long i = inum(t, r, ci), j = inum(t, r, cj), k = inum(t, r, ck);
        check_index(grid, i, j, k, t.source);
        out[grid.linear_index(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k))] =
            static_cast<std::int32_t>(inum(t, r, cc));
    }
    return out;
}

void write_samples_csv(const std::filesystem::path& path, std::span<const PointSample> samples) {
    auto out = open_out(path);
    out << schema_line("samples", 1) << "\n";
    out << "x,y,z,value,code\n";
    for (const auto& s : samples) {
        out << fmt_full(s.x) << ',' << fmt_full(s.y) << ',' << fmt_full(s.z) << ','
            << fmt_full(s.value) << ',' << s.code << "\n";
    }
}

std::vector<PointSample> read_samples_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "samples", 1);
    const int cx = t.require_column("x");
    const int cy = t.require_column("y");
    const int cz = t.require_column("z");
    const int cv = t.require_column("value");
    const int cc = t.require_column("code");
    std::vector<PointSample> samples;
    samples.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        PointSample s;
        s.x = num(t, r, cx);
        s.y = num(t, r, cy);
        s.z = num(t, r, cz);
        s.value = num(t, r, cv);
        s.code = t.cell(r, cc);
        samples.push_back(std::move(s));
    }
    return samples;
}

void write_probability_csv(const std::filesystem::path& path, const ProbabilityModel& model) {
    auto out = open_out(path);
    out << schema_line("probability", 1) << "\n";
    out << "i,j,k,logit,posterior,total_variance,studentized,studentized_defined\n";
    const GridSpec& g = model.grid;
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                if (!model.space.test(i, j, k)) continue;
                const std::size_t idx = g.linear_index(i, j, k);
                const bool defined = model.studentized_defined[idx] != 0;
                out << i << ',' << j << ',' << k << ',' << fmt_full(model.logit[idx]) << ','
                    << fmt_full(model.posterior[idx]) << ',' << fmt_full(model.total_variance[idx])
                    << ',' << fmt_full(defined ? model.studentized[idx] : 0.0) << ','
                    << (defined ? 1 : 0) << "\n";
            }
        }
    }
}

ProbabilityModel read_probability_csv(const std::filesystem::path& path, const VolumeMask& space) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "probability", 1);
    const int ci = t.require_column("i");
    const int cj = t.require_column("j");
    const int ck = t.require_column("k");
    const int cl = t.require_column("logit");
    const int cp = t.require_column("posterior");
    const int cv = t.require_column("total_variance");
    const int cs = t.require_column("studentized");
    const int cd = t.require_column("studentized_defined");
    ProbabilityModel model;
    model.grid = space.grid();
    model.space = space;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    model.logit.assign(space.size(), nan);
    model.odds.assign(space.size(), nan);
    model.posterior.assign(space.size(), nan);
    model.total_variance.assign(space.size(), nan);
    model.studentized.assign(space.size(), nan);
    model.studentized_defined.assign(space.size(), 0);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const long long i = inum(t, r, ci), j = inum(t, r, cj), k = inum(t, r, ck);
        check_index(model.grid, i, j, k, t.source);
        const std::size_t idx =
            model.grid.linear_index(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k));
        model.logit[idx] = num(t, r, cl);
        model.odds[idx] = std::exp(model.logit[idx]);
        model.posterior[idx] = num(t, r, cp);
        model.total_variance[idx] = num(t, r, cv);
        if (inum(t, r, cd) != 0) {
            model.studentized[idx] = num(t, r, cs);
            model.studentized_defined[idx] = 1;
        }
    }
    if (t.rows.size() != space.active_count()) {
        throw std::runtime_error(t.source + ": row count does not match the active mask");
    }
    return model;
}

void write_grid_file(const std::filesystem::path& path, const GridSpec& grid,
                     const Polygon2D& hull) {
    auto out = open_out(path);
    out << schema_line("grid", 1) << "\n";
    out << "origin = " << fmt_full(grid.origin.x) << ' ' << fmt_full(grid.origin.y) << ' '
        << fmt_full(grid.origin.z) << "\n";
    out << "counts = " << grid.nx << ' ' << grid.ny << ' ' << grid.nz << "\n";
    out << "spacing = " << fmt_full(grid.dx) << ' ' << fmt_full(grid.dy) << ' ' << fmt_full(grid.dz)
        << "\n";
    out << "hull =";
    for (const auto& v : hull.vertices()) out << ' ' << fmt_full(v.x) << ' ' << fmt_full(v.y);
    out << "\n";
}

std::pair<GridSpec, Polygon2D> read_grid_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    GridSpec grid;
    std::vector<Vec2> hull;
    std::string line;
    bool schema_ok = false;
    const std::string expected = schema_line("grid", 1);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line == expected) schema_ok = true;
            continue;
        }
        std::istringstream ss(line);
        std::string key, eq;
        ss >> key >> eq;
        if (eq != "=") throw std::runtime_error(path.string() + ": malformed line '" + line + "'");
        if (key == "origin") {
            ss >> grid.origin.x >> grid.origin.y >> grid.origin.z;
        } else if (key == "counts") {
            ss >> grid.nx >> grid.ny >> grid.nz;
        } else if (key == "spacing") {
            ss >> grid.dx >> grid.dy >> grid.dz;
        } else if (key == "hull") {
            double x, y;
            while (ss >> x >> y) hull.push_back({x, y});
        } else {
            throw std::runtime_error(path.string() + ": unknown key '" + key + "'");
        }
    }
    if (!schema_ok) {
        throw SchemaVersionError(path.string() + ": schema version mismatch: expected '" +
                                 expected.substr(2) + "'");
    }
    grid.validate();
    return {grid, Polygon2D(std::move(hull))};
}

void write_weight_table_csv(const std::filesystem::path& path, const EvidenceLayer& layer) {
    auto out = open_out(path);
    out << schema_line("weights", 1) << "\n";
    out << "lower,upper,w_plus,w_minus,contrast,studentized_contrast,fuzzy_contrast,fuzzy_weight\n";
    if (layer.kind == LayerKind::binary) {
        const auto& w = layer.weights;
        out << layer.name << ",," << fmt_digits(w.w_plus, 10) << ',' << fmt_digits(w.w_minus, 10)
            << ',' << fmt_digits(w.contrast, 10) << ',' << fmt_digits(w.studentized, 10) << ",,\n";
    } else {
        for (const auto& c : layer.classes) {
            out << fmt_digits(c.lower, 10) << ',' << fmt_digits(c.upper, 10) << ','
                << fmt_digits(c.weights.w_plus, 10) << ',' << fmt_digits(c.weights.w_minus, 10)
                << ',' << fmt_digits(c.weights.contrast, 10) << ','
                << fmt_digits(c.weights.studentized, 10) << ',' << fmt_digits(c.fuzzy_contrast, 10)
                << ',' << fmt_digits(c.fuzzy_weight, 10) << "\n";
        }
    }
}

namespace {

void write_counts(std::ofstream& out, const ContingencyCounts& c) {
    out << fmt_full(c.n_evidence_training) << ',' << fmt_full(c.n_evidence_only) << ','
        << fmt_full(c.n_training_only) << ',' << fmt_full(c.n_neither);
}

void write_weight_fields(std::ofstream& out, const WeightRecord& w) {
    out << fmt_full(w.w_plus) << ',' << fmt_full(w.w_minus) << ',' << fmt_full(w.var_w_plus) << ','
        << fmt_full(w.var_w_minus) << ',' << fmt_full(w.contrast) << ',' << fmt_full(w.std_contrast)
        << ',' << fmt_full(w.studentized);
}

}  // namespace

void write_layer_records_csv(const std::filesystem::path& path,
                             std::span<const EvidenceLayer> layers) {
    auto out = open_out(path);
    out << schema_line("layers", 1) << "\n";
    out << "layer,kind,class,lower,upper,n_em,n_e_only,n_m_only,n_neither,"
           "w_plus,w_minus,var_w_plus,var_w_minus,contrast,std_contrast,studentized,"
           "mu,fuzzy_weight,fuzzy_variance,included,corrected\n";
    for (const auto& layer : layers) {
        if (layer.kind == LayerKind::binary) {
            out << layer.name << ",binary,-1,,,";
            write_counts(out, layer.counts);
            out << ',';
            write_weight_fields(out, layer.weights);
            out << ",,,," << (layer.included ? 1 : 0) << ',' << (layer.continuity_corrected ? 1 : 0)
                << "\n";
        } else {
            for (std::size_t c = 0; c < layer.classes.size(); ++c) {
                const auto& record = layer.classes[c];
                out << layer.name << ",continuous," << c << ',' << fmt_full(record.lower) << ','
                    << fmt_full(record.upper) << ',';
                write_counts(out, record.counts);
                out << ',';
                write_weight_fields(out, record.weights);
                out << ',' << fmt_full(record.fuzzy_contrast) << ',' << fmt_full(record.fuzzy_weight)
                    << ',' << fmt_full(record.fuzzy_variance) << ',' << (record.included ? 1 : 0)
                    << ',' << (record.continuity_corrected ? 1 : 0) << "\n";
            }
        }
    }
}

std::vector<EvidenceLayer> read_layer_records_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "layers", 1);
    const int c_layer = t.require_column("layer");
    const int c_kind = t.require_column("kind");
    const int c_class = t.require_column("class");
    const int c_lower = t.require_column("lower");
    const int c_upper = t.require_column("upper");
    const int c_nem = t.require_column("n_em");
    const int c_neo = t.require_column("n_e_only");
    const int c_nmo = t.require_column("n_m_only");
    const int c_nn = t.require_column("n_neither");
    const int c_wp = t.require_column("w_plus");
    const int c_wm = t.require_column("w_minus");
    const int c_vp = t.require_column("var_w_plus");
    const int c_vm = t.require_column("var_w_minus");
    const int c_mu = t.require_column("mu");
    const int c_fw = t.require_column("fuzzy_weight");
    const int c_fv = t.require_column("fuzzy_variance");
    const int c_inc = t.require_column("included");
    const int c_cor = t.require_column("corrected");

    std::vector<EvidenceLayer> layers;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& name = t.cell(r, c_layer);
        const bool binary = t.cell(r, c_kind) == "binary";
        if (layers.empty() || layers.back().name != name) {
            EvidenceLayer layer;
            layer.name = name;
            layer.kind = binary ? LayerKind::binary : LayerKind::classed_continuous;
            layers.push_back(std::move(layer));
        }
        EvidenceLayer& layer = layers.back();
        ContingencyCounts counts;
        counts.n_evidence_training = num(t, r, c_nem);
        counts.n_evidence_only = num(t, r, c_neo);
        counts.n_training_only = num(t, r, c_nmo);
        counts.n_neither = num(t, r, c_nn);
        const WeightRecord weights = WeightRecord::from_weights(num(t, r, c_wp), num(t, r, c_wm),
                                                                num(t, r, c_vp), num(t, r, c_vm));
        if (binary) {
            layer.counts = counts;
            layer.weights = weights;
            layer.included = inum(t, r, c_inc) != 0;
            layer.continuity_corrected = inum(t, r, c_cor) != 0;
        } else {
            FuzzyClassRecord record;
            record.lower = num(t, r, c_lower);
            record.upper = num(t, r, c_upper);
            record.counts = counts;
            record.weights = weights;
            record.fuzzy_contrast = num(t, r, c_mu);
            record.fuzzy_weight = num(t, r, c_fw);
            record.fuzzy_variance = num(t, r, c_fv);
            record.included = inum(t, r, c_inc) != 0;
            record.continuity_corrected = inum(t, r, c_cor) != 0;
            const long long class_id = inum(t, r, c_class);
            if (class_id != static_cast<long long>(layer.classes.size())) {
                throw std::runtime_error(t.source + ": class rows for '" + name + "' out of order");
            }
            layer.classes.push_back(std::move(record));
        }
    }
    return layers;
}

void write_cv_csv(const std::filesystem::path& path, const CVCurve& curve) {
    auto out = open_out(path);
    out << schema_line("cv", 1) << "\n";
    out << "value,volume\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        out << fmt_full(curve.values[i]) << ',' << fmt_full(curve.volumes[i]) << "\n";
    }
}

CVCurve read_cv_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "cv", 1);
    const int cv = t.require_column("value");
    const int cn = t.require_column("volume");
    CVCurve curve;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        curve.values.push_back(num(t, r, cv));
        curve.volumes.push_back(num(t, r, cn));
    }
    return curve;
}

void write_cvfit_csv(const std::filesystem::path& path, const SegmentedFit& fit) {
    auto out = open_out(path);
    out << schema_line("cvfit", 1) << "\n";
    out << "row,first,last,value_lo,value_hi,slope,intercept,sse\n";
    for (std::size_t s = 0; s < fit.segments.size(); ++s) {
        const auto& seg = fit.segments[s];
        out << "segment," << seg.first << ',' << seg.last << ',' << fmt_full(seg.value_lo) << ','
            << fmt_full(seg.value_hi) << ',' << fmt_full(seg.slope) << ',' << fmt_full(seg.intercept)
            << ',' << fmt_full(seg.sse) << "\n";
    }
    for (std::size_t b = 0; b < fit.breakpoints.size(); ++b) {
        out << "breakpoint," << fit.break_indices[b] << ",," << fmt_full(fit.breakpoints[b])
            << ",,,,\n";
    }
    out << "total,,,,,,," << fmt_full(fit.total_sse) << "\n";
}

SegmentedFit read_cvfit_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "cvfit", 1);
    const int c_row = t.require_column("row");
    const int c_first = t.require_column("first");
    const int c_last = t.require_column("last");
    const int c_lo = t.require_column("value_lo");
    const int c_hi = t.require_column("value_hi");
    const int c_slope = t.require_column("slope");
    const int c_icpt = t.require_column("intercept");
    const int c_sse = t.require_column("sse");
    SegmentedFit fit;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& kind = t.cell(r, c_row);
        if (kind == "segment") {
            FitSegment seg;
            seg.first = static_cast<std::size_t>(inum(t, r, c_first));
            seg.last = static_cast<std::size_t>(inum(t, r, c_last));
            seg.value_lo = num(t, r, c_lo);
            seg.value_hi = num(t, r, c_hi);
            seg.slope = num(t, r, c_slope);
            seg.intercept = num(t, r, c_icpt);
            seg.sse = num(t, r, c_sse);
            fit.segments.push_back(seg);
        } else if (kind == "breakpoint") {
            fit.break_indices.push_back(static_cast<std::size_t>(inum(t, r, c_first)));
            fit.breakpoints.push_back(num(t, r, c_lo));
        } else if (kind == "total") {
            fit.total_sse = num(t, r, c_sse);
        }
    }
    return fit;
}

void write_pv_csv(const std::filesystem::path& path, const PVCurves& curves) {
    auto out = open_out(path);
    out << schema_line("pv", 1) << "\n";
    out << "row,threshold,prediction,volume\n";
    for (std::size_t i = 0; i < curves.thresholds.size(); ++i) {
        out << "point," << fmt_full(curves.thresholds[i]) << ',' << fmt_full(curves.prediction[i])
            << ',' << fmt_full(curves.volume[i]) << "\n";
    }
    out << "intersection," << fmt_full(curves.t_star) << ',' << fmt_full(curves.p_star) << ','
        << fmt_full(curves.v_star) << "\n";
}

PVCurves read_pv_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "pv", 1);
    const int c_row = t.require_column("row");
    const int c_t = t.require_column("threshold");
    const int c_p = t.require_column("prediction");
    const int c_v = t.require_column("volume");
    PVCurves curves;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.cell(r, c_row) == "point") {
            curves.thresholds.push_back(num(t, r, c_t));
            curves.prediction.push_back(num(t, r, c_p));
            curves.volume.push_back(num(t, r, c_v));
        } else if (t.cell(r, c_row) == "intersection") {
            curves.t_star = num(t, r, c_t);
            curves.p_star = num(t, r, c_p);
            curves.v_star = num(t, r, c_v);
        }
    }
    return curves;
}

void write_kv_csv(const std::filesystem::path& path, const std::string& schema,
                  const std::vector<std::pair<std::string, std::string>>& entries) {
    auto out = open_out(path);
    out << schema_line(schema, 1) << "\n";
    out << "key,value\n";
    for (const auto& [key, value] : entries) out << key << ',' << value << "\n";
}

std::map<std::string, std::string> read_kv_csv(const std::filesystem::path& path,
                                               const std::string& schema) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, schema, 1);
    const int ck = t.require_column("key");
    const int cv = t.require_column("value");
    std::map<std::string, std::string> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) out[t.cell(r, ck)] = t.cell(r, cv);
    return out;
}

namespace {

void write_vtk_header(std::ofstream& out, const GridSpec& g, const std::string& title) {
    out << "# vtk DataFile Version 3.0\n";
    out << title << "\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << g.nx + 1 << ' ' << g.ny + 1 << ' ' << g.nz + 1 << "\n";
    out << "ORIGIN " << fmt_digits(g.origin.x, 12) << ' ' << fmt_digits(g.origin.y, 12) << ' '
        << fmt_digits(g.origin.z, 12) << "\n";
    out << "SPACING " << fmt_digits(g.dx, 12) << ' ' << fmt_digits(g.dy, 12) << ' '
        << fmt_digits(g.dz, 12) << "\n";
    out << "CELL_DATA " << g.voxel_count() << "\n";
}

}  // namespace

void write_vtk_cell_scalars(const std::filesystem::path& path, const GridSpec& grid,
                            std::span<const double> values, const std::string& name, double fill) {
    auto out = open_out(path);
    write_vtk_header(out, grid, name);
    out << "SCALARS " << name << " float 1\n";
    out << "LOOKUP_TABLE default\n";
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        const double v = std::isfinite(values[idx]) ? values[idx] : fill;
        out << fmt_digits(v, 9) << "\n";
    }
}

void write_vtk_mask(const std::filesystem::path& path, const VolumeMask& mask,
                    const std::string& name) {
    auto out = open_out(path);
    write_vtk_header(out, mask.grid(), name);
    out << "SCALARS " << name << " int 1\n";
    out << "LOOKUP_TABLE default\n";
    for (std::size_t idx = 0; idx < mask.size(); ++idx) out << (mask.test(idx) ? 1 : 0) << "\n";
}

void write_vtk_categorical(const std::filesystem::path& path, const CategoricalModel& model,
                           const std::string& name) {
    auto out = open_out(path);
    write_vtk_header(out, model.grid, name);
    out << "SCALARS " << name << " int 1\n";
    out << "LOOKUP_TABLE default\n";
    for (std::size_t idx = 0; idx < model.codes.size(); ++idx) out << model.codes[idx] << "\n";
}

// ---------------------------------------------------------------------------
// SVG charts
// ---------------------------------------------------------------------------

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 520;
constexpr int kLeft = 80, kRight = 40, kTop = 50, kBottom = 60;

struct AxisMap {
    double x0, x1, y0, y1;  // data ranges

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const {
        return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
    }
};

std::string svg_open() {
    std::ostringstream ss;
    ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    ss << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return ss.str();
}

void svg_frame(std::ostringstream& ss, const std::string& title, const std::string& x_label,
               const std::string& y_label) {
    ss << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
       << "\" height=\"" << kHeight - kTop - kBottom
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    ss << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
          "font-family=\"sans-serif\">"
       << title << "</text>\n";
    ss << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15
       << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
       << "</text>\n";
    ss << "<text x=\"20\" y=\"" << kHeight / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 "
          "20 "
       << kHeight / 2 << ")\">" << y_label << "</text>\n";
}

void svg_polyline(std::ostringstream& ss, const std::vector<std::pair<double, double>>& pts,
                  const std::string& color, double width, const std::string& dash = "") {
    ss << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"";
    if (!dash.empty()) ss << " stroke-dasharray=\"" << dash << "\"";
    ss << " points=\"";
    for (const auto& [x, y] : pts) ss << fmt_digits(x, 6) << ',' << fmt_digits(y, 6) << ' ';
    ss << "\"/>\n";
}

}  // namespace

void write_cv_chart_svg(const std::filesystem::path& path, const CVCurve& curve,
                        const SegmentedFit& fit, const std::string& title) {
    std::ostringstream ss;
    ss << svg_open();
    svg_frame(ss, title, "log10 value", "log10 volume (voxels)");

    AxisMap axes{};
    axes.x0 = std::log10(curve.values.front());
    axes.x1 = std::log10(curve.values.back());
    axes.y0 = 0.0;
    axes.y1 = std::log10(curve.volumes.front()) * 1.05;
    if (axes.x1 == axes.x0) axes.x1 = axes.x0 + 1.0;

    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        pts.emplace_back(axes.px(std::log10(curve.values[i])),
                         axes.py(std::log10(curve.volumes[i])));
    }
    svg_polyline(ss, pts, "#1f77b4", 1.5);

    for (const auto& seg : fit.segments) {
        const double xa = std::log10(seg.value_lo);
        const double xb = std::log10(seg.value_hi);
        std::vector<std::pair<double, double>> line{
            {axes.px(xa), axes.py(seg.intercept + seg.slope * xa)},
            {axes.px(xb), axes.py(seg.intercept + seg.slope * xb)}};
        svg_polyline(ss, line, "#d62728", 1.5);
    }
    for (const double b : fit.breakpoints) {
        const double x = axes.px(std::log10(b));
        std::vector<std::pair<double, double>> line{{x, axes.py(axes.y0)}, {x, axes.py(axes.y1)}};
        svg_polyline(ss, line, "#555555", 1.0, "4,4");
        ss << "<text x=\"" << fmt_digits(x + 4, 6) << "\" y=\"" << kTop + 16
           << "\" font-size=\"11\" font-family=\"sans-serif\">" << fmt_digits(b, 4) << "</text>\n";
    }
    ss << "</svg>\n";
    auto out = open_out(path);
    out << ss.str();
}

void write_pv_chart_svg(const std::filesystem::path& path, const PVCurves& curves,
                        const std::string& title) {
    std::ostringstream ss;
    ss << svg_open();
    svg_frame(ss, title, "prospectivity value", "percent");

    AxisMap axes{0.0, 1.0, 0.0, 100.0};
    std::vector<std::pair<double, double>> p_pts, v_pts;
    for (std::size_t i = 0; i < curves.thresholds.size(); ++i) {
        p_pts.emplace_back(axes.px(curves.thresholds[i]), axes.py(100.0 * curves.prediction[i]));
        v_pts.emplace_back(axes.px(curves.thresholds[i]), axes.py(100.0 * curves.volume[i]));
    }
    svg_polyline(ss, p_pts, "#1f77b4", 1.8);
    svg_polyline(ss, v_pts, "#d62728", 1.8);

    const double ix = axes.px(std::min(curves.t_star, 1.0));
    const double iy = axes.py(100.0 * curves.p_star);
    ss << "<circle cx=\"" << fmt_digits(ix, 6) << "\" cy=\"" << fmt_digits(iy, 6)
       << "\" r=\"4\" fill=\"black\"/>\n";
    ss << "<text x=\"" << fmt_digits(ix + 8, 6) << "\" y=\"" << fmt_digits(iy - 8, 6)
       << "\" font-size=\"12\" font-family=\"sans-serif\">P=" << fmt_digits(100.0 * curves.p_star, 3)
       << "%, V=" << fmt_digits(100.0 * curves.v_star, 3) << "%</text>\n";
    ss << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 18
       << "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"#1f77b4\">prediction rate</text>\n";
    ss << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 34
       << "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"#d62728\">occupied volume</text>\n";
    ss << "</svg>\n";
    auto out = open_out(path);
    out << ss.str();
}

}  // namespace wofe3d
