#include "wofe3d/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "wofe3d/borehole.hpp"
#include "wofe3d/error.hpp"
#include "wofe3d/export.hpp"
#include "wofe3d/interpolate.hpp"
#include "wofe3d/model_space.hpp"
#include "wofe3d/structures.hpp"
#include "wofe3d/threshold.hpp"

namespace wofe3d {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto run_step(const std::string& label, Fn&& fn) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(label, e.what());
    }
}

void require_input(const fs::path& path, const std::string& what) {
    if (path.empty()) throw std::runtime_error(what + " path not configured");
    if (!fs::exists(path)) throw std::runtime_error(what + " file not found: " + path.string());
}

MapRaster read_map_raster(const fs::path& path, const GridSpec& grid) {
    const CsvTable t = read_csv_file(path);
    const int ci = t.require_column("i");
    const int cj = t.require_column("j");
    const int cc = t.require_column("code");
    MapRaster raster;
    raster.nx = grid.nx;
    raster.ny = grid.ny;
    raster.codes.assign(grid.column_count(), "");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        long long i, j;
        if (!parse_int(t.cell(r, ci), i) || !parse_int(t.cell(r, cj), j)) {
            throw std::runtime_error(t.source + ":" + std::to_string(t.lines[r]) + ": bad column index");
        }
        if (i < 0 || j < 0 || i >= grid.nx || j >= grid.ny) {
            throw std::runtime_error(t.source + ":" + std::to_string(t.lines[r]) +
                                     ": column index out of range");
        }
        raster.codes[grid.column_index(static_cast<int>(i), static_cast<int>(j))] = t.cell(r, cc);
    }
    return raster;
}

std::vector<PointSample> read_section_samples(const fs::path& path, const std::string& attribute) {
    const CsvTable t = read_csv_file(path);
    const int cx = t.require_column("x");
    const int cy = t.require_column("y");
    const int cz = t.require_column("z");
    const int ca = t.require_column("attribute");
    const int cc = t.require_column("code");
    std::vector<PointSample> samples;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.cell(r, ca) != attribute) continue;
        PointSample s;
        if (!parse_number(t.cell(r, cx), s.x) || !parse_number(t.cell(r, cy), s.y) ||
            !parse_number(t.cell(r, cz), s.z)) {
            throw std::runtime_error(t.source + ":" + std::to_string(t.lines[r]) +
                                     ": non-numeric section coordinate");
        }
        s.code = t.cell(r, cc);
        samples.push_back(std::move(s));
    }
    return samples;
}

struct SurfaceGrids {
    SurfacePair surfaces;
    GridSpec grid;

    double super_near(double x, double y) const {
        int i = static_cast<int>(std::floor((x - grid.origin.x) / grid.dx));
        int j = static_cast<int>(std::floor((y - grid.origin.y) / grid.dy));
        i = std::clamp(i, 0, grid.nx - 1);
        j = std::clamp(j, 0, grid.ny - 1);
        if (surfaces.defined(i, j)) return surfaces.super_at(i, j);
        double best = std::numeric_limits<double>::infinity();
        double value = 0.0;
        for (int jj = 0; jj < grid.ny; ++jj) {
            for (int ii = 0; ii < grid.nx; ++ii) {
                if (!surfaces.defined(ii, jj)) continue;
                const Vec3 c = grid.centroid(ii, jj, 0);
                const double dx = c.x - x, dy = c.y - y;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best) {
                    best = d2;
                    value = surfaces.super_at(ii, jj);
                }
            }
        }
        return value;
    }
};

void write_surfaces_csv(const fs::path& path, const GridSpec& grid, const SurfacePair& surfaces) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << schema_line("surfaces", 1) << "\n";
    out << "i,j,super,sub\n";
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            if (!surfaces.defined(i, j)) continue;
            out << i << ',' << j << ',' << fmt_full(surfaces.super_at(i, j)) << ','
                << fmt_full(surfaces.sub_at(i, j)) << "\n";
        }
    }
}

SurfacePair read_surfaces_csv(const fs::path& path, const GridSpec& grid) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "surfaces", 1);
    const int ci = t.require_column("i");
    const int cj = t.require_column("j");
    const int cs = t.require_column("super");
    const int cb = t.require_column("sub");
    SurfacePair out;
    out.nx = grid.nx;
    out.ny = grid.ny;
    out.super.assign(grid.column_count(), std::numeric_limits<double>::quiet_NaN());
    out.sub.assign(grid.column_count(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        long long i, j;
        double sup, sub;
        if (!parse_int(t.cell(r, ci), i) || !parse_int(t.cell(r, cj), j) ||
            !parse_number(t.cell(r, cs), sup) || !parse_number(t.cell(r, cb), sub)) {
            throw std::runtime_error(t.source + ": malformed surface row");
        }
        out.super[grid.column_index(static_cast<int>(i), static_cast<int>(j))] = sup;
        out.sub[grid.column_index(static_cast<int>(i), static_cast<int>(j))] = sub;
    }
    return out;
}

std::string binary_layer_name(const std::string& attribute, const std::string& code) {
    return attribute + ":" + code;
}

fs::path unit_mask_path(const fs::path& out, const std::string& layer_name) {
    return out / ("mask_unit_" + sanitize_name(layer_name) + ".csv");
}

// evidence_index.csv rows: kind,name,file,bounds
struct EvidenceIndexEntry {
    std::string kind;
    std::string name;
    std::string file;
    std::string bounds;
};

void write_evidence_index(const fs::path& path, const std::vector<EvidenceIndexEntry>& entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << schema_line("evidence_index", 1) << "\n";
    out << "kind,name,file,bounds\n";
    for (const auto& e : entries) {
        out << e.kind << ',' << e.name << ',' << e.file << ',' << e.bounds << "\n";
    }
}

std::vector<EvidenceIndexEntry> read_evidence_index(const fs::path& path) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "evidence_index", 1);
    const int ck = t.require_column("kind");
    const int cn = t.require_column("name");
    const int cf = t.require_column("file");
    const int cb = t.require_column("bounds");
    std::vector<EvidenceIndexEntry> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out.push_back({t.cell(r, ck), t.cell(r, cn), t.cell(r, cf), t.cell(r, cb)});
    }
    return out;
}

std::vector<double> read_bounds_csv(const fs::path& path) {
    const CsvTable t = read_csv_file(path);
    require_schema(t, "bounds", 1);
    const int cv = t.require_column("value");
    std::vector<double> bounds;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        double v;
        if (!parse_number(t.cell(r, cv), v)) throw std::runtime_error(t.source + ": bad bound value");
        bounds.push_back(v);
    }
    return bounds;
}

void write_bounds_csv(const fs::path& path, std::span<const double> bounds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << schema_line("bounds", 1) << "\n";
    out << "class,value\n";
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        out << i << ',' << fmt_full(bounds[i]) << "\n";
    }
}

VolumeMask defined_mask(const ProbabilityModel& model) {
    VolumeMask mask(model.grid);
    for (std::size_t idx = 0; idx < model.studentized_defined.size(); ++idx) {
        if (model.space.test(idx) && model.studentized_defined[idx]) mask.set(idx, true);
    }
    return mask;
}

}  // namespace

void stage_ingest(const PipelineConfig& cfg, const fs::path& out, unsigned /*threads*/) {
    fs::create_directories(out);
    run_step("ingest", [&] {
        require_input(cfg.collars, "collar");
        require_input(cfg.intervals, "interval");
        require_input(cfg.assays, "assay");
        if (!cfg.faults.empty()) require_input(cfg.faults, "fault");
        if (!cfg.map_raster.empty()) require_input(cfg.map_raster, "map raster");
        if (!cfg.sections.empty()) require_input(cfg.sections, "section");

        const BoreholeSet set = parse_boreholes(read_csv_file(cfg.collars),
                                                read_csv_file(cfg.intervals),
                                                read_csv_file(cfg.assays));
        const double step = cfg.step();

        for (const auto& attribute : cfg.categorical_attributes) {
            auto logs = set.logs_for(attribute);
            if (logs.empty()) {
                throw std::runtime_error("no intervals found for attribute '" + attribute + "'");
            }
            auto samples = desurvey(set, logs, step);
            if (!cfg.sections.empty()) {
                for (auto& s : read_section_samples(cfg.sections, attribute)) {
                    samples.push_back(std::move(s));
                }
            }
            write_samples_csv(out / ("samples_" + sanitize_name(attribute) + ".csv"), samples);
        }

        std::set<std::string> elements(cfg.evidence_elements.begin(), cfg.evidence_elements.end());
        elements.insert(cfg.training_element);
        std::vector<std::pair<std::string, std::string>> units;
        for (const auto& element : elements) {
            auto logs = set.logs_for(element);
            if (logs.empty()) throw std::runtime_error("no assays found for element '" + element + "'");
            write_samples_csv(out / ("samples_" + sanitize_name(element) + ".csv"),
                              desurvey(set, logs, step));
            units.emplace_back(element, set.assay_unit(element));
        }
        write_kv_csv(out / "units.csv", "units", units);

        Polygon2D hull;
        if (!cfg.hull.empty()) {
            hull = Polygon2D(cfg.hull);
        } else {
            std::vector<Vec2> collar_xy;
            for (const auto& c : set.collars()) collar_xy.push_back({c.x, c.y});
            hull = convex_hull(collar_xy);
        }
        const SurfacePair surfaces = surfaces_from_collars(set.collars(), cfg.grid,
                                                           cfg.surface_method);
        const VolumeMask space = build_model_space(cfg.grid, hull, surfaces);
        write_grid_file(out / "grid.txt", cfg.grid, hull);
        write_surfaces_csv(out / "surfaces.csv", cfg.grid, surfaces);
        write_mask_csv(out / "mask_space.csv", space);
        return 0;
    });
}

void stage_interp(const PipelineConfig& cfg, const fs::path& out, unsigned threads) {
    run_step("interp", [&] {
        const auto [grid, hull] = read_grid_file(out / "grid.txt");
        const VolumeMask space = read_mask_csv(out / "mask_space.csv", grid);

        for (const auto& attribute : cfg.categorical_attributes) {
            auto samples = read_samples_csv(out / ("samples_" + sanitize_name(attribute) + ".csv"));
            CategoricalModel model = nearest_value(std::move(samples), space, threads);
            if (!cfg.map_raster.empty()) {
                model = constrain_surface(std::move(model), read_map_raster(cfg.map_raster, grid));
            }
            write_categorical_csv(out / ("model_" + sanitize_name(attribute) + ".csv"), model);
        }

        const auto units = read_kv_csv(out / "units.csv", "units");
        IdwParams params;
        params.power = cfg.idw_power;
        params.sectors = cfg.idw_sectors;
        params.z_anisotropy = cfg.z_anisotropy;
        params.threads = threads;
        for (const auto& [element, unit] : units) {
            auto samples = read_samples_csv(out / ("samples_" + sanitize_name(element) + ".csv"));
            ContinuousModel model = idw_anisotropic(std::move(samples), space, params);
            model.unit = unit;
            write_continuous_csv(out / ("model_" + sanitize_name(element) + ".csv"), model);
        }
        return 0;
    });
}

void stage_evidence(const PipelineConfig& cfg, const fs::path& out, unsigned threads) {
    const auto [grid, hull] = run_step("evidence", [&] { return read_grid_file(out / "grid.txt"); });
    const VolumeMask space =
        run_step("evidence", [&] { return read_mask_csv(out / "mask_space.csv", grid); });

    // training model binarized at the cutoff; its voxel fraction is the prior
    run_step("binarize", [&] {
        const ContinuousModel training_model = read_continuous_csv(
            out / ("model_" + sanitize_name(cfg.training_element) + ".csv"), space);
        if (training_model.unit != cfg.training_unit) {
            throw std::runtime_error("training cutoff unit '" + cfg.training_unit +
                                     "' does not match the " + cfg.training_element + " model unit '" +
                                     training_model.unit + "'");
        }
        VolumeMask training(grid);
        for (std::size_t idx = 0; idx < space.size(); ++idx) {
            if (space.test(idx) && training_model.values[idx] >= cfg.training_cutoff) {
                training.set(idx, true);
            }
        }
        if (training.active_count() == 0) {
            throw DegenerateTrainingError("no voxel reaches the training cutoff " +
                                          fmt_digits(cfg.training_cutoff, 6) + " " + cfg.training_unit);
        }
        if (training.active_count() == space.active_count()) {
            throw DegenerateTrainingError("every active voxel reaches the training cutoff");
        }
        write_mask_csv(out / "mask_training.csv", training);
        const double prior =
            cfg.prior ? *cfg.prior
                      : static_cast<double>(training.active_count()) /
                            static_cast<double>(space.active_count());
        write_kv_csv(out / "training_stats.csv", "stats",
                     {{"space_voxels", std::to_string(space.active_count())},
                      {"training_voxels", std::to_string(training.active_count())},
                      {"prior", fmt_full(prior)}});
        return 0;
    });

    std::vector<EvidenceIndexEntry> index;

    run_step("geological evidence", [&] {
        for (const auto& attribute : cfg.categorical_attributes) {
            const CategoricalModel model = read_categorical_csv(
                out / ("model_" + sanitize_name(attribute) + ".csv"), space);
            std::vector<std::string> unit_names = model.dictionary;
            std::sort(unit_names.begin(), unit_names.end());
            for (const auto& code : unit_names) {
                const std::int16_t code_id = model.dictionary_index(code);
                VolumeMask unit(grid);
                for (std::size_t idx = 0; idx < space.size(); ++idx) {
                    if (space.test(idx) && model.codes[idx] == code_id) unit.set(idx, true);
                }
                if (unit.active_count() == 0) continue;  // map-only unit absent in 3D
                const std::string name = binary_layer_name(attribute, code);
                const fs::path file = unit_mask_path(out, name);
                write_mask_csv(file, unit);
                index.push_back({"binary", name, file.filename().string(), ""});
            }
        }
        return 0;
    });

    run_step("structural evidence", [&] {
        if (cfg.faults.empty()) return 0;
        const SurfacePair surfaces = read_surfaces_csv(out / "surfaces.csv", grid);
        const SurfaceGrids lookup{surfaces, grid};
        double min_sub = std::numeric_limits<double>::infinity();
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                if (surfaces.defined(i, j)) min_sub = std::min(min_sub, surfaces.sub_at(i, j));
            }
        }
        auto traces = read_fault_traces(read_csv_file(cfg.faults));
        if (traces.empty()) return 0;
        VolumeMask fault_mask(grid);
        for (auto& trace : traces) {
            std::vector<double> elevations;
            double top = -std::numeric_limits<double>::infinity();
            for (const auto& v : trace.polyline) {
                elevations.push_back(lookup.super_near(v.x, v.y));
                top = std::max(top, elevations.back());
            }
            trace.depth = top - min_sub;  // ribbons reach the sub-face
            const RibbonMesh mesh = extrude_ribbon(trace, elevations);
            fault_mask = fault_mask | voxelize_mesh(mesh, space, threads);
        }
        write_mask_csv(out / "mask_fault.csv", fault_mask);
        index.push_back({"binary", "structure:fault", "mask_fault.csv", ""});
        for (const double radius : cfg.buffer_radii) {
            const VolumeMask buffered = buffer_mask(fault_mask, radius) & space;
            const std::string label = "structure:fault_buffer_" + fmt_digits(radius, 6) + "m";
            const fs::path file = unit_mask_path(out, label);
            write_mask_csv(file, buffered);
            index.push_back({"binary", label, file.filename().string(), ""});
        }
        return 0;
    });

    run_step("geochemical classes", [&] {
        for (const auto& element : cfg.evidence_elements) {
            const ContinuousModel model =
                read_continuous_csv(out / ("model_" + sanitize_name(element) + ".csv"), space);
            const auto bounds = decile_class_bounds(model, cfg.classes);
            std::vector<std::int32_t> class_index(space.size(), -1);
            for (std::size_t idx = 0; idx < space.size(); ++idx) {
                if (space.test(idx) && std::isfinite(model.values[idx])) {
                    class_index[idx] = class_of(model.values[idx], bounds);
                }
            }
            const std::string stem = sanitize_name(element);
            write_class_index_csv(out / ("classes_" + stem + ".csv"), grid, class_index);
            write_bounds_csv(out / ("bounds_" + stem + ".csv"), bounds);
            index.push_back({"continuous", "geochem:" + element, "classes_" + stem + ".csv",
                             "bounds_" + stem + ".csv"});
        }
        return 0;
    });

    run_step("evidence", [&] {
        write_evidence_index(out / "evidence_index.csv", index);
        return 0;
    });
}

void stage_weights(const PipelineConfig& cfg, const fs::path& out, unsigned /*threads*/) {
    run_step("weights", [&] {
        const auto [grid, hull] = read_grid_file(out / "grid.txt");
        const VolumeMask space = read_mask_csv(out / "mask_space.csv", grid);
        const VolumeMask training = read_mask_csv(out / "mask_training.csv", grid);
        const auto index = read_evidence_index(out / "evidence_index.csv");

        std::vector<EvidenceLayer> layers;
        for (const auto& entry : index) {
            if (entry.kind == "binary") {
                VolumeMask evidence = read_mask_csv(out / entry.file, grid) & space;
                layers.push_back(make_binary_layer(entry.name, std::move(evidence), training, space));
            } else {
                auto class_index = read_class_index_csv(out / entry.file, grid);
                const auto bounds = read_bounds_csv(out / entry.bounds);
                layers.push_back(make_classed_layer(entry.name, std::move(class_index), bounds,
                                                    training, space, cfg.fuzzify));
            }
        }
        layers = select_evidence(std::move(layers));
        const auto warnings = independence_warnings(layers);
        for (const auto& warning : warnings) {
            std::fprintf(stderr, "warning: %s\n", warning.c_str());
        }

        write_layer_records_csv(out / "layers.csv", layers);
        for (const auto& layer : layers) {
            write_weight_table_csv(out / ("weights_" + sanitize_name(layer.name) + ".csv"), layer);
        }
        std::vector<std::pair<std::string, std::string>> warn_rows;
        for (std::size_t i = 0; i < warnings.size(); ++i) {
            warn_rows.emplace_back("warning_" + std::to_string(i), warnings[i]);
        }
        write_kv_csv(out / "ci_warnings.csv", "warnings", warn_rows);
        return 0;
    });
}

void stage_integrate(const PipelineConfig& cfg, const fs::path& out, unsigned threads) {
    run_step("integrate", [&] {
        const auto [grid, hull] = read_grid_file(out / "grid.txt");
        const VolumeMask space = read_mask_csv(out / "mask_space.csv", grid);
        const auto stats = read_kv_csv(out / "training_stats.csv", "stats");
        double prior;
        if (!parse_number(stats.at("prior"), prior)) throw std::runtime_error("bad prior in training_stats.csv");

        auto layers = read_layer_records_csv(out / "layers.csv");
        const auto index = read_evidence_index(out / "evidence_index.csv");
        for (auto& layer : layers) {
            const auto entry = std::find_if(index.begin(), index.end(),
                                            [&](const EvidenceIndexEntry& e) { return e.name == layer.name; });
            if (entry == index.end()) {
                throw std::runtime_error("layer '" + layer.name + "' missing from evidence_index.csv");
            }
            if (layer.kind == LayerKind::binary) {
                layer.evidence = read_mask_csv(out / entry->file, grid) & space;
            } else {
                layer.class_index = read_class_index_csv(out / entry->file, grid);
            }
        }

        IntegrateOptions options;
        options.threads = threads;
        options.missing_variance = cfg.missing_variance;
        const ProbabilityModel model = integrate(prior, layers, space, options);
        write_probability_csv(out / "posterior.csv", model);
        return 0;
    });
}

void stage_threshold(const PipelineConfig& cfg, const fs::path& out, unsigned /*threads*/) {
    run_step("threshold", [&] {
        const auto [grid, hull] = read_grid_file(out / "grid.txt");
        const VolumeMask space = read_mask_csv(out / "mask_space.csv", grid);
        const ProbabilityModel model = read_probability_csv(out / "posterior.csv", space);

        const auto analyze = [&](std::span<const double> values, const VolumeMask& mask,
                                 const std::string& stem, const std::string& title) {
            const CVCurve curve = cv_curve(values, mask);
            const SegmentedFit fit = fit_segments(curve, cfg.cv_segments);
            write_cv_csv(out / ("cv_" + stem + ".csv"), curve);
            write_cvfit_csv(out / ("cvfit_" + stem + ".csv"), fit);
            write_cv_chart_svg(out / ("chart_cv_" + stem + ".svg"), curve, fit, title);
            const CategoricalModel classified = classify(values, mask, fit.breakpoints);
            write_categorical_csv(out / ("classified_" + stem + ".csv"), classified);
        };
        analyze(model.posterior, space, "posterior", "cumulative volume vs posterior probability");
        analyze(model.studentized, defined_mask(model), "studentized",
                "cumulative volume vs studentized posterior probability");
        return 0;
    });
}

void stage_validate(const PipelineConfig& cfg, const fs::path& out, unsigned /*threads*/) {
    run_step("validate", [&] {
        const auto [grid, hull] = read_grid_file(out / "grid.txt");
        const VolumeMask space = read_mask_csv(out / "mask_space.csv", grid);
        const VolumeMask training = read_mask_csv(out / "mask_training.csv", grid);
        const ProbabilityModel model = read_probability_csv(out / "posterior.csv", space);

        const auto analyze = [&](const std::vector<double>& values, const VolumeMask& mask,
                                 const std::string& stem, const std::string& title) {
            ContinuousModel raw;
            raw.grid = grid;
            raw.mask = mask;
            raw.values = values;
            const ContinuousModel fuzzy = linear_fuzzify(raw);
            const PVCurves curves = pv_curves(fuzzy, training & mask, mask, cfg.pv_thresholds);
            write_pv_csv(out / ("pv_" + stem + ".csv"), curves);
            write_pv_chart_svg(out / ("chart_pv_" + stem + ".svg"), curves, title);
        };
        analyze(model.posterior, space, "posterior", "prediction-volume: posterior probability");
        analyze(model.studentized, defined_mask(model), "studentized",
                "prediction-volume: studentized posterior probability");
        return 0;
    });
}

RunReport stage_export(const PipelineConfig& cfg, const fs::path& out, unsigned /*threads*/) {
    return run_step("export", [&] {
        const auto [grid, hull] = read_grid_file(out / "grid.txt");
        const VolumeMask space = read_mask_csv(out / "mask_space.csv", grid);
        const VolumeMask training = read_mask_csv(out / "mask_training.csv", grid);
        const ProbabilityModel model = read_probability_csv(out / "posterior.csv", space);

        RunReport report;
        report.space_voxels = space.active_count();
        report.training_voxels = training.active_count();
        const auto stats = read_kv_csv(out / "training_stats.csv", "stats");
        if (!parse_number(stats.at("prior"), report.prior)) {
            throw std::runtime_error("bad prior in training_stats.csv");
        }
        report.layers = read_layer_records_csv(out / "layers.csv");
        for (const auto& [key, value] : read_kv_csv(out / "ci_warnings.csv", "warnings")) {
            report.ci_warnings.push_back(value);
        }
        report.posterior_thresholds = read_cvfit_csv(out / "cvfit_posterior.csv").breakpoints;
        report.studentized_thresholds = read_cvfit_csv(out / "cvfit_studentized.csv").breakpoints;
        report.pv_posterior = read_pv_csv(out / "pv_posterior.csv");
        report.pv_studentized = read_pv_csv(out / "pv_studentized.csv");

        // VTK exports
        write_vtk_mask(out / "mask_space.vtk", space, "model_space");
        write_vtk_mask(out / "mask_training.vtk", training, "training");
        for (const auto& element : cfg.evidence_elements) {
            const std::string stem = sanitize_name(element);
            const ContinuousModel em = read_continuous_csv(out / ("model_" + stem + ".csv"), space);
            write_vtk_cell_scalars(out / ("model_" + stem + ".vtk"), grid, em.values, stem);
        }
        write_vtk_cell_scalars(out / "posterior.vtk", grid, model.posterior, "posterior");
        write_vtk_cell_scalars(out / "studentized.vtk", grid, model.studentized, "studentized");
        for (const char* stem : {"posterior", "studentized"}) {
            const CategoricalModel classified = read_categorical_csv(
                out / ("classified_" + std::string(stem) + ".csv"), space);
            write_vtk_categorical(out / ("classified_" + std::string(stem) + ".vtk"), classified,
                                  "anomaly_class");
        }

        // plain-text run report
        {
            std::ofstream rep(out / "run_report.txt", std::ios::binary);
            if (!rep) throw std::runtime_error("cannot write run_report.txt");
            rep << "wofe3d run report\n";
            rep << "=================\n\n";
            rep << "grid: " << grid.nx << " x " << grid.ny << " x " << grid.nz << " voxels, spacing "
                << fmt_digits(grid.dx, 6) << " x " << fmt_digits(grid.dy, 6) << " x "
                << fmt_digits(grid.dz, 6) << " m\n";
            rep << "active voxels: " << report.space_voxels << "\n";
            rep << "training voxels: " << report.training_voxels << " (" << cfg.training_element
                << " >= " << fmt_digits(cfg.training_cutoff, 6) << " " << cfg.training_unit << ")\n";
            rep << "prior probability: " << fmt_digits(report.prior, 6) << "\n\n";
            rep << "evidence layers\n";
            rep << "---------------\n";
            for (const auto& layer : report.layers) {
                if (layer.kind == LayerKind::binary) {
                    rep << (layer.included ? "[included] " : "[excluded] ") << layer.name
                        << "  W+ = " << fmt_digits(layer.weights.w_plus, 6)
                        << ", W- = " << fmt_digits(layer.weights.w_minus, 6)
                        << ", C = " << fmt_digits(layer.weights.contrast, 6)
                        << ", C/S(C) = " << fmt_digits(layer.weights.studentized, 6)
                        << (layer.continuity_corrected ? "  (zero cell corrected)" : "") << "\n";
                } else {
                    std::size_t included = 0;
                    for (const auto& c : layer.classes) included += c.included ? 1 : 0;
                    rep << "[classed ] " << layer.name << "  " << layer.classes.size()
                        << " classes, " << included << " included\n";
                    for (const auto& c : layer.classes) {
                        rep << "      " << (c.included ? "+" : "-") << " ["
                            << fmt_digits(c.lower, 6) << ", " << fmt_digits(c.upper, 6)
                            << "]  C = " << fmt_digits(c.weights.contrast, 6)
                            << ", mu = " << fmt_digits(c.fuzzy_contrast, 4)
                            << ", W_mu = " << fmt_digits(c.fuzzy_weight, 6) << "\n";
                    }
                }
            }
            rep << "\nconditional independence warnings\n";
            rep << "---------------------------------\n";
            if (report.ci_warnings.empty()) {
                rep << "none\n";
            } else {
                for (const auto& w : report.ci_warnings) rep << w << "\n";
            }
            const auto print_thresholds = [&](const char* name, const std::vector<double>& ts) {
                rep << name << " thresholds:";
                for (const double t : ts) rep << " " << fmt_digits(t, 6);
                rep << "\n";
            };
            rep << "\nfractal classification\n";
            rep << "----------------------\n";
            print_thresholds("posterior", report.posterior_thresholds);
            print_thresholds("studentized", report.studentized_thresholds);
            rep << "\nprediction-volume intersections\n";
            rep << "-------------------------------\n";
            rep << "posterior:   P = " << fmt_digits(100.0 * report.pv_posterior.p_star, 4)
                << "%, V = " << fmt_digits(100.0 * report.pv_posterior.v_star, 4) << "%\n";
            rep << "studentized: P = " << fmt_digits(100.0 * report.pv_studentized.p_star, 4)
                << "%, V = " << fmt_digits(100.0 * report.pv_studentized.v_star, 4) << "%\n";
        }

        // manifest: sorted listing with each file's schema tag
        {
            std::vector<std::string> names;
            for (const auto& e : fs::directory_iterator(out)) {
                if (!e.is_regular_file()) continue;
                const std::string name = e.path().filename().string();
                if (name == "manifest.txt") continue;
                names.push_back(name);
            }
            std::sort(names.begin(), names.end());
            std::ofstream man(out / "manifest.txt", std::ios::binary);
            if (!man) throw std::runtime_error("cannot write manifest.txt");
            man << "wofe3d output manifest\n";
            for (const auto& name : names) {
                std::string schema = "-";
                std::ifstream f(out / name, std::ios::binary);
                std::string first;
                if (std::getline(f, first)) {
                    if (!first.empty() && first.back() == '\r') first.pop_back();
                    if (first.rfind("# wofe3d-schema: ", 0) == 0) schema = first.substr(17);
                }
                man << name << "  [" << schema << "]\n";
            }
        }
        return report;
    });
}

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names{"ingest",    "interp",    "evidence", "weights",
                                                "integrate", "threshold", "validate", "export"};
    return names;
}

void run_stage(const std::string& name, const PipelineConfig& cfg, const fs::path& out,
               unsigned threads) {
    if (name == "ingest") stage_ingest(cfg, out, threads);
    else if (name == "interp") stage_interp(cfg, out, threads);
    else if (name == "evidence") stage_evidence(cfg, out, threads);
    else if (name == "weights") stage_weights(cfg, out, threads);
    else if (name == "integrate") stage_integrate(cfg, out, threads);
    else if (name == "threshold") stage_threshold(cfg, out, threads);
    else if (name == "validate") stage_validate(cfg, out, threads);
    else if (name == "export") stage_export(cfg, out, threads);
    else throw std::invalid_argument("unknown stage '" + name + "'");
}

RunReport run_pipeline(const PipelineConfig& cfg, const fs::path& out, unsigned threads) {
    fs::create_directories(out);
    fs::remove(out / "FAILED");
    try {
        stage_ingest(cfg, out, threads);
        stage_interp(cfg, out, threads);
        stage_evidence(cfg, out, threads);
        stage_weights(cfg, out, threads);
        stage_integrate(cfg, out, threads);
        stage_threshold(cfg, out, threads);
        stage_validate(cfg, out, threads);
        return stage_export(cfg, out, threads);
    } catch (const PipelineError& e) {
        std::ofstream marker(out / "FAILED", std::ios::binary);
        marker << "stage: " << e.stage() << "\n" << "error: " << e.what() << "\n";
        throw;
    }
}

}  // namespace wofe3d
