#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wofe3d/grid.hpp"
#include "wofe3d/interpolate.hpp"
#include "wofe3d/threshold.hpp"
#include "wofe3d/validate.hpp"
#include "wofe3d/wofe.hpp"

namespace wofe3d {

// All intermediate CSV files begin with a "# wofe3d-schema: <name> v<N>" line;
// readers reject anything else with a SchemaVersionError. Doubles are written
// with 17 significant digits so a read back restores the exact bit pattern.

void write_mask_csv(const std::filesystem::path& path, const VolumeMask& mask);
VolumeMask read_mask_csv(const std::filesystem::path& path, const GridSpec& grid);

void write_categorical_csv(const std::filesystem::path& path, const CategoricalModel& model);
CategoricalModel read_categorical_csv(const std::filesystem::path& path, const VolumeMask& mask);

void write_continuous_csv(const std::filesystem::path& path, const ContinuousModel& model);
ContinuousModel read_continuous_csv(const std::filesystem::path& path, const VolumeMask& mask);

void write_class_index_csv(const std::filesystem::path& path, const GridSpec& grid,
                           std::span<const std::int32_t> class_index);
std::vector<std::int32_t> read_class_index_csv(const std::filesystem::path& path,
                                               const GridSpec& grid);

void write_samples_csv(const std::filesystem::path& path, std::span<const PointSample> samples);
std::vector<PointSample> read_samples_csv(const std::filesystem::path& path);

void write_probability_csv(const std::filesystem::path& path, const ProbabilityModel& model);
ProbabilityModel read_probability_csv(const std::filesystem::path& path, const VolumeMask& space);

void write_grid_file(const std::filesystem::path& path, const GridSpec& grid, const Polygon2D& hull);
std::pair<GridSpec, Polygon2D> read_grid_file(const std::filesystem::path& path);

// External weight-table layout:
// lower,upper,w_plus,w_minus,contrast,studentized_contrast,fuzzy_contrast,fuzzy_weight
// Binary layers produce a single row with the unit name in `lower`.
void write_weight_table_csv(const std::filesystem::path& path, const EvidenceLayer& layer);

// Full layer records (counts, variances, memberships, flags) for resuming the
// pipeline; voxel-level data lives in the referenced mask/class files.
void write_layer_records_csv(const std::filesystem::path& path,
                             std::span<const EvidenceLayer> layers);
std::vector<EvidenceLayer> read_layer_records_csv(const std::filesystem::path& path);

void write_cv_csv(const std::filesystem::path& path, const CVCurve& curve);
CVCurve read_cv_csv(const std::filesystem::path& path);
void write_cvfit_csv(const std::filesystem::path& path, const SegmentedFit& fit);
SegmentedFit read_cvfit_csv(const std::filesystem::path& path);
void write_pv_csv(const std::filesystem::path& path, const PVCurves& curves);
PVCurves read_pv_csv(const std::filesystem::path& path);

void write_kv_csv(const std::filesystem::path& path, const std::string& schema,
                  const std::vector<std::pair<std::string, std::string>>& entries);
std::map<std::string, std::string> read_kv_csv(const std::filesystem::path& path,
                                               const std::string& schema);

// Legacy-VTK structured points with voxels as cells.
void write_vtk_cell_scalars(const std::filesystem::path& path, const GridSpec& grid,
                            std::span<const double> values, const std::string& name,
                            double fill = -9999.0);
void write_vtk_mask(const std::filesystem::path& path, const VolumeMask& mask,
                    const std::string& name);
void write_vtk_categorical(const std::filesystem::path& path, const CategoricalModel& model,
                           const std::string& name);

void write_cv_chart_svg(const std::filesystem::path& path, const CVCurve& curve,
                        const SegmentedFit& fit, const std::string& title);
void write_pv_chart_svg(const std::filesystem::path& path, const PVCurves& curves,
                        const std::string& title);

// Filesystem-safe layer/unit name ("lithology:quartz diorite" -> "lithology_quartz_diorite").
std::string sanitize_name(const std::string& name);

}  // namespace wofe3d
