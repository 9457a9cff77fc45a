#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "wofe3d/csv.hpp"

namespace wofe3d {

struct Collar {
    std::string hole_id;
    double x = 0.0, y = 0.0, z = 0.0;
    double total_depth = 0.0;
};

// One downhole interval; carries either a categorical code or a numeric
// concentration (with unit), keyed by `attribute`.
struct IntervalLog {
    std::string hole_id;
    double from = 0.0, to = 0.0;
    std::string attribute;  // e.g. "lithology" or an element symbol
    std::string code;       // categorical code, empty for assays
    double value = 0.0;     // assay concentration
    std::string unit;       // "%" or "ppm", assays only
};

// 3D point carrying either a categorical code (code non-empty) or a numeric
// value.
struct PointSample {
    double x = 0.0, y = 0.0, z = 0.0;
    double value = 0.0;
    std::string code;
    bool categorical() const { return !code.empty(); }
};

class BoreholeSet {
public:
    BoreholeSet() = default;
    BoreholeSet(std::vector<Collar> collars, std::vector<IntervalLog> categorical,
                std::vector<IntervalLog> assays);

    const std::vector<Collar>& collars() const { return collars_; }
    const std::vector<IntervalLog>& categorical_logs() const { return categorical_; }
    const std::vector<IntervalLog>& assay_logs() const { return assays_; }

    const Collar* find_collar(const std::string& hole_id) const;
    std::vector<IntervalLog> logs_for(const std::string& attribute) const;
    std::vector<std::string> categorical_attributes() const;  // sorted
    std::vector<std::string> assay_elements() const;          // sorted
    // Unit shared by all assays of one element ("" when the element is absent).
    std::string assay_unit(const std::string& element) const;

private:
    std::vector<Collar> collars_;
    std::vector<IntervalLog> categorical_;
    std::vector<IntervalLog> assays_;
    std::map<std::string, std::size_t> collar_index_;
};

// Validates and assembles the three input tables. Collars:
// hole_id,x,y,z,total_depth. Categorical intervals:
// hole_id,from,to,attribute,code. Assays: hole_id,from,to,element,value,unit.
// All problems are collected and thrown together, each with source:line.
BoreholeSet parse_boreholes(const CsvTable& collars, const CsvTable& categorical_intervals,
                            const CsvTable& assays);

// Splits each interval along a vertical trace into segments of at most `step`
// meters (full steps plus a shorter tail) and emits one sample per segment
// midpoint: (collar x, collar y, collar z - downhole midpoint).
std::vector<PointSample> desurvey(const BoreholeSet& set, std::span<const IntervalLog> logs,
                                  double step);

}  // namespace wofe3d
