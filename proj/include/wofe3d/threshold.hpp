#pragma once

#include <span>
#include <vector>

#include "wofe3d/grid.hpp"
#include "wofe3d/interpolate.hpp"

namespace wofe3d {

// Cumulative-volume curve: volumes[i] counts active voxels with value >=
// values[i]; values ascend, volumes are non-increasing.
struct CVCurve {
    std::vector<double> values;
    std::vector<double> volumes;
    std::size_t dropped_nonpositive = 0;
};

struct FitSegment {
    std::size_t first = 0;  // curve point range, inclusive
    std::size_t last = 0;
    double value_lo = 0.0;
    double value_hi = 0.0;
    double slope = 0.0;      // in log10-log10 space
    double intercept = 0.0;
    double sse = 0.0;
};

struct SegmentedFit {
    std::vector<FitSegment> segments;
    std::vector<double> breakpoints;        // value at the first point of each later segment
    std::vector<std::size_t> break_indices; // matching curve point indices
    double total_sse = 0.0;
};

// Threshold sweep over the active voxels of `values`. Non-positive and NaN
// entries are dropped (counted in dropped_nonpositive). Uses each distinct
// value while there are at most max_points of them, otherwise max_points
// log-spaced thresholds.
CVCurve cv_curve(std::span<const double> values, const VolumeMask& mask,
                 std::size_t max_points = 512);

// Globally optimal piecewise-linear least-squares fit of the curve in
// log10-log10 space, found by dynamic programming over curve points.
SegmentedFit fit_segments(const CVCurve& curve, int n_segments);

// class(v) = number of thresholds <= v. Three thresholds yield the labels
// background/possible/probable/certain.
CategoricalModel classify(std::span<const double> values, const VolumeMask& mask,
                          std::span<const double> thresholds);
CategoricalModel classify(const ContinuousModel& model, std::span<const double> thresholds);

}  // namespace wofe3d
