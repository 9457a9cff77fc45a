#pragma once

#include <vector>

#include "wofe3d/grid.hpp"
#include "wofe3d/interpolate.hpp"

namespace wofe3d {

// Prediction-rate and occupied-volume curves over an ascending threshold
// grid, plus their interpolated crossing with the complement volume curve
// (P(t*) = 1 - V(t*)).
struct PVCurves {
    std::vector<double> thresholds;
    std::vector<double> prediction;  // fraction of training voxels with value >= t
    std::vector<double> volume;      // fraction of active voxels with value >= t
    double t_star = 0.0;
    double p_star = 0.0;
    double v_star = 0.0;
};

// v -> (v - min) / (max - min) over the active voxels. Throws for a constant
// model.
ContinuousModel linear_fuzzify(const ContinuousModel& model);

// Evaluates P and V at n_thresholds uniform thresholds in [0, 1] (plus one
// step past 1 so the crossing is always bracketed) and interpolates the
// intersection linearly. Prospectivity values must lie in [0, 1].
PVCurves pv_curves(const ContinuousModel& prospectivity, const VolumeMask& training,
                   const VolumeMask& space, int n_thresholds = 200);

}  // namespace wofe3d
