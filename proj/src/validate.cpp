#include "wofe3d/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wofe3d/error.hpp"

namespace wofe3d {

ContinuousModel linear_fuzzify(const ContinuousModel& model) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < model.values.size(); ++idx) {
        if (!model.mask.test(idx) || !std::isfinite(model.values[idx])) continue;
        lo = std::min(lo, model.values[idx]);
        hi = std::max(hi, model.values[idx]);
    }
    if (!(hi > lo)) throw std::runtime_error("linear_fuzzify: model is constant");

    ContinuousModel out = model;
    out.unit = "";
    const double scale = 1.0 / (hi - lo);
    for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
        if (out.mask.test(idx) && std::isfinite(out.values[idx])) {
            out.values[idx] = (out.values[idx] - lo) * scale;
        }
    }
    return out;
}

PVCurves pv_curves(const ContinuousModel& prospectivity, const VolumeMask& training,
                   const VolumeMask& space, int n_thresholds) {
    if (n_thresholds < 2) throw std::invalid_argument("pv_curves: need >= 2 thresholds");
    if (!training.is_subset_of(space)) throw std::invalid_argument("pv_curves: training must be within the space");
    if (training.active_count() == 0) throw std::invalid_argument("pv_curves: empty training mask");

    std::vector<double> all_values;
    std::vector<double> training_values;
    all_values.reserve(space.active_count());
    training_values.reserve(training.active_count());
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        if (!space.test(idx)) continue;
        const double v = prospectivity.values[idx];
        if (!std::isfinite(v)) continue;
        if (v < -1e-9 || v > 1.0 + 1e-9) {
            throw std::invalid_argument("pv_curves: prospectivity values must lie in [0, 1]");
        }
        all_values.push_back(v);
        if (training.test(idx)) training_values.push_back(v);
    }
    if (training_values.empty()) throw std::invalid_argument("pv_curves: no training values");
    std::sort(all_values.begin(), all_values.end());
    std::sort(training_values.begin(), training_values.end());

    const auto fraction_at_or_above = [](const std::vector<double>& sorted, double t) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
        return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
    };

    PVCurves out;
    const int n = n_thresholds;
    const double step = 1.0 / (n - 1);
    out.thresholds.reserve(n);
    out.prediction.reserve(n);
    out.volume.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double t = i * step;
        out.thresholds.push_back(t);
        out.prediction.push_back(fraction_at_or_above(training_values, t));
        out.volume.push_back(fraction_at_or_above(all_values, t));
    }

    // closing point one step past 1.0 where both curves are exactly 0, so the
    // crossing with 1 - V is always bracketed
    std::vector<double> ts = out.thresholds;
    std::vector<double> ps = out.prediction;
    std::vector<double> vs = out.volume;
    ts.push_back(1.0 + step);
    ps.push_back(0.0);
    vs.push_back(0.0);

    bool found = false;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double f0 = ps[i] - (1.0 - vs[i]);
        const double f1 = ps[i + 1] - (1.0 - vs[i + 1]);
        if (!std::isfinite(f0) || !std::isfinite(f1)) continue;
        if (f0 >= 0.0 && f1 <= 0.0 && f0 != f1) {
            const double alpha = f0 / (f0 - f1);
            out.t_star = ts[i] + alpha * (ts[i + 1] - ts[i]);
            out.p_star = ps[i] + alpha * (ps[i + 1] - ps[i]);
            out.v_star = vs[i] + alpha * (vs[i + 1] - vs[i]);
            found = true;
            break;
        }
    }
    if (!found) throw NoIntersectionError("pv_curves: prediction and volume curves do not cross");
    return out;
}

}  // namespace wofe3d
