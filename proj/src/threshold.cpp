#include "wofe3d/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wofe3d {

CVCurve cv_curve(std::span<const double> values, const VolumeMask& mask, std::size_t max_points) {
    if (values.size() != mask.size()) throw std::invalid_argument("cv_curve: value/mask size mismatch");
    CVCurve curve;
    std::vector<double> positives;
    positives.reserve(mask.active_count());
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        if (!mask.test(idx)) continue;
        const double v = values[idx];
        if (std::isfinite(v) && v > 0.0) {
            positives.push_back(v);
        } else {
            ++curve.dropped_nonpositive;
        }
    }
    if (positives.size() < 2) throw std::runtime_error("cv_curve: fewer than 2 positive values");
    std::sort(positives.begin(), positives.end());

    const auto volume_at_or_above = [&](double threshold) {
        const auto it = std::lower_bound(positives.begin(), positives.end(), threshold);
        return static_cast<double>(positives.end() - it);
    };

    std::size_t distinct = 1;
    for (std::size_t i = 1; i < positives.size(); ++i) {
        if (positives[i] != positives[i - 1]) ++distinct;
    }

    if (distinct <= max_points) {
        curve.values.reserve(distinct);
        curve.volumes.reserve(distinct);
        std::size_t remaining = positives.size();
        std::size_t i = 0;
        while (i < positives.size()) {
            std::size_t j = i;
            while (j < positives.size() && positives[j] == positives[i]) ++j;
            curve.values.push_back(positives[i]);
            curve.volumes.push_back(static_cast<double>(remaining));
            remaining -= j - i;
            i = j;
        }
    } else {
        const double lo = std::log(positives.front());
        const double hi = std::log(positives.back());
        curve.values.reserve(max_points);
        curve.volumes.reserve(max_points);
        for (std::size_t i = 0; i < max_points; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(max_points - 1);
            const double v = std::exp(lo + t * (hi - lo));
            curve.values.push_back(v);
            curve.volumes.push_back(volume_at_or_above(v));
        }
        curve.volumes.front() = static_cast<double>(positives.size());
        curve.volumes.back() = std::max(curve.volumes.back(), 1.0);
    }
    return curve;
}

namespace {

struct RunningFit {
    double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;

    void add(double x, double y) {
        n += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    double sse() const {
        const double cxx = sxx - sx * sx / n;
        const double cxy = sxy - sx * sy / n;
        const double cyy = syy - sy * sy / n;
        if (cxx <= 0.0) return std::max(cyy, 0.0);  // identical x, vertical scatter
        return std::max(cyy - cxy * cxy / cxx, 0.0);
    }
    void line(double& slope, double& intercept) const {
        const double cxx = sxx - sx * sx / n;
        const double cxy = sxy - sx * sy / n;
        slope = cxx > 0.0 ? cxy / cxx : 0.0;
        intercept = (sy - slope * sx) / n;
    }
};

}  // namespace

SegmentedFit fit_segments(const CVCurve& curve, int n_segments) {
    if (n_segments < 1) throw std::invalid_argument("fit_segments: need >= 1 segment");
    const std::size_t n = curve.values.size();
    const std::size_t k = static_cast<std::size_t>(n_segments);
    if (n < 2 * k) throw std::runtime_error("fit_segments: insufficient curve points");
    const std::size_t seg_min = n >= 3 * k ? 3 : 2;

    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log10(curve.values[i]);
        y[i] = std::log10(curve.volumes[i]);
    }

    // cost[i*n + j]: least-squares SSE of one line over points i..j
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(n * n, inf);
    for (std::size_t i = 0; i < n; ++i) {
        RunningFit fit;
        for (std::size_t j = i; j < n; ++j) {
            fit.add(x[j], y[j]);
            if (j - i + 1 >= seg_min) cost[i * n + j] = fit.sse();
        }
    }

    // dp[s][j]: best SSE of s+1 segments covering points 0..j
    std::vector<std::vector<double>> dp(k, std::vector<double>(n, inf));
    std::vector<std::vector<std::size_t>> from(k, std::vector<std::size_t>(n, 0));
    for (std::size_t j = 0; j < n; ++j) dp[0][j] = cost[j];
    for (std::size_t s = 1; s < k; ++s) {
        for (std::size_t j = seg_min * (s + 1) - 1; j < n; ++j) {
            for (std::size_t i = seg_min * s; i + seg_min - 1 <= j; ++i) {
                if (dp[s - 1][i - 1] == inf) continue;
                const double total = dp[s - 1][i - 1] + cost[i * n + j];
                if (total < dp[s][j]) {
                    dp[s][j] = total;
                    from[s][j] = i;
                }
            }
        }
    }
    if (dp[k - 1][n - 1] == inf) throw std::runtime_error("fit_segments: no feasible segmentation");

    SegmentedFit out;
    out.total_sse = dp[k - 1][n - 1];
    std::vector<std::pair<std::size_t, std::size_t>> ranges(k);
    std::size_t j = n - 1;
    for (std::size_t s = k; s-- > 0;) {
        const std::size_t i = s == 0 ? 0 : from[s][j];
        ranges[s] = {i, j};
        if (s > 0) j = i - 1;
    }
    for (std::size_t s = 0; s < k; ++s) {
        const auto [first, last] = ranges[s];
        RunningFit fit;
        for (std::size_t p = first; p <= last; ++p) fit.add(x[p], y[p]);
        FitSegment seg;
        seg.first = first;
        seg.last = last;
        seg.value_lo = curve.values[first];
        seg.value_hi = curve.values[last];
        fit.line(seg.slope, seg.intercept);
        seg.sse = fit.sse();
        out.segments.push_back(seg);
        if (s > 0) {
            out.breakpoints.push_back(curve.values[first]);
            out.break_indices.push_back(first);
        }
    }
    return out;
}

CategoricalModel classify(std::span<const double> values, const VolumeMask& mask,
                          std::span<const double> thresholds) {
    if (values.size() != mask.size()) throw std::invalid_argument("classify: value/mask size mismatch");
    for (std::size_t t = 1; t < thresholds.size(); ++t) {
        if (!(thresholds[t] > thresholds[t - 1])) {
            throw std::invalid_argument("classify: thresholds must be strictly ascending");
        }
    }
    CategoricalModel model;
    model.grid = mask.grid();
    model.mask = mask;
    model.codes.assign(mask.size(), -1);
    if (thresholds.empty()) {
        model.dictionary = {"background"};
    } else if (thresholds.size() == 3) {
        model.dictionary = {"background", "possible", "probable", "certain"};
    } else {
        for (std::size_t c = 0; c <= thresholds.size(); ++c) {
            model.dictionary.push_back("class_" + std::to_string(c));
        }
    }
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        if (!mask.test(idx)) continue;
        std::int16_t c = 0;
        for (const double t : thresholds) {
            if (t <= values[idx]) ++c;
        }
        model.codes[idx] = c;
    }
    return model;
}

CategoricalModel classify(const ContinuousModel& model, std::span<const double> thresholds) {
    return classify(model.values, model.mask, thresholds);
}

}  // namespace wofe3d
