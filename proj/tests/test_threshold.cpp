#include <doctest.h>

#include <cmath>
#include <random>

#include "wofe3d/threshold.hpp"

using namespace wofe3d;

namespace {

GridSpec make_grid(int n) {
    GridSpec g;
    g.nx = g.ny = g.nz = n;
    g.dx = g.dy = g.dz = 10.0;
    return g;
}

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double unit() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
};

CVCurve power_law_curve(std::size_t points, double v_lo, double v_hi,
                        const std::vector<double>& slopes, const std::vector<double>& breaks,
                        double noise, Rng& rng) {
    CVCurve curve;
    double a = 6.0;  // log10 amplitude of the first regime
    std::size_t regime = 0;
    double log_prev_v = std::log10(v_lo);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        const double lv = std::log10(v_lo) + t * (std::log10(v_hi) - std::log10(v_lo));
        while (regime < breaks.size() && lv >= std::log10(breaks[regime])) {
            // keep the law continuous across the break
            a += (slopes[regime] - slopes[regime + 1]) * std::log10(breaks[regime]);
            ++regime;
        }
        double log_volume = a + slopes[regime] * lv;
        log_volume += std::log10(1.0 + noise * (2.0 * rng.unit() - 1.0));
        curve.values.push_back(std::pow(10.0, lv));
        curve.volumes.push_back(std::pow(10.0, log_volume));
        log_prev_v = lv;
    }
    (void)log_prev_v;
    return curve;
}

}  // namespace

TEST_CASE("a constant model collapses to a single curve point") {
    const GridSpec g = make_grid(3);
    const VolumeMask mask(g, true);
    std::vector<double> values(mask.size(), 4.5);
    const CVCurve curve = cv_curve(values, mask);
    REQUIRE(curve.values.size() == 1);
    CHECK(curve.values[0] == 4.5);
    CHECK(curve.volumes[0] == static_cast<double>(mask.size()));
}

TEST_CASE("distinct values count cumulative volumes above each threshold") {
    const GridSpec g = make_grid(2);
    VolumeMask mask(g);
    std::vector<double> values(g.voxel_count(), 0.0);
    for (int i = 0; i < 3; ++i) {
        mask.set(i, true);
        values[i] = i + 1.0;  // 1, 2, 3
    }
    const CVCurve curve = cv_curve(values, mask);
    REQUIRE(curve.values.size() == 3);
    CHECK(curve.values == std::vector<double>{1, 2, 3});
    CHECK(curve.volumes == std::vector<double>{3, 2, 1});
}

TEST_CASE("the curve equals an exhaustive threshold sweep on random data") {
    Rng rng(5);
    const GridSpec g = make_grid(6);
    VolumeMask mask(g);
    std::vector<double> values(g.voxel_count(), 0.0);
    for (std::size_t i = 0; i < g.voxel_count(); ++i) {
        if (rng.unit() < 0.7) {
            mask.set(i, true);
            values[i] = std::round(rng.unit() * 40.0) / 4.0;  // some ties, some zeros
        }
    }
    const CVCurve curve = cv_curve(values, mask);
    std::size_t zero_count = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (mask.test(i) && values[i] <= 0.0) ++zero_count;
    }
    CHECK(curve.dropped_nonpositive == zero_count);
    for (std::size_t p = 0; p < curve.values.size(); ++p) {
        double expect = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (mask.test(i) && values[i] > 0.0 && values[i] >= curve.values[p]) expect += 1.0;
        }
        CHECK(curve.volumes[p] == expect);
    }
    for (std::size_t p = 1; p < curve.values.size(); ++p) {
        CHECK(curve.values[p] > curve.values[p - 1]);
        CHECK(curve.volumes[p] <= curve.volumes[p - 1]);
    }
}

TEST_CASE("a model with no positive values cannot build a curve") {
    const GridSpec g = make_grid(2);
    const VolumeMask mask(g, true);
    std::vector<double> values(mask.size(), 0.0);
    CHECK_THROWS_AS(cv_curve(values, mask), std::runtime_error);
}

TEST_CASE("more than max_points distinct values are thinned to log-spaced thresholds") {
    Rng rng(9);
    const GridSpec g = make_grid(10);
    const VolumeMask mask(g, true);
    std::vector<double> values(mask.size());
    for (auto& v : values) v = 0.1 + rng.unit() * 99.9;
    const CVCurve curve = cv_curve(values, mask, 64);
    CHECK(curve.values.size() == 64);
    CHECK(curve.volumes.front() == static_cast<double>(mask.size()));
    for (std::size_t p = 1; p < curve.values.size(); ++p) {
        CHECK(curve.values[p] > curve.values[p - 1]);
        CHECK(curve.volumes[p] <= curve.volumes[p - 1]);
    }
}

TEST_CASE("an exact power law fits one segment with near-zero residual") {
    CVCurve curve;
    for (int i = 0; i < 40; ++i) {
        const double v = std::pow(10.0, i * 0.05);
        curve.values.push_back(v);
        curve.volumes.push_back(5e4 * std::pow(v, -1.7));
    }
    const SegmentedFit fit = fit_segments(curve, 1);
    REQUIRE(fit.segments.size() == 1);
    CHECK(fit.total_sse <= 1e-10);
    CHECK(fit.segments[0].slope == doctest::Approx(-1.7).epsilon(1e-9));
    CHECK(fit.breakpoints.empty());
}

TEST_CASE("a two-regime power law recovers its breakpoint within one sample") {
    Rng rng(17);
    const double break_value = 10.0;
    const CVCurve curve =
        power_law_curve(200, 1.0, 1000.0, {-0.5, -2.5}, {break_value}, 0.0, rng);
    const SegmentedFit fit = fit_segments(curve, 2);
    REQUIRE(fit.breakpoints.size() == 1);
    // within one curve sample of the planted break
    std::size_t true_idx = 0;
    while (curve.values[true_idx] < break_value) ++true_idx;
    const auto diff = static_cast<long long>(fit.break_indices[0]) -
                      static_cast<long long>(true_idx);
    CHECK(std::llabs(diff) <= 1);
}

TEST_CASE("a three-regime law recovers two ordered breakpoints") {
    Rng rng(19);
    const CVCurve curve =
        power_law_curve(240, 1.0, 1000.0, {-0.4, -1.6, -3.5}, {8.0, 120.0}, 0.0, rng);
    const SegmentedFit fit = fit_segments(curve, 3);
    REQUIRE(fit.breakpoints.size() == 2);
    CHECK(fit.breakpoints[0] < fit.breakpoints[1]);
    CHECK(fit.breakpoints[0] == doctest::Approx(8.0).epsilon(0.15));
    CHECK(fit.breakpoints[1] == doctest::Approx(120.0).epsilon(0.15));
}

TEST_CASE("residual never grows when more segments are allowed") {
    Rng rng(23);
    const CVCurve curve =
        power_law_curve(150, 1.0, 500.0, {-0.6, -2.2}, {30.0}, 0.01, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 4; ++k) {
        const SegmentedFit fit = fit_segments(curve, k);
        CHECK(fit.total_sse <= prev + 1e-12);
        prev = fit.total_sse;
    }
}

TEST_CASE("too few curve points for the requested segments is an error") {
    CVCurve curve;
    for (int i = 0; i < 5; ++i) {
        curve.values.push_back(i + 1.0);
        curve.volumes.push_back(10.0 - i);
    }
    CHECK_THROWS_WITH_AS(fit_segments(curve, 3), doctest::Contains("insufficient"),
                         std::runtime_error);
}

TEST_CASE("three thresholds classify into the four anomaly labels") {
    const GridSpec g = make_grid(2);
    const VolumeMask mask(g, true);
    std::vector<double> values(mask.size());
    const double samples[] = {0.05, 0.09, 0.12, 0.15, 0.2, 0.23, 0.5, 0.01};
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = samples[i];
    const std::vector<double> thresholds{0.09, 0.15, 0.23};
    const auto model = classify(values, mask, thresholds);
    REQUIRE(model.dictionary ==
            std::vector<std::string>{"background", "possible", "probable", "certain"});
    CHECK(model.code_at(0) == "background");  // 0.05
    CHECK(model.code_at(1) == "possible");    // 0.09 (boundary joins the class above)
    CHECK(model.code_at(3) == "probable");    // 0.15
    CHECK(model.code_at(5) == "certain");     // 0.23
    CHECK(model.code_at(6) == "certain");     // 0.5 > 0.23
}

TEST_CASE("two thresholds use generic class labels") {
    const GridSpec g = make_grid(2);
    const VolumeMask mask(g, true);
    std::vector<double> values(mask.size(), 5.0);
    values[0] = 4.0;
    const auto model = classify(values, mask, std::vector<double>{3.8, 4.9});
    CHECK(model.dictionary == std::vector<std::string>{"class_0", "class_1", "class_2"});
    CHECK(model.code_at(0) == "class_1");  // 4.0 above 3.8 only
    CHECK(model.code_at(1) == "class_2");  // 5.0 above 4.9
}

TEST_CASE("an empty threshold list yields a single background class") {
    const GridSpec g = make_grid(2);
    const VolumeMask mask(g, true);
    std::vector<double> values(mask.size(), 1.0);
    const auto model = classify(values, mask, {});
    CHECK(model.dictionary.size() == 1);
    for (std::size_t i = 0; i < mask.size(); ++i) CHECK(model.code_at(i) == "background");
}

TEST_CASE("non-ascending thresholds are rejected") {
    const GridSpec g = make_grid(2);
    const VolumeMask mask(g, true);
    std::vector<double> values(mask.size(), 1.0);
    CHECK_THROWS_AS(classify(values, mask, std::vector<double>{0.2, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(classify(values, mask, std::vector<double>{0.2, 0.2}), std::invalid_argument);
}

TEST_CASE("classification is monotone in the voxel value") {
    Rng rng(29);
    const std::vector<double> thresholds{0.1, 0.4, 0.7};
    const GridSpec g = make_grid(2);
    VolumeMask mask(g);
    mask.set(0, true);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = rng.unit(), b = rng.unit();
        std::vector<double> va(g.voxel_count(), 0.0), vb(g.voxel_count(), 0.0);
        va[0] = std::min(a, b);
        vb[0] = std::max(a, b);
        CHECK(classify(va, mask, thresholds).codes[0] <= classify(vb, mask, thresholds).codes[0]);
    }
}

TEST_CASE("curve volume at a threshold equals the classified count above it") {
    Rng rng(37);
    const GridSpec g = make_grid(5);
    const VolumeMask mask(g, true);
    std::vector<double> values(mask.size());
    for (auto& v : values) v = 0.01 + rng.unit();
    const CVCurve curve = cv_curve(values, mask);
    const std::size_t pick = curve.values.size() / 2;
    const double threshold = curve.values[pick];
    const auto classified = classify(values, mask, std::vector<double>{threshold});
    std::size_t above = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (classified.code_at(i) == "class_1") ++above;
    }
    CHECK(static_cast<double>(above) == curve.volumes[pick]);
}
