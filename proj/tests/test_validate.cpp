#include <doctest.h>

#include <cmath>
#include <random>

#include "wofe3d/error.hpp"
#include "wofe3d/validate.hpp"

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

ContinuousModel model_of(const GridSpec& g, const VolumeMask& mask, std::vector<double> values) {
    ContinuousModel m;
    m.grid = g;
    m.mask = mask;
    m.values = std::move(values);
    return m;
}

}  // namespace

TEST_CASE("linear fuzzification maps the range onto the unit interval") {
    const GridSpec g = make_grid(2);
    VolumeMask mask(g);
    std::vector<double> values(g.voxel_count(), 0.0);
    const double raw[] = {2.0, 4.0, 6.0};
    for (int i = 0; i < 3; ++i) {
        mask.set(i, true);
        values[i] = raw[i];
    }
    const auto fuzzy = linear_fuzzify(model_of(g, mask, values));
    CHECK(fuzzy.values[0] == doctest::Approx(0.0));
    CHECK(fuzzy.values[1] == doctest::Approx(0.5));
    CHECK(fuzzy.values[2] == doctest::Approx(1.0));
}

TEST_CASE("fuzzification is idempotent on an exact unit-range model") {
    const GridSpec g = make_grid(2);
    VolumeMask mask(g);
    std::vector<double> values(g.voxel_count(), 0.0);
    const double raw[] = {0.0, 0.25, 1.0};
    for (int i = 0; i < 3; ++i) {
        mask.set(i, true);
        values[i] = raw[i];
    }
    const auto once = linear_fuzzify(model_of(g, mask, values));
    const auto twice = linear_fuzzify(once);
    for (int i = 0; i < 3; ++i) CHECK(twice.values[i] == once.values[i]);
}

TEST_CASE("constant models cannot be fuzzified") {
    const GridSpec g = make_grid(2);
    const VolumeMask mask(g, true);
    CHECK_THROWS_AS(linear_fuzzify(model_of(g, mask, std::vector<double>(g.voxel_count(), 7.0))),
                    std::runtime_error);
}

TEST_CASE("fuzzification preserves value order") {
    Rng rng(3);
    const GridSpec g = make_grid(4);
    const VolumeMask mask(g, true);
    std::vector<double> values(g.voxel_count());
    for (auto& v : values) v = rng.unit() * 500.0 - 100.0;
    const auto fuzzy = linear_fuzzify(model_of(g, mask, values));
    for (std::size_t a = 0; a < values.size(); ++a) {
        for (std::size_t b = a + 1; b < std::min(values.size(), a + 20); ++b) {
            if (values[a] < values[b]) CHECK(fuzzy.values[a] < fuzzy.values[b]);
            if (values[a] == values[b]) CHECK(fuzzy.values[a] == fuzzy.values[b]);
        }
    }
}

TEST_CASE("both curves start at one and the intersection closes to unity") {
    Rng rng(11);
    const GridSpec g = make_grid(10);  // 1000 voxels
    const VolumeMask space(g, true);
    VolumeMask training(g);
    for (std::size_t i = 0; i < 100; ++i) training.set(i, true);

    std::vector<double> values(space.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = 0.2 * rng.unit() + (training.test(i) ? 0.6 : 0.1);
    }
    const auto pv = pv_curves(model_of(g, space, values), training, space, 200);
    CHECK(pv.prediction.front() == 1.0);
    CHECK(pv.volume.front() == 1.0);
    CHECK(std::fabs(pv.p_star + pv.v_star - 1.0) <= 1.0 / 200.0);
    for (std::size_t i = 1; i < pv.thresholds.size(); ++i) {
        CHECK(pv.prediction[i] <= pv.prediction[i - 1]);
        CHECK(pv.volume[i] <= pv.volume[i - 1]);
    }
}

TEST_CASE("a perfect predictor intersects above one minus the prior") {
    const GridSpec g = make_grid(10);  // 1000 voxels, prior 10%
    const VolumeMask space(g, true);
    VolumeMask training(g);
    for (std::size_t i = 0; i < 100; ++i) training.set(i, true);
    std::vector<double> values(space.size(), 0.0);
    for (std::size_t i = 0; i < 100; ++i) values[i] = 1.0;
    const auto pv = pv_curves(model_of(g, space, values), training, space, 200);
    CHECK(pv.p_star >= 0.9);
    CHECK(std::fabs(pv.p_star + pv.v_star - 1.0) <= 1.0 / 200.0);
    // prediction stays perfect across the whole grid and volume drops to the prior
    CHECK(pv.prediction.back() == 1.0);
    CHECK(pv.volume.back() == doctest::Approx(0.1));
}

TEST_CASE("a perfect predictor dominates; a random one stays near the diagonal") {
    Rng rng(13);
    const GridSpec g = make_grid(10);
    const VolumeMask space(g, true);
    VolumeMask training(g);
    for (std::size_t i = 0; i < 100; ++i) training.set(i, true);

    std::vector<double> perfect(space.size(), 0.0);
    for (std::size_t i = 0; i < 100; ++i) perfect[i] = 1.0;
    const auto pv_perfect = pv_curves(model_of(g, space, perfect), training, space, 100);
    for (std::size_t i = 0; i < pv_perfect.thresholds.size(); ++i) {
        CHECK(pv_perfect.prediction[i] >= pv_perfect.volume[i] - 1e-12);
    }

    std::vector<double> random(space.size());
    for (auto& v : random) v = rng.unit();
    const auto pv_random = pv_curves(model_of(g, space, random), training, space, 100);
    // hypergeometric 3-sigma bound on |P - V| for 100 of 1000 voxels
    for (std::size_t i = 0; i < pv_random.thresholds.size(); ++i) {
        const double v = pv_random.volume[i];
        const double sigma = std::sqrt(std::max(v * (1.0 - v), 0.0) / 100.0);
        CHECK(std::fabs(pv_random.prediction[i] - v) <= 3.0 * sigma + 1e-9);
    }
}

TEST_CASE("the intersection depends only on value ranks") {
    Rng rng(17);
    const GridSpec g = make_grid(10);
    const VolumeMask space(g, true);
    VolumeMask training(g);
    for (std::size_t i = 0; i < 120; ++i) training.set(i, true);
    std::vector<double> values(space.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = 0.3 * rng.unit() + (training.test(i) ? 0.5 : 0.05);
    }
    const auto base = pv_curves(model_of(g, space, values), training, space, 400);
    auto cubed = values;
    for (auto& v : cubed) v = v * v * v;  // strictly increasing transform of [0,1]
    const auto transformed = pv_curves(model_of(g, space, cubed), training, space, 400);
    CHECK(std::fabs(base.p_star - transformed.p_star) <= 0.02);
    CHECK(std::fabs(base.v_star - transformed.v_star) <= 0.02);
}

TEST_CASE("degenerate validation inputs are rejected") {
    const GridSpec g = make_grid(3);
    const VolumeMask space(g, true);
    VolumeMask training(g);
    std::vector<double> values(space.size(), 0.5);
    CHECK_THROWS_AS(pv_curves(model_of(g, space, values), training, space, 100),
                    std::invalid_argument);  // empty training
    training.set(0, true);
    std::vector<double> out_of_range(space.size(), 1.5);
    CHECK_THROWS_AS(pv_curves(model_of(g, space, out_of_range), training, space, 100),
                    std::invalid_argument);
}
