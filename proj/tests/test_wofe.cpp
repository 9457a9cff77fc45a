#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "wofe3d/error.hpp"
#include "wofe3d/wofe.hpp"

using namespace wofe3d;

namespace {

GridSpec make_grid(int n) {
    GridSpec g;
    g.nx = g.ny = g.nz = n;
    g.dx = g.dy = g.dz = 10.0;
    return g;
}

ContingencyCounts counts_of(double em, double eo, double mo, double nn) {
    ContingencyCounts c;
    c.n_evidence_training = em;
    c.n_evidence_only = eo;
    c.n_training_only = mo;
    c.n_neither = nn;
    return c;
}

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double unit() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    int between(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(engine() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

ContinuousModel model_from_values(const std::vector<double>& values) {
    const int n = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(values.size()))));
    GridSpec g = make_grid(std::max(n, 1));
    ContinuousModel model;
    model.grid = g;
    model.mask = VolumeMask(g);
    model.values.assign(g.voxel_count(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < values.size(); ++i) {
        model.mask.set(i, true);
        model.values[i] = values[i];
    }
    return model;
}

}  // namespace

TEST_CASE("contingency counts: evidence equal to training partitions perfectly") {
    const GridSpec g = make_grid(5);  // 125 voxels; use 100 of them
    VolumeMask space(g);
    for (std::size_t i = 0; i < 100; ++i) space.set(i, true);
    VolumeMask training(g);
    for (std::size_t i = 0; i < 10; ++i) training.set(i, true);
    const auto c = count_contingency(training, training, space);
    CHECK(c.n_evidence_training == 10.0);
    CHECK(c.n_evidence_only == 0.0);
    CHECK(c.n_training_only == 0.0);
    CHECK(c.n_neither == 90.0);
}

TEST_CASE("contingency counts: disjoint evidence has no joint cell") {
    const GridSpec g = make_grid(5);
    VolumeMask space(g, true);
    VolumeMask training(g), evidence(g);
    for (std::size_t i = 0; i < 10; ++i) training.set(i, true);
    for (std::size_t i = 20; i < 40; ++i) evidence.set(i, true);
    const auto c = count_contingency(evidence, training, space);
    CHECK(c.n_evidence_training == 0.0);
    CHECK(c.n_evidence_only == 20.0);
    CHECK(c.n_training_only == 10.0);
    CHECK(c.total() == static_cast<double>(space.active_count()));
}

TEST_CASE("contingency counts match the per-voxel tally oracle on random masks") {
    Rng rng(42);
    const GridSpec g = make_grid(5);
    for (int trial = 0; trial < 20; ++trial) {
        VolumeMask space(g), training(g), evidence(g);
        for (std::size_t i = 0; i < g.voxel_count(); ++i) {
            const bool in_space = rng.unit() < 0.8;
            space.set(i, in_space);
            if (in_space) {
                training.set(i, rng.unit() < 0.3);
                evidence.set(i, rng.unit() < 0.4);
            }
        }
        if (training.active_count() == 0 || training.active_count() == space.active_count()) continue;
        const auto c = count_contingency(evidence, training, space);
        double em = 0, eo = 0, mo = 0, nn = 0;
        for (std::size_t i = 0; i < g.voxel_count(); ++i) {
            if (!space.test(i)) continue;
            const bool e = evidence.test(i), m = training.test(i);
            em += e && m;
            eo += e && !m;
            mo += !e && m;
            nn += !e && !m;
        }
        CHECK(c.n_evidence_training == em);
        CHECK(c.n_evidence_only == eo);
        CHECK(c.n_training_only == mo);
        CHECK(c.n_neither == nn);
    }
}

TEST_CASE("degenerate training masks are rejected") {
    const GridSpec g = make_grid(3);
    VolumeMask space(g, true);
    VolumeMask empty(g);
    CHECK_THROWS_AS(count_contingency(empty, empty, space), DegenerateTrainingError);
    CHECK_THROWS_AS(count_contingency(empty, space, space), DegenerateTrainingError);
}

TEST_CASE("an uninformative table yields zero weights and contrast") {
    // P(E|M) = P(E|!M) = 0.5
    const auto w = binary_weights(counts_of(5, 45, 5, 45));
    CHECK(w.w_plus == doctest::Approx(0.0));
    CHECK(w.w_minus == doctest::Approx(0.0));
    CHECK(w.contrast == doctest::Approx(0.0));
}

TEST_CASE("contrast is the difference of the weights, matching reference rows") {
    // published-style regression rows: W+, W-, C
    const double rows[][3] = {
        {0.7046, -0.0016, 0.7062}, {0.121, -0.0026, 0.1236},  {0.6429, -0.0033, 0.6463},
        {2.2307, -0.0001, 2.2308}, {0.1105, -0.1611, 0.2716}, {0.9206, -0.0118, 0.9324},
    };
    for (const auto& row : rows) {
        const auto r = WeightRecord::from_weights(row[0], row[1], 0.01, 0.01);
        CHECK(std::fabs(r.contrast - row[2]) <= 1e-4 + 1e-9);
    }
}

TEST_CASE("studentized contrast is consistent with the standard deviation of contrast") {
    // C = 0.7062 with C/S(C) = 5.0496 implies S(C) near 0.13985
    const double c = 0.7062, c_st = 5.0496;
    const double s = c / c_st;
    CHECK(std::fabs(s - 0.13985) <= 5e-5);
    const auto r = WeightRecord::from_weights(0.7046, -0.0016, s * s / 2.0, s * s / 2.0);
    CHECK(r.std_contrast == doctest::Approx(s).epsilon(1e-12));
    CHECK(std::fabs(r.studentized - c_st) <= 5e-4);
}

TEST_CASE("weight variances follow the reciprocal-count rule") {
    const auto w = binary_weights(counts_of(10, 40, 20, 80));
    CHECK(w.var_w_plus == doctest::Approx(1.0 / 10 + 1.0 / 40));
    CHECK(w.var_w_minus == doctest::Approx(1.0 / 20 + 1.0 / 80));
    CHECK(w.std_contrast == doctest::Approx(std::sqrt(w.var_w_plus + w.var_w_minus)));
    CHECK(w.studentized == doctest::Approx(w.contrast / w.std_contrast));
}

TEST_CASE("zero cells raise errors identifying the empty cell") {
    try {
        binary_weights(counts_of(0, 5, 5, 5));
        FAIL("expected ZeroCellError");
    } catch (const ZeroCellError& e) {
        CHECK(e.cell() == 0);
    }
    try {
        binary_weights(counts_of(5, 5, 5, 0));
        FAIL("expected ZeroCellError");
    } catch (const ZeroCellError& e) {
        CHECK(e.cell() == 3);
    }
}

TEST_CASE("the continuity correction adds half a voxel to every cell and is flagged") {
    const auto [corrected, flagged] = correct_zero_cells(counts_of(0, 5, 5, 5));
    CHECK(flagged);
    CHECK(corrected.n_evidence_training == 0.5);
    CHECK(corrected.n_evidence_only == 5.5);
    CHECK_NOTHROW(binary_weights(corrected));
    const auto [untouched, unflagged] = correct_zero_cells(counts_of(1, 5, 5, 5));
    CHECK(!unflagged);
    CHECK(untouched.n_evidence_training == 1.0);
}

TEST_CASE("weight signs oppose on non-degenerate tables") {
    Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const auto c = counts_of(rng.between(1, 400), rng.between(1, 400), rng.between(1, 400),
                                 rng.between(1, 400));
        const auto w = binary_weights(c);
        if (w.w_plus != 0.0 && w.w_minus != 0.0) {
            CHECK(std::signbit(w.w_plus) != std::signbit(w.w_minus));
        }
    }
}

TEST_CASE("values 1..100 split into ten classes of exactly ten voxels") {
    std::vector<double> values;
    for (int v = 1; v <= 100; ++v) values.push_back(v);
    const auto model = model_from_values(values);
    const auto bounds = decile_class_bounds(model, 10);
    REQUIRE(bounds.size() == 11);
    CHECK(bounds.front() == 1.0);
    CHECK(bounds.back() == 100.0);
    std::vector<int> histogram(10, 0);
    for (const double v : values) ++histogram[class_of(v, bounds)];
    for (const int h : histogram) CHECK(h == 10);
}

TEST_CASE("constant models cannot be classed") {
    const auto model = model_from_values(std::vector<double>(50, 3.0));
    CHECK_THROWS_WITH_AS(decile_class_bounds(model, 10), doctest::Contains("distinct"),
                         std::runtime_error);
}

TEST_CASE("class bounds equal sorted-array cut points and tolerate ties") {
    Rng rng(13);
    std::vector<double> values;
    for (int i = 0; i < 300; ++i) values.push_back(std::round(rng.unit() * 60.0));
    const auto model = model_from_values(values);
    const auto bounds = decile_class_bounds(model, 10);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    CHECK(bounds.front() == sorted.front());
    CHECK(bounds.back() == sorted.back());
    for (std::size_t b = 1; b < bounds.size(); ++b) CHECK(bounds[b] > bounds[b - 1]);
    // counts even within tie-group slack: every class non-empty
    std::vector<int> histogram(10, 0);
    for (const double v : values) ++histogram[class_of(v, bounds)];
    for (const int h : histogram) CHECK(h > 0);
}

TEST_CASE("fuzzified contrasts respect logistic symmetry about the mean") {
    const std::vector<double> contrasts{-0.4, -0.2, 0.2, 0.4};
    const auto mu = fuzzify_contrasts(contrasts);
    CHECK(mu[0] + mu[3] == doctest::Approx(1.0));
    CHECK(mu[1] + mu[2] == doctest::Approx(1.0));
}

TEST_CASE("reference contrast profile maps its extremes onto the clamps") {
    const std::vector<double> fe_contrasts{-1.6728, -0.1513, -0.0242, 0.0024, 0.0037,
                                           0.0149,  -0.031,  -0.2418, -0.068, 0.9755};
    const auto mu = fuzzify_contrasts(fe_contrasts);
    CHECK(mu[0] == doctest::Approx(0.01));
    CHECK(mu[9] == doctest::Approx(0.99));
    for (const double m : mu) {
        CHECK(m >= 0.01);
        CHECK(m <= 0.99);
    }
}

TEST_CASE("fuzzification preserves the order of contrasts") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> contrasts;
        for (int i = 0; i < 12; ++i) contrasts.push_back(rng.unit() * 4.0 - 2.0);
        std::sort(contrasts.begin(), contrasts.end());
        const auto mu = fuzzify_contrasts(contrasts);
        for (std::size_t i = 1; i < mu.size(); ++i) CHECK(mu[i] >= mu[i - 1]);
    }
}

TEST_CASE("all-equal contrasts fuzzify to one half") {
    const auto mu = fuzzify_contrasts(std::vector<double>{0.3, 0.3, 0.3});
    for (const double m : mu) CHECK(m == 0.5);
}

TEST_CASE("fuzzy weight hits the ordinary weights at the membership endpoints") {
    const auto c = counts_of(12, 230, 88, 4670);
    const auto w = binary_weights(c);
    CHECK(fuzzy_weight(c, 1.0) == doctest::Approx(w.w_plus).epsilon(1e-15));
    CHECK(fuzzy_weight(c, 0.0) == doctest::Approx(w.w_minus).epsilon(1e-15));
}

TEST_CASE("balanced counts at half membership weigh zero") {
    CHECK(fuzzy_weight(counts_of(5, 45, 5, 45), 0.5) == doctest::Approx(0.0));
}

TEST_CASE("fuzzy weight moves monotonically between the ordinary weights") {
    Rng rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = counts_of(rng.between(1, 300), rng.between(1, 300), rng.between(1, 300),
                                 rng.between(1, 300));
        const auto w = binary_weights(c);
        double prev = fuzzy_weight(c, 0.0);
        for (int step = 1; step <= 10; ++step) {
            const double cur = fuzzy_weight(c, step / 10.0);
            if (w.w_plus > w.w_minus) CHECK(cur >= prev - 1e-12);
            else CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("fuzzy variance vanishes exactly at full and zero membership") {
    const auto terms = prior_terms(counts_of(12, 230, 88, 4670));
    CHECK(fuzzy_variance(0.0, terms) == 0.0);
    CHECK(fuzzy_variance(1.0, terms) == 0.0);
}

TEST_CASE("half membership with balanced evidence reproduces the prior variance") {
    // mu = 0.5 and P(E) = 0.5 give P(mu) = 0.5, so the factor 2*mu*(1-mu)/P(mu)
    // collapses to 1
    PriorTerms terms;
    terms.p_e = 0.5;
    terms.p_m = 0.2;
    terms.p_m_given_e = 0.35;
    terms.p_m_given_not_e = 0.05;
    CHECK(membership_probability(0.5, terms.p_e) == doctest::Approx(0.5));
    CHECK(fuzzy_variance(0.5, terms) == doctest::Approx(prior_variance(terms)).epsilon(1e-15));
}

TEST_CASE("uninformative evidence has zero prior variance and zero fuzzy variance") {
    PriorTerms terms;
    terms.p_e = 0.4;
    terms.p_m = 0.2;
    terms.p_m_given_e = 0.2;
    terms.p_m_given_not_e = 0.2;
    CHECK(prior_variance(terms) == doctest::Approx(0.0));
    CHECK(fuzzy_variance(0.5, terms) == doctest::Approx(0.0));
}

TEST_CASE("selection drops non-positive contrast and keeps positive units") {
    const GridSpec g = make_grid(4);
    VolumeMask space(g, true);
    VolumeMask training(g), good(g), bad(g);
    for (std::size_t i = 0; i < 8; ++i) training.set(i, true);
    for (std::size_t i = 0; i < 6; ++i) good.set(i, true);        // mostly training
    for (std::size_t i = 20; i < 40; ++i) bad.set(i, true);       // disjoint from training
    std::vector<EvidenceLayer> layers;
    layers.push_back(make_binary_layer("good", good, training, space));
    layers.push_back(make_binary_layer("bad", bad, training, space));
    CHECK(layers[0].weights.contrast > 0.0);
    CHECK(layers[1].weights.contrast < 0.0);
    const auto selected = select_evidence(layers);
    CHECK(selected[0].included);
    CHECK(!selected[1].included);
}

TEST_CASE("positive-contrast reference rows all survive selection") {
    const double contrasts[] = {0.7062, 0.1236, 0.6463, 2.2308, 0.2716, 0.9324};
    std::vector<EvidenceLayer> layers;
    for (const double c : contrasts) {
        EvidenceLayer layer;
        layer.kind = LayerKind::binary;
        layer.name = "unit_" + std::to_string(layers.size());
        layer.weights = WeightRecord::from_weights(c, 0.0, 0.01, 0.01);
        layers.push_back(layer);
    }
    const auto selected = select_evidence(layers);
    for (const auto& layer : selected) CHECK(layer.included);
}

TEST_CASE("selection failing every layer raises an empty-model error") {
    EvidenceLayer layer;
    layer.kind = LayerKind::binary;
    layer.name = "hopeless";
    layer.weights = WeightRecord::from_weights(-0.3, 0.1, 0.01, 0.01);
    CHECK_THROWS_AS(select_evidence({layer}), EmptyModelError);
}

TEST_CASE("with no layers the posterior equals the prior everywhere") {
    const GridSpec g = make_grid(4);
    const VolumeMask space(g, true);
    const auto model = integrate(0.035, {}, space);
    const double expected_logit = std::log(0.035 / 0.965);
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        CHECK(model.posterior[idx] == doctest::Approx(0.035).epsilon(1e-12));
        CHECK(model.logit[idx] == doctest::Approx(expected_logit).epsilon(1e-12));
        CHECK(model.studentized_defined[idx] == 0);  // no variance accumulated
    }
    // prior logit arithmetic: ln(0.035/0.965)
    CHECK(expected_logit == doctest::Approx(-3.31678).epsilon(1e-5));
}

TEST_CASE("one binary layer reproduces the count-level Bayes posterior") {
    Rng rng(63);
    const GridSpec g = make_grid(6);
    const VolumeMask space(g, true);
    for (int trial = 0; trial < 30; ++trial) {
        VolumeMask training(g), evidence(g);
        for (std::size_t i = 0; i < space.size(); ++i) {
            training.set(i, rng.unit() < 0.2);
            evidence.set(i, rng.unit() < 0.35);
        }
        ContingencyCounts c;
        try {
            c = count_contingency(evidence, training, space);
        } catch (const DegenerateTrainingError&) {
            continue;
        }
        if (c.n_evidence_training == 0 || c.n_evidence_only == 0 || c.n_training_only == 0 ||
            c.n_neither == 0) {
            continue;
        }
        auto layer = make_binary_layer("e", evidence, training, space);
        const double prior = c.n_training() / c.total();
        const auto model = integrate(prior, std::vector<EvidenceLayer>{layer}, space);
        const double p_in = c.n_evidence_training / c.n_evidence();
        const double p_out = c.n_training_only / c.n_not_evidence();
        for (std::size_t idx = 0; idx < space.size(); ++idx) {
            const double expect = evidence.test(idx) ? p_in : p_out;
            CHECK(model.posterior[idx] == doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("posterior rises strictly with the summed weights") {
    Rng rng(71);
    std::vector<double> logits;
    for (int i = 0; i < 50; ++i) logits.push_back(rng.unit() * 10.0 - 5.0);
    std::sort(logits.begin(), logits.end());
    for (std::size_t i = 1; i < logits.size(); ++i) {
        const double pa = 1.0 / (1.0 + std::exp(-logits[i - 1]));
        const double pb = 1.0 / (1.0 + std::exp(-logits[i]));
        if (logits[i] > logits[i - 1]) CHECK(pb > pa);
    }
}

TEST_CASE("a layer with all-zero weights leaves the posterior unchanged") {
    const GridSpec g = make_grid(4);
    const VolumeMask space(g, true);
    VolumeMask training(g), evidence(g);
    for (std::size_t i = 0; i < 12; ++i) training.set(i, true);
    for (std::size_t i = 30; i < 45; ++i) evidence.set(i, true);
    auto real_layer = make_binary_layer("real", evidence, training, space);

    EvidenceLayer null_layer;
    null_layer.kind = LayerKind::binary;
    null_layer.name = "null";
    null_layer.evidence = evidence;
    null_layer.weights = WeightRecord::from_weights(0.0, 0.0, 0.0, 0.0);

    const double prior = 0.1;
    const auto base = integrate(prior, std::vector<EvidenceLayer>{real_layer}, space);
    const auto with_null =
        integrate(prior, std::vector<EvidenceLayer>{real_layer, null_layer}, space);
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        CHECK(with_null.posterior[idx] == base.posterior[idx]);
        CHECK(with_null.total_variance[idx] == base.total_variance[idx]);
    }
}

TEST_CASE("total variance adds over layer sets") {
    Rng rng(81);
    const GridSpec g = make_grid(5);
    const VolumeMask space(g, true);
    VolumeMask training(g);
    for (std::size_t i = 0; i < 20; ++i) training.set(i, true);
    std::vector<EvidenceLayer> set_a, set_b, both;
    for (int n = 0; n < 4; ++n) {
        VolumeMask evidence(g);
        for (std::size_t i = 0; i < space.size(); ++i) evidence.set(i, rng.unit() < 0.4);
        auto layer = make_binary_layer("L" + std::to_string(n), evidence, training, space);
        (n < 2 ? set_a : set_b).push_back(layer);
        both.push_back(layer);
    }
    const auto a = integrate(0.1, set_a, space);
    const auto b = integrate(0.1, set_b, space);
    const auto ab = integrate(0.1, both, space);
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        CHECK(ab.total_variance[idx] ==
              doctest::Approx(a.total_variance[idx] + b.total_variance[idx]).epsilon(1e-12));
    }
}

TEST_CASE("excluded layers contribute nothing anywhere") {
    const GridSpec g = make_grid(4);
    const VolumeMask space(g, true);
    VolumeMask training(g), evidence(g);
    for (std::size_t i = 0; i < 10; ++i) training.set(i, true);
    for (std::size_t i = 40; i < 60; ++i) evidence.set(i, true);
    auto layer = make_binary_layer("negative", evidence, training, space);
    REQUIRE(layer.weights.contrast < 0.0);
    layer.included = false;
    const auto with_layer = integrate(0.2, std::vector<EvidenceLayer>{layer}, space);
    const auto without = integrate(0.2, {}, space);
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        CHECK(with_layer.posterior[idx] == without.posterior[idx]);
    }
}

TEST_CASE("continuous layers route each voxel through its class weight") {
    const GridSpec g = make_grid(4);
    const VolumeMask space(g, true);
    VolumeMask training(g);
    for (std::size_t i = 0; i < 16; ++i) training.set(i, true);

    ContinuousModel model;
    model.grid = g;
    model.mask = space;
    model.values.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        model.values[i] = static_cast<double>(i);  // k-major gradient onto training
    }
    auto layer = make_continuous_layer("grad", model, 4, training, space);
    REQUIRE(layer.classes.size() == 4);
    // lowest class coincides with the bottom slab (the training), so its
    // contrast is strongly positive and the highest class is negative
    CHECK(layer.classes.front().weights.contrast > 0.0);
    CHECK(layer.classes.back().weights.contrast < 0.0);

    const auto prob = integrate(0.25, std::vector<EvidenceLayer>{layer}, space);
    const double prior_logit = std::log(0.25 / 0.75);
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        const auto& record = layer.classes[layer.class_index[idx]];
        CHECK(prob.logit[idx] ==
              doctest::Approx(prior_logit + record.fuzzy_weight).epsilon(1e-12));
        CHECK(prob.total_variance[idx] == doctest::Approx(record.fuzzy_variance).epsilon(1e-12));
    }
}

TEST_CASE("missing continuous observations contribute zero weight and variance") {
    const GridSpec g = make_grid(3);
    const VolumeMask space(g, true);
    EvidenceLayer layer;
    layer.kind = LayerKind::classed_continuous;
    layer.name = "sparse";
    layer.class_index.assign(space.size(), -1);  // nothing observed
    FuzzyClassRecord record;
    record.fuzzy_weight = 5.0;
    record.fuzzy_variance = 1.0;
    layer.classes = {record, record};
    const auto model = integrate(0.3, std::vector<EvidenceLayer>{layer}, space);
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        CHECK(model.posterior[idx] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(model.total_variance[idx] == 0.0);
        CHECK(model.studentized_defined[idx] == 0);
    }
}

TEST_CASE("heavily overlapping included binary layers trigger an advisory warning") {
    const GridSpec g = make_grid(4);
    const VolumeMask space(g, true);
    VolumeMask training(g), evidence(g);
    for (std::size_t i = 0; i < 10; ++i) training.set(i, true);
    for (std::size_t i = 0; i < 30; ++i) evidence.set(i, true);
    auto a = make_binary_layer("a", evidence, training, space);
    auto b = make_binary_layer("b", evidence, training, space);
    const auto warnings = independence_warnings(std::vector<EvidenceLayer>{a, b});
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("a and b") != std::string::npos);
}
