#include "wofe3d/wofe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wofe3d/error.hpp"
#include "wofe3d/parallel.hpp"

namespace wofe3d {

ZeroCellError::ZeroCellError(int cell)
    : std::runtime_error("contingency table has an empty cell (" +
                         std::string(cell == 0   ? "evidence&training"
                                     : cell == 1 ? "evidence&!training"
                                     : cell == 2 ? "!evidence&training"
                                                 : "!evidence&!training") +
                         ")"),
      cell_(cell) {}

ZeroCellError::ZeroCellError(const std::string& what, int cell) : std::runtime_error(what), cell_(cell) {}

PipelineError::PipelineError(std::string stage, const std::string& cause)
    : std::runtime_error(stage + ": " + cause), stage_(std::move(stage)) {}

namespace {

struct Likelihoods {
    double p_e_given_m;
    double p_e_given_not_m;
    double p_not_e_given_m;
    double p_not_e_given_not_m;
};

Likelihoods likelihoods(const ContingencyCounts& c) {
    return {c.n_evidence_training / c.n_training(), c.n_evidence_only / c.n_not_training(),
            c.n_training_only / c.n_training(), c.n_neither / c.n_not_training()};
}

}  // namespace

WeightRecord WeightRecord::from_weights(double w_plus, double w_minus, double var_w_plus,
                                        double var_w_minus) {
    WeightRecord r;
    r.w_plus = w_plus;
    r.w_minus = w_minus;
    r.contrast = w_plus - w_minus;
    r.var_w_plus = var_w_plus;
    r.var_w_minus = var_w_minus;
    r.std_contrast = std::sqrt(var_w_plus + var_w_minus);
    r.studentized = r.std_contrast > 0.0 ? r.contrast / r.std_contrast : 0.0;
    return r;
}

bool EvidenceLayer::any_contribution() const {
    if (kind == LayerKind::binary) return included;
    return std::any_of(classes.begin(), classes.end(),
                       [](const FuzzyClassRecord& c) { return c.included; });
}

ContingencyCounts count_contingency(const VolumeMask& evidence, const VolumeMask& training,
                                    const VolumeMask& space) {
    if (!evidence.is_subset_of(space)) throw std::invalid_argument("evidence must be within the space");
    if (!training.is_subset_of(space)) throw std::invalid_argument("training must be within the space");
    if (training.active_count() == 0) throw DegenerateTrainingError("training mask is empty");
    if (training.active_count() == space.active_count()) {
        throw DegenerateTrainingError("training mask covers the whole modeling space");
    }
    ContingencyCounts c;
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        if (!space.test(idx)) continue;
        const bool e = evidence.test(idx);
        const bool m = training.test(idx);
        if (e && m) c.n_evidence_training += 1.0;
        else if (e) c.n_evidence_only += 1.0;
        else if (m) c.n_training_only += 1.0;
        else c.n_neither += 1.0;
    }
    return c;
}

WeightRecord binary_weights(const ContingencyCounts& c) {
    if (c.n_evidence_training == 0.0) throw ZeroCellError(0);
    if (c.n_evidence_only == 0.0) throw ZeroCellError(1);
    if (c.n_training_only == 0.0) throw ZeroCellError(2);
    if (c.n_neither == 0.0) throw ZeroCellError(3);
    const Likelihoods lk = likelihoods(c);
    const double w_plus = std::log(lk.p_e_given_m / lk.p_e_given_not_m);
    const double w_minus = std::log(lk.p_not_e_given_m / lk.p_not_e_given_not_m);
    const double var_plus = 1.0 / c.n_evidence_training + 1.0 / c.n_evidence_only;
    const double var_minus = 1.0 / c.n_training_only + 1.0 / c.n_neither;
    return WeightRecord::from_weights(w_plus, w_minus, var_plus, var_minus);
}

std::pair<ContingencyCounts, bool> correct_zero_cells(ContingencyCounts counts) {
    const bool any_zero = counts.n_evidence_training == 0.0 || counts.n_evidence_only == 0.0 ||
                          counts.n_training_only == 0.0 || counts.n_neither == 0.0;
    if (any_zero) {
        counts.n_evidence_training += 0.5;
        counts.n_evidence_only += 0.5;
        counts.n_training_only += 0.5;
        counts.n_neither += 0.5;
    }
    return {counts, any_zero};
}

std::vector<double> decile_class_bounds(const ContinuousModel& model, int k) {
    if (k < 2) throw std::invalid_argument("class count must be >= 2");
    std::vector<double> values;
    values.reserve(model.mask.active_count());
    for (std::size_t idx = 0; idx < model.values.size(); ++idx) {
        if (model.mask.test(idx) && std::isfinite(model.values[idx])) values.push_back(model.values[idx]);
    }
    std::sort(values.begin(), values.end());
    if (values.empty()) throw std::runtime_error("decile_class_bounds: no values");
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] != values[i - 1]) ++distinct;
    }
    if (distinct < static_cast<std::size_t>(k)) {
        throw std::runtime_error("decile_class_bounds: fewer distinct values than classes");
    }

    std::vector<double> bounds;
    bounds.reserve(k + 1);
    bounds.push_back(values.front());
    const std::size_t n = values.size();
    for (int c = 1; c < k; ++c) {
        const std::size_t pos = n * static_cast<std::size_t>(c) / static_cast<std::size_t>(k);
        double candidate = values[pos];
        if (candidate <= bounds.back()) {
            // ties straddle the cut point: advance to the next distinct value
            const auto it = std::upper_bound(values.begin(), values.end(), bounds.back());
            if (it == values.end()) {
                throw std::runtime_error("decile_class_bounds: ties leave too few distinct values");
            }
            candidate = *it;
        }
        bounds.push_back(candidate);
    }
    if (values.back() <= bounds.back()) {
        throw std::runtime_error("decile_class_bounds: ties leave too few distinct values");
    }
    bounds.push_back(values.back());
    return bounds;
}

int class_of(double value, std::span<const double> bounds) {
    const int k = static_cast<int>(bounds.size()) - 1;
    int c = 0;
    for (int b = 1; b < k; ++b) {
        if (bounds[b] <= value) c = b;
    }
    return c;
}

std::vector<double> fuzzify_contrasts(std::span<const double> contrasts,
                                      const FuzzifyOptions& options) {
    if (contrasts.size() < 2) throw std::invalid_argument("fuzzify_contrasts: need >= 2 classes");
    const auto [min_it, max_it] = std::minmax_element(contrasts.begin(), contrasts.end());
    if (*min_it == *max_it) return std::vector<double>(contrasts.size(), 0.5);

    double center;
    if (options.center) {
        center = *options.center;
    } else {
        double sum = 0.0;
        for (const double c : contrasts) sum += c;
        center = sum / static_cast<double>(contrasts.size());
    }
    double slope;
    if (options.slope) {
        slope = *options.slope;
    } else {
        // place the largest contrast exactly at the upper clamp
        const double target = std::log(options.clamp_hi / (1.0 - options.clamp_hi));
        const double span = *max_it - center;
        slope = span > 0.0 ? target / span : 1.0;
    }

    std::vector<double> mu;
    mu.reserve(contrasts.size());
    for (const double c : contrasts) {
        const double raw = 1.0 / (1.0 + std::exp(-slope * (c - center)));
        mu.push_back(std::clamp(raw, options.clamp_lo, options.clamp_hi));
    }
    return mu;
}

double fuzzy_weight(const ContingencyCounts& counts, double mu) {
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("fuzzy_weight: mu must be in [0, 1]");
    const Likelihoods lk = likelihoods(counts);
    const double numerator = mu * lk.p_e_given_m + (1.0 - mu) * lk.p_not_e_given_m;
    const double denominator = mu * lk.p_e_given_not_m + (1.0 - mu) * lk.p_not_e_given_not_m;
    if (numerator == 0.0 || denominator == 0.0) {
        throw ZeroCellError("fuzzy_weight: zero mixed likelihood", -1);
    }
    return std::log(numerator / denominator);
}

PriorTerms prior_terms(const ContingencyCounts& c) {
    PriorTerms t;
    t.p_e = c.n_evidence() / c.total();
    t.p_m = c.n_training() / c.total();
    t.p_m_given_e = c.n_evidence() > 0.0 ? c.n_evidence_training / c.n_evidence() : 0.0;
    t.p_m_given_not_e = c.n_not_evidence() > 0.0 ? c.n_training_only / c.n_not_evidence() : 0.0;
    return t;
}

double prior_variance(const PriorTerms& t) {
    const double de = t.p_m_given_e - t.p_m;
    const double dn = t.p_m_given_not_e - t.p_m;
    return de * de * t.p_e + dn * dn * (1.0 - t.p_e);
}

double membership_probability(double mu, double p_e) { return mu * p_e + (1.0 - mu) * (1.0 - p_e); }

double fuzzy_variance(double mu, const PriorTerms& terms) {
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("fuzzy_variance: mu must be in [0, 1]");
    const double p_mu = membership_probability(mu, terms.p_e);
    if (p_mu == 0.0) throw std::runtime_error("fuzzy_variance: membership probability is zero");
    return 2.0 * mu * (1.0 - mu) / p_mu * prior_variance(terms);
}

EvidenceLayer make_binary_layer(std::string name, VolumeMask evidence, const VolumeMask& training,
                                const VolumeMask& space) {
    EvidenceLayer layer;
    layer.name = std::move(name);
    layer.kind = LayerKind::binary;
    const auto raw = count_contingency(evidence, training, space);
    const auto [counts, corrected] = correct_zero_cells(raw);
    layer.counts = counts;
    layer.continuity_corrected = corrected;
    layer.weights = binary_weights(counts);
    layer.evidence = std::move(evidence);
    return layer;
}

EvidenceLayer make_classed_layer(std::string name, std::vector<std::int32_t> class_index,
                                 std::span<const double> bounds, const VolumeMask& training,
                                 const VolumeMask& space, const FuzzifyOptions& fuzzify) {
    if (class_index.size() != space.size()) {
        throw std::invalid_argument("make_classed_layer: class index size does not match the grid");
    }
    const int k = static_cast<int>(bounds.size()) - 1;
    if (k < 2) throw std::invalid_argument("make_classed_layer: need >= 2 classes");

    EvidenceLayer layer;
    layer.name = std::move(name);
    layer.kind = LayerKind::classed_continuous;
    layer.class_index = std::move(class_index);
    layer.classes.resize(k);

    std::vector<double> contrasts(k);
    for (int c = 0; c < k; ++c) {
        VolumeMask class_mask(space.grid());
        for (std::size_t idx = 0; idx < space.size(); ++idx) {
            if (space.test(idx) && layer.class_index[idx] == c) class_mask.set(idx, true);
        }
        auto& record = layer.classes[c];
        record.lower = bounds[c];
        record.upper = bounds[c + 1];
        const auto raw = count_contingency(class_mask, training, space);
        const auto [counts, corrected] = correct_zero_cells(raw);
        record.counts = counts;
        record.continuity_corrected = corrected;
        record.weights = binary_weights(counts);
        contrasts[c] = record.weights.contrast;
    }

    const auto memberships = fuzzify_contrasts(contrasts, fuzzify);
    for (int c = 0; c < k; ++c) {
        auto& record = layer.classes[c];
        record.fuzzy_contrast = memberships[c];
        record.fuzzy_weight = fuzzy_weight(record.counts, memberships[c]);
        record.fuzzy_variance = fuzzy_variance(memberships[c], prior_terms(record.counts));
    }
    return layer;
}

EvidenceLayer make_continuous_layer(std::string name, const ContinuousModel& model, int classes,
                                    const VolumeMask& training, const VolumeMask& space,
                                    const FuzzifyOptions& fuzzify) {
    const auto bounds = decile_class_bounds(model, classes);
    std::vector<std::int32_t> class_index(space.size(), -1);
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
        if (space.test(idx) && model.mask.test(idx) && std::isfinite(model.values[idx])) {
            class_index[idx] = class_of(model.values[idx], bounds);
        }
    }
    return make_classed_layer(std::move(name), std::move(class_index), bounds, training, space,
                              fuzzify);
}

std::vector<EvidenceLayer> select_evidence(std::vector<EvidenceLayer> layers) {
    for (auto& layer : layers) {
        if (layer.kind == LayerKind::binary) {
            layer.included = layer.weights.contrast > 0.0;
        } else {
            for (auto& record : layer.classes) record.included = record.weights.contrast > 0.0;
        }
    }
    const bool any = std::any_of(layers.begin(), layers.end(),
                                 [](const EvidenceLayer& l) { return l.any_contribution(); });
    if (!any) throw EmptyModelError("select_evidence: every layer has non-positive contrast");
    return layers;
}

std::vector<std::string> independence_warnings(std::span<const EvidenceLayer> layers,
                                               double jaccard_threshold) {
    std::vector<std::string> warnings;
    for (std::size_t a = 0; a < layers.size(); ++a) {
        if (layers[a].kind != LayerKind::binary || !layers[a].included) continue;
        for (std::size_t b = a + 1; b < layers.size(); ++b) {
            if (layers[b].kind != LayerKind::binary || !layers[b].included) continue;
            const VolumeMask common = layers[a].evidence & layers[b].evidence;
            const std::size_t unions = layers[a].evidence.active_count() +
                                       layers[b].evidence.active_count() - common.active_count();
            if (unions == 0) continue;
            const double jaccard = static_cast<double>(common.active_count()) / unions;
            if (jaccard > jaccard_threshold) {
                warnings.push_back(layers[a].name + " and " + layers[b].name +
                                   " overlap heavily (Jaccard " + fmt_digits(jaccard, 3) +
                                   "); conditional independence is doubtful");
            }
        }
    }
    return warnings;
}

ProbabilityModel integrate(double prior, std::span<const EvidenceLayer> layers,
                           const VolumeMask& space, const IntegrateOptions& options) {
    if (!(prior > 0.0 && prior < 1.0)) throw std::invalid_argument("prior must be in (0, 1)");
    for (const auto& layer : layers) {
        if (layer.kind == LayerKind::binary) {
            if (layer.evidence.size() != space.size()) {
                throw std::invalid_argument("integrate: layer '" + layer.name + "' grid mismatch");
            }
        } else if (layer.class_index.size() != space.size()) {
            throw std::invalid_argument("integrate: layer '" + layer.name + "' grid mismatch");
        }
    }

    ProbabilityModel out;
    out.grid = space.grid();
    out.space = space;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.logit.assign(space.size(), nan);
    out.odds.assign(space.size(), nan);
    out.posterior.assign(space.size(), nan);
    out.total_variance.assign(space.size(), nan);
    out.studentized.assign(space.size(), nan);
    out.studentized_defined.assign(space.size(), 0);

    const double prior_logit = std::log(prior / (1.0 - prior));
    parallel_for(space.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            if (!space.test(idx)) continue;
            double logit = prior_logit;
            double variance = 0.0;
            for (const auto& layer : layers) {
                if (layer.kind == LayerKind::binary) {
                    if (!layer.included) continue;
                    if (layer.evidence.test(idx)) {
                        logit += layer.weights.w_plus;
                        variance += layer.weights.var_w_plus;
                    } else {
                        logit += layer.weights.w_minus;
                        variance += layer.weights.var_w_minus;
                    }
                } else {
                    const std::int32_t c = layer.class_index[idx];
                    if (c < 0) {
                        variance += options.missing_variance;
                        continue;
                    }
                    const auto& record = layer.classes[c];
                    if (!record.included) continue;
                    logit += record.fuzzy_weight;
                    variance += record.fuzzy_variance;
                }
            }
            const double odds = std::exp(logit);
            out.logit[idx] = logit;
            out.odds[idx] = odds;
            out.posterior[idx] = odds / (1.0 + odds);
            out.total_variance[idx] = variance;
            if (variance > 0.0) {
                out.studentized[idx] = out.posterior[idx] / std::sqrt(variance);
                out.studentized_defined[idx] = 1;
            }
        }
    });
    return out;
}

}  // namespace wofe3d
