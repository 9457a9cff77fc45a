#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wofe3d/grid.hpp"
#include "wofe3d/interpolate.hpp"

namespace wofe3d {

// 2x2 voxel tally of evidence (E) against training (M) over the modeling
// space. Stored as doubles so the 0.5 continuity correction stays exact.
struct ContingencyCounts {
    double n_evidence_training = 0.0;  // N(E and M)
    double n_evidence_only = 0.0;      // N(E and not M)
    double n_training_only = 0.0;      // N(not E and M)
    double n_neither = 0.0;            // N(not E and not M)

    double n_training() const { return n_evidence_training + n_training_only; }
    double n_not_training() const { return n_evidence_only + n_neither; }
    double n_evidence() const { return n_evidence_training + n_evidence_only; }
    double n_not_evidence() const { return n_training_only + n_neither; }
    double total() const { return n_training() + n_not_training(); }
};

struct WeightRecord {
    double w_plus = 0.0;
    double w_minus = 0.0;
    double contrast = 0.0;
    double var_w_plus = 0.0;
    double var_w_minus = 0.0;
    double std_contrast = 0.0;  // S(C)
    double studentized = 0.0;   // C / S(C)

    static WeightRecord from_weights(double w_plus, double w_minus, double var_w_plus,
                                     double var_w_minus);
};

// One class of a continuous model treated as binary evidence, with its fuzzy
// membership and the fuzzy weight/variance it contributes.
struct FuzzyClassRecord {
    double lower = 0.0;
    double upper = 0.0;
    ContingencyCounts counts;
    WeightRecord weights;
    double fuzzy_contrast = 0.0;  // membership in [0, 1]
    double fuzzy_weight = 0.0;
    double fuzzy_variance = 0.0;
    bool included = true;
    bool continuity_corrected = false;
};

enum class LayerKind { binary, classed_continuous };

struct EvidenceLayer {
    std::string name;
    LayerKind kind = LayerKind::binary;

    // binary layer
    VolumeMask evidence;
    ContingencyCounts counts;
    WeightRecord weights;
    bool included = true;
    bool continuity_corrected = false;

    // classed continuous layer
    std::vector<std::int32_t> class_index;  // per voxel, -1 = missing
    std::vector<FuzzyClassRecord> classes;

    bool any_contribution() const;
};

struct ProbabilityModel {
    GridSpec grid;
    VolumeMask space;
    std::vector<double> logit;
    std::vector<double> odds;
    std::vector<double> posterior;
    std::vector<double> total_variance;
    std::vector<double> studentized;
    std::vector<std::uint8_t> studentized_defined;
};

// --- counting and weights ---------------------------------------------------

// Tallies the four-cell partition of `space`. Throws DegenerateTrainingError
// when training is empty or fills the whole space.
ContingencyCounts count_contingency(const VolumeMask& evidence, const VolumeMask& training,
                                    const VolumeMask& space);

// W+ = ln[P(E|M)/P(E|!M)], W- = ln[P(!E|M)/P(!E|!M)], variances 1/n + 1/n per
// side. Throws ZeroCellError when any cell is empty.
WeightRecord binary_weights(const ContingencyCounts& counts);

// Applies the 0.5-per-cell continuity correction when any cell is zero and
// reports whether it did.
std::pair<ContingencyCounts, bool> correct_zero_cells(ContingencyCounts counts);

// k contiguous classes with near-equal voxel counts; returns k+1 ascending
// bound values taken from the data (first = min, last = max). Classes are
// lower-inclusive: class(v) = number of interior bounds <= v.
std::vector<double> decile_class_bounds(const ContinuousModel& model, int k = 10);
int class_of(double value, std::span<const double> bounds);

// --- fuzzification ------------------------------------------------------------

struct FuzzifyOptions {
    std::optional<double> slope;   // default: max contrast maps to clamp_hi
    std::optional<double> center;  // default: mean contrast
    double clamp_lo = 0.01;
    double clamp_hi = 0.99;
};

// Logistic transform of class contrasts to memberships in [clamp_lo,
// clamp_hi]. All-equal contrasts map to 0.5.
std::vector<double> fuzzify_contrasts(std::span<const double> contrasts,
                                      const FuzzifyOptions& options = {});

// ln of the membership-mixed likelihood ratio; equals W+ at mu=1 and W- at
// mu=0.
double fuzzy_weight(const ContingencyCounts& counts, double mu);

struct PriorTerms {
    double p_e = 0.0;
    double p_m = 0.0;
    double p_m_given_e = 0.0;
    double p_m_given_not_e = 0.0;
};

PriorTerms prior_terms(const ContingencyCounts& counts);
double prior_variance(const PriorTerms& terms);
double membership_probability(double mu, double p_e);
double fuzzy_variance(double mu, const PriorTerms& terms);

// --- layers and integration ---------------------------------------------------

EvidenceLayer make_binary_layer(std::string name, VolumeMask evidence, const VolumeMask& training,
                                const VolumeMask& space);
EvidenceLayer make_continuous_layer(std::string name, const ContinuousModel& model, int classes,
                                    const VolumeMask& training, const VolumeMask& space,
                                    const FuzzifyOptions& fuzzify = {});
// Same, from a precomputed class assignment (class_index per voxel, -1 =
// missing) and its bounds.
EvidenceLayer make_classed_layer(std::string name, std::vector<std::int32_t> class_index,
                                 std::span<const double> bounds, const VolumeMask& training,
                                 const VolumeMask& space, const FuzzifyOptions& fuzzify = {});

// Marks binary layers and continuous classes with contrast <= 0 as excluded.
// Throws EmptyModelError when nothing remains.
std::vector<EvidenceLayer> select_evidence(std::vector<EvidenceLayer> layers);

// Pairs of included binary layers whose evidence masks have Jaccard overlap
// above the threshold (conditional-independence advisory).
std::vector<std::string> independence_warnings(std::span<const EvidenceLayer> layers,
                                               double jaccard_threshold = 0.9);

struct IntegrateOptions {
    unsigned threads = 0;
    // Variance contributed by a missing continuous observation.
    double missing_variance = 0.0;
};

// Sums the prior logit with each included layer's weight at the voxel (W+/W-
// for binary, the class fuzzy weight for continuous), converts to posterior
// probability, accumulates the matching variances, and studentizes. Voxels
// with zero total variance get an undefined studentized value.
ProbabilityModel integrate(double prior, std::span<const EvidenceLayer> layers,
                           const VolumeMask& space, const IntegrateOptions& options = {});

}  // namespace wofe3d
