// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crowdagg/core_model.hpp"
#include "crowdagg/vector_space.hpp"

namespace crowdagg {

// Positive iff score >= threshold. threshold 0 marks every pair positive
// (0 >= 0) and is excluded from sweep grids for that reason.
LabelSet crowdtruth_labels(std::span<const UnitAnnotationScore> scores, double threshold);

// Positive iff at least half the unit's workers selected the annotation.
// When no annotation reaches half, the most-selected annotation(s) win,
// ties included; units whose vector is all zeros get no positives.
LabelSet majority_vote_labels(const VectorizedTask& task);

// One uniformly drawn worker per unit becomes the labeling. The draw is
// derived from (seed, unit_id), so it is reproducible and independent of
// unit processing order. Expects spam-filtered input.
LabelSet single_annotator_labels(const VectorizedTask& task, std::uint64_t seed);

// Micro-averaged counts over every (unit, annotation) pair of the universe;
// pairs absent from a label set are negative. Empty denominators yield 0
// for precision/recall; f1 is 0 whenever tp is 0.
EvaluationOutcome evaluate(const LabelSet& pred, const LabelSet& truth, const Universe& universe);

struct SweepPoint {
    double threshold = 0.0;
    EvaluationOutcome outcome;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // thresholds strictly increasing
    double best_threshold = 0.0;     // argmax f1, ties toward the lowest
};

// 0.05 .. 1.00 in steps of 0.05.
std::vector<double> default_threshold_grid();

// Thresholds must be non-empty, strictly increasing, each in (0, 1].
SweepResult threshold_sweep(std::span<const UnitAnnotationScore> scores, const LabelSet& truth,
                            const Universe& universe, std::span<const double> thresholds);

struct AblationPoint {
    int max_workers = 0;
    EvaluationOutcome outcome;
    std::size_t n_units_used = 0;  // units with >= 1 worker after subsampling
};

struct AblationResult {
    std::vector<AblationPoint> points;  // max_workers strictly increasing
};

// For each cap m: keep the first m workers of one fixed seeded per-unit
// permutation ("at most m"; subsamples are nested across m), rebuild the
// unit vectors over the unchanged vocabulary, rescore, relabel at the given
// threshold and evaluate against truth over the full universe.
AblationResult worker_ablation(const VectorizedTask& task, const LabelSet& truth,
                               double threshold, std::span<const int> max_workers_list,
                               std::uint64_t seed);

struct McNemarResult {
    std::uint64_t b = 0;  // method A correct, B wrong
    std::uint64_t c = 0;  // method A wrong, B correct
    double statistic = 0.0;  // (|b-c|-1)^2 / (b+c), continuity-corrected
    double p_value = 1.0;    // chi-square(1) upper tail; 1 when b+c == 0
};

McNemarResult mcnemar_test(const LabelSet& pred_a, const LabelSet& pred_b, const LabelSet& truth,
                           const Universe& universe);

struct CalibrationResult {
    double threshold = 0.0;
    std::vector<std::pair<double, std::size_t>> agreement_by_threshold;
    struct Disagreement {
        UnitId unit_id;
        AnnotationId annotation_id;
        bool crowd = false;
        bool expert = false;
    };
    std::vector<Disagreement> disagreements;  // at the chosen threshold
};

// Picks the grid threshold maximizing the number of (unit, annotation) pairs
// where the crowd labeling agrees with the expert one (ties toward the lower
// threshold) and reports the remaining disagreements for manual review.
CalibrationResult calibrate_threshold_vs_expert(std::span<const UnitAnnotationScore> scores,
                                                const LabelSet& expert, const Universe& universe,
                                                std::span<const double> grid);

}  // namespace crowdagg
