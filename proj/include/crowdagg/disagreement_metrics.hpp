// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <span>
#include <vector>

#include "crowdagg/core_model.hpp"
#include "crowdagg/vector_space.hpp"

namespace crowdagg {

// Disagreement-aware quality metrics over the vector space. All cosines use
// the conventions from kernels::cosine (two zero vectors agree, zero vs
// nonzero disagrees). Everything here is a pure function of immutable
// vectors; results do not depend on evaluation order.

// Clarity of (unit, annotation): cosine between the media unit vector and
// the annotation's one-hot vector, i.e. counts[a] / ||counts||. Zero when no
// worker chose the annotation or the whole vector is zero.
double unit_annotation_score_value(const MediaUnitVector& muv, std::size_t annotation_index);

// Throws std::invalid_argument on an unknown annotation id.
UnitAnnotationScore unit_annotation_score(const MediaUnitVector& muv,
                                          const AnnotationVocabulary& vocab,
                                          const AnnotationId& annotation_id);

// Mean over partner workers of the mean cosine between the two workers'
// vectors on the units they annotated in common; 0 when no partner shares a
// unit with the worker.
double worker_worker_agreement(const WorkerId& worker, const VectorizedTask& task);

// Leave-one-out: mean cosine between the worker's vector and the unit's
// aggregate with the worker's own vector subtracted.
double worker_media_unit_agreement(const WorkerId& worker, const VectorizedTask& task);

// Mean number of selections per annotated unit.
double avg_annotations_per_unit(const WorkerId& worker, const VectorizedTask& task);

struct MetricsResult {
    std::vector<WorkerMetrics> workers;        // sorted by worker_id
    std::vector<UnitAnnotationScore> scores;   // sorted by unit, vocabulary order
};

// One pass over the task: WorkerMetrics for every worker, a score for every
// (unit, vocabulary entry) pair.
MetricsResult compute_all_metrics(const VectorizedTask& task);

}  // namespace crowdagg
