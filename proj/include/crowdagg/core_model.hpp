// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crowdagg {

// Identifiers are opaque strings from whatever platform produced the
// judgments; they are never parsed for meaning.
using WorkerId = std::string;
using UnitId = std::string;
using AnnotationId = std::string;

// One worker's raw answer set on one media unit. Workers that picked nothing
// must say why; the empty answer with a justification is still a valid
// opinion and becomes an all-zero vector.
struct Judgment {
    WorkerId worker_id;
    UnitId unit_id;
    std::vector<std::string> raw_annotations;  // ordered, distinct tokens
    std::string justification;
    std::string task_id;
};

enum class VocabScope { global, per_unit };

// The finite, ordered answer space of a task. Closed tasks carry one global
// vocabulary (file order); open-ended tasks get one per media unit after
// answer-space reduction, with entries sorted lexicographically so vector
// indices are reproducible. cluster_map sends every raw answer token to its
// vocabulary entry (the identity for closed tasks).
struct AnnotationVocabulary {
    std::string task_id;
    VocabScope scope = VocabScope::global;
    std::vector<AnnotationId> entries;
    std::map<std::string, AnnotationId> cluster_map;

    std::optional<std::size_t> entry_index(std::string_view annotation_id) const;
    // Index of the entry a raw token maps to, if any.
    std::optional<std::size_t> resolve(std::string_view raw_token) const;
    std::size_t size() const { return entries.size(); }
};

// Boolean vector over the vocabulary: one worker's choices on one unit.
struct WorkerVector {
    WorkerId worker_id;
    UnitId unit_id;
    std::vector<std::uint8_t> bits;

    std::size_t popcount() const;
};

// Componentwise sum of the unit's worker vectors.
struct MediaUnitVector {
    UnitId unit_id;
    std::vector<std::int32_t> counts;
    std::size_t n_workers = 0;
};

struct WorkerMetrics {
    WorkerId worker_id;
    double wwa = 0.0;  // worker-worker agreement, [0,1]
    double wma = 0.0;  // worker-media unit agreement, [0,1]
    double na = 0.0;   // average annotations per unit
    std::size_t n_units = 0;
};

struct UnitAnnotationScore {
    UnitId unit_id;
    AnnotationId annotation_id;
    double score = 0.0;  // cosine clarity, [0,1]
};

enum class LabelMethod { crowdtruth, majority_vote, single, expert, trusted };

const char* to_string(LabelMethod method);
std::optional<LabelMethod> parse_label_method(std::string_view name);

// Positive/negative decisions per (unit, annotation) pair. Pairs absent from
// the map are negative.
struct LabelSet {
    LabelMethod method = LabelMethod::crowdtruth;
    std::map<std::pair<UnitId, AnnotationId>, bool> labels;
    std::optional<double> threshold;  // crowdtruth only

    bool positive(const UnitId& unit, const AnnotationId& annotation) const;
    void set(const UnitId& unit, const AnnotationId& annotation, bool value);
    std::size_t positives() const;
};

struct EvaluationOutcome {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
};

// The set of (unit, annotation) pairs every labeling is defined over: each
// unit crossed with its vocabulary entries.
class Universe {
  public:
    void add_unit(const UnitId& unit, std::vector<AnnotationId> annotations);
    const std::map<UnitId, std::vector<AnnotationId>>& units() const { return units_; }
    std::size_t total_pairs() const;
    bool contains(const UnitId& unit, const AnnotationId& annotation) const;
    bool empty() const { return units_.empty(); }

  private:
    std::map<UnitId, std::vector<AnnotationId>> units_;
};

struct Violation {
    enum class Kind {
        duplicate_judgment,    // same (worker, unit) twice
        unknown_annotation,    // token outside the closed vocabulary
        empty_judgment,        // no annotations and no justification
        too_many_annotations,  // above the configured cap
        task_mismatch,         // judgment task_id differs from the config
    };
    Kind kind;
    WorkerId worker_id;
    UnitId unit_id;
    std::string detail;
};

const char* to_string(Violation::Kind kind);

struct ValidationOptions {
    std::string expected_task_id;  // empty accepts any
    int max_annotations = 0;       // 0 = unlimited
};

// Returns every invariant violation; an empty list means the dataset is
// valid. vocab is the global vocabulary for closed tasks, null for
// open-ended ones (whose answer space emerges later).
std::vector<Violation> validate_dataset(std::span<const Judgment> judgments,
                                        const AnnotationVocabulary* vocab,
                                        const ValidationOptions& options = {});

struct SanitizeResult {
    std::vector<Judgment> kept;
    std::vector<Violation> violations;
};

// Same rules as validate_dataset, but also drops the violating judgments
// (keeping the first of a duplicate pair) so the pipeline can continue on
// messy input after reporting.
SanitizeResult sanitize_dataset(std::span<const Judgment> judgments,
                                const AnnotationVocabulary* vocab,
                                const ValidationOptions& options = {});

}  // namespace crowdagg
