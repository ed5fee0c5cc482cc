// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include "crowdagg/core_model.hpp"

#include <algorithm>
#include <set>

namespace crowdagg {

std::optional<std::size_t> AnnotationVocabulary::entry_index(std::string_view annotation_id) const {
    auto it = std::find(entries.begin(), entries.end(), annotation_id);
    if (it == entries.end()) return std::nullopt;
    return static_cast<std::size_t>(it - entries.begin());
}

std::optional<std::size_t> AnnotationVocabulary::resolve(std::string_view raw_token) const {
    auto it = cluster_map.find(std::string(raw_token));
    if (it == cluster_map.end()) return std::nullopt;
    return entry_index(it->second);
}

std::size_t WorkerVector::popcount() const {
    std::size_t n = 0;
    for (auto b : bits) n += b != 0;
    return n;
}

const char* to_string(LabelMethod method) {
    switch (method) {
        case LabelMethod::crowdtruth: return "crowdtruth";
        case LabelMethod::majority_vote: return "majority_vote";
        case LabelMethod::single: return "single";
        case LabelMethod::expert: return "expert";
        case LabelMethod::trusted: return "trusted";
    }
    return "?";
}

std::optional<LabelMethod> parse_label_method(std::string_view name) {
    if (name == "crowdtruth") return LabelMethod::crowdtruth;
    if (name == "majority_vote" || name == "majority") return LabelMethod::majority_vote;
    if (name == "single") return LabelMethod::single;
    if (name == "expert") return LabelMethod::expert;
    if (name == "trusted") return LabelMethod::trusted;
    return std::nullopt;
}

bool LabelSet::positive(const UnitId& unit, const AnnotationId& annotation) const {
    auto it = labels.find({unit, annotation});
    return it != labels.end() && it->second;
}

void LabelSet::set(const UnitId& unit, const AnnotationId& annotation, bool value) {
    labels[{unit, annotation}] = value;
}

std::size_t LabelSet::positives() const {
    std::size_t n = 0;
    for (const auto& [key, value] : labels) n += value;
    return n;
}

void Universe::add_unit(const UnitId& unit, std::vector<AnnotationId> annotations) {
    units_[unit] = std::move(annotations);
}

std::size_t Universe::total_pairs() const {
    std::size_t n = 0;
    for (const auto& [unit, annotations] : units_) n += annotations.size();
    return n;
}

bool Universe::contains(const UnitId& unit, const AnnotationId& annotation) const {
    auto it = units_.find(unit);
    if (it == units_.end()) return false;
    return std::find(it->second.begin(), it->second.end(), annotation) != it->second.end();
}

const char* to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::duplicate_judgment: return "duplicate_judgment";
        case Violation::Kind::unknown_annotation: return "unknown_annotation";
        case Violation::Kind::empty_judgment: return "empty_judgment";
        case Violation::Kind::too_many_annotations: return "too_many_annotations";
        case Violation::Kind::task_mismatch: return "task_mismatch";
    }
    return "?";
}

std::vector<Violation> validate_dataset(std::span<const Judgment> judgments,
                                        const AnnotationVocabulary* vocab,
                                        const ValidationOptions& options) {
    return sanitize_dataset(judgments, vocab, options).violations;
}

SanitizeResult sanitize_dataset(std::span<const Judgment> judgments,
                                const AnnotationVocabulary* vocab,
                                const ValidationOptions& options) {
    SanitizeResult result;
    std::set<std::pair<WorkerId, UnitId>> seen;

    for (const auto& j : judgments) {
        bool keep = true;
        if (!seen.insert({j.worker_id, j.unit_id}).second) {
            result.violations.push_back({Violation::Kind::duplicate_judgment, j.worker_id, j.unit_id,
                                         "more than one judgment for this (worker, unit) pair"});
            keep = false;
        }
        if (j.raw_annotations.empty() && j.justification.empty()) {
            result.violations.push_back({Violation::Kind::empty_judgment, j.worker_id, j.unit_id,
                                         "no annotations and no justification"});
            keep = false;
        }
        if (options.max_annotations > 0 &&
            j.raw_annotations.size() > static_cast<std::size_t>(options.max_annotations)) {
            result.violations.push_back(
                {Violation::Kind::too_many_annotations, j.worker_id, j.unit_id,
                 std::to_string(j.raw_annotations.size()) + " annotations, cap is " +
                     std::to_string(options.max_annotations)});
            keep = false;
        }
        if (!options.expected_task_id.empty() && j.task_id != options.expected_task_id) {
            result.violations.push_back({Violation::Kind::task_mismatch, j.worker_id, j.unit_id,
                                         "task_id '" + j.task_id + "' does not match '" +
                                             options.expected_task_id + "'"});
            keep = false;
        }
        if (vocab != nullptr) {
            for (const auto& token : j.raw_annotations) {
                if (!vocab->resolve(token)) {
                    result.violations.push_back({Violation::Kind::unknown_annotation, j.worker_id,
                                                 j.unit_id,
                                                 "token '" + token + "' not in vocabulary"});
                    keep = false;
                }
            }
        }
        if (keep) result.kept.push_back(j);
    }
    return result;
}

}  // namespace crowdagg
