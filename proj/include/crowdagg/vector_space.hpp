// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crowdagg/config.hpp"
#include "crowdagg/core_model.hpp"

namespace crowdagg {

using StopwordSet = std::set<std::string>;

// Pretrained token -> vector table; read-only shared state during clustering.
class EmbeddingTable {
  public:
    EmbeddingTable() = default;

    // Throws FormatError on inconsistent dimensionality or duplicate token.
    void insert(std::string token, std::vector<double> values);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    // Empty span when the token is absent.
    std::span<const double> find(std::string_view token) const;

  private:
    std::size_t dim_ = 0;
    std::map<std::string, std::vector<double>, std::less<>> vectors_;
};

// Audit record of the answer-space reduction for one unit: every raw token
// lands in exactly one cluster or in removed_stopwords.
struct ReductionTrace {
    UnitId unit_id;
    struct Member {
        std::string token;
        std::string action;  // representative | spell_merge | stem_merge | semantic_merge [|no_embedding]
    };
    struct Cluster {
        AnnotationId representative;
        std::vector<Member> members;  // sorted by token
    };
    std::vector<Cluster> clusters;  // sorted by representative
    std::vector<std::string> removed_stopwords;  // sorted, distinct
};

// Distinct lowercased tokens per worker for one unit. Workers whose
// expressions were all stopwords keep an (empty) entry; their vector is
// all-zero but still counts toward the crowd size.
struct UnitTokens {
    std::map<WorkerId, std::vector<std::string>> by_worker;
    std::vector<std::string> removed_stopwords;
};

struct UnitVectors {
    UnitId unit_id;
    std::shared_ptr<const AnnotationVocabulary> vocab;
    std::vector<WorkerVector> workers;  // sorted by worker_id
    MediaUnitVector muv;
};

struct VectorizedTask {
    TaskConfig::TaskType task_type = TaskConfig::TaskType::closed;
    std::shared_ptr<const AnnotationVocabulary> global_vocab;  // closed tasks
    std::vector<UnitVectors> units;                            // sorted by unit_id
    std::vector<ReductionTrace> traces;                        // open-ended, sorted by unit_id

    Universe universe() const;
    const UnitVectors* find_unit(const UnitId& unit_id) const;
};

// Closed tasks: one vector per judgment, bit i set iff entry i was chosen.
// Throws std::invalid_argument on tokens outside the vocabulary (validation
// runs first in the pipeline).
std::vector<WorkerVector> build_closed_vectors(std::span<const Judgment> judgments,
                                               const AnnotationVocabulary& vocab);

// Open-ended tasks: split_words = true splits each expression on whitespace
// (text tasks); false keeps expressions as atomic keywords (sound task).
// Tokens are ASCII-lowercased; stopwords are dropped and recorded.
UnitTokens tokenize_expressions(std::span<const Judgment> unit_judgments,
                                const StopwordSet& stopwords, bool split_words);

struct KeywordClusters {
    std::shared_ptr<const AnnotationVocabulary> vocab;
    ReductionTrace trace;
};

// Answer-space dimensionality reduction for one unit. Syntactic pass first
// (edit-distance <= 1 merge into the more frequent form, then stemming),
// then single-link semantic merging of clusters whose members' embedding
// cosine reaches the threshold. Tokens absent from the table stay unmerged
// semantically and are marked in the trace. Cluster representative is the
// most frequent member (ties: lexicographically first); vocabulary entries
// are the representatives, sorted.
KeywordClusters cluster_keywords(const UnitTokens& tokens, const UnitId& unit_id,
                                 const std::string& task_id, const EmbeddingTable* embeddings,
                                 double similarity_threshold);

std::vector<WorkerVector> build_open_vectors(const UnitTokens& tokens,
                                             const AnnotationVocabulary& vocab,
                                             const UnitId& unit_id);

// Componentwise sum; throws std::invalid_argument on mixed vector lengths.
MediaUnitVector build_media_unit_vector(std::span<const WorkerVector> vectors,
                                        const UnitId& unit_id);

// Full vectorization of a validated dataset. global_vocab is required for
// closed tasks; embeddings may be null (syntactic clustering only).
VectorizedTask vectorize(std::span<const Judgment> judgments, const TaskConfig& config,
                         std::shared_ptr<const AnnotationVocabulary> global_vocab,
                         const StopwordSet& stopwords, const EmbeddingTable* embeddings);

}  // namespace crowdagg
