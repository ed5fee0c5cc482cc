// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crowdagg/disagreement_metrics.hpp"
#include "crowdagg/ingest_io.hpp"

namespace crowdagg::pipeline {

// Stages communicate through files in out_dir so every intermediate can be
// audited; each subcommand recomputes deterministically from the judgment
// file and the seed, which makes a stage-by-stage run byte-identical to one
// `all` run.

enum ExitCode : int {
    kOk = 0,
    kError = 1,
    kUsage = 2,
    kMissingInput = 3,
    kConfigError = 4,
    kValidationFailure = 5,
};

struct Options {
    TaskConfig config;
    std::filesystem::path judgments_file;
    std::filesystem::path out_dir = ".";
    std::filesystem::path truth_file;
    std::filesystem::path expert_file;
    std::filesystem::path labels_file;             // evaluate: pre-built labels
    std::filesystem::path labels_a, labels_b;      // mcnemar: pre-built labels
    std::string method = "crowdtruth";             // aggregate / evaluate --labels
    std::vector<int> max_workers;                  // ablate; empty = 1..15
    std::vector<double> thresholds;                // sweep/calibrate; empty = default grid
};

struct Prepared {
    ParseResult parse;
    std::vector<Violation> violations;
    EffortCheckResult effort;  // accepted = sanitized minus effort failures
    std::shared_ptr<const AnnotationVocabulary> global_vocab;  // closed tasks
    StopwordSet stopwords;
    std::optional<EmbeddingTable> embeddings;
};

// parse -> sanitize -> effort checks; loads vocabulary/stopwords/embeddings.
Prepared prepare(const Options& options);

struct QualityOutcome {
    VectorizedTask pre_task;       // vectors over effort-accepted judgments
    MetricsResult pre_metrics;     // decision-time metrics the verdicts cite
    std::vector<SpamVerdict> verdicts;  // sorted by worker_id
    std::vector<Judgment> final_judgments;
    VectorizedTask task;           // rebuilt after spam removal
    MetricsResult metrics;         // final scores downstream stages use
    std::size_t spam_rounds = 1;
};

// Metrics -> spam verdicts (plus effort failures) -> filter -> recompute.
// With config.spam_fixpoint the detection re-runs on the survivors until no
// new worker is flagged.
QualityOutcome run_quality(const Prepared& prepared, const TaskConfig& config);

int cmd_ingest(const Options& options);
int cmd_vectorize(const Options& options);
int cmd_metrics(const Options& options);
int cmd_spam(const Options& options);
int cmd_aggregate(const Options& options);
int cmd_evaluate(const Options& options);
int cmd_sweep(const Options& options);
int cmd_ablate(const Options& options);
int cmd_mcnemar(const Options& options);
int cmd_calibrate(const Options& options);
int cmd_all(const Options& options);

}  // namespace crowdagg::pipeline
