// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdagg/aggregation_eval.hpp"
#include "crowdagg/config.hpp"
#include "crowdagg/core_model.hpp"
#include "crowdagg/quality_control.hpp"
#include "crowdagg/vector_space.hpp"

namespace crowdagg {

// All file formats in one place. Score-like reals are written with 6
// decimals (internal computation stays full precision); p-values use
// scientific notation so tiny tails survive. Writers iterate sorted
// structures only, so a given input and seed always produce byte-identical
// files.

struct ParseError {
    std::size_t row = 0;  // 1-based, header is row 1
    std::string message;
};

struct ParseResult {
    std::vector<Judgment> judgments;
    std::vector<ParseError> errors;
};

// judgments.csv: header worker_id,unit_id,annotations,justification,task_id;
// the annotations cell is '|'-separated; whitespace around tokens and ids is
// trimmed. Malformed rows and duplicate (worker, unit) rows are reported
// with their row numbers; the first of a duplicate pair is kept.
ParseResult parse_judgments(const std::filesystem::path& path, const TaskConfig& config);

void write_judgments(const std::filesystem::path& path, std::span<const Judgment> judgments);

// vocabulary.txt: one annotation id per line; file order defines vector
// indices. Throws FormatError on duplicates.
std::shared_ptr<const AnnotationVocabulary> load_vocabulary(const std::filesystem::path& path,
                                                            const std::string& task_id);

// stopwords.txt: one word per line, lowercased on load.
StopwordSet load_stopwords(const std::filesystem::path& path);

// embeddings.txt: token followed by whitespace-separated reals, fixed
// dimensionality across lines.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

struct LabelLoadResult {
    LabelSet labels;
    std::size_t skipped = 0;  // rows naming unknown units/annotations
};

// CSV of (unit_id, annotation_id, label in {0,1}); a leading header row is
// accepted. Absent pairs are negative. Rows outside the universe are
// skipped and counted.
LabelLoadResult load_label_set(const std::filesystem::path& path, LabelMethod method,
                               const Universe& universe);

std::string format_score(double value);   // fixed, 6 decimals
std::string format_pvalue(double value);  // scientific, 6 digits

void write_unit_annotation_scores(const std::filesystem::path& path,
                                  std::span<const UnitAnnotationScore> scores);
std::vector<UnitAnnotationScore> read_unit_annotation_scores(const std::filesystem::path& path);

// worker_id,wwa,wma,na,spam_flag. Verdicts may be empty (flags all 0).
void write_worker_metrics(const std::filesystem::path& path,
                          std::span<const WorkerMetrics> metrics,
                          std::span<const SpamVerdict> verdicts);

void write_media_unit_vectors(const std::filesystem::path& path, const VectorizedTask& task);

// unit_id,annotation_id,label over the whole universe (explicit 0s).
void write_labels(const std::filesystem::path& path, const LabelSet& labels,
                  const Universe& universe);

void write_violations(const std::filesystem::path& path, std::span<const Violation> violations);

void write_reduction_traces(const std::filesystem::path& path,
                            std::span<const ReductionTrace> traces);

void write_spam_verdicts(const std::filesystem::path& path,
                         std::span<const SpamVerdict> verdicts);

void write_review_sample(const std::filesystem::path& path, std::span<const Judgment> sample);

struct EvaluationRow {
    std::string method;
    std::optional<double> threshold;
    EvaluationOutcome outcome;
};

void write_evaluation(const std::filesystem::path& path, std::span<const EvaluationRow> rows);

void write_sweep(const std::filesystem::path& path, const SweepResult& sweep);

void write_ablation(const std::filesystem::path& path, const AblationResult& ablation);

struct McNemarRow {
    std::string method_a;
    std::string method_b;
    McNemarResult result;
};

void write_mcnemar(const std::filesystem::path& path, std::span<const McNemarRow> rows);

void write_calibration(const std::filesystem::path& path, const CalibrationResult& calibration);
void write_calibration_disagreements(const std::filesystem::path& path,
                                     const CalibrationResult& calibration);

}  // namespace crowdagg
