// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include "crowdagg/ingest_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "crowdagg/csv.hpp"
#include "crowdagg/errors.hpp"

namespace crowdagg {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_annotations(std::string_view cell) {
    std::vector<std::string> tokens;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= cell.size()) {
        std::size_t end = cell.find('|', start);
        if (end == std::string_view::npos) end = cell.size();
        std::string token = trim(cell.substr(start, end - start));
        if (!token.empty() && seen.insert(token).second) tokens.push_back(std::move(token));
        start = end + 1;
    }
    return tokens;
}

constexpr const char* kJudgmentHeader[] = {"worker_id", "unit_id", "annotations", "justification",
                                           "task_id"};

}  // namespace

ParseResult parse_judgments(const std::filesystem::path& path, const TaskConfig& config) {
    (void)config;
    auto records = csv::read_file(path);
    ParseResult result;
    if (records.empty()) {
        result.errors.push_back({1, "missing header row"});
        return result;
    }

    // Columns are located by name; extra columns are ignored.
    std::map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < records[0].size(); ++i) columns[trim(records[0][i])] = i;
    for (const char* name : kJudgmentHeader) {
        if (!columns.count(name)) {
            throw FormatError("judgments: missing required column '" + std::string(name) + "' in " +
                              path.string());
        }
    }

    std::map<std::pair<std::string, std::string>, std::size_t> first_row;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& record = records[r];
        const std::size_t row_no = r + 1;
        if (record.size() < records[0].size()) {
            result.errors.push_back({row_no, "expected " + std::to_string(records[0].size()) +
                                                 " fields, got " + std::to_string(record.size())});
            continue;
        }
        Judgment j;
        j.worker_id = trim(record[columns["worker_id"]]);
        j.unit_id = trim(record[columns["unit_id"]]);
        j.raw_annotations = split_annotations(record[columns["annotations"]]);
        j.justification = trim(record[columns["justification"]]);
        j.task_id = trim(record[columns["task_id"]]);
        if (j.worker_id.empty() || j.unit_id.empty()) {
            result.errors.push_back({row_no, "empty worker_id or unit_id"});
            continue;
        }
        auto [it, inserted] = first_row.emplace(std::make_pair(j.worker_id, j.unit_id), row_no);
        if (!inserted) {
            // Reported here with both row numbers; dataset validation is what
            // actually drops the later row.
            result.errors.push_back({row_no, "duplicate (worker, unit) pair (" + j.worker_id + ", " +
                                                 j.unit_id + ") first seen at row " +
                                                 std::to_string(it->second)});
        }
        result.judgments.push_back(std::move(j));
    }
    return result;
}

void write_judgments(const std::filesystem::path& path, std::span<const Judgment> judgments) {
    csv::Writer out(path);
    out.row({"worker_id", "unit_id", "annotations", "justification", "task_id"});
    for (const auto& j : judgments) {
        std::string cell;
        for (std::size_t i = 0; i < j.raw_annotations.size(); ++i) {
            if (i) cell += '|';
            cell += j.raw_annotations[i];
        }
        out.row({j.worker_id, j.unit_id, cell, j.justification, j.task_id});
    }
    out.close();
}

std::shared_ptr<const AnnotationVocabulary> load_vocabulary(const std::filesystem::path& path,
                                                            const std::string& task_id) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocabulary: " + path.string());
    auto vocab = std::make_shared<AnnotationVocabulary>();
    vocab->task_id = task_id;
    vocab->scope = VocabScope::global;
    std::string line;
    while (std::getline(in, line)) {
        std::string entry = trim(line);
        if (entry.empty()) continue;
        if (vocab->cluster_map.count(entry)) {
            throw FormatError("vocabulary: duplicate entry '" + entry + "' in " + path.string());
        }
        vocab->entries.push_back(entry);
        vocab->cluster_map[entry] = entry;
    }
    return vocab;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stopwords: " + path.string());
    StopwordSet words;
    std::string line;
    while (std::getline(in, line)) {
        std::string word = trim(line);
        for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!word.empty()) words.insert(std::move(word));
    }
    return words;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embeddings: " + path.string());
    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream fields(line);
        std::string token;
        fields >> token;
        std::vector<double> values;
        double v = 0.0;
        while (fields >> v) values.push_back(v);
        if (!fields.eof()) {
            throw FormatError("embeddings: bad number at line " + std::to_string(line_no) + " of " +
                              path.string());
        }
        try {
            table.insert(std::move(token), std::move(values));
        } catch (const FormatError& e) {
            throw FormatError(std::string(e.what()) + " (line " + std::to_string(line_no) + " of " +
                              path.string() + ")");
        }
    }
    return table;
}

LabelLoadResult load_label_set(const std::filesystem::path& path, LabelMethod method,
                               const Universe& universe) {
    auto records = csv::read_file(path);
    LabelLoadResult result;
    result.labels.method = method;
    std::size_t start = 0;
    if (!records.empty() && records[0].size() >= 3 && trim(records[0][0]) == "unit_id") {
        start = 1;  // skip header
    }
    for (std::size_t r = start; r < records.size(); ++r) {
        const auto& record = records[r];
        if (record.size() < 3) {
            throw FormatError("labels: row " + std::to_string(r + 1) + " of " + path.string() +
                              " needs unit_id,annotation_id,label");
        }
        std::string unit = trim(record[0]);
        std::string annotation = trim(record[1]);
        std::string label = trim(record[2]);
        if (label != "0" && label != "1") {
            throw FormatError("labels: row " + std::to_string(r + 1) + " of " + path.string() +
                              " has label '" + label + "', expected 0 or 1");
        }
        if (!universe.contains(unit, annotation)) {
            ++result.skipped;
            continue;
        }
        result.labels.set(unit, annotation, label == "1");
    }
    return result;
}

std::string format_score(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::string format_pvalue(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", value);
    return buf;
}

void write_unit_annotation_scores(const std::filesystem::path& path,
                                  std::span<const UnitAnnotationScore> scores) {
    csv::Writer out(path);
    out.row({"unit_id", "annotation_id", "score"});
    for (const auto& s : scores) out.row({s.unit_id, s.annotation_id, format_score(s.score)});
    out.close();
}

std::vector<UnitAnnotationScore> read_unit_annotation_scores(const std::filesystem::path& path) {
    auto records = csv::read_file(path);
    std::vector<UnitAnnotationScore> scores;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() < 3) {
            throw FormatError("scores: short row " + std::to_string(r + 1) + " in " + path.string());
        }
        scores.push_back({records[r][0], records[r][1], std::stod(records[r][2])});
    }
    return scores;
}

void write_worker_metrics(const std::filesystem::path& path,
                          std::span<const WorkerMetrics> metrics,
                          std::span<const SpamVerdict> verdicts) {
    std::map<WorkerId, bool> spam;
    for (const auto& v : verdicts) spam[v.worker_id] = v.is_spam;
    csv::Writer out(path);
    out.row({"worker_id", "wwa", "wma", "na", "spam_flag"});
    for (const auto& m : metrics) {
        auto it = spam.find(m.worker_id);
        out.row({m.worker_id, format_score(m.wwa), format_score(m.wma), format_score(m.na),
                 it != spam.end() && it->second ? "1" : "0"});
    }
    out.close();
}

void write_media_unit_vectors(const std::filesystem::path& path, const VectorizedTask& task) {
    csv::Writer out(path);
    out.row({"unit_id", "annotation_id", "count", "n_workers"});
    for (const auto& unit : task.units) {
        for (std::size_t i = 0; i < unit.muv.counts.size(); ++i) {
            out.row({unit.unit_id, unit.vocab->entries[i], std::to_string(unit.muv.counts[i]),
                     std::to_string(unit.muv.n_workers)});
        }
    }
    out.close();
}

void write_labels(const std::filesystem::path& path, const LabelSet& labels,
                  const Universe& universe) {
    csv::Writer out(path);
    out.row({"unit_id", "annotation_id", "label"});
    for (const auto& [unit, annotations] : universe.units()) {
        for (const auto& annotation : annotations) {
            out.row({unit, annotation, labels.positive(unit, annotation) ? "1" : "0"});
        }
    }
    out.close();
}

void write_violations(const std::filesystem::path& path, std::span<const Violation> violations) {
    csv::Writer out(path);
    out.row({"kind", "worker_id", "unit_id", "detail"});
    for (const auto& v : violations) {
        out.row({to_string(v.kind), v.worker_id, v.unit_id, v.detail});
    }
    out.close();
}

void write_reduction_traces(const std::filesystem::path& path,
                            std::span<const ReductionTrace> traces) {
    csv::Writer out(path);
    out.row({"unit_id", "representative", "member", "action"});
    for (const auto& trace : traces) {
        for (const auto& cluster : trace.clusters) {
            for (const auto& member : cluster.members) {
                out.row({trace.unit_id, cluster.representative, member.token, member.action});
            }
        }
        for (const auto& word : trace.removed_stopwords) {
            out.row({trace.unit_id, "", word, "stopword"});
        }
    }
    out.close();
}

void write_spam_verdicts(const std::filesystem::path& path,
                         std::span<const SpamVerdict> verdicts) {
    csv::Writer out(path);
    out.row({"worker_id", "is_spam", "reasons", "wwa", "wma", "na"});
    for (const auto& v : verdicts) {
        std::string reasons;
        for (std::size_t i = 0; i < v.reasons.size(); ++i) {
            if (i) reasons += '|';
            reasons += to_string(v.reasons[i]);
        }
        out.row({v.worker_id, v.is_spam ? "1" : "0", reasons, format_score(v.wwa),
                 format_score(v.wma), format_score(v.na)});
    }
    out.close();
}

void write_review_sample(const std::filesystem::path& path, std::span<const Judgment> sample) {
    write_judgments(path, sample);
}

void write_evaluation(const std::filesystem::path& path, std::span<const EvaluationRow> rows) {
    csv::Writer out(path);
    out.row({"method", "threshold", "tp", "fp", "fn", "tn", "precision", "recall", "f1",
             "accuracy"});
    for (const auto& row : rows) {
        const auto& o = row.outcome;
        out.row({row.method, row.threshold ? format_score(*row.threshold) : std::string{},
                 std::to_string(o.tp), std::to_string(o.fp), std::to_string(o.fn),
                 std::to_string(o.tn), format_score(o.precision), format_score(o.recall),
                 format_score(o.f1), format_score(o.accuracy)});
    }
    out.close();
}

void write_sweep(const std::filesystem::path& path, const SweepResult& sweep) {
    csv::Writer out(path);
    out.row({"threshold", "tp", "fp", "fn", "tn", "precision", "recall", "f1", "accuracy"});
    for (const auto& point : sweep.points) {
        const auto& o = point.outcome;
        out.row({format_score(point.threshold), std::to_string(o.tp), std::to_string(o.fp),
                 std::to_string(o.fn), std::to_string(o.tn), format_score(o.precision),
                 format_score(o.recall), format_score(o.f1), format_score(o.accuracy)});
    }
    out.close();
}

void write_ablation(const std::filesystem::path& path, const AblationResult& ablation) {
    csv::Writer out(path);
    out.row({"max_workers", "n_units", "precision", "recall", "f1", "accuracy"});
    for (const auto& point : ablation.points) {
        const auto& o = point.outcome;
        out.row({std::to_string(point.max_workers), std::to_string(point.n_units_used),
                 format_score(o.precision), format_score(o.recall), format_score(o.f1),
                 format_score(o.accuracy)});
    }
    out.close();
}

void write_mcnemar(const std::filesystem::path& path, std::span<const McNemarRow> rows) {
    csv::Writer out(path);
    out.row({"method_a", "method_b", "b", "c", "statistic", "p_value"});
    for (const auto& row : rows) {
        out.row({row.method_a, row.method_b, std::to_string(row.result.b),
                 std::to_string(row.result.c), format_score(row.result.statistic),
                 format_pvalue(row.result.p_value)});
    }
    out.close();
}

void write_calibration(const std::filesystem::path& path, const CalibrationResult& calibration) {
    csv::Writer out(path);
    out.row({"threshold", "agreement", "chosen"});
    for (const auto& [threshold, agreement] : calibration.agreement_by_threshold) {
        out.row({format_score(threshold), std::to_string(agreement),
                 threshold == calibration.threshold ? "1" : "0"});
    }
    out.close();
}

void write_calibration_disagreements(const std::filesystem::path& path,
                                     const CalibrationResult& calibration) {
    csv::Writer out(path);
    out.row({"unit_id", "annotation_id", "crowd_label", "expert_label"});
    for (const auto& d : calibration.disagreements) {
        out.row({d.unit_id, d.annotation_id, d.crowd ? "1" : "0", d.expert ? "1" : "0"});
    }
    out.close();
}

}  // namespace crowdagg
