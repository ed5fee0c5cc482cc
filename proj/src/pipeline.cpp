// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include "crowdagg/pipeline.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <set>
#include <tuple>

#include "crowdagg/errors.hpp"
#include "crowdagg/rng.hpp"

namespace crowdagg::pipeline {

namespace {

namespace fs = std::filesystem;

constexpr std::size_t kReviewSampleSize = 20;

EffortRules effort_rules(const TaskConfig& config) {
    return {config.none_annotation, config.explain_threshold};
}

std::vector<double> grid_or_default(const Options& options) {
    return options.thresholds.empty() ? default_threshold_grid() : options.thresholds;
}

std::vector<int> ablation_list_or_default(const Options& options) {
    if (!options.max_workers.empty()) return options.max_workers;
    std::vector<int> caps(15);
    std::iota(caps.begin(), caps.end(), 1);
    return caps;
}

VectorizedTask vectorize_with(const Prepared& prepared, const TaskConfig& config,
                              std::span<const Judgment> judgments) {
    return vectorize(judgments, config, prepared.global_vocab, prepared.stopwords,
                     prepared.embeddings ? &*prepared.embeddings : nullptr);
}

LabelSet make_labels(const std::string& method, const QualityOutcome& quality,
                     const TaskConfig& config) {
    auto parsed = parse_label_method(method);
    if (!parsed) throw ConfigError("unknown aggregation method '" + method + "'");
    switch (*parsed) {
        case LabelMethod::crowdtruth:
            return crowdtruth_labels(quality.metrics.scores, config.crowdtruth_threshold);
        case LabelMethod::majority_vote:
            return majority_vote_labels(quality.task);
        case LabelMethod::single:
            return single_annotator_labels(quality.task, config.random_seed);
        default:
            throw ConfigError("method '" + method + "' is loaded from files, not aggregated");
    }
}

LabelLoadResult load_labels_warned(const fs::path& path, LabelMethod method,
                                   const Universe& universe, const char* what) {
    auto loaded = load_label_set(path, method, universe);
    if (loaded.skipped > 0) {
        std::cerr << "warning: " << loaded.skipped << " " << what
                  << " rows named unknown (unit, annotation) pairs and were skipped\n";
    }
    return loaded;
}

std::string method_name_from(const fs::path& path) {
    std::string stem = path.stem().string();
    if (stem.rfind("labels_", 0) == 0) stem.erase(0, 7);
    return stem;
}

std::size_t count_workers(std::span<const Judgment> judgments) {
    std::set<WorkerId> workers;
    for (const auto& j : judgments) workers.insert(j.worker_id);
    return workers.size();
}

std::size_t count_units(std::span<const Judgment> judgments) {
    std::set<UnitId> units;
    for (const auto& j : judgments) units.insert(j.unit_id);
    return units.size();
}

// Deterministic sample of the flagged workers' judgments for manual review.
std::vector<Judgment> review_sample(const Prepared& prepared,
                                    std::span<const SpamVerdict> verdicts,
                                    std::uint64_t seed) {
    std::set<WorkerId> flagged;
    for (const auto& v : verdicts) {
        if (v.is_spam) flagged.insert(v.worker_id);
    }
    std::vector<Judgment> pool;
    for (const auto& j : prepared.effort.accepted) {
        if (flagged.count(j.worker_id)) pool.push_back(j);
    }
    std::sort(pool.begin(), pool.end(), [](const Judgment& a, const Judgment& b) {
        return std::tie(a.worker_id, a.unit_id) < std::tie(b.worker_id, b.unit_id);
    });
    auto stream = rng::substream(seed, "review_sample");
    rng::shuffle(pool, stream);
    if (pool.size() > kReviewSampleSize) pool.resize(kReviewSampleSize);
    std::sort(pool.begin(), pool.end(), [](const Judgment& a, const Judgment& b) {
        return std::tie(a.worker_id, a.unit_id) < std::tie(b.worker_id, b.unit_id);
    });
    return pool;
}

}  // namespace

Prepared prepare(const Options& options) {
    validate_config(options.config);
    const TaskConfig& config = options.config;

    Prepared prepared;
    if (config.task_type == TaskConfig::TaskType::closed) {
        prepared.global_vocab = load_vocabulary(config.vocabulary_file, config.task_id);
    }
    if (!config.stopword_file.empty()) {
        prepared.stopwords = load_stopwords(config.stopword_file);
    }
    if (!config.embedding_file.empty()) {
        prepared.embeddings = load_embeddings(config.embedding_file);
    }

    prepared.parse = parse_judgments(options.judgments_file, config);
    auto sanitized = sanitize_dataset(prepared.parse.judgments, prepared.global_vocab.get(),
                                      {config.task_id, config.max_annotations});
    prepared.violations = std::move(sanitized.violations);
    prepared.effort = apply_effort_checks(sanitized.kept, effort_rules(config));
    return prepared;
}

QualityOutcome run_quality(const Prepared& prepared, const TaskConfig& config) {
    QualityOutcome quality;
    quality.pre_task = vectorize_with(prepared, config, prepared.effort.accepted);
    quality.pre_metrics = compute_all_metrics(quality.pre_task);

    if (quality.pre_metrics.workers.size() < 2) {
        std::cerr << "warning: fewer than 2 workers; spam detection skipped\n";
    }
    quality.verdicts =
        detect_spammers(quality.pre_metrics.workers, config.spam_k, config.use_na_in_spam);
    merge_effort_failures(quality.verdicts, prepared.effort.rejections_by_worker,
                          quality.pre_metrics.workers);

    quality.final_judgments = filter_spam(prepared.effort.accepted, quality.verdicts);

    if (config.spam_fixpoint) {
        bool changed = true;
        while (changed) {
            changed = false;
            auto task = vectorize_with(prepared, config, quality.final_judgments);
            auto metrics = compute_all_metrics(task);
            for (const auto& round :
                 detect_spammers(metrics.workers, config.spam_k, config.use_na_in_spam)) {
                if (!round.is_spam) continue;
                auto it = std::find_if(quality.verdicts.begin(), quality.verdicts.end(),
                                       [&](const SpamVerdict& v) {
                                           return v.worker_id == round.worker_id;
                                       });
                if (it != quality.verdicts.end() && !it->is_spam) {
                    *it = round;
                    changed = true;
                }
            }
            if (changed) {
                quality.final_judgments = filter_spam(quality.final_judgments, quality.verdicts);
                ++quality.spam_rounds;
            }
        }
    }

    if (quality.final_judgments.empty()) {
        std::cerr << "warning: every judgment was removed by quality control\n";
    }
    quality.task = vectorize_with(prepared, config, quality.final_judgments);
    quality.metrics = compute_all_metrics(quality.task);
    return quality;
}

int cmd_ingest(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    for (const auto& e : prepared.parse.errors) {
        std::cerr << "parse error: row " << e.row << ": " << e.message << "\n";
    }
    write_violations(options.out_dir / "violations.csv", prepared.violations);
    std::cout << "ingest: " << prepared.parse.judgments.size() << " judgments, "
              << count_workers(prepared.parse.judgments) << " workers, "
              << count_units(prepared.parse.judgments) << " units, "
              << prepared.parse.errors.size() << " parse errors, " << prepared.violations.size()
              << " violations, " << prepared.effort.rejected_total << " effort rejections\n";
    return prepared.parse.errors.empty() && prepared.violations.empty() ? kOk
                                                                        : kValidationFailure;
}

int cmd_vectorize(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    auto task = vectorize_with(prepared, options.config, prepared.effort.accepted);
    write_reduction_traces(options.out_dir / "reduction_trace.csv", task.traces);
    write_media_unit_vectors(options.out_dir / "media_unit_vectors.csv", task);
    std::size_t vocab_size = task.global_vocab ? task.global_vocab->size() : 0;
    std::cout << "vectorize: " << task.units.size() << " units, "
              << (task.task_type == TaskConfig::TaskType::closed
                      ? "global vocabulary of " + std::to_string(vocab_size) + " entries"
                      : "per-unit vocabularies over " + std::to_string(task.universe().total_pairs()) +
                            " pairs")
              << "\n";
    return kOk;
}

int cmd_metrics(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    auto task = vectorize_with(prepared, options.config, prepared.effort.accepted);
    auto metrics = compute_all_metrics(task);
    write_unit_annotation_scores(options.out_dir / "unit_annotation_scores.csv", metrics.scores);
    write_worker_metrics(options.out_dir / "worker_metrics.csv", metrics.workers, {});
    std::cout << "metrics: " << metrics.workers.size() << " workers, " << metrics.scores.size()
              << " unit-annotation scores\n";
    return kOk;
}

int cmd_spam(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    auto quality = run_quality(prepared, options.config);
    std::size_t flagged = 0;
    for (const auto& v : quality.verdicts) flagged += v.is_spam;

    write_spam_verdicts(options.out_dir / "spam_verdicts.csv", quality.verdicts);
    write_review_sample(options.out_dir / "review_sample.csv",
                        review_sample(prepared, quality.verdicts, options.config.random_seed));
    write_worker_metrics(options.out_dir / "worker_metrics.csv", quality.pre_metrics.workers,
                         quality.verdicts);
    write_unit_annotation_scores(options.out_dir / "unit_annotation_scores.csv",
                                 quality.metrics.scores);
    write_media_unit_vectors(options.out_dir / "media_unit_vectors.csv", quality.task);
    write_reduction_traces(options.out_dir / "reduction_trace.csv", quality.task.traces);
    std::cout << "spam: " << flagged << "/" << quality.verdicts.size() << " workers flagged ("
              << quality.spam_rounds << " round" << (quality.spam_rounds == 1 ? "" : "s") << "), "
              << quality.final_judgments.size() << " judgments kept\n";
    return kOk;
}

int cmd_aggregate(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    auto quality = run_quality(prepared, options.config);
    LabelSet labels = make_labels(options.method, quality, options.config);
    const Universe universe = quality.task.universe();
    write_labels(options.out_dir / ("labels_" + std::string(to_string(labels.method)) + ".csv"),
                 labels, universe);
    std::cout << "aggregate[" << to_string(labels.method);
    if (labels.threshold) std::cout << "@" << format_score(*labels.threshold);
    std::cout << "]: " << labels.positives() << " positive labels over " << universe.total_pairs()
              << " pairs\n";
    return kOk;
}

int cmd_evaluate(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    auto quality = run_quality(prepared, options.config);
    const Universe universe = quality.task.universe();
    auto truth = load_labels_warned(options.truth_file, LabelMethod::trusted, universe, "truth");

    std::vector<EvaluationRow> rows;
    if (!options.labels_file.empty()) {
        auto labels = load_labels_warned(options.labels_file, LabelMethod::crowdtruth, universe,
                                         "label");
        rows.push_back({method_name_from(options.labels_file), std::nullopt,
                        evaluate(labels.labels, truth.labels, universe)});
    } else {
        LabelSet ct = crowdtruth_labels(quality.metrics.scores, options.config.crowdtruth_threshold);
        rows.push_back({"crowdtruth", ct.threshold, evaluate(ct, truth.labels, universe)});
        if (!options.expert_file.empty()) {
            auto expert =
                load_labels_warned(options.expert_file, LabelMethod::expert, universe, "expert");
            rows.push_back({"expert", std::nullopt, evaluate(expert.labels, truth.labels, universe)});
        }
        rows.push_back({"majority_vote", std::nullopt,
                        evaluate(majority_vote_labels(quality.task), truth.labels, universe)});
        rows.push_back({"single", std::nullopt,
                        evaluate(single_annotator_labels(quality.task, options.config.random_seed),
                                 truth.labels, universe)});
    }
    write_evaluation(options.out_dir / "evaluation.csv", rows);
    for (const auto& row : rows) {
        std::cout << "evaluate[" << row.method << "]: f1=" << format_score(row.outcome.f1)
                  << " precision=" << format_score(row.outcome.precision)
                  << " recall=" << format_score(row.outcome.recall)
                  << " accuracy=" << format_score(row.outcome.accuracy) << "\n";
    }
    return kOk;
}

int cmd_sweep(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    auto quality = run_quality(prepared, options.config);
    const Universe universe = quality.task.universe();
    auto truth = load_labels_warned(options.truth_file, LabelMethod::trusted, universe, "truth");
    auto grid = grid_or_default(options);
    SweepResult sweep = threshold_sweep(quality.metrics.scores, truth.labels, universe, grid);
    write_sweep(options.out_dir / "sweep.csv", sweep);
    double best_f1 = 0.0;
    for (const auto& p : sweep.points) {
        if (p.threshold == sweep.best_threshold) best_f1 = p.outcome.f1;
    }
    std::cout << "sweep: " << sweep.points.size() << " thresholds, best f1="
              << format_score(best_f1) << " at " << format_score(sweep.best_threshold) << "\n";
    return kOk;
}

int cmd_ablate(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    auto quality = run_quality(prepared, options.config);
    const Universe universe = quality.task.universe();
    auto truth = load_labels_warned(options.truth_file, LabelMethod::trusted, universe, "truth");
    auto caps = ablation_list_or_default(options);
    AblationResult ablation =
        worker_ablation(quality.task, truth.labels, options.config.crowdtruth_threshold, caps,
                        options.config.random_seed);
    write_ablation(options.out_dir / "ablation.csv", ablation);
    std::cout << "ablate: " << ablation.points.size() << " caps, f1 "
              << format_score(ablation.points.front().outcome.f1) << " at "
              << ablation.points.front().max_workers << " -> "
              << format_score(ablation.points.back().outcome.f1) << " at "
              << ablation.points.back().max_workers << "\n";
    return kOk;
}

int cmd_mcnemar(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    auto quality = run_quality(prepared, options.config);
    const Universe universe = quality.task.universe();
    auto truth = load_labels_warned(options.truth_file, LabelMethod::trusted, universe, "truth");

    std::vector<McNemarRow> rows;
    if (!options.labels_a.empty() || !options.labels_b.empty()) {
        if (options.labels_a.empty() || options.labels_b.empty()) {
            throw ConfigError("mcnemar needs both --a and --b (or neither)");
        }
        auto a = load_labels_warned(options.labels_a, LabelMethod::crowdtruth, universe, "label");
        auto b = load_labels_warned(options.labels_b, LabelMethod::crowdtruth, universe, "label");
        rows.push_back({method_name_from(options.labels_a), method_name_from(options.labels_b),
                        mcnemar_test(a.labels, b.labels, truth.labels, universe)});
    } else {
        LabelSet ct = crowdtruth_labels(quality.metrics.scores, options.config.crowdtruth_threshold);
        LabelSet mv = majority_vote_labels(quality.task);
        LabelSet single = single_annotator_labels(quality.task, options.config.random_seed);
        rows.push_back({"crowdtruth", "majority_vote",
                        mcnemar_test(ct, mv, truth.labels, universe)});
        rows.push_back({"crowdtruth", "single", mcnemar_test(ct, single, truth.labels, universe)});
    }
    write_mcnemar(options.out_dir / "mcnemar.csv", rows);
    for (const auto& row : rows) {
        std::cout << "mcnemar[" << row.method_a << " vs " << row.method_b
                  << "]: b=" << row.result.b << " c=" << row.result.c
                  << " statistic=" << format_score(row.result.statistic)
                  << " p=" << format_pvalue(row.result.p_value) << "\n";
    }
    return kOk;
}

int cmd_calibrate(const Options& options) {
    fs::create_directories(options.out_dir);
    Prepared prepared = prepare(options);
    auto quality = run_quality(prepared, options.config);
    const Universe universe = quality.task.universe();
    auto expert = load_labels_warned(options.expert_file, LabelMethod::expert, universe, "expert");
    auto grid = grid_or_default(options);
    CalibrationResult calibration =
        calibrate_threshold_vs_expert(quality.metrics.scores, expert.labels, universe, grid);
    write_calibration(options.out_dir / "calibration.csv", calibration);
    write_calibration_disagreements(options.out_dir / "calibration_disagreements.csv", calibration);
    std::size_t agreement = 0;
    for (const auto& [t, a] : calibration.agreement_by_threshold) {
        if (t == calibration.threshold) agreement = a;
    }
    std::cout << "calibrate: threshold=" << format_score(calibration.threshold) << " agreement="
              << agreement << "/" << universe.total_pairs() << " ("
              << calibration.disagreements.size() << " disagreements for review)\n";
    return kOk;
}

int cmd_all(const Options& options) {
    int worst = cmd_ingest(options);
    cmd_vectorize(options);
    cmd_metrics(options);
    cmd_spam(options);

    Options aggregate = options;
    for (const char* method : {"crowdtruth", "majority_vote", "single"}) {
        aggregate.method = method;
        cmd_aggregate(aggregate);
    }
    if (!options.truth_file.empty()) {
        cmd_evaluate(options);
        cmd_sweep(options);
        cmd_ablate(options);
        cmd_mcnemar(options);
    }
    if (!options.expert_file.empty()) {
        cmd_calibrate(options);
    }
    return worst;
}

}  // namespace crowdagg::pipeline
