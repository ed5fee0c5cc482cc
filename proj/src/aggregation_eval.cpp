// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include "crowdagg/aggregation_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "crowdagg/kernels.hpp"
#include "crowdagg/rng.hpp"

namespace crowdagg {

namespace {

void fill_rates(EvaluationOutcome& o, std::size_t total) {
    o.precision = (o.tp + o.fp) == 0 ? 0.0
                                     : static_cast<double>(o.tp) / static_cast<double>(o.tp + o.fp);
    o.recall = (o.tp + o.fn) == 0 ? 0.0
                                  : static_cast<double>(o.tp) / static_cast<double>(o.tp + o.fn);
    o.f1 = (o.precision + o.recall) == 0.0
               ? 0.0
               : 2.0 * o.precision * o.recall / (o.precision + o.recall);
    o.accuracy = total == 0 ? 0.0 : static_cast<double>(o.tp + o.tn) / static_cast<double>(total);
}

void check_thresholds(std::span<const double> thresholds) {
    if (thresholds.empty()) throw std::invalid_argument("threshold grid is empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] <= 0.0 || thresholds[i] > 1.0) {
            throw std::invalid_argument("thresholds must lie in (0, 1]");
        }
        if (i > 0 && thresholds[i] <= thresholds[i - 1]) {
            throw std::invalid_argument("thresholds must be strictly increasing");
        }
    }
}

}  // namespace

LabelSet crowdtruth_labels(std::span<const UnitAnnotationScore> scores, double threshold) {
    LabelSet labels;
    labels.method = LabelMethod::crowdtruth;
    labels.threshold = threshold;
    for (const auto& s : scores) {
        if (s.score >= threshold) labels.set(s.unit_id, s.annotation_id, true);
    }
    return labels;
}

LabelSet majority_vote_labels(const VectorizedTask& task) {
    LabelSet labels;
    labels.method = LabelMethod::majority_vote;
    for (const auto& unit : task.units) {
        const auto& counts = unit.muv.counts;
        const auto n = static_cast<std::int64_t>(unit.muv.n_workers);
        bool any_half = false;
        std::int32_t max_count = 0;
        for (std::int32_t c : counts) {
            if (2 * static_cast<std::int64_t>(c) >= n && c > 0) any_half = true;
            max_count = std::max(max_count, c);
        }
        if (max_count == 0) continue;  // nobody selected anything
        for (std::size_t i = 0; i < counts.size(); ++i) {
            bool positive = any_half ? 2 * static_cast<std::int64_t>(counts[i]) >= n && counts[i] > 0
                                     : counts[i] == max_count;
            if (positive) labels.set(unit.unit_id, unit.vocab->entries[i], true);
        }
    }
    return labels;
}

LabelSet single_annotator_labels(const VectorizedTask& task, std::uint64_t seed) {
    LabelSet labels;
    labels.method = LabelMethod::single;
    for (const auto& unit : task.units) {
        if (unit.workers.empty()) continue;  // callers warn; no labels for the unit
        auto stream = rng::substream(seed, "single", unit.unit_id);
        const auto& chosen = unit.workers[stream.below(unit.workers.size())];
        for (std::size_t i = 0; i < chosen.bits.size(); ++i) {
            if (chosen.bits[i]) labels.set(unit.unit_id, unit.vocab->entries[i], true);
        }
    }
    return labels;
}

EvaluationOutcome evaluate(const LabelSet& pred, const LabelSet& truth, const Universe& universe) {
    EvaluationOutcome o;
    for (const auto& [unit, annotations] : universe.units()) {
        for (const auto& annotation : annotations) {
            bool p = pred.positive(unit, annotation);
            bool t = truth.positive(unit, annotation);
            if (p && t) ++o.tp;
            else if (p && !t) ++o.fp;
            else if (!p && t) ++o.fn;
            else ++o.tn;
        }
    }
    fill_rates(o, universe.total_pairs());
    return o;
}

std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    grid.reserve(20);
    for (int i = 1; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 20.0);
    return grid;
}

SweepResult threshold_sweep(std::span<const UnitAnnotationScore> scores, const LabelSet& truth,
                            const Universe& universe, std::span<const double> thresholds) {
    check_thresholds(thresholds);
    SweepResult result;
    double best_f1 = -1.0;
    for (double t : thresholds) {
        SweepPoint point{t, evaluate(crowdtruth_labels(scores, t), truth, universe)};
        if (point.outcome.f1 > best_f1) {
            best_f1 = point.outcome.f1;
            result.best_threshold = t;
        }
        result.points.push_back(point);
    }
    return result;
}

AblationResult worker_ablation(const VectorizedTask& task, const LabelSet& truth,
                               double threshold, std::span<const int> max_workers_list,
                               std::uint64_t seed) {
    if (max_workers_list.empty()) throw std::invalid_argument("max_workers list is empty");
    for (std::size_t i = 0; i < max_workers_list.size(); ++i) {
        if (max_workers_list[i] < 1) throw std::invalid_argument("max_workers must be >= 1");
        if (i > 0 && max_workers_list[i] <= max_workers_list[i - 1]) {
            throw std::invalid_argument("max_workers must be strictly increasing");
        }
    }

    // One permutation per unit, reused for every cap: "at most m" keeps the
    // first m of it, so smaller crowds are subsets of larger ones.
    std::vector<std::vector<std::size_t>> orders;
    orders.reserve(task.units.size());
    for (const auto& unit : task.units) {
        std::vector<std::size_t> order(unit.workers.size());
        std::iota(order.begin(), order.end(), 0);
        auto stream = rng::substream(seed, "ablate", unit.unit_id);
        rng::shuffle(order, stream);
        orders.push_back(std::move(order));
    }

    const Universe universe = task.universe();
    AblationResult result;
    for (int m : max_workers_list) {
        std::vector<UnitAnnotationScore> scores;
        std::size_t n_units_used = 0;
        for (std::size_t u = 0; u < task.units.size(); ++u) {
            const auto& unit = task.units[u];
            const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(m),
                                                           unit.workers.size());
            if (keep > 0) ++n_units_used;
            std::vector<double> counts(unit.vocab->size(), 0.0);
            for (std::size_t i = 0; i < keep; ++i) {
                const auto& bits = unit.workers[orders[u][i]].bits;
                for (std::size_t d = 0; d < bits.size(); ++d) counts[d] += bits[d];
            }
            double norm_sq = kernels::squared_norm(counts);
            double norm = norm_sq > 0.0 ? std::sqrt(norm_sq) : 0.0;
            for (std::size_t d = 0; d < counts.size(); ++d) {
                double score = norm == 0.0 ? 0.0 : counts[d] / norm;
                scores.push_back({unit.unit_id, unit.vocab->entries[d], std::min(score, 1.0)});
            }
        }
        AblationPoint point;
        point.max_workers = m;
        point.n_units_used = n_units_used;
        point.outcome = evaluate(crowdtruth_labels(scores, threshold), truth, universe);
        result.points.push_back(std::move(point));
    }
    return result;
}

McNemarResult mcnemar_test(const LabelSet& pred_a, const LabelSet& pred_b, const LabelSet& truth,
                           const Universe& universe) {
    McNemarResult r;
    for (const auto& [unit, annotations] : universe.units()) {
        for (const auto& annotation : annotations) {
            bool t = truth.positive(unit, annotation);
            bool a_correct = pred_a.positive(unit, annotation) == t;
            bool b_correct = pred_b.positive(unit, annotation) == t;
            if (a_correct && !b_correct) ++r.b;
            if (!a_correct && b_correct) ++r.c;
        }
    }
    if (r.b + r.c == 0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    double diff = std::abs(static_cast<double>(r.b) - static_cast<double>(r.c));
    r.statistic = (diff - 1.0) * (diff - 1.0) / static_cast<double>(r.b + r.c);
    r.p_value = std::erfc(std::sqrt(r.statistic / 2.0));  // chi-square(1) upper tail
    return r;
}

CalibrationResult calibrate_threshold_vs_expert(std::span<const UnitAnnotationScore> scores,
                                                const LabelSet& expert, const Universe& universe,
                                                std::span<const double> grid) {
    check_thresholds(grid);
    CalibrationResult result;
    std::size_t best_agreement = 0;
    bool first = true;
    for (double t : grid) {
        LabelSet crowd = crowdtruth_labels(scores, t);
        std::size_t agreement = 0;
        for (const auto& [unit, annotations] : universe.units()) {
            for (const auto& annotation : annotations) {
                agreement += crowd.positive(unit, annotation) == expert.positive(unit, annotation);
            }
        }
        result.agreement_by_threshold.push_back({t, agreement});
        if (first || agreement > best_agreement) {
            best_agreement = agreement;
            result.threshold = t;
            first = false;
        }
    }

    LabelSet chosen = crowdtruth_labels(scores, result.threshold);
    for (const auto& [unit, annotations] : universe.units()) {
        for (const auto& annotation : annotations) {
            bool crowd = chosen.positive(unit, annotation);
            bool exp = expert.positive(unit, annotation);
            if (crowd != exp) result.disagreements.push_back({unit, annotation, crowd, exp});
        }
    }
    return result;
}

}  // namespace crowdagg
