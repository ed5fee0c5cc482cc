// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include "crowdagg/disagreement_metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "crowdagg/kernels.hpp"

namespace crowdagg {

namespace {

std::vector<double> to_doubles(std::span<const std::uint8_t> bits) {
    return std::vector<double>(bits.begin(), bits.end());
}

std::vector<double> to_doubles(std::span<const std::int32_t> counts) {
    return std::vector<double>(counts.begin(), counts.end());
}

struct WorkerAccumulators {
    kernels::StableMean wma;
    kernels::StableMean na;
    std::map<WorkerId, kernels::StableMean> pair_agreement;  // partner -> cosines over common units
    std::size_t n_units = 0;
};

}  // namespace

double unit_annotation_score_value(const MediaUnitVector& muv, std::size_t annotation_index) {
    if (annotation_index >= muv.counts.size()) {
        throw std::invalid_argument("unit_annotation_score: index out of range");
    }
    auto counts = to_doubles(muv.counts);
    double norm_sq = kernels::squared_norm(counts);
    if (norm_sq == 0.0) return 0.0;
    double score = counts[annotation_index] / std::sqrt(norm_sq);
    return score > 1.0 ? 1.0 : score;
}

UnitAnnotationScore unit_annotation_score(const MediaUnitVector& muv,
                                          const AnnotationVocabulary& vocab,
                                          const AnnotationId& annotation_id) {
    auto index = vocab.entry_index(annotation_id);
    if (!index) {
        throw std::invalid_argument("unit_annotation_score: unknown annotation '" + annotation_id + "'");
    }
    return {muv.unit_id, annotation_id, unit_annotation_score_value(muv, *index)};
}

MetricsResult compute_all_metrics(const VectorizedTask& task) {
    MetricsResult result;
    std::map<WorkerId, WorkerAccumulators> acc;

    for (const auto& unit : task.units) {
        // Unit-annotation scores in vocabulary order.
        for (std::size_t i = 0; i < unit.vocab->size(); ++i) {
            result.scores.push_back(
                {unit.unit_id, unit.vocab->entries[i], unit_annotation_score_value(unit.muv, i)});
        }

        std::vector<std::vector<double>> dense;
        dense.reserve(unit.workers.size());
        for (const auto& w : unit.workers) dense.push_back(to_doubles(w.bits));

        auto rest = to_doubles(unit.muv.counts);
        for (std::size_t i = 0; i < unit.workers.size(); ++i) {
            const auto& w = unit.workers[i];
            auto& a = acc[w.worker_id];
            ++a.n_units;
            a.na.add(static_cast<double>(w.popcount()));

            // Leave-one-out aggregate for wma.
            std::vector<double> loo = rest;
            for (std::size_t d = 0; d < loo.size(); ++d) loo[d] -= dense[i][d];
            a.wma.add(kernels::cosine(dense[i], loo));

            for (std::size_t j = i + 1; j < unit.workers.size(); ++j) {
                double c = kernels::cosine(dense[i], dense[j]);
                acc[w.worker_id].pair_agreement[unit.workers[j].worker_id].add(c);
                acc[unit.workers[j].worker_id].pair_agreement[w.worker_id].add(c);
            }
        }
    }

    for (auto& [worker_id, a] : acc) {
        WorkerMetrics m;
        m.worker_id = worker_id;
        m.n_units = a.n_units;
        m.na = a.na.mean();
        m.wma = a.wma.mean();
        kernels::StableMean wwa;
        for (const auto& [partner, cosines] : a.pair_agreement) wwa.add(cosines.mean());
        m.wwa = wwa.mean();  // 0 when no partner shares a unit
        result.workers.push_back(std::move(m));
    }
    return result;
}

double worker_worker_agreement(const WorkerId& worker, const VectorizedTask& task) {
    for (const auto& m : compute_all_metrics(task).workers) {
        if (m.worker_id == worker) return m.wwa;
    }
    throw std::invalid_argument("worker_worker_agreement: unknown worker '" + worker + "'");
}

double worker_media_unit_agreement(const WorkerId& worker, const VectorizedTask& task) {
    for (const auto& m : compute_all_metrics(task).workers) {
        if (m.worker_id == worker) return m.wma;
    }
    throw std::invalid_argument("worker_media_unit_agreement: unknown worker '" + worker + "'");
}

double avg_annotations_per_unit(const WorkerId& worker, const VectorizedTask& task) {
    for (const auto& m : compute_all_metrics(task).workers) {
        if (m.worker_id == worker) return m.na;
    }
    throw std::invalid_argument("avg_annotations_per_unit: unknown worker '" + worker + "'");
}

}  // namespace crowdagg
