// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include "crowdagg/quality_control.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crowdagg/kernels.hpp"

namespace crowdagg {

const char* to_string(SpamReason reason) {
    switch (reason) {
        case SpamReason::low_wwa: return "low_wwa";
        case SpamReason::low_wma: return "low_wma";
        case SpamReason::high_na: return "high_na";
        case SpamReason::failed_effort_check: return "failed_effort_check";
    }
    return "?";
}

void SpamVerdict::add_reason(SpamReason reason) {
    if (std::find(reasons.begin(), reasons.end(), reason) == reasons.end()) {
        reasons.push_back(reason);
        std::sort(reasons.begin(), reasons.end());
    }
    is_spam = true;
}

EffortCheckResult apply_effort_checks(std::span<const Judgment> judgments,
                                      const EffortRules& rules) {
    EffortCheckResult result;
    for (const auto& j : judgments) {
        bool none_only = j.raw_annotations.empty() ||
                         (j.raw_annotations.size() == 1 && !rules.none_annotation.empty() &&
                          j.raw_annotations.front() == rules.none_annotation);
        bool under_explained =
            rules.explain_threshold > 0 &&
            j.raw_annotations.size() <= static_cast<std::size_t>(rules.explain_threshold);
        bool rejected = j.justification.empty() && (none_only || under_explained);
        if (rejected) {
            ++result.rejections_by_worker[j.worker_id];
            ++result.rejected_total;
        } else {
            result.accepted.push_back(j);
        }
    }
    return result;
}

std::vector<SpamVerdict> detect_spammers(std::span<const WorkerMetrics> metrics, double k,
                                         bool use_na_in_spam) {
    std::vector<SpamVerdict> verdicts;
    verdicts.reserve(metrics.size());
    for (const auto& m : metrics) {
        verdicts.push_back({m.worker_id, false, {}, m.wwa, m.wma, m.na});
    }
    if (metrics.size() < 2) return verdicts;

    auto mean_sigma = [&](auto&& pick) {
        kernels::StableMean mean;
        for (const auto& m : metrics) mean.add(pick(m));
        double mu = mean.mean();
        kernels::StableMean var;
        for (const auto& m : metrics) {
            double d = pick(m) - mu;
            var.add(d * d);
        }
        return std::pair<double, double>{mu, std::sqrt(var.mean())};
    };

    auto [mu_wwa, sd_wwa] = mean_sigma([](const WorkerMetrics& m) { return m.wwa; });
    auto [mu_wma, sd_wma] = mean_sigma([](const WorkerMetrics& m) { return m.wma; });
    auto [mu_na, sd_na] = mean_sigma([](const WorkerMetrics& m) { return m.na; });

    for (std::size_t i = 0; i < metrics.size(); ++i) {
        if (metrics[i].wwa < mu_wwa - k * sd_wwa) verdicts[i].add_reason(SpamReason::low_wwa);
        if (metrics[i].wma < mu_wma - k * sd_wma) verdicts[i].add_reason(SpamReason::low_wma);
        if (use_na_in_spam && metrics[i].na > mu_na + k * sd_na) {
            verdicts[i].add_reason(SpamReason::high_na);
        }
    }
    return verdicts;
}

void merge_effort_failures(std::vector<SpamVerdict>& verdicts,
                           const std::map<WorkerId, std::size_t>& rejections,
                           std::span<const WorkerMetrics> metrics) {
    for (const auto& [worker_id, count] : rejections) {
        auto it = std::find_if(verdicts.begin(), verdicts.end(),
                               [&](const SpamVerdict& v) { return v.worker_id == worker_id; });
        if (it == verdicts.end()) {
            SpamVerdict v{worker_id, false, {}, 0.0, 0.0, 0.0};
            auto mit = std::find_if(metrics.begin(), metrics.end(),
                                    [&](const WorkerMetrics& m) { return m.worker_id == worker_id; });
            if (mit != metrics.end()) {
                v.wwa = mit->wwa;
                v.wma = mit->wma;
                v.na = mit->na;
            }
            verdicts.push_back(std::move(v));
            it = std::prev(verdicts.end());
        }
        it->add_reason(SpamReason::failed_effort_check);
    }
    std::sort(verdicts.begin(), verdicts.end(),
              [](const SpamVerdict& a, const SpamVerdict& b) { return a.worker_id < b.worker_id; });
}

std::vector<Judgment> filter_spam(std::span<const Judgment> judgments,
                                  std::span<const SpamVerdict> verdicts) {
    std::set<WorkerId> spam;
    for (const auto& v : verdicts) {
        if (v.is_spam) spam.insert(v.worker_id);
    }
    std::vector<Judgment> kept;
    kept.reserve(judgments.size());
    for (const auto& j : judgments) {
        if (!spam.count(j.worker_id)) kept.push_back(j);
    }
    return kept;
}

}  // namespace crowdagg
