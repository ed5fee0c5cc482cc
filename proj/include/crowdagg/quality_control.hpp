// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "crowdagg/core_model.hpp"

namespace crowdagg {

// In-task effort rules: picking the quick empty/none option requires a
// written justification; text tasks can additionally demand an explanation
// below a minimum annotation count.
struct EffortRules {
    std::string none_annotation = "none";
    int explain_threshold = 0;  // judgments with <= N annotations need a justification; 0 = off
};

enum class SpamReason { low_wwa, low_wma, high_na, failed_effort_check };

const char* to_string(SpamReason reason);

struct SpamVerdict {
    WorkerId worker_id;
    bool is_spam = false;                // (reasons non-empty)
    std::vector<SpamReason> reasons;     // sorted, distinct
    double wwa = 0.0, wma = 0.0, na = 0.0;  // metric snapshot at decision time

    void add_reason(SpamReason reason);
};

struct EffortCheckResult {
    std::vector<Judgment> accepted;
    std::map<WorkerId, std::size_t> rejections_by_worker;
    std::size_t rejected_total = 0;
};

// Rejects individual judgments that fail the effort rules. The failures feed
// into the workers' spam verdicts via merge_effort_failures.
EffortCheckResult apply_effort_checks(std::span<const Judgment> judgments,
                                      const EffortRules& rules);

// Standard-deviation heuristic: flag workers whose wwa or wma falls below
// mean - k*sigma, or (when use_na_in_spam) whose na rises above
// mean + k*sigma. One-sided on purpose: unusually high agreement is not
// penalized, unusually many annotations per unit is. Population sigma;
// fewer than 2 workers yields no flags (callers warn).
std::vector<SpamVerdict> detect_spammers(std::span<const WorkerMetrics> metrics, double k,
                                         bool use_na_in_spam);

// Adds failed_effort_check to the verdicts of workers with rejected
// judgments, creating verdicts (with their metric snapshot, when known) for
// workers not already present.
void merge_effort_failures(std::vector<SpamVerdict>& verdicts,
                           const std::map<WorkerId, std::size_t>& rejections,
                           std::span<const WorkerMetrics> metrics);

// Drops every judgment from is_spam workers. Vectors and metrics must be
// recomputed downstream afterwards.
std::vector<Judgment> filter_spam(std::span<const Judgment> judgments,
                                  std::span<const SpamVerdict> verdicts);

}  // namespace crowdagg
