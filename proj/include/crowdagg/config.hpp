// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace crowdagg {

// Task parameters, read from a flat key-value file (one `key = value` per
// line, '#' comments). Relative file paths are resolved against the config
// file's directory.
struct TaskConfig {
    enum class TaskType { closed, open_ended };

    std::string task_id;
    TaskType task_type = TaskType::closed;
    std::filesystem::path vocabulary_file;  // required for closed tasks
    std::filesystem::path stopword_file;    // optional
    std::filesystem::path embedding_file;   // optional; enables semantic merging
    double embedding_similarity_threshold = 0.7;
    double spam_k = 1.0;          // std-deviation multiplier for spam flags
    bool use_na_in_spam = true;   // also flag unusually many annotations per unit
    double crowdtruth_threshold = 0.5;
    std::uint64_t random_seed = 0;

    // Behavior knobs for the task variants.
    bool split_expressions = false;     // split open-ended phrases into words
    std::string none_annotation = "none";  // the explicit no-answer option
    int explain_threshold = 0;   // judgments with <= N annotations need a justification (0 = off)
    int max_annotations = 0;     // reject judgments with more at ingest (0 = unlimited)
    bool spam_fixpoint = false;  // re-run spam detection after removal until stable
};

const char* to_string(TaskConfig::TaskType type);

// Throws IoError / ConfigError. Unknown keys are rejected.
TaskConfig load_task_config(const std::filesystem::path& path);

// Throws ConfigError when an invariant is broken (closed task without a
// vocabulary file, thresholds outside [0,1], spam_k <= 0).
void validate_config(const TaskConfig& config);

}  // namespace crowdagg
