// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include "crowdagg/config.hpp"

#include <fstream>
#include <string_view>

#include "crowdagg/errors.hpp"

namespace crowdagg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_bool(std::string_view value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: bad boolean for '" + key + "': " + std::string(value));
}

double parse_real(std::string_view value, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(std::string(value), &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': " + std::string(value));
    }
}

long long parse_int(std::string_view value, const std::string& key) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(std::string(value), &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': " + std::string(value));
    }
}

}  // namespace

const char* to_string(TaskConfig::TaskType type) {
    return type == TaskConfig::TaskType::closed ? "closed" : "open_ended";
}

TaskConfig load_task_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    auto resolve = [&](std::string_view value) -> std::filesystem::path {
        std::filesystem::path p{std::string(value)};
        return p.is_absolute() ? p : base / p;
    };

    TaskConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
        }
        std::string key{trim(view.substr(0, eq))};
        std::string_view value = trim(view.substr(eq + 1));

        if (key == "task_id") {
            config.task_id = value;
        } else if (key == "task_type") {
            if (value == "closed") config.task_type = TaskConfig::TaskType::closed;
            else if (value == "open_ended") config.task_type = TaskConfig::TaskType::open_ended;
            else throw ConfigError("config: task_type must be closed or open_ended");
        } else if (key == "vocabulary_file") {
            config.vocabulary_file = resolve(value);
        } else if (key == "stopword_file") {
            config.stopword_file = resolve(value);
        } else if (key == "embedding_file") {
            config.embedding_file = resolve(value);
        } else if (key == "embedding_similarity_threshold") {
            config.embedding_similarity_threshold = parse_real(value, key);
        } else if (key == "spam_k") {
            config.spam_k = parse_real(value, key);
        } else if (key == "use_na_in_spam") {
            config.use_na_in_spam = parse_bool(value, key);
        } else if (key == "crowdtruth_threshold") {
            config.crowdtruth_threshold = parse_real(value, key);
        } else if (key == "random_seed") {
            long long v = parse_int(value, key);
            if (v < 0) throw ConfigError("config: random_seed must be non-negative");
            config.random_seed = static_cast<std::uint64_t>(v);
        } else if (key == "split_expressions") {
            config.split_expressions = parse_bool(value, key);
        } else if (key == "none_annotation") {
            config.none_annotation = value;
        } else if (key == "explain_threshold") {
            config.explain_threshold = static_cast<int>(parse_int(value, key));
        } else if (key == "max_annotations") {
            config.max_annotations = static_cast<int>(parse_int(value, key));
        } else if (key == "spam_fixpoint") {
            config.spam_fixpoint = parse_bool(value, key);
        } else {
            throw ConfigError("config: unknown key '" + key + "' (line " + std::to_string(line_no) + ")");
        }
    }
    validate_config(config);
    return config;
}

void validate_config(const TaskConfig& config) {
    if (config.task_type == TaskConfig::TaskType::closed && config.vocabulary_file.empty()) {
        throw ConfigError("config: closed tasks require vocabulary_file");
    }
    if (config.embedding_similarity_threshold < 0.0 || config.embedding_similarity_threshold > 1.0) {
        throw ConfigError("config: embedding_similarity_threshold must be in [0,1]");
    }
    if (!(config.spam_k > 0.0)) {
        throw ConfigError("config: spam_k must be > 0");
    }
    if (config.crowdtruth_threshold < 0.0 || config.crowdtruth_threshold > 1.0) {
        throw ConfigError("config: crowdtruth_threshold must be in [0,1]");
    }
    if (config.explain_threshold < 0) {
        throw ConfigError("config: explain_threshold must be >= 0");
    }
    if (config.max_annotations < 0) {
        throw ConfigError("config: max_annotations must be >= 0");
    }
}

}  // namespace crowdagg
