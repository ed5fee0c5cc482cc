// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdagg/errors.hpp"
#include "crowdagg/pipeline.hpp"

namespace {

using crowdagg::TaskConfig;
using crowdagg::pipeline::Options;

struct Cli {
    std::string config_file;
    std::string judgments;
    std::string out_dir = ".";
    std::string task_type;
    double threshold = -1.0;
    double spam_k = -1.0;
    long long seed = -1;
    std::string embedding_file;
    double similarity_threshold = -1.0;
    std::string stopwords;

    std::string truth;
    std::string expert;
    std::string labels;
    std::string labels_a, labels_b;
    std::string method = "crowdtruth";
    std::vector<int> max_workers;
    std::vector<double> thresholds;
};

void add_common(CLI::App* cmd, Cli& cli) {
    cmd->add_option("--config", cli.config_file, "task config file (flat key = value)")
        ->required();
    cmd->add_option("--judgments", cli.judgments, "judgment CSV file")->required();
    cmd->add_option("--out-dir", cli.out_dir, "output directory (default .)");
    cmd->add_option("--task-type", cli.task_type, "override: closed or open_ended");
    cmd->add_option("--threshold", cli.threshold, "override: crowdtruth positive threshold");
    cmd->add_option("--spam-k", cli.spam_k, "override: spam std-deviation multiplier");
    cmd->add_option("--seed", cli.seed, "override: random seed");
    cmd->add_option("--embedding-file", cli.embedding_file, "override: embedding table");
    cmd->add_option("--similarity-threshold", cli.similarity_threshold,
                    "override: semantic merge cosine threshold");
    cmd->add_option("--stopwords", cli.stopwords, "override: stopword file");
}

Options build_options(const Cli& cli) {
    Options options;
    options.config = crowdagg::load_task_config(cli.config_file);
    if (!cli.task_type.empty()) {
        if (cli.task_type == "closed") options.config.task_type = TaskConfig::TaskType::closed;
        else if (cli.task_type == "open_ended")
            options.config.task_type = TaskConfig::TaskType::open_ended;
        else throw crowdagg::ConfigError("--task-type must be closed or open_ended");
    }
    if (cli.threshold >= 0.0) options.config.crowdtruth_threshold = cli.threshold;
    if (cli.spam_k >= 0.0) options.config.spam_k = cli.spam_k;
    if (cli.seed >= 0) options.config.random_seed = static_cast<std::uint64_t>(cli.seed);
    if (!cli.embedding_file.empty()) options.config.embedding_file = cli.embedding_file;
    if (cli.similarity_threshold >= 0.0) {
        options.config.embedding_similarity_threshold = cli.similarity_threshold;
    }
    if (!cli.stopwords.empty()) options.config.stopword_file = cli.stopwords;
    crowdagg::validate_config(options.config);

    options.judgments_file = cli.judgments;
    options.out_dir = cli.out_dir;
    options.truth_file = cli.truth;
    options.expert_file = cli.expert;
    options.labels_file = cli.labels;
    options.labels_a = cli.labels_a;
    options.labels_b = cli.labels_b;
    options.method = cli.method;
    options.max_workers = cli.max_workers;
    options.thresholds = cli.thresholds;
    return options;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"disagreement-aware aggregation and evaluation of crowd annotations"};
    app.require_subcommand(1);

    Cli cli;

    auto* ingest = app.add_subcommand("ingest", "parse and validate the judgment file");
    auto* vectorize = app.add_subcommand("vectorize", "build vectors and run answer-space reduction");
    auto* metrics = app.add_subcommand("metrics", "compute worker metrics and unit-annotation scores");
    auto* spam = app.add_subcommand("spam", "flag spam workers, filter them and recompute");
    auto* aggregate = app.add_subcommand("aggregate", "produce labels with one method");
    auto* evaluate = app.add_subcommand("evaluate", "score labelings against trusted judgments");
    auto* sweep = app.add_subcommand("sweep", "evaluate across a threshold grid");
    auto* ablate = app.add_subcommand("ablate", "evaluate with at most m workers per unit");
    auto* mcnemar = app.add_subcommand("mcnemar", "significance test between two labelings");
    auto* calibrate = app.add_subcommand("calibrate", "pick the threshold agreeing most with experts");
    auto* all = app.add_subcommand("all", "run the whole pipeline in order");

    for (auto* cmd : {ingest, vectorize, metrics, spam, aggregate, evaluate, sweep, ablate,
                      mcnemar, calibrate, all}) {
        add_common(cmd, cli);
    }

    aggregate->add_option("--method", cli.method, "crowdtruth | majority | single");
    evaluate->add_option("--truth", cli.truth, "trusted judgment CSV")->required();
    evaluate->add_option("--labels", cli.labels, "evaluate this labels file instead");
    evaluate->add_option("--expert", cli.expert, "also evaluate this expert labeling");
    sweep->add_option("--truth", cli.truth, "trusted judgment CSV")->required();
    sweep->add_option("--thresholds", cli.thresholds, "grid points in (0,1]");
    ablate->add_option("--truth", cli.truth, "trusted judgment CSV")->required();
    ablate->add_option("--max-workers", cli.max_workers, "worker caps, strictly increasing");
    mcnemar->add_option("--truth", cli.truth, "trusted judgment CSV")->required();
    mcnemar->add_option("--a", cli.labels_a, "labels file for method A");
    mcnemar->add_option("--b", cli.labels_b, "labels file for method B");
    calibrate->add_option("--expert", cli.expert, "expert label CSV")->required();
    calibrate->add_option("--thresholds", cli.thresholds, "grid points in (0,1]");
    all->add_option("--truth", cli.truth, "trusted judgment CSV (enables evaluation stages)");
    all->add_option("--expert", cli.expert, "expert label CSV (enables calibration)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : crowdagg::pipeline::kUsage;
    }

    try {
        Options options = build_options(cli);
        if (ingest->parsed()) return crowdagg::pipeline::cmd_ingest(options);
        if (vectorize->parsed()) return crowdagg::pipeline::cmd_vectorize(options);
        if (metrics->parsed()) return crowdagg::pipeline::cmd_metrics(options);
        if (spam->parsed()) return crowdagg::pipeline::cmd_spam(options);
        if (aggregate->parsed()) return crowdagg::pipeline::cmd_aggregate(options);
        if (evaluate->parsed()) return crowdagg::pipeline::cmd_evaluate(options);
        if (sweep->parsed()) return crowdagg::pipeline::cmd_sweep(options);
        if (ablate->parsed()) return crowdagg::pipeline::cmd_ablate(options);
        if (mcnemar->parsed()) return crowdagg::pipeline::cmd_mcnemar(options);
        if (calibrate->parsed()) return crowdagg::pipeline::cmd_calibrate(options);
        if (all->parsed()) return crowdagg::pipeline::cmd_all(options);
        std::cerr << "error: no subcommand\n";
        return crowdagg::pipeline::kUsage;
    } catch (const crowdagg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return crowdagg::pipeline::kConfigError;
    } catch (const crowdagg::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return crowdagg::pipeline::kMissingInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return crowdagg::pipeline::kError;
    }
}
