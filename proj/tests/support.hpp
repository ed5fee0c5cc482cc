// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

// Shared fixtures and independent oracles for the unit and acceptance
// suites. The oracles deliberately avoid the library's kernel/dispatch path.

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "crowdagg/config.hpp"
#include "crowdagg/core_model.hpp"
#include "crowdagg/rng.hpp"
#include "crowdagg/vector_space.hpp"

namespace testsupport {

using namespace crowdagg;

// ---------------------------------------------------------------------------
// Independent numeric oracles.

// Plain long-double cosine with the same zero conventions as the library.
inline double brute_cosine(std::span<const double> a, std::span<const double> b) {
    long double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<long double>(a[i]) * b[i];
        na += static_cast<long double>(a[i]) * a[i];
        nb += static_cast<long double>(b[i]) * b[i];
    }
    if (na == 0 && nb == 0) return 1.0;
    if (na == 0 || nb == 0) return 0.0;
    return static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

// Chi-square(1) upper tail by adaptive Simpson quadrature of the density,
// independent of erfc.
namespace detail {
inline double chi2_pdf(double t) {
    return std::exp(-t / 2.0) / std::sqrt(2.0 * M_PI * t);
}
inline double simpson(double a, double b) {
    double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (chi2_pdf(a) + 4.0 * chi2_pdf(m) + chi2_pdf(b));
}
inline double adaptive(double a, double b, double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double left = simpson(a, m);
    double right = simpson(m, b);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive(a, m, left, eps / 2.0, depth - 1) +
           adaptive(m, b, right, eps / 2.0, depth - 1);
}
}  // namespace detail

inline double chi2_upper_tail_oracle(double x) {
    if (x <= 0.0) return 1.0;
    double upper = x + 200.0;  // tail beyond is ~e^-100, far below any tolerance
    return detail::adaptive(x, upper, detail::simpson(x, upper), 1e-13, 48);
}

// ---------------------------------------------------------------------------
// Temp directory that cleans up after itself.

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("crowdagg_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// The worked 10-worker sound example: counts (3,2,5,1,1) over
// (dog barking, walking, animal, echo, loud).

inline std::shared_ptr<const AnnotationVocabulary> table1_vocab() {
    auto vocab = std::make_shared<AnnotationVocabulary>();
    vocab->task_id = "t1";
    vocab->scope = VocabScope::global;
    vocab->entries = {"dog barking", "walking", "animal", "echo", "loud"};
    for (const auto& e : vocab->entries) vocab->cluster_map[e] = e;
    return vocab;
}

inline std::vector<Judgment> table1_judgments() {
    auto j = [](const char* w, std::vector<std::string> anns, const char* just = "") {
        return Judgment{w, "u1", std::move(anns), just, "t1"};
    };
    return {
        j("w01", {"dog barking", "animal"}),
        j("w02", {"dog barking", "animal"}),
        j("w03", {"dog barking"}),
        j("w04", {"walking", "animal"}),
        j("w05", {"walking"}),
        j("w06", {"animal"}),
        j("w07", {"animal"}),
        j("w08", {"echo"}),
        j("w09", {"loud"}),
        j("w10", {}, "unrecognizable noise"),
    };
}

inline TaskConfig closed_config(const std::string& task_id = "t1") {
    TaskConfig config;
    config.task_id = task_id;
    config.task_type = TaskConfig::TaskType::closed;
    config.vocabulary_file = "unused";  // vocab passed directly to vectorize
    return config;
}

inline VectorizedTask table1_task() {
    return vectorize(table1_judgments(), closed_config(), table1_vocab(), {}, nullptr);
}

// ---------------------------------------------------------------------------
// Synthetic spam task: honest workers draw from a shared per-unit answer
// distribution; one injected worker answers a constant option, one selects
// every option.

struct SpamFixture {
    std::vector<Judgment> judgments;
    std::shared_ptr<const AnnotationVocabulary> vocab;
    std::vector<WorkerId> honest;
    WorkerId constant_worker = "zz_spam_const";
    WorkerId greedy_worker = "zz_spam_all";
    TaskConfig config;
};

inline SpamFixture make_spam_fixture(std::uint64_t seed, std::size_t n_honest = 20,
                                     std::size_t n_units = 30, std::size_t n_options = 8) {
    SpamFixture fixture;
    auto vocab = std::make_shared<AnnotationVocabulary>();
    vocab->task_id = "spam_task";
    vocab->scope = VocabScope::global;
    for (std::size_t i = 0; i < n_options; ++i) {
        std::string option = "opt" + std::to_string(i);
        vocab->entries.push_back(option);
        vocab->cluster_map[option] = option;
    }
    fixture.vocab = vocab;
    fixture.config = closed_config("spam_task");
    fixture.config.random_seed = seed;

    auto unit_name = [](std::size_t u) {
        std::string s = std::to_string(u);
        return "u" + std::string(2 - std::min<std::size_t>(2, s.size()), '0') + s;
    };

    rng::Stream stream(seed * 0x9e3779b97f4a7c15ull + 1);
    std::vector<std::size_t> primary(n_units), secondary(n_units);
    for (std::size_t u = 0; u < n_units; ++u) {
        primary[u] = stream.below(n_options);
        secondary[u] = (primary[u] + 1 + stream.below(n_options - 1)) % n_options;
    }

    for (std::size_t w = 0; w < n_honest; ++w) {
        std::string worker = "h" + std::to_string(w / 10) + std::to_string(w % 10);
        fixture.honest.push_back(worker);
        for (std::size_t u = 0; u < n_units; ++u) {
            double r = stream.unit();
            std::vector<std::string> annotations;
            if (r < 0.80) {
                annotations = {vocab->entries[primary[u]]};
            } else if (r < 0.95) {
                annotations = {vocab->entries[primary[u]], vocab->entries[secondary[u]]};
            } else {
                annotations = {vocab->entries[secondary[u]]};
            }
            fixture.judgments.push_back({worker, unit_name(u), annotations, "", "spam_task"});
        }
    }
    for (std::size_t u = 0; u < n_units; ++u) {
        fixture.judgments.push_back(
            {fixture.constant_worker, unit_name(u), {vocab->entries[0]}, "", "spam_task"});
        fixture.judgments.push_back(
            {fixture.greedy_worker, unit_name(u), vocab->entries, "", "spam_task"});
    }
    return fixture;
}

// ---------------------------------------------------------------------------
// Ambiguity fixture for the worker ablation: two true labels per unit with
// selection probabilities 0.8 and 0.5, light noise on the rest.

struct AmbiguityFixture {
    std::vector<Judgment> judgments;
    std::shared_ptr<const AnnotationVocabulary> vocab;
    LabelSet truth;
    TaskConfig config;
};

inline AmbiguityFixture make_ambiguity_fixture(std::uint64_t seed, std::size_t n_workers = 15,
                                               std::size_t n_units = 40,
                                               std::size_t n_options = 6) {
    AmbiguityFixture fixture;
    auto vocab = std::make_shared<AnnotationVocabulary>();
    vocab->task_id = "ambiguity_task";
    vocab->scope = VocabScope::global;
    for (std::size_t i = 0; i < n_options; ++i) {
        std::string option = "opt" + std::to_string(i);
        vocab->entries.push_back(option);
        vocab->cluster_map[option] = option;
    }
    fixture.vocab = vocab;
    fixture.config = closed_config("ambiguity_task");
    fixture.config.random_seed = seed;
    fixture.config.crowdtruth_threshold = 0.3;
    fixture.truth.method = LabelMethod::trusted;

    auto unit_name = [](std::size_t u) {
        std::string s = std::to_string(u);
        return "u" + std::string(2 - std::min<std::size_t>(2, s.size()), '0') + s;
    };

    rng::Stream stream(seed * 0x9e3779b97f4a7c15ull + 2);
    for (std::size_t u = 0; u < n_units; ++u) {
        std::size_t t1 = stream.below(n_options);
        std::size_t t2 = (t1 + 1 + stream.below(n_options - 1)) % n_options;
        fixture.truth.set(unit_name(u), vocab->entries[t1], true);
        fixture.truth.set(unit_name(u), vocab->entries[t2], true);
        for (std::size_t w = 0; w < n_workers; ++w) {
            std::string worker = "w" + std::to_string(w / 10) + std::to_string(w % 10);
            std::vector<std::string> annotations;
            for (std::size_t o = 0; o < n_options; ++o) {
                double p = o == t1 ? 0.8 : o == t2 ? 0.5 : 0.03;
                if (stream.bernoulli(p)) annotations.push_back(vocab->entries[o]);
            }
            fixture.judgments.push_back({worker, unit_name(u), annotations,
                                         annotations.empty() ? "nothing applies" : "",
                                         "ambiguity_task"});
        }
    }
    return fixture;
}

}  // namespace testsupport
