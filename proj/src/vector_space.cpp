// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include "crowdagg/vector_space.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

#include "crowdagg/errors.hpp"
#include "crowdagg/kernels.hpp"
#include "crowdagg/stemmer.hpp"

namespace crowdagg {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Trim and collapse internal whitespace runs to single spaces.
std::string normalize_spaces(std::string_view s) {
    std::string out;
    bool in_space = true;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out += ' ';
            in_space = false;
            out += c;
        }
    }
    return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> words;
    std::string word;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!word.empty()) words.push_back(std::move(word));
            word.clear();
        } else {
            word += c;
        }
    }
    if (!word.empty()) words.push_back(std::move(word));
    return words;
}

bool edit_distance_at_most_1(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    if (b.size() - a.size() > 1) return false;
    if (a.size() == b.size()) {
        std::size_t diff = 0;
        for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
        return diff <= 1;
    }
    // one insertion: scan to the first mismatch, then require an exact tail
    std::size_t i = 0;
    while (i < a.size() && a[i] == b[i]) ++i;
    return a.substr(i) == b.substr(i + 1);
}

// Stem each word of a (possibly multi-word) token.
std::string stem_token(const std::string& token) {
    auto words = split_whitespace(token);
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += porter_stem(w);
    }
    return out;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

void EmbeddingTable::insert(std::string token, std::vector<double> values) {
    if (values.empty()) throw FormatError("embedding: empty vector for token '" + token + "'");
    if (dim_ == 0) {
        dim_ = values.size();
    } else if (values.size() != dim_) {
        throw FormatError("embedding: token '" + token + "' has dimension " +
                          std::to_string(values.size()) + ", expected " + std::to_string(dim_));
    }
    if (!vectors_.emplace(std::move(token), std::move(values)).second) {
        throw FormatError("embedding: duplicate token");
    }
}

std::span<const double> EmbeddingTable::find(std::string_view token) const {
    auto it = vectors_.find(token);
    if (it == vectors_.end()) return {};
    return it->second;
}

Universe VectorizedTask::universe() const {
    Universe u;
    for (const auto& unit : units) {
        u.add_unit(unit.unit_id, unit.vocab->entries);
    }
    return u;
}

const UnitVectors* VectorizedTask::find_unit(const UnitId& unit_id) const {
    auto it = std::lower_bound(units.begin(), units.end(), unit_id,
                               [](const UnitVectors& u, const UnitId& id) { return u.unit_id < id; });
    if (it == units.end() || it->unit_id != unit_id) return nullptr;
    return &*it;
}

std::vector<WorkerVector> build_closed_vectors(std::span<const Judgment> judgments,
                                               const AnnotationVocabulary& vocab) {
    std::vector<WorkerVector> vectors;
    vectors.reserve(judgments.size());
    for (const auto& j : judgments) {
        WorkerVector v{j.worker_id, j.unit_id, std::vector<std::uint8_t>(vocab.size(), 0)};
        for (const auto& token : j.raw_annotations) {
            auto index = vocab.resolve(token);
            if (!index) {
                throw std::invalid_argument("build_closed_vectors: token '" + token +
                                            "' outside vocabulary");
            }
            v.bits[*index] = 1;
        }
        vectors.push_back(std::move(v));
    }
    return vectors;
}

UnitTokens tokenize_expressions(std::span<const Judgment> unit_judgments,
                                const StopwordSet& stopwords, bool split_words) {
    UnitTokens out;
    std::set<std::string> removed;
    for (const auto& j : unit_judgments) {
        std::set<std::string> tokens;
        for (const auto& expression : j.raw_annotations) {
            std::string lowered = lowercase(expression);
            if (split_words) {
                for (auto& word : split_whitespace(lowered)) {
                    if (stopwords.count(word)) {
                        removed.insert(std::move(word));
                    } else {
                        tokens.insert(std::move(word));
                    }
                }
            } else {
                std::string token = normalize_spaces(lowered);
                if (token.empty()) continue;
                if (stopwords.count(token)) {
                    removed.insert(std::move(token));
                } else {
                    tokens.insert(std::move(token));
                }
            }
        }
        out.by_worker[j.worker_id] = std::vector<std::string>(tokens.begin(), tokens.end());
    }
    out.removed_stopwords.assign(removed.begin(), removed.end());
    return out;
}

KeywordClusters cluster_keywords(const UnitTokens& tokens, const UnitId& unit_id,
                                 const std::string& task_id, const EmbeddingTable* embeddings,
                                 double similarity_threshold) {
    // Token frequency = number of workers who produced it.
    std::map<std::string, std::size_t> frequency;
    for (const auto& [worker, worker_tokens] : tokens.by_worker) {
        for (const auto& t : worker_tokens) ++frequency[t];
    }

    // Frequency order decides merge targets; ties go to the lexicographically
    // first form. Depends only on the frequency map, so judgment order and
    // worker order cannot change the outcome.
    std::vector<std::string> ordered;
    ordered.reserve(frequency.size());
    for (const auto& [token, n] : frequency) ordered.push_back(token);
    std::stable_sort(ordered.begin(), ordered.end(), [&](const std::string& a, const std::string& b) {
        if (frequency[a] != frequency[b]) return frequency[a] > frequency[b];
        return a < b;
    });

    // Spell normalization: merge into the first kept form within edit
    // distance 1. Kept forms are pairwise at distance >= 2 afterwards.
    std::vector<std::string> kept;
    std::map<std::string, std::string> normal_form;
    for (const auto& token : ordered) {
        const std::string* target = nullptr;
        for (const auto& existing : kept) {
            if (edit_distance_at_most_1(token, existing)) {
                target = &existing;
                break;
            }
        }
        if (target) {
            normal_form[token] = *target;
        } else {
            kept.push_back(token);
            normal_form[token] = token;
        }
    }

    // Stem groups over the kept forms.
    std::map<std::string, std::size_t> group_of_kept;  // kept form -> group index
    std::map<std::string, std::size_t> group_by_stem;
    std::vector<std::vector<std::string>> group_members;  // raw tokens per group
    for (const auto& token : kept) {
        std::string stem = stem_token(token);
        auto [it, inserted] = group_by_stem.emplace(stem, group_members.size());
        if (inserted) group_members.emplace_back();
        group_of_kept[token] = it->second;
    }
    for (const auto& [token, norm] : normal_form) {
        group_members[group_of_kept[norm]].push_back(token);
    }

    // Semantic pass: single-link union of groups with any member pair at or
    // above the similarity threshold.
    UnionFind uf(group_members.size());
    std::set<std::string> missing_embedding;
    if (embeddings != nullptr) {
        for (const auto& [token, n] : frequency) {
            if (embeddings->find(token).empty()) missing_embedding.insert(token);
        }
        for (std::size_t a = 0; a < group_members.size(); ++a) {
            for (std::size_t b = a + 1; b < group_members.size(); ++b) {
                bool merge = false;
                for (const auto& ta : group_members[a]) {
                    auto va = embeddings->find(ta);
                    if (va.empty()) continue;
                    for (const auto& tb : group_members[b]) {
                        auto vb = embeddings->find(tb);
                        if (vb.empty()) continue;
                        if (kernels::cosine(va, vb) >= similarity_threshold) {
                            merge = true;
                            break;
                        }
                    }
                    if (merge) break;
                }
                if (merge) uf.unite(a, b);
            }
        }
    }

    std::map<std::size_t, std::vector<std::string>> clusters;  // root -> raw tokens
    for (std::size_t g = 0; g < group_members.size(); ++g) {
        auto& into = clusters[uf.find(g)];
        into.insert(into.end(), group_members[g].begin(), group_members[g].end());
    }

    auto vocab = std::make_shared<AnnotationVocabulary>();
    vocab->task_id = task_id;
    vocab->scope = VocabScope::per_unit;

    ReductionTrace trace;
    trace.unit_id = unit_id;
    trace.removed_stopwords = tokens.removed_stopwords;

    for (auto& [root, members] : clusters) {
        std::sort(members.begin(), members.end());
        const std::string* representative = nullptr;
        std::size_t best = 0;
        for (const auto& m : members) {
            if (representative == nullptr || frequency[m] > best) {
                representative = &m;
                best = frequency[m];
            }
        }
        // The representative has maximal (frequency, lex-first) rank, so it is
        // always a kept form and group_of_kept[rep] is defined.
        ReductionTrace::Cluster cluster;
        cluster.representative = *representative;
        for (const auto& m : members) {
            std::string action;
            if (m == *representative) action = "representative";
            else if (normal_form[m] != m) action = "spell_merge";
            else if (group_of_kept[m] == group_of_kept[*representative]) action = "stem_merge";
            else action = "semantic_merge";
            if (missing_embedding.count(m)) action += "|no_embedding";
            cluster.members.push_back({m, std::move(action)});
            vocab->cluster_map[m] = *representative;
        }
        trace.clusters.push_back(std::move(cluster));
    }

    std::sort(trace.clusters.begin(), trace.clusters.end(),
              [](const auto& a, const auto& b) { return a.representative < b.representative; });
    for (const auto& c : trace.clusters) vocab->entries.push_back(c.representative);

    return {std::move(vocab), std::move(trace)};
}

std::vector<WorkerVector> build_open_vectors(const UnitTokens& tokens,
                                             const AnnotationVocabulary& vocab,
                                             const UnitId& unit_id) {
    std::vector<WorkerVector> vectors;
    vectors.reserve(tokens.by_worker.size());
    for (const auto& [worker, worker_tokens] : tokens.by_worker) {
        WorkerVector v{worker, unit_id, std::vector<std::uint8_t>(vocab.size(), 0)};
        for (const auto& token : worker_tokens) {
            if (auto index = vocab.resolve(token)) v.bits[*index] = 1;
        }
        vectors.push_back(std::move(v));
    }
    return vectors;
}

MediaUnitVector build_media_unit_vector(std::span<const WorkerVector> vectors,
                                        const UnitId& unit_id) {
    MediaUnitVector muv{unit_id, {}, vectors.size()};
    if (vectors.empty()) return muv;
    muv.counts.assign(vectors.front().bits.size(), 0);
    for (const auto& v : vectors) {
        if (v.bits.size() != muv.counts.size()) {
            throw std::invalid_argument("build_media_unit_vector: mixed vector lengths on unit " +
                                        unit_id);
        }
        for (std::size_t i = 0; i < v.bits.size(); ++i) muv.counts[i] += v.bits[i];
    }
    return muv;
}

VectorizedTask vectorize(std::span<const Judgment> judgments, const TaskConfig& config,
                         std::shared_ptr<const AnnotationVocabulary> global_vocab,
                         const StopwordSet& stopwords, const EmbeddingTable* embeddings) {
    std::map<UnitId, std::vector<Judgment>> by_unit;
    for (const auto& j : judgments) by_unit[j.unit_id].push_back(j);

    VectorizedTask task;
    task.task_type = config.task_type;

    if (config.task_type == TaskConfig::TaskType::closed) {
        if (!global_vocab) throw std::invalid_argument("vectorize: closed task without vocabulary");
        task.global_vocab = global_vocab;
        for (auto& [unit_id, unit_judgments] : by_unit) {
            UnitVectors unit{unit_id, global_vocab, build_closed_vectors(unit_judgments, *global_vocab), {}};
            std::sort(unit.workers.begin(), unit.workers.end(),
                      [](const WorkerVector& a, const WorkerVector& b) { return a.worker_id < b.worker_id; });
            unit.muv = build_media_unit_vector(unit.workers, unit_id);
            task.units.push_back(std::move(unit));
        }
        return task;
    }

    for (auto& [unit_id, unit_judgments] : by_unit) {
        UnitTokens tokens = tokenize_expressions(unit_judgments, stopwords, config.split_expressions);
        KeywordClusters clusters = cluster_keywords(tokens, unit_id, config.task_id, embeddings,
                                                    config.embedding_similarity_threshold);
        UnitVectors unit{unit_id, clusters.vocab, build_open_vectors(tokens, *clusters.vocab, unit_id), {}};
        std::sort(unit.workers.begin(), unit.workers.end(),
                  [](const WorkerVector& a, const WorkerVector& b) { return a.worker_id < b.worker_id; });
        unit.muv = build_media_unit_vector(unit.workers, unit_id);
        task.units.push_back(std::move(unit));
        task.traces.push_back(std::move(clusters.trace));
    }
    return task;
}

}  // namespace crowdagg
