// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "crowdagg/aggregation_eval.hpp"
#include "crowdagg/disagreement_metrics.hpp"
#include "crowdagg/rng.hpp"
#include "support.hpp"

using namespace crowdagg;

namespace {

Universe table1_universe() {
    Universe u;
    u.add_unit("u1", testsupport::table1_vocab()->entries);
    return u;
}

std::vector<UnitAnnotationScore> table1_scores() {
    return compute_all_metrics(testsupport::table1_task()).scores;
}

LabelSet labels_of(std::vector<std::pair<UnitId, AnnotationId>> positives,
                   LabelMethod method = LabelMethod::trusted) {
    LabelSet l;
    l.method = method;
    for (auto& [u, a] : positives) l.set(u, a, true);
    return l;
}

}  // namespace

TEST_CASE("crowdtruth labels at the medical threshold keep only clear annotations") {
    auto labels = crowdtruth_labels(table1_scores(), 0.6);
    CHECK(labels.positives() == 1);
    CHECK(labels.positive("u1", "animal"));  // 0.79 is the only score >= 0.6
    CHECK(labels.threshold == 0.6);

    // documented edge: at threshold 0 even zero-score pairs are positive
    std::vector<UnitAnnotationScore> with_zero{{"u", "a", 0.7}, {"u", "b", 0.0}};
    auto all = crowdtruth_labels(with_zero, 0.0);
    CHECK(all.positive("u", "b"));
    CHECK(all.positives() == 2);

    auto unanimous_only = crowdtruth_labels(table1_scores(), 1.0);
    CHECK(unanimous_only.positives() == 0);

    std::vector<UnitAnnotationScore> unanimous{{"u", "a", 1.0}, {"u", "b", 0.0}};
    CHECK(crowdtruth_labels(unanimous, 1.0).positive("u", "a"));
}

TEST_CASE("majority vote on the worked example picks only the half-or-more annotation") {
    auto labels = majority_vote_labels(testsupport::table1_task());
    CHECK(labels.positives() == 1);
    CHECK(labels.positive("u1", "animal"));  // 5/10 = 0.5 exactly
}

TEST_CASE("majority vote falls back to the most-selected annotations") {
    auto vocab = std::make_shared<AnnotationVocabulary>();
    vocab->scope = VocabScope::global;
    vocab->entries = {"a", "b", "c"};
    for (const auto& e : vocab->entries) vocab->cluster_map[e] = e;

    VectorizedTask task;
    task.global_vocab = vocab;
    UnitVectors fallback{"u1", vocab, {}, {"u1", {4, 3, 0}, 10}};
    UnitVectors tie{"u2", vocab, {}, {"u2", {4, 4, 0}, 10}};
    UnitVectors silent{"u3", vocab, {}, {"u3", {0, 0, 0}, 10}};
    task.units = {fallback, tie, silent};

    auto labels = majority_vote_labels(task);
    CHECK(labels.positive("u1", "a"));
    CHECK_FALSE(labels.positive("u1", "b"));
    CHECK(labels.positive("u2", "a"));
    CHECK(labels.positive("u2", "b"));
    CHECK_FALSE(labels.positive("u2", "c"));
    CHECK(labels.positives() == 3);  // u3 contributes nothing

    // the literal rule: every positive annotation's count is >= every
    // non-positive annotation's count on its unit
    for (const auto& unit : task.units) {
        std::int32_t min_positive = 100, max_negative = -1;
        for (std::size_t i = 0; i < unit.muv.counts.size(); ++i) {
            if (labels.positive(unit.unit_id, vocab->entries[i])) {
                min_positive = std::min(min_positive, unit.muv.counts[i]);
            } else {
                max_negative = std::max(max_negative, unit.muv.counts[i]);
            }
        }
        if (max_negative >= 0 && min_positive < 100) CHECK(min_positive >= max_negative);
    }
}

TEST_CASE("single annotator labels are a reproducible uniform draw") {
    auto task = testsupport::table1_task();
    auto a = single_annotator_labels(task, 42);
    auto b = single_annotator_labels(task, 42);
    CHECK(a.labels == b.labels);

    // a unit with one worker forces that worker's labels
    std::vector<Judgment> solo{{"only", "u1", {"animal", "echo"}, "", "t1"}};
    auto solo_task = vectorize(solo, testsupport::closed_config(), testsupport::table1_vocab(),
                               {}, nullptr);
    for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
        auto labels = single_annotator_labels(solo_task, seed);
        CHECK(labels.positive("u1", "animal"));
        CHECK(labels.positive("u1", "echo"));
        CHECK(labels.positives() == 2);
    }

    // different seeds eventually pick different workers
    bool differs = false;
    auto reference = single_annotator_labels(task, 0);
    for (std::uint64_t seed = 1; seed < 30 && !differs; ++seed) {
        differs = !(single_annotator_labels(task, seed).labels == reference.labels);
    }
    CHECK(differs);
}

TEST_CASE("evaluate counts the spec's worked confusion matrix") {
    Universe universe;
    universe.add_unit("u1", {"A", "B", "C"});
    universe.add_unit("u2", {"A", "B", "C"});
    auto pred = labels_of({{"u1", "A"}, {"u2", "B"}, {"u2", "C"}}, LabelMethod::crowdtruth);
    auto truth = labels_of({{"u1", "A"}, {"u1", "B"}, {"u2", "B"}});

    auto outcome = evaluate(pred, truth, universe);
    CHECK(outcome.tp == 2);
    CHECK(outcome.fp == 1);
    CHECK(outcome.fn == 1);
    CHECK(outcome.tn == 2);
    CHECK(outcome.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(outcome.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(outcome.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(outcome.tp + outcome.fp + outcome.fn + outcome.tn == universe.total_pairs());
}

TEST_CASE("evaluate degenerate cases follow the documented conventions") {
    Universe universe;
    universe.add_unit("u1", {"A", "B"});

    auto perfect = evaluate(labels_of({{"u1", "A"}}), labels_of({{"u1", "A"}}), universe);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.accuracy == 1.0);

    auto disjoint = evaluate(labels_of({{"u1", "A"}}), labels_of({{"u1", "B"}}), universe);
    CHECK(disjoint.f1 == 0.0);
    CHECK(disjoint.tp == 0);

    auto nothing = evaluate(LabelSet{}, labels_of({{"u1", "A"}}), universe);
    CHECK(nothing.precision == 0.0);  // no positive predictions
    CHECK(nothing.recall == 0.0);
    CHECK(nothing.f1 == 0.0);

    auto empty_truth = evaluate(LabelSet{}, LabelSet{}, universe);
    CHECK(empty_truth.accuracy == 1.0);
    CHECK(empty_truth.f1 == 0.0);
}

TEST_CASE("evaluate is invariant under annotation relabeling") {
    Universe universe;
    universe.add_unit("u1", {"x", "y", "z"});
    auto pred = labels_of({{"u1", "x"}, {"u1", "y"}}, LabelMethod::crowdtruth);
    auto truth = labels_of({{"u1", "x"}, {"u1", "z"}});
    auto before = evaluate(pred, truth, universe);

    // swap the names x <-> z everywhere
    Universe renamed;
    renamed.add_unit("u1", {"z", "y", "x"});
    auto pred2 = labels_of({{"u1", "z"}, {"u1", "y"}}, LabelMethod::crowdtruth);
    auto truth2 = labels_of({{"u1", "z"}, {"u1", "x"}});
    auto after = evaluate(pred2, truth2, renamed);
    CHECK(before.tp == after.tp);
    CHECK(before.fp == after.fp);
    CHECK(before.fn == after.fn);
    CHECK(before.tn == after.tn);
}

TEST_CASE("threshold sweep on the worked example against the hand-counted matrix") {
    auto truth = labels_of({{"u1", "animal"}, {"u1", "dog barking"}});
    std::vector<double> grid{0.4, 0.6};
    auto sweep = threshold_sweep(table1_scores(), truth, table1_universe(), grid);
    REQUIRE(sweep.points.size() == 2);
    // t=0.4: positives {animal 0.79, dog barking 0.47}; no fp, no fn
    CHECK(sweep.points[0].outcome.f1 == doctest::Approx(1.0).epsilon(1e-12));
    // t=0.6: only animal; dog barking becomes fn
    CHECK(sweep.points[1].outcome.tp == 1);
    CHECK(sweep.points[1].outcome.fn == 1);
    CHECK(sweep.points[1].outcome.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(sweep.best_threshold == 0.4);
}

TEST_CASE("sweep over a unanimous fixture is flat at f1 = 1") {
    std::vector<Judgment> judgments;
    for (int w = 0; w < 5; ++w) {
        judgments.push_back({"w" + std::to_string(w), "u1", {"animal"}, "", "t1"});
    }
    auto task = vectorize(judgments, testsupport::closed_config(), testsupport::table1_vocab(),
                          {}, nullptr);
    auto scores = compute_all_metrics(task).scores;
    auto truth = labels_of({{"u1", "animal"}});
    auto sweep = threshold_sweep(scores, truth, task.universe(), default_threshold_grid());
    for (const auto& point : sweep.points) {
        CHECK(point.outcome.f1 == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(sweep.best_threshold == 0.05);  // all tied: the lowest wins

    // empty truth: any positive prediction makes f1 0
    auto empty_sweep = threshold_sweep(scores, LabelSet{}, task.universe(),
                                       default_threshold_grid());
    for (const auto& point : empty_sweep.points) CHECK(point.outcome.f1 == 0.0);
}

TEST_CASE("sweep validates its grid") {
    auto truth = labels_of({{"u1", "animal"}});
    std::vector<double> empty;
    CHECK_THROWS_AS(threshold_sweep(table1_scores(), truth, table1_universe(), empty),
                    std::invalid_argument);
    std::vector<double> zero{0.0, 0.5};
    CHECK_THROWS_AS(threshold_sweep(table1_scores(), truth, table1_universe(), zero),
                    std::invalid_argument);
    std::vector<double> unsorted{0.5, 0.4};
    CHECK_THROWS_AS(threshold_sweep(table1_scores(), truth, table1_universe(), unsorted),
                    std::invalid_argument);
    CHECK(default_threshold_grid().size() == 20);
    CHECK(default_threshold_grid().front() == 0.05);
    CHECK(default_threshold_grid().back() == 1.0);
}

TEST_CASE("labels are monotone in the threshold and recall never increases") {
    rng::Stream stream(777);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<UnitAnnotationScore> scores;
        Universe universe;
        for (int u = 0; u < 6; ++u) {
            std::vector<AnnotationId> annotations;
            for (int a = 0; a < 5; ++a) {
                annotations.push_back("a" + std::to_string(a));
                scores.push_back({"u" + std::to_string(u), annotations.back(), stream.unit()});
            }
            universe.add_unit("u" + std::to_string(u), annotations);
        }
        LabelSet truth;
        for (const auto& s : scores) {
            if (stream.bernoulli(0.4)) truth.set(s.unit_id, s.annotation_id, true);
        }
        auto grid = default_threshold_grid();
        auto sweep = threshold_sweep(scores, truth, universe, grid);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            auto low = crowdtruth_labels(scores, grid[i - 1]);
            auto high = crowdtruth_labels(scores, grid[i]);
            for (const auto& [key, positive] : high.labels) {
                if (positive) CHECK(low.positive(key.first, key.second));
            }
            CHECK(sweep.points[i].outcome.recall <= sweep.points[i - 1].outcome.recall + 1e-15);
        }

        // accuracy oracle: recount with an independent double loop
        auto pred = crowdtruth_labels(scores, 0.5);
        auto outcome = evaluate(pred, truth, universe);
        std::uint64_t correct = 0, total = 0;
        for (const auto& [unit, annotations] : universe.units()) {
            for (const auto& a : annotations) {
                correct += pred.positive(unit, a) == truth.positive(unit, a);
                ++total;
            }
        }
        CHECK(outcome.accuracy ==
              doctest::Approx(static_cast<double>(correct) / total).epsilon(1e-15));
        CHECK(outcome.tp + outcome.tn == correct);
        CHECK(outcome.tp + outcome.fp + outcome.fn + outcome.tn == total);
    }
}

TEST_CASE("ablation capped at one worker matches the single-annotator regime in expectation") {
    double mean_ablate = 0.0, mean_single = 0.0;
    const int seeds = 100;
    auto fixture = testsupport::make_ambiguity_fixture(12345);
    auto task = vectorize(fixture.judgments, fixture.config, fixture.vocab, {}, nullptr);
    auto universe = task.universe();
    std::vector<int> one{1};
    for (int seed = 0; seed < seeds; ++seed) {
        auto ablation = worker_ablation(task, fixture.truth, 0.3, one,
                                        static_cast<std::uint64_t>(seed));
        mean_ablate += ablation.points[0].outcome.f1 / seeds;
        auto single = single_annotator_labels(task, static_cast<std::uint64_t>(seed));
        mean_single += evaluate(single, fixture.truth, universe).f1 / seeds;
    }
    // both draw one uniform worker per unit; the seeded paths differ but the
    // distribution is the same
    CHECK(mean_ablate == doctest::Approx(mean_single).epsilon(0.03));
}

TEST_CASE("worker ablation with a generous cap equals the full evaluation") {
    auto fixture = testsupport::make_ambiguity_fixture(3);
    auto task = vectorize(fixture.judgments, fixture.config, fixture.vocab, {}, nullptr);
    auto scores = compute_all_metrics(task).scores;
    auto universe = task.universe();
    auto full = evaluate(crowdtruth_labels(scores, 0.3), fixture.truth, universe);

    std::vector<int> caps{1, 15, 40};
    auto ablation = worker_ablation(task, fixture.truth, 0.3, caps, 9);
    REQUIRE(ablation.points.size() == 3);
    CHECK(ablation.points[1].outcome.f1 == doctest::Approx(full.f1).epsilon(1e-12));
    CHECK(ablation.points[2].outcome.f1 == doctest::Approx(full.f1).epsilon(1e-12));
    CHECK(ablation.points[1].outcome.tp == full.tp);
    CHECK(ablation.points[0].n_units_used == task.units.size());

    auto again = worker_ablation(task, fixture.truth, 0.3, caps, 9);
    for (std::size_t i = 0; i < ablation.points.size(); ++i) {
        CHECK(again.points[i].outcome.f1 == ablation.points[i].outcome.f1);
        CHECK(again.points[i].outcome.tp == ablation.points[i].outcome.tp);
    }

    std::vector<int> bad{3, 3};
    CHECK_THROWS_AS(worker_ablation(task, fixture.truth, 0.3, bad, 9), std::invalid_argument);
}

TEST_CASE("mcnemar on hand-built discordant counts") {
    // 20 pairs, truth all negative. A is correct everywhere except 2 pairs;
    // B is wrong on 10 pairs where A is correct.
    Universe universe;
    std::vector<AnnotationId> annotations;
    for (int a = 0; a < 20; ++a) annotations.push_back("a" + std::to_string(a));
    universe.add_unit("u", annotations);

    LabelSet truth;  // all negative
    LabelSet pred_b;
    for (int a = 0; a < 10; ++a) pred_b.set("u", "a" + std::to_string(a), true);
    LabelSet pred_a;
    for (int a = 10; a < 12; ++a) pred_a.set("u", "a" + std::to_string(a), true);

    auto r = mcnemar_test(pred_a, pred_b, truth, universe);
    CHECK(r.b == 10);
    CHECK(r.c == 2);
    CHECK(r.statistic == doctest::Approx(49.0 / 12.0).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.0433).epsilon(2e-2));
    CHECK(r.p_value ==
          doctest::Approx(testsupport::chi2_upper_tail_oracle(r.statistic)).epsilon(1e-9));

    // swapping the methods swaps b and c but keeps the statistic
    auto swapped = mcnemar_test(pred_b, pred_a, truth, universe);
    CHECK(swapped.b == r.c);
    CHECK(swapped.c == r.b);
    CHECK(swapped.statistic == r.statistic);
    CHECK(swapped.p_value == r.p_value);
}

TEST_CASE("mcnemar degenerate and extreme cases") {
    Universe universe;
    universe.add_unit("u", {"a", "b"});
    auto same = labels_of({{"u", "a"}}, LabelMethod::crowdtruth);
    auto r = mcnemar_test(same, same, labels_of({{"u", "b"}}), universe);
    CHECK(r.b == 0);
    CHECK(r.c == 0);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);

    Universe big;
    std::vector<AnnotationId> annotations;
    for (int a = 0; a < 40; ++a) annotations.push_back("a" + std::to_string(a));
    big.add_unit("u", annotations);
    LabelSet truth;  // all negative
    LabelSet wrong_a;
    for (const auto& a : annotations) wrong_a.set("u", a, true);
    auto extreme = mcnemar_test(wrong_a, LabelSet{}, truth, big);
    CHECK(extreme.b == 0);
    CHECK(extreme.c == 40);
    CHECK(extreme.statistic == doctest::Approx(1521.0 / 40.0).epsilon(1e-12));
    CHECK(extreme.p_value < 1e-9);
    CHECK(extreme.p_value ==
          doctest::Approx(testsupport::chi2_upper_tail_oracle(extreme.statistic)).epsilon(1e-6));
}

TEST_CASE("calibration picks the threshold agreeing most with the expert") {
    auto expert = labels_of({{"u1", "animal"}}, LabelMethod::expert);
    std::vector<double> grid{0.2, 0.4, 0.6};
    auto result = calibrate_threshold_vs_expert(table1_scores(), expert, table1_universe(), grid);
    // agreement counts hand-derived from the scores (0.47, 0.32, 0.79, 0.16, 0.16)
    REQUIRE(result.agreement_by_threshold.size() == 3);
    CHECK(result.agreement_by_threshold[0].second == 3);
    CHECK(result.agreement_by_threshold[1].second == 4);
    CHECK(result.agreement_by_threshold[2].second == 5);
    CHECK(result.threshold == 0.6);
    CHECK(result.disagreements.empty());

    // expert all-negative: agreement grows as thresholds empty the positive
    // set, so the highest grid point wins
    LabelSet nothing;
    nothing.method = LabelMethod::expert;
    std::vector<double> negative_grid{0.2, 0.5, 0.9};
    auto negative = calibrate_threshold_vs_expert(table1_scores(), nothing, table1_universe(),
                                                  negative_grid);
    CHECK(negative.threshold == 0.9);
    CHECK(negative.agreement_by_threshold[0].second == 2);
    CHECK(negative.agreement_by_threshold[1].second == 4);
    CHECK(negative.agreement_by_threshold[2].second == 5);

    // constructed identity: expert equals the crowd labels at 0.5 exactly
    auto expert_mid = crowdtruth_labels(table1_scores(), 0.5);
    expert_mid.method = LabelMethod::expert;
    std::vector<double> mid_grid{0.25, 0.5, 0.75};
    auto identity = calibrate_threshold_vs_expert(table1_scores(), expert_mid, table1_universe(),
                                                  mid_grid);
    CHECK(identity.threshold == 0.5);
    CHECK(identity.disagreements.empty());

    std::vector<double> empty;
    CHECK_THROWS_AS(
        calibrate_threshold_vs_expert(table1_scores(), expert, table1_universe(), empty),
        std::invalid_argument);
}
