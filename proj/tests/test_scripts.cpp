#include "doctest.h"

#include "atoms/planners.hpp"
#include "atoms/visibility.hpp"
#include "oracles.hpp"

using namespace atoms;

namespace {

ModelMap room_models(const BeliefScenario& sc) {
    return {{sc.watcher, ObservabilityModel::rooms()}, {sc.mover, ObservabilityModel::rooms()}};
}

}  // namespace

TEST_CASE("first-order transfer script builds a genuine false belief") {
    for (uint64_t seed = 1; seed <= 25; ++seed) {
        Rng rng(seed);
        BeliefScenario sc = belief_transfer_script(BeliefOrder::First, rng);
        CHECK(trace_replays_cleanly(sc.start, sc.trace));

        auto events = observe_trace(sc.start, sc.trace, room_models(sc));
        auto belief = first_order_belief(events, sc.watcher, sc.ball_label);
        REQUIRE(belief.has_value());
        CHECK(*belief == sc.placed_cell);
        CHECK(*belief != sc.final_cell);

        // Reality: the ball actually sits at the destination drop cell.
        GridState end = replay_states(sc.start, sc.trace).back();
        CHECK(end.object_with_label(sc.ball_label)->pos == sc.final_cell);

        // Oracle agreement.
        CHECK(belief == oracle::last_seen(sc.start, sc.trace, room_models(sc), sc.watcher,
                                          sc.ball_label));
    }
}

TEST_CASE("omitting the transfer yields a true belief (control variant)") {
    Rng rng(42);
    BeliefScenario sc = belief_transfer_script(BeliefOrder::First, rng, /*include_transfer=*/false);
    auto events = observe_trace(sc.start, sc.trace, room_models(sc));
    auto belief = first_order_belief(events, sc.watcher, sc.ball_label);
    REQUIRE(belief.has_value());
    GridState end = replay_states(sc.start, sc.trace).back();
    CHECK(*belief == end.object_with_label(sc.ball_label)->pos);
}

TEST_CASE("second-order script: nested false belief about a corrected belief") {
    for (uint64_t seed = 1; seed <= 25; ++seed) {
        Rng rng(seed * 31);
        BeliefScenario sc = belief_transfer_script(BeliefOrder::Second, rng);
        CHECK(trace_replays_cleanly(sc.start, sc.trace));

        auto events = observe_trace(sc.start, sc.trace, room_models(sc));
        auto watcher_belief = first_order_belief(events, sc.watcher, sc.ball_label);
        auto nested = second_order_belief(events, sc.mover, sc.watcher, sc.ball_label);
        REQUIRE(watcher_belief.has_value());
        REQUIRE(nested.has_value());
        // The watcher has seen the truth; the mover still attributes the old room.
        CHECK(*watcher_belief == sc.final_cell);
        CHECK(*nested == sc.placed_cell);
        CHECK(*nested != *watcher_belief);

        CHECK(nested == oracle::nested_last_seen(sc.start, sc.trace, room_models(sc), sc.mover,
                                                 sc.watcher, sc.ball_label));
    }
}

TEST_CASE("emotion script: witnesses see the event cells, ignorant observers do not") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        for (bool witness : {true, false}) {
            Rng rng(seed * 7 + (witness ? 1 : 0));
            EmotionScenario sc;
            try {
                sc = emotion_script(witness, /*rescued=*/seed % 2 == 0, rng);
            } catch (const PlanningError&) {
                continue;  // cramped layout; generator-level code resamples
            }
            CHECK(sc.push_step > 0);

            auto states = replay_states(sc.start, sc.trace);
            const ObservabilityModel frontal = ObservabilityModel::frontal(101);
            auto vis_at = [&](int t) { return visible_cells(states[t], sc.observer, frontal); };

            CHECK((vis_at(sc.push_step).count(sc.lake_cell) != 0) == witness);
            if (sc.rescued) {
                CHECK((vis_at(sc.pull_step).count(sc.rescue_cell) != 0) == witness);
                // The victim ends up out of the lake.
                CHECK(states.back().agent(sc.victim).pos == sc.rescue_cell);
            } else {
                CHECK(states.back().agent(sc.victim).pos == sc.lake_cell);
            }

            // The victim lands on the lake cell at the push step.
            CHECK(states[sc.push_step].agent(sc.victim).pos == sc.lake_cell);

            // Action steps replay legally; the scripted displacements are the
            // only terrain-rule exemptions.
            GridState cur = sc.start;
            for (const auto& ts : sc.trace.steps) {
                StepResult r = apply_trace_step(cur, ts);
                if (std::holds_alternative<ActionStep>(ts)) CHECK_FALSE(r.no_op);
                cur = std::move(r.state);
            }
        }
    }
}
