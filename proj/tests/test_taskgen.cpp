#include "doctest.h"

#include <set>

#include "atoms/jsonio.hpp"
#include "atoms/taskgen.hpp"
#include "oracles.hpp"

using namespace atoms;

namespace {

void check_option_shape(const TaskInstance& inst) {
    // Letters are a prefix of A,B,C,... with no duplicates; gold is present.
    for (size_t i = 0; i < inst.options.size(); ++i) {
        CHECK(inst.options[i].letter == static_cast<char>('A' + i));
    }
    bool gold_found = false;
    for (const auto& o : inst.options) gold_found = gold_found || o.letter == inst.gold;
    CHECK(gold_found);
}

GridState replay_end(const TaskInstance& inst) {
    return replay_states(inst.start, inst.trace).back();
}

char scan_closer_option(const TaskInstance& inst) {
    Coord pos = replay_end(inst).agent("agent").pos;
    std::string labels = inst.latent.at("option_labels").get<std::string>();
    int da = manhattan_distance(pos, inst.start.object_with_label(labels[0])->pos);
    int db = manhattan_distance(pos, inst.start.object_with_label(labels[1])->pos);
    REQUIRE(da != db);
    return da < db ? 'A' : 'B';
}

}  // namespace

TEST_CASE("reality: gold is the strictly closer object by Manhattan distance") {
    for (uint64_t seed = 100; seed < 130; ++seed) {
        TaskInstance inst = gen_reality(seed);
        check_option_shape(inst);
        CHECK(inst.question ==
              "After having taken these actions, which item is the agent closer to?");
        CHECK(inst.options.size() == 2);
        CHECK(inst.gold == scan_closer_option(inst));
        // Random-walk traces are exactly the paper's ten actions.
        if (inst.latent.at("planner") == "random") CHECK(inst.trace.steps.size() == 10);
        // The two option descriptors must identify distinct objects.
        CHECK(inst.options[0].text != inst.options[1].text);
    }
}

TEST_CASE("reality: planner episodes offer the visited target") {
    int planner_seen = 0;
    for (uint64_t seed = 200; seed < 260 && planner_seen < 10; ++seed) {
        TaskInstance inst = gen_reality(seed);
        if (inst.latent.at("planner") != "shortest") continue;
        ++planner_seen;
        std::string targets = inst.latent.at("targets").get<std::string>();
        REQUIRE_FALSE(targets.empty());
        char last_target = targets.back();
        std::string option_labels = inst.latent.at("option_labels").get<std::string>();
        CHECK(option_labels.find(last_target) != std::string::npos);
        // The agent finishes adjacent to (distance 1 from) the visited object.
        Coord pos = replay_end(inst).agent("agent").pos;
        CHECK(manhattan_distance(pos, inst.start.object_with_label(last_target)->pos) == 1);
    }
    CHECK(planner_seen == 10);
}

TEST_CASE("intent_short: the unique optimal next action is the gold letter") {
    for (uint64_t seed = 300; seed < 330; ++seed) {
        TaskInstance inst = gen_intent_short(seed);
        check_option_shape(inst);
        CHECK(inst.question == "Which action will the agent take next?");
        CHECK(inst.options[0].text == "left");
        CHECK(inst.options[1].text == "right");
        CHECK(inst.options[2].text == "forward");
        CHECK(trace_replays_cleanly(inst.start, inst.trace));

        GridState cut_state = replay_end(inst);
        Coord goal =
            inst.start.object_with_label(inst.latent.at("goal_label").get<std::string>()[0])->pos;
        long best = oracle::plan_length(cut_state, "agent", goal);
        REQUIRE(best > 0);
        std::set<char> optimal;
        struct Cand { Action a; char letter; } cands[] = {{Action::Left, 'A'},
                                                          {Action::Right, 'B'},
                                                          {Action::Forward, 'C'}};
        for (const auto& cand : cands) {
            StepResult r = step(cut_state, "agent", cand.a);
            if (r.no_op) continue;
            if (oracle::plan_length(r.state, "agent", goal) + 1 == best)
                optimal.insert(cand.letter);
        }
        REQUIRE(optimal.size() == 1);
        CHECK(*optimal.begin() == inst.gold);

        // The shown prefix is optimal toward the goal at every step.
        auto states = replay_states(inst.start, inst.trace);
        long from_start = oracle::plan_length(states.front(), "agent", goal);
        for (size_t i = 0; i < states.size(); ++i) {
            CHECK(oracle::plan_length(states[i], "agent", goal) ==
                  from_start - static_cast<long>(i));
        }
    }
}

TEST_CASE("intent_short: the prefix up to divergence is optimal for both objects") {
    for (uint64_t seed = 350; seed < 365; ++seed) {
        TaskInstance inst = gen_intent_short(seed);
        size_t divergence = inst.latent.at("divergence").get<size_t>();
        Coord other =
            inst.start.object_with_label(inst.latent.at("other_label").get<std::string>()[0])
                ->pos;
        auto states = replay_states(inst.start, inst.trace);
        long other_start = oracle::plan_length(states.front(), "agent", other);
        size_t horizon = std::min(divergence, inst.trace.steps.size());
        for (size_t i = 0; i <= horizon; ++i) {
            CHECK(oracle::plan_length(states[i], "agent", other) ==
                  other_start - static_cast<long>(i));
        }
    }
}

TEST_CASE("intent_long: gold matches an independent segment rule") {
    for (uint64_t seed = 400; seed < 430; ++seed) {
        TaskInstance inst = gen_intent_long(seed);
        check_option_shape(inst);
        CHECK(inst.options.size() == 3);
        CHECK(inst.options[0].text == "Locate and pick up a key");
        CHECK(inst.options[1].text == "Locate and go through a door");
        CHECK(inst.options[2].text == "Navigate to the object in the new room");
        CHECK(trace_replays_cleanly(inst.start, inst.trace));

        // Independent rule at the cut state: no key yet -> A; key but still in
        // the starting room -> B; through (or in) the doorway -> C.
        GridState cut_state = replay_end(inst);
        const AgentState& a = cut_state.agent("agent");
        int start_room = inst.start.room_at(inst.start.agent("agent").pos);
        char expected;
        if (!a.carrying.has_value()) {
            expected = 'A';
        } else if (cut_state.room_at(a.pos) == start_room) {
            expected = 'B';
        } else {
            expected = 'C';
        }
        CHECK(inst.gold == expected);
    }
}

TEST_CASE("desire: the picked-kind multiset determines the preference label") {
    int pref = 0, none = 0;
    for (uint64_t seed = 500; seed < 540; ++seed) {
        bool has_pref = seed % 2 == 0;
        TaskInstance inst = gen_desire(seed, has_pref);
        check_option_shape(inst);
        CHECK(inst.question == "Which object does the agent prefer?");
        CHECK(inst.options[2].text == "no preference");
        CHECK(trace_replays_cleanly(inst.start, inst.trace));
        (has_pref ? pref : none) += 1;
        CHECK((inst.gold == 'C') == !has_pref);

        // Scan the trace for the picked descriptors (independent of the
        // generator's bookkeeping).
        std::vector<std::string> scanned;
        GridState cur = inst.start;
        for (const auto& ts : inst.trace.steps) {
            const auto& as = std::get<ActionStep>(ts);
            if (as.action == Action::Pickup) {
                const AgentState& ag = cur.agent("agent");
                Coord front{ag.pos.col + dir_delta(ag.dir).col,
                            ag.pos.row + dir_delta(ag.dir).row};
                REQUIRE(cur.object_at(front) != nullptr);
                scanned.push_back(cur.object_at(front)->descriptor());
            }
            cur = apply_trace_step(cur, ts).state;
        }
        CHECK(scanned.size() == 3);
        CHECK(scanned == inst.latent.at("picked").get<std::vector<std::string>>());

        // The multiset matches the generating profile's simulation and neither
        // alternative's (the acceptance rule), so the label is recoverable.
        std::sort(scanned.begin(), scanned.end());
        std::string desc_a = inst.options[0].text;
        std::string desc_b = inst.options[1].text;
        PreferenceProfile profiles[3] = {
            {{{desc_a, 10}, {desc_b, 1}}, true},
            {{{desc_a, 1}, {desc_b, 10}}, true},
            {{{desc_a, 1}, {desc_b, 1}}, false},
        };
        char labels[3] = {'A', 'B', 'C'};
        int matches = 0;
        char recovered = '?';
        for (int i = 0; i < 3; ++i) {
            auto m = preference_pickup(inst.start, "agent", profiles[i]).picked;
            std::sort(m.begin(), m.end());
            if (m == scanned) {
                ++matches;
                recovered = labels[i];
            }
        }
        CHECK(matches == 1);
        CHECK(recovered == inst.gold);
    }
    CHECK(pref > 0);
    CHECK(none > 0);
}

TEST_CASE("percept: limited-view traces are strictly longer than the optimum") {
    for (uint64_t seed = 600; seed < 620; ++seed) {
        bool limited = seed % 2 == 0;
        TaskInstance inst = gen_percept(seed, limited);
        check_option_shape(inst);
        CHECK(inst.options[0].text == "3 blocks");
        CHECK(inst.options[1].text == "infinitely many blocks");
        CHECK(trace_replays_cleanly(inst.start, inst.trace));
        CHECK(inst.gold == (limited ? 'A' : 'B'));

        Coord goal =
            inst.start.object_with_label(inst.latent.at("goal_label").get<std::string>()[0])->pos;
        long optimal = oracle::plan_length(inst.start, "agent", goal);
        REQUIRE(optimal >= 0);
        if (limited) {
            CHECK(static_cast<long>(inst.trace.steps.size()) > optimal);
        } else {
            CHECK(static_cast<long>(inst.trace.steps.size()) == optimal);
        }
    }
}

TEST_CASE("belief: gold board holds the believed (false) ball location") {
    for (const char* task : {"belief1", "belief2"}) {
        for (uint64_t seed = 700; seed < 715; ++seed) {
            TaskInstance inst = gen_task(task, seed);
            check_option_shape(inst);
            CHECK(inst.options.size() == 2);
            CHECK(trace_replays_cleanly(inst.start, inst.trace));

            char ball = inst.latent.at("ball_label").get<std::string>()[0];
            ModelMap models{{"Red", ObservabilityModel::rooms()},
                            {"Green", ObservabilityModel::rooms()}};
            std::optional<Coord> believed;
            if (std::string(task) == "belief1") {
                believed = oracle::last_seen(inst.start, inst.trace, models, "Red", ball);
            } else {
                believed =
                    oracle::nested_last_seen(inst.start, inst.trace, models, "Green", "Red", ball);
            }
            REQUIRE(believed.has_value());

            // Parse both option boards; the gold board shows the believed cell,
            // the other shows the true cell, and they differ.
            Coord true_cell = replay_end(inst).object_with_label(ball)->pos;
            CHECK(*believed != true_cell);
            for (const auto& option : inst.options) {
                ParsedBoard board = parse_board(option.text);
                Coord shown = board.labels.at(ball);
                if (option.letter == inst.gold) {
                    CHECK(shown == *believed);
                } else {
                    CHECK(shown == true_cell);
                }
            }

            // belief2 extra: the watcher's own belief is true while the nested
            // attribution is stale.
            if (std::string(task) == "belief2") {
                auto direct = oracle::last_seen(inst.start, inst.trace, models, "Red", ball);
                REQUIRE(direct.has_value());
                CHECK(*direct == true_cell);
                CHECK(*believed != *direct);
            }
        }
    }
}

TEST_CASE("belief: option order varies across seeds") {
    std::set<char> golds;
    for (uint64_t seed = 700; seed < 730; ++seed) golds.insert(gen_belief(BeliefOrder::First, seed).gold);
    CHECK(golds.size() == 2);  // false board lands on both letters
}

TEST_CASE("nonliteral: gold equals a brute-force visit scan") {
    for (uint64_t seed = 800; seed < 840; ++seed) {
        bool truthful = seed % 2 == 0;
        TaskInstance inst = gen_nonliteral(seed, truthful);
        check_option_shape(inst);
        CHECK(inst.question == "Based on the agent's actions, is it telling the truth?");
        CHECK(inst.options[0].text == "yes");
        CHECK(inst.options[1].text == "no");
        CHECK(trace_replays_cleanly(inst.start, inst.trace));

        char claim = inst.latent.at("claim_label").get<std::string>()[0];
        Coord claim_pos = inst.start.object_with_label(claim)->pos;
        bool visited = false;
        for (const GridState& s : replay_states(inst.start, inst.trace)) {
            const AgentState& a = s.agent("agent");
            Coord front{a.pos.col + dir_delta(a.dir).col, a.pos.row + dir_delta(a.dir).row};
            if (front == claim_pos) visited = true;
        }
        CHECK(visited == truthful);
        CHECK(inst.gold == (truthful ? 'A' : 'B'));
        // The claim phrase names exactly one object.
        CHECK(inst.latent.at("claim_descriptor").get<std::string>() ==
              inst.start.object_with_label(claim)->descriptor());
    }
}

TEST_CASE("knowledge: gold follows the informed flag and initial visibility") {
    for (uint64_t seed = 900; seed < 930; ++seed) {
        bool ask_informed = seed % 2 == 0;
        TaskInstance inst = gen_knowledge(seed, ask_informed);
        check_option_shape(inst);
        CHECK(inst.options[0].text == "Yes");
        CHECK(inst.options[1].text == "No");
        CHECK(trace_replays_cleanly(inst.start, inst.trace));
        CHECK(inst.gold == (ask_informed ? 'A' : 'B'));

        char informed = inst.latent.at("informed_label").get<std::string>()[0];
        char queried = inst.latent.at("queried_label").get<std::string>()[0];
        CHECK((queried == informed) == ask_informed);

        // The uninformed object is invisible at trace start (doors shut, other
        // room), so prior knowledge reduces to the informed flag.
        ModelMap models{{"agent", ObservabilityModel::rooms()}};
        for (const auto& obj : inst.start.objects) {
            if (!kind_pickupable(obj.kind)) continue;
            CHECK_FALSE(oracle::seen_by(inst.start, inst.trace, models, "agent", obj.label, 0));
        }

        // Tracker semantics: injecting the informed observation makes
        // knows_location match the gold answer.
        EpistemicTracker tracker(inst.start, models);
        tracker.inform("agent", informed);
        CHECK(knows_location(tracker.events(), "agent", queried) == (inst.gold == 'A'));
    }
}

TEST_CASE("emotion: gold matches the observer's visible set at event time") {
    for (uint64_t seed = 1000; seed < 1030; ++seed) {
        bool witness = seed % 2 == 0;
        TaskInstance inst = gen_emotion(seed, witness);
        check_option_shape(inst);
        CHECK(inst.options[0].text == "no strong emotion");
        CHECK(inst.gold == (witness ? 'B' : 'A'));

        std::string observer = inst.latent.at("observer").get<std::string>();
        Coord lake{inst.latent.at("lake_cell")[0].get<int>(),
                   inst.latent.at("lake_cell")[1].get<int>()};
        auto states = replay_states(inst.start, inst.trace);
        for (const auto& step_idx : inst.latent.at("event_steps")) {
            const GridState& at_event = states[step_idx.get<size_t>()];
            auto vis = visible_cells(at_event, observer, ObservabilityModel::frontal(101));
            CHECK((vis.count(lake) != 0) == witness);
        }

        std::string variant = inst.latent.at("variant").get<std::string>();
        std::string expected_emotional = variant == "pusher"   ? "angry"
                                         : variant == "helper" ? "respectful"
                                                               : "sympathetic";
        CHECK(inst.options[1].text == expected_emotional);
        CHECK(inst.question.find(inst.latent.at(variant).get<std::string>()) !=
              std::string::npos);
    }
}

TEST_CASE("suite: determinism, stratification, and id uniqueness") {
    SuiteManifest manifest = SuiteManifest::defaults(11, 10);
    SuiteResult a = gen_suite(manifest);
    SuiteResult b = gen_suite(manifest);
    CHECK(a.failures.empty());
    CHECK(b.failures.empty());
    CHECK(a.instances.size() == 100);

    // Byte-identical serialization across runs.
    REQUIRE(a.instances.size() == b.instances.size());
    for (size_t i = 0; i < a.instances.size(); ++i) {
        CHECK(instance_to_json(a.instances[i]).dump() == instance_to_json(b.instances[i]).dump());
    }

    std::set<std::string> ids;
    std::map<std::string, int> desire_strata, nonlit_strata, emotion_strata, percept_strata,
        knowledge_strata;
    for (const auto& inst : a.instances) {
        ids.insert(inst.id());
        if (inst.task_id == "desire")
            desire_strata[inst.latent.at("has_preference").get<bool>() ? "y" : "n"] += 1;
        if (inst.task_id == "nonliteral")
            nonlit_strata[inst.latent.at("truthful").get<bool>() ? "y" : "n"] += 1;
        if (inst.task_id == "emotion")
            emotion_strata[inst.latent.at("witness").get<bool>() ? "y" : "n"] += 1;
        if (inst.task_id == "percept")
            percept_strata[inst.latent.at("view_range").get<int>() == 3 ? "y" : "n"] += 1;
        if (inst.task_id == "knowledge")
            knowledge_strata[inst.latent.at("ask_informed").get<bool>() ? "y" : "n"] += 1;
    }
    CHECK(ids.size() == 100);
    for (auto* strata : {&desire_strata, &nonlit_strata, &emotion_strata, &percept_strata,
                         &knowledge_strata}) {
        CHECK((*strata)["y"] == 5);
        CHECK((*strata)["n"] == 5);
    }

    // A zero count yields an empty stream for that task.
    SuiteManifest none = manifest;
    none.counts[0].second = 0;
    SuiteResult empty_reality = gen_suite(none);
    for (const auto& inst : empty_reality.instances) CHECK(inst.task_id != "reality");
}

TEST_CASE("dataset file round trip preserves records") {
    SuiteManifest manifest = SuiteManifest::defaults(13, 2);
    SuiteResult result = gen_suite(manifest);
    REQUIRE(result.failures.empty());
    std::string path = "test_dataset_roundtrip.jsonl";
    write_dataset(path, result.instances);
    auto records = read_dataset(path);
    REQUIRE(records.size() == result.instances.size());
    for (size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].id() == result.instances[i].id());
        CHECK(records[i].gold == result.instances[i].gold);
        CHECK(records[i].sections.qa == render_sections(result.instances[i]).qa);
    }
    std::remove(path.c_str());

    // Manifest round trip.
    write_manifest("test_manifest_roundtrip.json", manifest);
    SuiteManifest back = read_manifest("test_manifest_roundtrip.json");
    CHECK(back.suite_seed == manifest.suite_seed);
    CHECK(back.counts == manifest.counts);
    std::remove("test_manifest_roundtrip.json");
}
