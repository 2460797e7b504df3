#include "atoms/taskgen.hpp"

#include <algorithm>
#include <set>

namespace atoms {

const std::vector<std::string>& task_ids() {
    static const std::vector<std::string> ids = {
        "reality",    "intent_short", "intent_long", "desire",    "percept",
        "belief1",    "belief2",      "nonliteral",  "knowledge", "emotion"};
    return ids;
}

bool task_is_stratified(const std::string& task_id) {
    return task_id == "desire" || task_id == "percept" || task_id == "nonliteral" ||
           task_id == "knowledge" || task_id == "emotion";
}

const OptionItem& TaskInstance::option(char letter) const {
    for (const auto& o : options) {
        if (o.letter == letter) return o;
    }
    throw GenerationError(std::string("no option lettered ") + letter);
}

namespace {

constexpr int kResampleBudget = 100;

const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {"red",    "green",  "blue",
                                                    "purple", "yellow", "grey"};
    return colors;
}

// Object labels skip the board glyphs O and W.
char label_at(size_t i) {
    static const std::string seq = "GHIJKLMNPQRSTUVXYZ";
    if (i >= seq.size()) throw GenerationError("out of object labels");
    return seq[i];
}

Direction random_dir(Rng& rng) { return static_cast<Direction>(rng.range(0, 3)); }

ObjectKind random_pickable_kind(Rng& rng) {
    static const ObjectKind kinds[3] = {ObjectKind::Key, ObjectKind::Box, ObjectKind::Ball};
    return kinds[rng.range(0, 2)];
}

Coord random_free_cell(const GridState& s, Rng& rng) {
    std::vector<Coord> free;
    for (int r = 1; r < s.height - 1; ++r) {
        for (int c = 1; c < s.width - 1; ++c) {
            Coord cell{c, r};
            if (s.enterable(cell) && s.agent_at(cell) == nullptr) free.push_back(cell);
        }
    }
    if (free.empty()) throw GenerationError("no free cell left");
    return free[rng.index(free.size())];
}

Json coord_json(Coord c) { return Json::array({c.col, c.row}); }

std::vector<OptionItem> letter_options(const std::vector<std::string>& texts) {
    std::vector<OptionItem> out;
    for (size_t i = 0; i < texts.size(); ++i) {
        out.push_back({static_cast<char>('A' + i), texts[i], false});
    }
    return out;
}

GridState final_state(const TaskInstance& inst) {
    return replay_states(inst.start, inst.trace).back();
}

}  // namespace

// ---------------------------------------------------------------------------
// Task 0: reality check — which object is the agent closer to after acting?

TaskInstance gen_reality(uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        int size = rng.range(6, 12);
        GridState s = make_walled_world(size, size);
        int n_obj = rng.range(2, 12);
        for (int i = 0; i < n_obj; ++i) {
            s.objects.push_back({random_pickable_kind(rng), rng.pick(palette()), label_at(i),
                                 random_free_cell(s, rng), false, false});
        }
        s.agents.push_back({"agent", random_free_cell(s, rng), random_dir(rng), std::nullopt});

        int n_targets = rng.range(0, 2);
        ActionTrace trace;
        std::vector<char> target_labels;
        bool planned_ok = true;
        if (n_targets == 0) {
            trace = random_walk(s, "agent", 10, rng).to_trace("agent");
        } else {
            std::vector<size_t> order(s.objects.size());
            for (size_t i = 0; i < order.size(); ++i) order[i] = i;
            rng.shuffle(order);
            ScriptBuilder b;
            b.cur = s;
            try {
                for (int t = 0; t < n_targets; ++t) {
                    char label = s.objects[order[t]].label;
                    target_labels.push_back(label);
                    b.plan_face("agent", b.cur.object_with_label(label)->pos);
                }
            } catch (const PlanningError&) {
                planned_ok = false;
            }
            trace = std::move(b.trace);
        }
        if (!planned_ok || trace.steps.empty()) continue;

        Coord final_pos = replay_states(s, trace).back().agent("agent").pos;
        const ObjectSpec* first = nullptr;
        const ObjectSpec* second = nullptr;
        if (target_labels.empty()) {
            // Random walker: offer the nearest and second-nearest objects.
            std::vector<const ObjectSpec*> by_dist;
            for (const auto& o : s.objects) by_dist.push_back(&o);
            std::sort(by_dist.begin(), by_dist.end(), [&](auto* a, auto* b) {
                int da = manhattan_distance(final_pos, a->pos);
                int db = manhattan_distance(final_pos, b->pos);
                return da != db ? da < db : a->label < b->label;
            });
            first = by_dist[0];
            second = by_dist[1];
        } else {
            first = s.object_with_label(target_labels.back());
            std::vector<const ObjectSpec*> others;
            for (const auto& o : s.objects) {
                if (o.label != first->label) others.push_back(&o);
            }
            second = others[rng.index(others.size())];
        }
        int d1 = manhattan_distance(final_pos, first->pos);
        int d2 = manhattan_distance(final_pos, second->pos);
        if (d1 == d2) continue;  // the question presumes a unique closer object
        if (first->descriptor() == second->descriptor()) continue;

        const ObjectSpec* gold_obj = d1 < d2 ? first : second;
        bool flip = rng.coin();
        const ObjectSpec* opt_a = flip ? second : first;
        const ObjectSpec* opt_b = flip ? first : second;
        int dist_a = manhattan_distance(final_pos, opt_a->pos);
        int dist_b = manhattan_distance(final_pos, opt_b->pos);

        TaskInstance inst;
        inst.task_id = "reality";
        inst.seed = seed;
        inst.start = std::move(s);
        inst.trace = std::move(trace);
        inst.question = "After having taken these actions, which item is the agent closer to?";
        inst.options = letter_options({opt_a->descriptor(), opt_b->descriptor()});
        inst.gold = gold_obj == opt_a ? 'A' : 'B';
        inst.models = {{"agent", ObservabilityModel::full()}};
        inst.latent = Json{{"planner", target_labels.empty() ? "random" : "shortest"},
                           {"targets", std::string(target_labels.begin(), target_labels.end())},
                           {"option_labels", std::string{opt_a->label, opt_b->label}},
                           {"distances", Json::array({d1, d2})},
                           {"gold_label", std::string(1, gold_obj->label)}};
        return inst;
    }
    throw GenerationError("reality: resample budget exhausted");
}

// ---------------------------------------------------------------------------
// Task 1: short-term intention — next action on an optimal trajectory.

namespace {

// First index where the two plans' actions differ; if one is a prefix of the
// other, the divergence is at the shorter length.
size_t divergence_index(const Plan& a, const Plan& b) {
    size_t n = std::min(a.length(), b.length());
    for (size_t i = 0; i < n; ++i) {
        if (a.steps[i].action != b.steps[i].action) return i;
    }
    return n;
}

}  // namespace

TaskInstance gen_intent_short(uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        int size = rng.range(6, 12);
        GridState s = make_walled_world(size, size);
        for (int i = 0; i < 2; ++i) {
            s.objects.push_back({random_pickable_kind(rng), rng.pick(palette()), label_at(i),
                                 random_free_cell(s, rng), false, false});
        }
        s.agents.push_back({"agent", random_free_cell(s, rng), random_dir(rng), std::nullopt});

        size_t goal_idx = rng.coin() ? 1 : 0;
        Coord goal_cell = s.objects[goal_idx].pos;
        Coord other_cell = s.objects[1 - goal_idx].pos;
        Plan plan_goal, plan_other;
        try {
            plan_goal = shortest_path(s, "agent", goal_cell);
            plan_other = shortest_path(s, "agent", other_cell);
        } catch (const PlanningError&) {
            continue;
        }
        if (plan_goal.length() < 2) continue;

        size_t d = divergence_index(plan_goal, plan_other);
        long drawn = std::llround(rng.normal(static_cast<double>(d), 1.5));
        size_t cut = static_cast<size_t>(
            std::clamp<long>(drawn, 1, static_cast<long>(plan_goal.length()) - 1));

        ActionTrace prefix;
        for (size_t i = 0; i < cut; ++i)
            prefix.steps.push_back(ActionStep{"agent", plan_goal.steps[i].action});
        GridState at_cut = replay_states(s, prefix).back();

        std::set<Action> next;
        for (Action a : optimal_first_actions(at_cut, "agent", goal_cell)) next.insert(a);
        if (cut <= d) {
            for (Action a : optimal_first_actions(at_cut, "agent", other_cell)) next.insert(a);
        }
        if (next.size() != 1) continue;  // ambiguous next action

        Action gold_action = plan_goal.steps[cut].action;
        if (*next.begin() != gold_action) continue;

        TaskInstance inst;
        inst.task_id = "intent_short";
        inst.seed = seed;
        inst.start = std::move(s);
        inst.trace = std::move(prefix);
        inst.question = "Which action will the agent take next?";
        inst.options = letter_options({"left", "right", "forward"});
        inst.gold = gold_action == Action::Left ? 'A' : gold_action == Action::Right ? 'B' : 'C';
        inst.models = {{"agent", ObservabilityModel::full()}};
        inst.latent = Json{{"goal_label", std::string(1, inst.start.objects[goal_idx].label)},
                           {"other_label", std::string(1, inst.start.objects[1 - goal_idx].label)},
                           {"divergence", d},
                           {"cut", cut},
                           {"plan_len", plan_goal.length()},
                           {"gold_action", action_name(gold_action)}};
        return inst;
    }
    throw GenerationError("intent_short: resample budget exhausted");
}

// ---------------------------------------------------------------------------
// Task 2: long-term intention — current subgoal of a key-door-object plan.

TaskInstance gen_intent_long(uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        int width = rng.range(8, 12);
        int height = rng.range(6, 10);
        GridState s = make_walled_world(width, height);
        int divider = rng.range(3, width - 4);
        for (int r = 1; r < height - 1; ++r) s.walls[s.cell_index({divider, r})] = 1;
        int door_row = rng.range(1, height - 2);
        Coord door_pos{divider, door_row};
        s.walls[s.cell_index(door_pos)] = 0;
        std::string door_color = rng.pick(palette());
        s.objects.push_back({ObjectKind::Door, door_color, label_at(0), door_pos, false, true});
        s.recompute_rooms();

        bool agent_left = rng.coin();
        auto in_side = [&](Coord c) { return agent_left ? c.col < divider : c.col > divider; };
        auto cell_in_room = [&](bool agent_side) {
            Coord c = random_free_cell(s, rng);
            while (in_side(c) != agent_side || c == door_pos) c = random_free_cell(s, rng);
            return c;
        };
        s.objects.push_back(
            {ObjectKind::Key, door_color, label_at(1), cell_in_room(true), false, false});
        ObjectKind target_kind = rng.coin() ? ObjectKind::Ball : ObjectKind::Box;
        s.objects.push_back(
            {target_kind, rng.pick(palette()), label_at(2), cell_in_room(false), false, false});
        s.agents.push_back({"agent", cell_in_room(true), random_dir(rng), std::nullopt});

        Plan plan;
        try {
            plan = subgoal_plan(s, "agent");
        } catch (const PlanningError&) {
            continue;
        }
        // All three segments must be non-empty for every option to be reachable.
        bool has_object_segment = !plan.steps.empty() && plan.steps.back().subgoal == kSubgoalObject;
        if (!has_object_segment || plan.length() < 3) continue;

        size_t cut = static_cast<size_t>(rng.range(1, static_cast<int>(plan.length()) - 1));
        const std::string& tag = plan.steps[cut].subgoal;

        ActionTrace prefix;
        for (size_t i = 0; i < cut; ++i)
            prefix.steps.push_back(ActionStep{"agent", plan.steps[i].action});

        TaskInstance inst;
        inst.task_id = "intent_long";
        inst.seed = seed;
        inst.start = std::move(s);
        inst.trace = std::move(prefix);
        inst.question =
            "Based on the agent's trajectory thus far, which subgoal is the agent currently "
            "trying to complete?";
        inst.options = letter_options({"Locate and pick up a key", "Locate and go through a door",
                                       "Navigate to the object in the new room"});
        inst.gold = tag == kSubgoalKey ? 'A' : tag == kSubgoalDoor ? 'B' : 'C';
        inst.models = {{"agent", ObservabilityModel::full()}};
        inst.latent = Json{{"cut", cut},
                           {"gold_subgoal", tag},
                           {"plan_len", plan.length()},
                           {"door_label", std::string(1, label_at(0))},
                           {"key_label", std::string(1, label_at(1))},
                           {"object_label", std::string(1, label_at(2))}};
        return inst;
    }
    throw GenerationError("intent_long: resample budget exhausted");
}

// ---------------------------------------------------------------------------
// Task 3: desire — preference readable from the pickup order.

TaskInstance gen_desire(uint64_t seed, bool has_preference) {
    Rng rng(seed);
    std::vector<std::string> ball_palette = {"white", "blue",   "red",  "green",
                                             "purple", "yellow", "grey"};
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        int size = rng.range(7, 11);
        GridState s = make_walled_world(size, size);
        s.pickup_consumes = true;
        std::vector<std::string> colors = ball_palette;
        rng.shuffle(colors);
        std::string color_a = colors[0], color_b = colors[1];
        for (int i = 0; i < 6; ++i) {
            s.objects.push_back({ObjectKind::Ball, i < 3 ? color_a : color_b, label_at(i),
                                 random_free_cell(s, rng), false, false});
        }
        s.agents.push_back({"agent", random_free_cell(s, rng), random_dir(rng), std::nullopt});

        std::string desc_a = color_a + " ball";
        std::string desc_b = color_b + " ball";
        bool prefer_a = rng.coin();
        PreferenceProfile none{{{desc_a, 1}, {desc_b, 1}}, false};
        PreferenceProfile pref_a{{{desc_a, 10}, {desc_b, 1}}, true};
        PreferenceProfile pref_b{{{desc_a, 1}, {desc_b, 10}}, true};
        const PreferenceProfile& generating =
            has_preference ? (prefer_a ? pref_a : pref_b) : none;

        PickupRun run;
        std::vector<std::vector<std::string>> alternatives;
        try {
            run = preference_pickup(s, "agent", generating);
            for (const PreferenceProfile* alt : {&none, &pref_a, &pref_b}) {
                if (alt == &generating) continue;
                auto m = preference_pickup(s, "agent", *alt).picked;
                std::sort(m.begin(), m.end());
                alternatives.push_back(std::move(m));
            }
        } catch (const PlanningError&) {
            continue;
        }
        std::vector<std::string> picked_multiset = run.picked;
        std::sort(picked_multiset.begin(), picked_multiset.end());
        bool discriminative = std::none_of(alternatives.begin(), alternatives.end(),
                                           [&](const auto& m) { return m == picked_multiset; });
        if (!discriminative) continue;

        TaskInstance inst;
        inst.task_id = "desire";
        inst.seed = seed;
        inst.start = std::move(s);
        inst.trace = run.plan.to_trace("agent");
        inst.question = "Which object does the agent prefer?";
        inst.options = letter_options({desc_a, desc_b, "no preference"});
        inst.gold = has_preference ? (prefer_a ? 'A' : 'B') : 'C';
        inst.models = {{"agent", ObservabilityModel::full()}};
        inst.latent = Json{{"has_preference", has_preference},
                           {"preferred", has_preference ? Json(prefer_a ? desc_a : desc_b)
                                                        : Json(nullptr)},
                           {"rewards", Json{{desc_a, generating.rewards.at(desc_a)},
                                            {desc_b, generating.rewards.at(desc_b)}}},
                           {"picked", run.picked}};
        return inst;
    }
    throw GenerationError("desire: resample budget exhausted");
}

// ---------------------------------------------------------------------------
// Task 4: percept — infer the view range from detours.

TaskInstance gen_percept(uint64_t seed, bool limited_view) {
    Rng rng(seed);
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        int width = rng.range(9, 12);
        int height = rng.range(7, 10);
        GridState s = make_walled_world(width, height);
        int divider = rng.range(3, width - 4);
        int gap_row = rng.range(1, height - 2);
        for (int r = 1; r < height - 1; ++r) {
            if (r != gap_row) s.walls[s.cell_index({divider, r})] = 1;
        }
        // Obstacles in each room, away from the doorway column.
        for (int side = 0; side < 2; ++side) {
            int n_obstacles = rng.range(2, 5);
            for (int i = 0; i < n_obstacles; ++i) {
                int c = side == 0 ? rng.range(1, divider - 1) : rng.range(divider + 1, width - 2);
                Coord cell{c, rng.range(1, height - 2)};
                s.walls[s.cell_index(cell)] = 1;
            }
        }
        s.recompute_rooms();

        bool agent_left = rng.coin();
        auto side_cell = [&](bool left) {
            std::vector<Coord> cells;
            for (int r = 1; r < height - 1; ++r) {
                for (int c = left ? 1 : divider + 1; c < (left ? divider : width - 1); ++c) {
                    Coord cell{c, r};
                    if (s.enterable(cell) && s.agent_at(cell) == nullptr) cells.push_back(cell);
                }
            }
            if (cells.empty()) throw GenerationError("room filled by obstacles");
            return cells[rng.index(cells.size())];
        };
        try {
            s.objects.push_back(
                {ObjectKind::Goal, "green", label_at(0), side_cell(!agent_left), false, false});
            s.agents.push_back({"agent", side_cell(agent_left), random_dir(rng), std::nullopt});
        } catch (const GenerationError&) {
            continue;
        }

        Plan full, limited;
        try {
            full = shortest_path(s, "agent", label_at(0));
            limited = explore_limited_view(s, "agent", label_at(0), 3);
        } catch (const PlanningError&) {
            continue;
        }
        if (limited.length() <= full.length()) continue;  // not discriminative

        TaskInstance inst;
        inst.task_id = "percept";
        inst.seed = seed;
        inst.start = std::move(s);
        inst.trace = (limited_view ? limited : full).to_trace("agent");
        inst.question =
            "Based on the agent's actions, what is the most likely perceptual range that the "
            "agent possesses?\nThe perceptual range refers to the number of cells that an agent "
            "can see in front of it.";
        inst.options = letter_options({"3 blocks", "infinitely many blocks"});
        inst.gold = limited_view ? 'A' : 'B';
        inst.models = {{"agent", ObservabilityModel::frontal(limited_view ? 3 : 101)}};
        inst.latent = Json{{"view_range", limited_view ? 3 : 101},
                           {"limited_len", limited.length()},
                           {"full_len", full.length()},
                           {"goal_label", std::string(1, label_at(0))}};
        return inst;
    }
    throw GenerationError("percept: resample budget exhausted");
}

// ---------------------------------------------------------------------------
// Tasks 5 & 6: first- and second-order false belief (unexpected transfer).

TaskInstance gen_belief(BeliefOrder order, uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        BeliefScenario sc;
        try {
            sc = belief_transfer_script(order, rng);
        } catch (const PlanningError&) {
            continue;
        }
        ModelMap models{{sc.watcher, ObservabilityModel::rooms()},
                        {sc.mover, ObservabilityModel::rooms()}};
        auto events = observe_trace(sc.start, sc.trace, models);
        auto watcher_belief = first_order_belief(events, sc.watcher, sc.ball_label);
        if (!watcher_belief.has_value()) continue;
        if (order == BeliefOrder::First) {
            // Genuine false belief: believed location differs from reality.
            if (*watcher_belief != sc.placed_cell || *watcher_belief == sc.final_cell) continue;
        } else {
            auto nested = second_order_belief(events, sc.mover, sc.watcher, sc.ball_label);
            if (!nested.has_value() || *nested != sc.placed_cell) continue;
            if (*watcher_belief != sc.final_cell || *nested == *watcher_belief) continue;
        }

        GridState end = replay_states(sc.start, sc.trace).back();
        GridState believed = end;
        for (auto& o : believed.objects) {
            if (o.label == sc.ball_label) o.pos = sc.placed_cell;
        }
        bool false_first = rng.coin();
        const GridState& board_a = false_first ? believed : end;
        const GridState& board_b = false_first ? end : believed;

        TaskInstance inst;
        inst.task_id = order == BeliefOrder::First ? "belief1" : "belief2";
        inst.seed = seed;
        inst.question =
            order == BeliefOrder::First
                ? "Which of the following boards does " + sc.watcher +
                      " believe to be the current state of the world?"
                : "Which of the following boards does " + sc.mover + " believe that " +
                      sc.watcher + " believes to be the current state of the world?";
        inst.options = {{'A', render_board(board_a), true}, {'B', render_board(board_b), true}};
        inst.gold = false_first ? 'A' : 'B';
        inst.models = std::move(models);
        inst.latent = Json{{"order", order == BeliefOrder::First ? 1 : 2},
                           {"ball_label", std::string(1, sc.ball_label)},
                           {"believed_cell", coord_json(sc.placed_cell)},
                           {"true_cell", coord_json(sc.final_cell)},
                           {"watcher", sc.watcher},
                           {"mover", sc.mover}};
        inst.start = std::move(sc.start);
        inst.trace = std::move(sc.trace);
        return inst;
    }
    throw GenerationError("belief: resample budget exhausted");
}

// ---------------------------------------------------------------------------
// Task 7: non-literal communication — is the agent's claim a lie?

namespace {

// Visit predicate: the agent occupied a 4-adjacent cell facing the object at
// some step (the starting pose counts).
std::set<char> scan_visits(const GridState& start, const ActionTrace& trace) {
    std::set<char> visited;
    for (const GridState& s : replay_states(start, trace)) {
        const AgentState& a = s.agent("agent");
        Coord front{a.pos.col + dir_delta(a.dir).col, a.pos.row + dir_delta(a.dir).row};
        if (const ObjectSpec* o = s.object_at(front)) visited.insert(o->label);
    }
    return visited;
}

}  // namespace

TaskInstance gen_nonliteral(uint64_t seed, bool truthful) {
    Rng rng(seed);
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        int size = rng.range(7, 11);
        GridState s = make_walled_world(size, size);
        int n_obj = rng.range(3, 6);
        std::vector<std::pair<std::string, ObjectKind>> combos;
        for (const auto& color : palette()) {
            for (ObjectKind k : {ObjectKind::Key, ObjectKind::Box, ObjectKind::Ball})
                combos.emplace_back(color, k);
        }
        rng.shuffle(combos);
        for (int i = 0; i < n_obj; ++i) {
            s.objects.push_back({combos[i].second, combos[i].first, label_at(i),
                                 random_free_cell(s, rng), false, false});
        }
        s.agents.push_back({"agent", random_free_cell(s, rng), random_dir(rng), std::nullopt});

        std::vector<size_t> order(s.objects.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        int n_visit = rng.range(1, n_obj - 1);  // strict subset

        ScriptBuilder b;
        b.cur = s;
        bool ok = true;
        std::vector<char> planned;
        try {
            for (int i = 0; i < n_visit; ++i) {
                char label = s.objects[order[i]].label;
                planned.push_back(label);
                b.plan_face("agent", b.cur.object_with_label(label)->pos);
            }
        } catch (const PlanningError&) {
            ok = false;
        }
        if (!ok || b.trace.steps.empty()) continue;

        std::set<char> visited = scan_visits(s, b.trace);
        std::vector<char> pool;
        for (const auto& o : s.objects) {
            bool was_visited = visited.count(o.label) != 0;
            if (was_visited == truthful) pool.push_back(o.label);
        }
        if (pool.empty()) continue;
        char claim = pool[rng.index(pool.size())];

        TaskInstance inst;
        inst.task_id = "nonliteral";
        inst.seed = seed;
        inst.question = "Based on the agent's actions, is it telling the truth?";
        inst.options = letter_options({"yes", "no"});
        inst.gold = truthful ? 'A' : 'B';
        inst.models = {{"agent", ObservabilityModel::full()}};
        inst.latent = Json{{"truthful", truthful},
                           {"claim_label", std::string(1, claim)},
                           {"claim_descriptor", s.object_with_label(claim)->descriptor()},
                           {"planned_visits", std::string(planned.begin(), planned.end())},
                           {"visited", std::string(visited.begin(), visited.end())}};
        inst.start = std::move(s);
        inst.trace = std::move(b.trace);
        return inst;
    }
    throw GenerationError("nonliteral: resample budget exhausted");
}

// ---------------------------------------------------------------------------
// Task 8: knowledge — informed agents go straight, uninformed agents search.

namespace {

struct KnowledgeLayout {
    GridState state;
    std::vector<Coord> door_cells;  // by label order
    char object_a = 'K';            // first two labels after the four doors
    char object_b = 'L';
};

KnowledgeLayout knowledge_layout(Rng& rng) {
    int width = rng.range(9, 13);
    int height = rng.range(9, 13);
    GridState s = make_walled_world(width, height);
    int vc = rng.range(4, width - 5);
    int hr = rng.range(4, height - 5);
    for (int r = 1; r < height - 1; ++r) s.walls[s.cell_index({vc, r})] = 1;
    for (int c = 1; c < width - 1; ++c) s.walls[s.cell_index({c, hr})] = 1;

    KnowledgeLayout layout;
    std::vector<Coord> doors = {
        {vc, rng.range(1, hr - 1)},          // top segment: TL <-> TR
        {vc, rng.range(hr + 1, height - 2)}, // bottom segment: BL <-> BR
        {rng.range(1, vc - 1), hr},          // left segment: TL <-> BL
        {rng.range(vc + 1, width - 2), hr},  // right segment: TR <-> BR
    };
    std::vector<std::string> colors = palette();
    rng.shuffle(colors);
    for (size_t i = 0; i < doors.size(); ++i) {
        s.walls[s.cell_index(doors[i])] = 0;
        s.objects.push_back(
            {ObjectKind::Door, colors[i], label_at(i), doors[i], false, false});  // shut, unlocked
    }
    s.recompute_rooms();
    s.pickup_consumes = true;
    layout.door_cells = std::move(doors);

    auto room_cell = [&](int room) {
        std::vector<Coord> cells;
        for (int r = 1; r < height - 1; ++r) {
            for (int c = 1; c < width - 1; ++c) {
                Coord cell{c, r};
                if (s.room_at(cell) != room || !s.enterable(cell)) continue;
                if (s.agent_at(cell) != nullptr) continue;
                bool near_door = false;
                for (Coord d : layout.door_cells) {
                    if (manhattan_distance(cell, d) <= 1) near_door = true;
                }
                if (near_door) continue;  // keep doorways passable
                cells.push_back(cell);
            }
        }
        if (cells.empty()) throw GenerationError("knowledge room too cramped");
        return cells[rng.index(cells.size())];
    };

    int agent_room = rng.range(0, 3);
    std::vector<int> other_rooms;
    for (int r = 0; r < 4; ++r) {
        if (r != agent_room) other_rooms.push_back(r);
    }
    rng.shuffle(other_rooms);

    std::vector<std::pair<std::string, ObjectKind>> combos;
    for (const auto& color : palette()) {
        for (ObjectKind k : {ObjectKind::Key, ObjectKind::Box, ObjectKind::Ball})
            combos.emplace_back(color, k);
    }
    rng.shuffle(combos);
    layout.object_a = label_at(4);
    layout.object_b = label_at(5);
    s.objects.push_back({combos[0].second, combos[0].first, layout.object_a,
                         room_cell(other_rooms[0]), false, false});
    s.objects.push_back({combos[1].second, combos[1].first, layout.object_b,
                         room_cell(other_rooms[1]), false, false});
    s.agents.push_back({"agent", room_cell(agent_room), random_dir(rng), std::nullopt});
    layout.state = std::move(s);
    return layout;
}

// Deterministic collector: direct hops to a known object's room, else a
// lowest-index sweep of unexplored rooms; room knowledge updates every action.
ActionTrace knowledge_route(const GridState& start, char informed, char first, char second) {
    const ObservabilityModel model = ObservabilityModel::rooms();
    ScriptBuilder b;
    b.cur = start;

    std::set<int> seen_rooms;
    std::map<char, Coord> known;
    const ObjectSpec* informed_obj = start.object_with_label(informed);
    if (informed_obj == nullptr) throw GenerationError("bad informed label");
    known[informed] = informed_obj->pos;

    auto update_seen = [&]() {
        for (Coord c : visible_cells(b.cur, "agent", model)) {
            int room = b.cur.room_at(c);
            if (room >= 0) seen_rooms.insert(room);
            if (const ObjectSpec* o = b.cur.object_at(c)) {
                if (kind_pickupable(o->kind)) known[o->label] = o->pos;
            }
        }
    };
    auto act_seq = [&](const std::vector<Action>& actions) {
        for (Action a : actions) {
            b.act("agent", a);
            update_seen();
        }
    };
    update_seen();

    auto door_between = [&](int room_x, int room_y) -> const ObjectSpec* {
        for (const auto& o : b.cur.objects) {
            if (o.kind != ObjectKind::Door) continue;
            std::set<int> adj;
            for (Direction d :
                 {Direction::Left, Direction::Up, Direction::Right, Direction::Down}) {
                Coord n{o.pos.col + dir_delta(d).col, o.pos.row + dir_delta(d).row};
                if (b.cur.room_at(n) >= 0) adj.insert(b.cur.room_at(n));
            }
            if (adj.count(room_x) && adj.count(room_y)) return &o;
        }
        return nullptr;
    };
    auto current_room = [&]() {
        int room = b.cur.room_at(b.cur.agent("agent").pos);
        if (room >= 0) return room;
        // Standing in a doorway: treat the lower-numbered adjoining room as
        // current; the next hop's BFS works from the door cell either way.
        const AgentState& a = b.cur.agent("agent");
        for (Direction d : {Direction::Left, Direction::Up, Direction::Right, Direction::Down}) {
            Coord n{a.pos.col + dir_delta(d).col, a.pos.row + dir_delta(d).row};
            if (b.cur.room_at(n) >= 0) return b.cur.room_at(n);
        }
        throw GenerationError("agent off the room graph");
    };
    auto hop_to = [&](int target_room) {
        // One room-graph hop toward target_room (rooms form a 4-cycle). The
        // agent passes fully through the door so it always ends inside a room.
        int cur = current_room();
        if (cur == target_room) return;
        const ObjectSpec* direct = door_between(cur, target_room);
        int via = target_room;
        if (direct == nullptr) {
            for (int r = 0; r < b.cur.room_count; ++r) {
                if (r != cur && r != target_room && door_between(cur, r) != nullptr &&
                    door_between(r, target_room) != nullptr) {
                    via = r;
                    break;
                }
            }
            direct = door_between(cur, via);
        }
        if (direct == nullptr) throw GenerationError("disconnected rooms");
        Coord door_cell = direct->pos;
        act_seq(shortest_path(b.cur, "agent", door_cell).actions());
        if (!b.cur.object_at(door_cell)->door_open) act_seq({Action::Open});
        act_seq({Action::Forward, Action::Forward});
    };

    for (char target : {first, second}) {
        int sweeps = 0;
        while (!known.count(target)) {
            if (++sweeps > 8) throw GenerationError("room sweep did not find the object");
            int next_room = -1;
            for (int r = 0; r < b.cur.room_count; ++r) {
                if (!seen_rooms.count(r)) {
                    next_room = r;
                    break;
                }
            }
            if (next_room < 0) throw GenerationError("object never found");
            hop_to(next_room);
        }
        // Route to the object's room, then collect it.
        Coord obj_pos = known.at(target);
        int obj_room = b.cur.room_at(obj_pos);
        int guard = 0;
        while (current_room() != obj_room) {
            hop_to(obj_room);
            if (++guard > 8) throw GenerationError("routing loop");
        }
        act_seq(shortest_path(b.cur, "agent", obj_pos).actions());
        act_seq({Action::Pickup});
    }
    return b.trace;
}

}  // namespace

TaskInstance gen_knowledge(uint64_t seed, bool ask_informed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        KnowledgeLayout layout;
        try {
            layout = knowledge_layout(rng);
        } catch (const GenerationError&) {
            continue;
        }
        const GridState& s = layout.state;
        char informed = rng.coin() ? layout.object_a : layout.object_b;
        char other = informed == layout.object_a ? layout.object_b : layout.object_a;
        char first = rng.coin() ? layout.object_a : layout.object_b;
        char second = first == layout.object_a ? layout.object_b : layout.object_a;

        ActionTrace trace, flipped;
        try {
            trace = knowledge_route(s, informed, first, second);
            flipped = knowledge_route(s, other, first, second);
        } catch (const GenerationError&) {
            continue;
        } catch (const PlanningError&) {
            continue;
        }
        if (trace == flipped) continue;  // the informed flag must shape the trace

        char queried = ask_informed ? informed : other;
        const ObjectSpec* queried_obj = s.object_with_label(queried);

        TaskInstance inst;
        inst.task_id = "knowledge";
        inst.seed = seed;
        inst.question = "Based on the agent's actions, does it know the position of " +
                        queried_obj->descriptor() + " before?";
        inst.options = letter_options({"Yes", "No"});
        inst.gold = ask_informed ? 'A' : 'B';
        inst.models = {{"agent", ObservabilityModel::rooms()}};
        inst.latent = Json{{"informed_label", std::string(1, informed)},
                           {"queried_label", std::string(1, queried)},
                           {"ask_informed", ask_informed},
                           {"pickup_order", std::string{first, second}},
                           {"first_descriptor", s.object_with_label(first)->descriptor()},
                           {"second_descriptor", s.object_with_label(second)->descriptor()}};
        inst.start = layout.state;
        inst.trace = std::move(trace);
        return inst;
    }
    throw GenerationError("knowledge: resample budget exhausted");
}

// ---------------------------------------------------------------------------
// Task 9: emotion — reaction to a witnessed (or unseen) push into the lake.

TaskInstance gen_emotion(uint64_t seed, bool witness) {
    Rng rng(seed);
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        bool rescued = rng.coin();
        EmotionScenario sc;
        try {
            sc = emotion_script(witness, rescued, rng);
        } catch (const PlanningError&) {
            continue;
        }

        std::vector<std::string> variants = {"pusher", "victim"};
        if (rescued) variants.push_back("helper");
        const std::string variant = variants[rng.index(variants.size())];
        std::string about;
        std::string emotional;
        if (variant == "pusher") {
            about = sc.pusher;
            emotional = "angry";
        } else if (variant == "helper") {
            about = sc.helper;
            emotional = "respectful";
        } else {
            about = sc.victim;
            emotional = "sympathetic";
        }

        TaskInstance inst;
        inst.task_id = "emotion";
        inst.seed = seed;
        inst.question =
            "How would " + sc.observer + " most likely feel about " + about + "?";
        inst.options = letter_options({"no strong emotion", emotional});
        inst.gold = witness ? 'B' : 'A';
        for (const auto& agent : sc.start.agents) {
            inst.models[agent.id] = ObservabilityModel::frontal(101);
        }
        Json event_steps = Json::array({sc.push_step});
        if (rescued) event_steps.push_back(sc.pull_step);
        inst.latent = Json{{"witness", witness},
                           {"rescued", rescued},
                           {"variant", variant},
                           {"pusher", sc.pusher},
                           {"victim", sc.victim},
                           {"helper", rescued ? Json(sc.helper) : Json(nullptr)},
                           {"observer", sc.observer},
                           {"lake_cell", coord_json(sc.lake_cell)},
                           {"event_steps", event_steps}};
        inst.start = std::move(sc.start);
        inst.trace = std::move(sc.trace);
        return inst;
    }
    throw GenerationError("emotion: resample budget exhausted");
}

// ---------------------------------------------------------------------------
// Suite assembly.

TaskInstance gen_task(const std::string& task_id, uint64_t seed, bool condition) {
    if (task_id == "reality") return gen_reality(seed);
    if (task_id == "intent_short") return gen_intent_short(seed);
    if (task_id == "intent_long") return gen_intent_long(seed);
    if (task_id == "desire") return gen_desire(seed, condition);
    if (task_id == "percept") return gen_percept(seed, condition);
    if (task_id == "belief1") return gen_belief(BeliefOrder::First, seed);
    if (task_id == "belief2") return gen_belief(BeliefOrder::Second, seed);
    if (task_id == "nonliteral") return gen_nonliteral(seed, condition);
    if (task_id == "knowledge") return gen_knowledge(seed, condition);
    if (task_id == "emotion") return gen_emotion(seed, condition);
    throw GenerationError("unknown task id: " + task_id);
}

SuiteManifest SuiteManifest::defaults(uint64_t suite_seed, int per_task) {
    SuiteManifest m;
    m.suite_seed = suite_seed;
    for (const auto& id : task_ids()) m.counts.emplace_back(id, per_task);
    return m;
}

Json SuiteManifest::to_json() const {
    Json counts_json = Json::object();
    Json quotas = Json::object();
    for (const auto& [task, n] : counts) {
        counts_json[task] = n;
        if (task_is_stratified(task)) {
            quotas[task] = Json::array({n - n / 2, n / 2});
        }
    }
    return Json{{"version", version},
                {"suite_seed", suite_seed},
                {"counts", counts_json},
                {"stratification_quotas", quotas}};
}

SuiteManifest SuiteManifest::from_json(const Json& j) {
    SuiteManifest m;
    m.version = j.at("version").get<std::string>();
    m.suite_seed = j.at("suite_seed").get<uint64_t>();
    for (const auto& id : task_ids()) {
        if (j.at("counts").contains(id))
            m.counts.emplace_back(id, j.at("counts").at(id).get<int>());
    }
    return m;
}

SuiteResult gen_suite(const SuiteManifest& manifest) {
    SuiteResult result;
    for (const auto& [task, n] : manifest.counts) {
        // Exact stratification quota, shuffled so conditions don't alternate.
        std::vector<bool> conditions(static_cast<size_t>(n), true);
        for (int i = 0; i < n / 2; ++i) conditions[static_cast<size_t>(i)] = false;
        Rng strata(child_seed(manifest.suite_seed, task + "/strata", 0));
        std::vector<uint8_t> shuffled(conditions.begin(), conditions.end());
        strata.shuffle(shuffled);

        for (int i = 0; i < n; ++i) {
            uint64_t seed = child_seed(manifest.suite_seed, task, static_cast<uint64_t>(i));
            try {
                result.instances.push_back(gen_task(task, seed, shuffled[static_cast<size_t>(i)] != 0));
            } catch (const std::exception& e) {
                result.failures.push_back(task + " seed=" + std::to_string(seed) + ": " +
                                          e.what());
            }
        }
    }
    return result;
}

}  // namespace atoms
