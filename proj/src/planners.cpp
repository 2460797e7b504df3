#include "atoms/planners.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "atoms/visibility.hpp"

namespace atoms {

std::vector<Action> Plan::actions() const {
    std::vector<Action> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.action);
    return out;
}

ActionTrace Plan::to_trace(const std::string& agent_id) const {
    ActionTrace t;
    t.steps.reserve(steps.size());
    for (const auto& s : steps) t.steps.push_back(ActionStep{agent_id, s.action});
    return t;
}

namespace {

struct Pose {
    Coord pos;
    Direction dir;
};

int pose_index(const GridState& s, const Pose& p) {
    return s.cell_index(p.pos) * 4 + static_cast<int>(p.dir);
}

// BFS over poses with the fixed successor order forward < left < right.
// passable() gates forward moves; accept() tests goal poses (checked on the
// start pose too, so an already-satisfied goal yields an empty plan).
std::vector<Action> bfs_actions(const GridState& s, Pose start,
                                const std::function<bool(Coord)>& passable,
                                const std::function<bool(const Pose&)>& accept, bool& found) {
    found = false;
    if (accept(start)) {
        found = true;
        return {};
    }
    const int n = s.width * s.height * 4;
    std::vector<int> parent(n, -1);
    std::vector<Action> via(n, Action::Stay);
    std::vector<uint8_t> visited(n, 0);

    std::deque<Pose> queue{start};
    visited[pose_index(s, start)] = 1;
    while (!queue.empty()) {
        Pose cur = queue.front();
        queue.pop_front();
        int cur_idx = pose_index(s, cur);

        Pose succs[3];
        Action acts[3] = {Action::Forward, Action::Left, Action::Right};
        Coord fwd{cur.pos.col + dir_delta(cur.dir).col, cur.pos.row + dir_delta(cur.dir).row};
        int count = 0;
        if (s.in_bounds(fwd) && passable(fwd)) succs[count] = {fwd, cur.dir}, acts[count] = Action::Forward, ++count;
        succs[count] = {cur.pos, turn_left(cur.dir)}, acts[count] = Action::Left, ++count;
        succs[count] = {cur.pos, turn_right(cur.dir)}, acts[count] = Action::Right, ++count;

        for (int i = 0; i < count; ++i) {
            int idx = pose_index(s, succs[i]);
            if (visited[idx]) continue;
            visited[idx] = 1;
            parent[idx] = cur_idx;
            via[idx] = acts[i];
            if (accept(succs[i])) {
                std::vector<Action> actions;
                int walk = idx;
                while (walk != pose_index(s, start)) {
                    actions.push_back(via[walk]);
                    walk = parent[walk];
                }
                std::reverse(actions.begin(), actions.end());
                found = true;
                return actions;
            }
            queue.push_back(succs[i]);
        }
    }
    return {};
}

bool default_passable(const GridState& s, const std::string& agent, Coord c) {
    if (!s.enterable(c)) return false;
    const AgentState* other = s.agent_at(c);
    return other == nullptr || other->id == agent;
}

std::function<bool(const Pose&)> face_cell(Coord target) {
    return [target](const Pose& p) {
        Coord front{p.pos.col + dir_delta(p.dir).col, p.pos.row + dir_delta(p.dir).row};
        return front == target;
    };
}

Plan annotate(const GridState& start, const std::string& agent, const std::vector<Action>& actions,
              const std::string& tag = {}) {
    Plan plan;
    GridState cur = start;
    for (Action a : actions) {
        cur = step(cur, agent, a).state;
        const AgentState& st = cur.agent(agent);
        plan.steps.push_back({a, st.pos, st.dir, tag});
    }
    return plan;
}

void append_actions(Plan& plan, GridState& cur, const std::string& agent,
                    const std::vector<Action>& actions, const std::string& tag = {}) {
    for (Action a : actions) {
        StepResult r = step(cur, agent, a);
        if (r.no_op) throw PlanningError("planned action failed to apply: " + r.reason);
        cur = std::move(r.state);
        const AgentState& st = cur.agent(agent);
        plan.steps.push_back({a, st.pos, st.dir, tag});
    }
}

}  // namespace

Plan shortest_path(const GridState& state, const std::string& agent, Coord target) {
    const AgentState& a = state.agent(agent);
    bool found = false;
    auto actions = bfs_actions(
        state, {a.pos, a.dir}, [&](Coord c) { return default_passable(state, agent, c); },
        face_cell(target), found);
    if (!found) throw PlanningError("target unreachable from " + coord_text(a.pos));
    return annotate(state, agent, actions);
}

Plan shortest_path(const GridState& state, const std::string& agent, char target_label) {
    const ObjectSpec* o = state.object_with_label(target_label);
    if (o == nullptr) throw PlanningError(std::string("no object labeled ") + target_label);
    return shortest_path(state, agent, o->pos);
}

Plan plan_to_reach(const GridState& state, const std::string& agent, Coord target) {
    const AgentState& a = state.agent(agent);
    bool found = false;
    auto actions = bfs_actions(
        state, {a.pos, a.dir}, [&](Coord c) { return default_passable(state, agent, c); },
        [target](const Pose& p) { return p.pos == target; }, found);
    if (!found) throw PlanningError("cell unreachable: " + coord_text(target));
    return annotate(state, agent, actions);
}

std::vector<Action> optimal_first_actions(const GridState& state, const std::string& agent,
                                          Coord target) {
    const AgentState& a = state.agent(agent);
    auto passable = [&](Coord c) { return default_passable(state, agent, c); };
    auto plan_len = [&](Pose from) -> long {
        bool found = false;
        auto actions = bfs_actions(state, from, passable, face_cell(target), found);
        return found ? static_cast<long>(actions.size()) : -1;
    };
    long best = plan_len({a.pos, a.dir});
    std::vector<Action> out;
    if (best <= 0) return out;  // unreachable or already satisfied

    auto consider = [&](Action act, Pose succ) {
        long rest = plan_len(succ);
        if (rest >= 0 && rest + 1 == best) out.push_back(act);
    };
    Coord fwd{a.pos.col + dir_delta(a.dir).col, a.pos.row + dir_delta(a.dir).row};
    if (state.in_bounds(fwd) && passable(fwd)) consider(Action::Forward, {fwd, a.dir});
    consider(Action::Left, {a.pos, turn_left(a.dir)});
    consider(Action::Right, {a.pos, turn_right(a.dir)});
    return out;
}

std::vector<Action> turns_to_face(Direction from, Direction to) {
    if (from == to) return {};
    if (turn_left(from) == to) return {Action::Left};
    if (turn_right(from) == to) return {Action::Right};
    return {Action::Left, Action::Left};
}

Plan random_walk(const GridState& state, const std::string& agent, int n, Rng& rng) {
    if (n < 0) throw PlanningError("negative walk length");
    static const Action choices[3] = {Action::Left, Action::Right, Action::Forward};
    Plan plan;
    GridState cur = state;
    for (int i = 0; i < n; ++i) {
        Action a = choices[rng.range(0, 2)];
        cur = step(cur, agent, a).state;  // blocked forward stays a recorded no-op
        const AgentState& st = cur.agent(agent);
        plan.steps.push_back({a, st.pos, st.dir, {}});
    }
    return plan;
}

const std::string kSubgoalKey = "key";
const std::string kSubgoalDoor = "door";
const std::string kSubgoalObject = "object";

Plan subgoal_plan(const GridState& state, const std::string& agent) {
    const ObjectSpec* key = nullptr;
    const ObjectSpec* door = nullptr;
    const ObjectSpec* target = nullptr;
    for (const auto& o : state.objects) {
        const ObjectSpec** slot = &target;
        if (o.kind == ObjectKind::Key) slot = &key;
        else if (o.kind == ObjectKind::Door) slot = &door;
        if (*slot != nullptr) throw PlanningError("layout has a duplicate " + kind_name(o.kind));
        *slot = &o;
    }
    if (key == nullptr || door == nullptr || target == nullptr)
        throw PlanningError("layout needs a key, a door and a target object");
    const AgentState& a = state.agent(agent);
    if (state.room_at(key->pos) != state.room_at(a.pos))
        throw PlanningError("key must start in the agent's room");
    if (state.room_at(target->pos) == state.room_at(a.pos))
        throw PlanningError("target object must be in the other room");
    if (!door->door_locked) throw PlanningError("door must start locked");

    Plan plan;
    GridState cur = state;
    append_actions(plan, cur, agent, shortest_path(cur, agent, key->pos).actions(), kSubgoalKey);
    append_actions(plan, cur, agent, {Action::Pickup}, kSubgoalKey);

    Coord door_pos = door->pos;
    append_actions(plan, cur, agent, shortest_path(cur, agent, door_pos).actions(), kSubgoalDoor);
    append_actions(plan, cur, agent, {Action::Open, Action::Forward}, kSubgoalDoor);

    Coord target_pos = target->pos;
    append_actions(plan, cur, agent, shortest_path(cur, agent, target_pos).actions(),
                   kSubgoalObject);
    return plan;
}

Plan explore_limited_view(const GridState& state, const std::string& agent, char goal_label,
                          int box_size) {
    const ObjectSpec* goal = state.object_with_label(goal_label);
    if (goal == nullptr) throw PlanningError(std::string("no object labeled ") + goal_label);
    if (box_size / 2 >= std::max(state.width, state.height)) {
        return shortest_path(state, agent, goal->pos);  // box covers the whole board
    }

    const Coord goal_cell = goal->pos;
    const ObservabilityModel model = ObservabilityModel::frontal(box_size);
    std::vector<uint8_t> seen(static_cast<size_t>(state.width) * state.height, 0);
    auto observe = [&](const GridState& cur) {
        for (Coord c : visible_cells(cur, agent, model)) seen[cur.cell_index(c)] = 1;
    };

    Plan plan;
    GridState cur = state;
    const size_t cap = static_cast<size_t>(state.width) * state.height * 20;
    auto passable_known = [&](Coord c) {
        return seen[cur.cell_index(c)] && default_passable(cur, agent, c);
    };
    auto at_goal = face_cell(goal_cell);
    auto frontier = [&](const Pose& p) {
        Coord front{p.pos.col + dir_delta(p.dir).col, p.pos.row + dir_delta(p.dir).row};
        return cur.in_bounds(front) && !seen[cur.cell_index(front)];
    };

    observe(cur);
    while (true) {
        const AgentState& a = cur.agent(agent);
        Pose pose{a.pos, a.dir};
        if (seen[cur.cell_index(goal_cell)] && at_goal(pose)) break;
        if (plan.steps.size() > cap) throw PlanningError("exploration did not converge");

        std::vector<Action> sub;
        bool found = false;
        if (seen[cur.cell_index(goal_cell)]) {
            sub = bfs_actions(cur, pose, passable_known, at_goal, found);
        }
        if (!found) {
            sub = bfs_actions(cur, pose, passable_known, frontier, found);
            if (!found) throw PlanningError("no reachable frontier and goal unseen");
        }
        if (sub.empty()) {
            // Accepting pose with the goal still unseen cannot happen: the cell
            // in front is observed every step.
            throw PlanningError("exploration stalled");
        }
        StepResult r = step(cur, agent, sub.front());
        if (r.no_op) throw PlanningError("exploration step failed: " + r.reason);
        cur = std::move(r.state);
        const AgentState& st = cur.agent(agent);
        plan.steps.push_back({sub.front(), st.pos, st.dir, {}});
        observe(cur);
    }
    return plan;
}

void ScriptBuilder::act(const std::string& agent, Action a) {
    StepResult r = step(cur, agent, a);
    if (r.no_op) throw PlanningError("scripted action failed: " + r.reason);
    cur = std::move(r.state);
    trace.steps.push_back(ActionStep{agent, a});
}

void ScriptBuilder::act_all(const std::string& agent, const std::vector<Action>& actions) {
    for (Action a : actions) act(agent, a);
}

void ScriptBuilder::plan_face(const std::string& agent, Coord target) {
    act_all(agent, shortest_path(cur, agent, target).actions());
}

void ScriptBuilder::plan_reach(const std::string& agent, Coord target) {
    act_all(agent, plan_to_reach(cur, agent, target).actions());
}

void ScriptBuilder::face(const std::string& agent, Direction d) {
    act_all(agent, turns_to_face(cur.agent(agent).dir, d));
}

void ScriptBuilder::event(const ScriptedEvent& ev) {
    cur = apply_trace_step(cur, ev).state;
    trace.steps.push_back(ev);
}

PickupRun preference_pickup(const GridState& state, const std::string& agent,
                            const PreferenceProfile& profile, int pickups) {
    if (!state.pickup_consumes)
        throw PlanningError("preference_pickup requires a collection world");
    PickupRun run;
    GridState cur = state;
    for (int round = 0; round < pickups; ++round) {
        // argmax reward/(steps+1); cross-multiplied integer compare, ties to
        // the lowest label.
        const ObjectSpec* best = nullptr;
        long best_len = 0;
        std::vector<const ObjectSpec*> candidates;
        for (const auto& o : cur.objects) {
            if (kind_pickupable(o.kind)) candidates.push_back(&o);
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const ObjectSpec* x, const ObjectSpec* y) { return x->label < y->label; });
        for (const ObjectSpec* o : candidates) {
            auto it = profile.rewards.find(o->descriptor());
            if (it == profile.rewards.end())
                throw PlanningError("no reward for " + o->descriptor());
            long len;
            try {
                len = static_cast<long>(shortest_path(cur, agent, o->pos).length());
            } catch (const PlanningError&) {
                continue;
            }
            if (best == nullptr) {
                best = o;
                best_len = len;
                continue;
            }
            long lhs = static_cast<long>(it->second) * (best_len + 1);
            long rhs = static_cast<long>(profile.rewards.at(best->descriptor())) * (len + 1);
            if (lhs > rhs) {
                best = o;
                best_len = len;
            }
        }
        if (best == nullptr) throw PlanningError("no reachable object left to pick up");
        Coord target = best->pos;
        run.picked.push_back(best->descriptor());
        Plan leg = shortest_path(cur, agent, target);
        std::vector<Action> acts = leg.actions();
        acts.push_back(Action::Pickup);
        append_actions(run.plan, cur, agent, acts);
    }
    run.final_state = std::move(cur);
    return run;
}

}  // namespace atoms
