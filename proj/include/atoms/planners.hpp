#pragma once

#include <map>
#include <string>
#include <vector>

#include "atoms/gridworld.hpp"
#include "atoms/rng.hpp"

namespace atoms {

class PlanningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PlanStep {
    Action action = Action::Stay;
    Coord pos_after;
    Direction dir_after = Direction::Left;
    std::string subgoal;  // empty unless the plan carries subgoal tags
};

struct Plan {
    std::vector<PlanStep> steps;

    size_t length() const { return steps.size(); }
    std::vector<Action> actions() const;
    ActionTrace to_trace(const std::string& agent_id) const;
};

// Minimal action sequence over (position, direction) poses, one cost unit per
// action (turns included), ending 4-adjacent to the target and facing it.
// Deterministic: successor order forward < left < right, FIFO queue.
// Unreachable targets raise PlanningError.
Plan shortest_path(const GridState& state, const std::string& agent, Coord target);
Plan shortest_path(const GridState& state, const std::string& agent, char target_label);

// Same search, but the goal is to stand on the target cell (any direction).
Plan plan_to_reach(const GridState& state, const std::string& agent, Coord target);

// All first actions that start some minimal-length plan toward the target.
std::vector<Action> optimal_first_actions(const GridState& state, const std::string& agent,
                                          Coord target);

// Pure rotation sequence from one facing to another ({}, {left}, {right} or
// {left, left}).
std::vector<Action> turns_to_face(Direction from, Direction to);

// n actions drawn uniformly from {left, right, forward}. Blocked forwards are
// kept as recorded no-ops, matching the reality-check walker.
Plan random_walk(const GridState& state, const std::string& agent, int n, Rng& rng);

extern const std::string kSubgoalKey;
extern const std::string kSubgoalDoor;
extern const std::string kSubgoalObject;

// Three tagged segments: pick up the key, open and pass the door, reach the
// object in the other room. Each segment is internally optimal.
Plan subgoal_plan(const GridState& state, const std::string& agent);

// Frontier-based replanning under FrontalBox(box_size) observability: plan
// within the observed map, execute one action, re-observe, repeat until the
// goal is seen and reached. A box that covers the whole board degenerates to
// shortest_path.
Plan explore_limited_view(const GridState& state, const std::string& agent, char goal_label,
                          int box_size);

struct PreferenceProfile {
    std::map<std::string, int> rewards;  // object descriptor -> reward
    bool has_preference = false;         // true iff the reward ratio is 10:1
};

struct PickupRun {
    Plan plan;
    std::vector<std::string> picked;  // descriptors in pickup order
    GridState final_state;
};

// Iterated greedy collector: next target maximizes reward/(steps+1),
// recomputed after each pickup; stops after three pickups. Ties break toward
// the lowest object label. Requires a collection world (pickup_consumes).
PickupRun preference_pickup(const GridState& state, const std::string& agent,
                            const PreferenceProfile& profile, int pickups = 3);

// Incrementally applies actions/events to a working state while recording the
// trace; planned actions that fail to apply are hard errors.
struct ScriptBuilder {
    GridState cur;
    ActionTrace trace;

    void act(const std::string& agent, Action a);
    void act_all(const std::string& agent, const std::vector<Action>& actions);
    void plan_face(const std::string& agent, Coord target);
    void plan_reach(const std::string& agent, Coord target);
    void face(const std::string& agent, Direction d);
    void event(const ScriptedEvent& ev);
};

enum class BeliefOrder { First, Second };

struct BeliefScenario {
    GridState start;
    ActionTrace trace;
    char ball_label = '?';
    Coord placed_cell;  // where the mover first dropped the ball
    Coord final_cell;   // where the ball actually ends up
    int original_room = -1;
    int destination_room = -1;
    int hide_room = -1;
    std::string watcher = "Red";
    std::string mover = "Green";
};

// Unexpected-transfer script: the mover places the ball in a side room while
// the watcher looks on, the watcher shuts itself in another side room, and
// the mover relocates the ball. Second order additionally shuts the mover in
// the original room and lets the watcher find the ball's true location.
// include_transfer=false builds the control variant (no relocation).
BeliefScenario belief_transfer_script(BeliefOrder order, Rng& rng, bool include_transfer = true);

struct EmotionScenario {
    GridState start;
    ActionTrace trace;
    bool witness = false;
    bool rescued = false;
    std::string pusher;
    std::string victim;
    std::string observer;
    std::string helper;  // empty when not rescued
    Coord lake_cell;
    Coord rescue_cell;
    int push_step = 0;  // 1-based trace indices
    int pull_step = 0;  // 0 when not rescued
};

// Lake scenario: the pusher shoves the victim into the lake (scripted event);
// optionally a helper pulls the victim back out. The observer either has line
// of sight to the event cells at event time or provably does not.
EmotionScenario emotion_script(bool witness, bool rescued, Rng& rng);

}  // namespace atoms
