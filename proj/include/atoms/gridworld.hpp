#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace atoms {

class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Column-first cell coordinates: (col, row) = i-th column left to right,
// j-th row top to bottom. Matches the rendered text convention.
struct Coord {
    int col = 0;
    int row = 0;

    friend bool operator==(const Coord&, const Coord&) = default;
    friend auto operator<=>(const Coord&, const Coord&) = default;
};

std::string coord_text(Coord c);  // "(2, 3)"

int manhattan_distance(Coord a, Coord b);

enum class Direction : uint8_t { Left = 0, Up = 1, Right = 2, Down = 3 };

// Turning left from a pose means turning toward the agent's own left hand:
// facing left -> down -> right -> up -> left.
Direction turn_left(Direction d);
Direction turn_right(Direction d);
Coord dir_delta(Direction d);  // unit step, row grows downward
char dir_glyph(Direction d);   // < ^ > v
const std::string& dir_name(Direction d);

enum class Action : uint8_t { Left = 0, Right, Forward, Open, Pickup, Drop, Stay };

inline constexpr int kActionCount = 7;
const std::string& action_name(Action a);

enum class ObjectKind : uint8_t { Key = 0, Box, Ball, Door, Lake, Goal };

const std::string& kind_name(ObjectKind k);
bool kind_pickupable(ObjectKind k);

struct ObjectSpec {
    ObjectKind kind = ObjectKind::Ball;
    std::string color;
    char label = '?';
    Coord pos;
    bool door_open = false;
    bool door_locked = false;

    // "grey key", "blue ball" — as used in option texts and questions.
    std::string descriptor() const { return color + " " + kind_name(kind); }

    friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

struct AgentState {
    std::string id;  // "agent" in single-agent worlds, else a name like "Red"
    Coord pos;
    Direction dir = Direction::Left;
    std::optional<ObjectSpec> carrying;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

// Immutable-by-convention world snapshot. step() and the trace replay return
// fresh values; nothing mutates a shared state.
struct GridState {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> walls;        // width*height, 1 = structural wall
    std::vector<ObjectSpec> objects;   // doors, lakes, goals included; carried objects excluded
    std::vector<AgentState> agents;
    bool pickup_consumes = false;      // collection worlds: pickup removes the object outright

    // Derived room partition; door cells belong to no room (-1).
    std::vector<int> room_of;
    int room_count = 0;

    int cell_index(Coord c) const { return c.row * width + c.col; }
    bool in_bounds(Coord c) const {
        return c.col >= 0 && c.row >= 0 && c.col < width && c.row < height;
    }
    bool is_wall(Coord c) const { return !in_bounds(c) || walls[cell_index(c)] != 0; }

    const ObjectSpec* object_at(Coord c) const;
    const ObjectSpec* object_with_label(char label) const;
    const AgentState* agent_at(Coord c) const;
    const AgentState& agent(const std::string& id) const;  // throws GridError on unknown id
    AgentState& agent(const std::string& id);

    // Whether an agent may stand on the cell, ignoring other agents.
    bool enterable(Coord c) const;
    // Whether sight propagates through the cell (walls and shut doors block).
    bool sight_passable(Coord c) const;

    int room_at(Coord c) const { return in_bounds(c) ? room_of[cell_index(c)] : -1; }

    // Recomputes the room partition: connected components of non-wall cells,
    // with door cells acting as boundaries. Call after laying out walls/doors.
    void recompute_rooms();

    friend bool operator==(const GridState& a, const GridState& b) {
        return a.width == b.width && a.height == b.height && a.walls == b.walls &&
               a.objects == b.objects && a.agents == b.agents &&
               a.pickup_consumes == b.pickup_consumes;
    }
};

// Empty room of the given outer dimensions with a fully walled perimeter.
GridState make_walled_world(int width, int height);

struct StepResult {
    GridState state;
    bool no_op = false;
    std::string reason;  // set when no_op ("blocked by wall", "inventory full", ...)
};

// Pure transition function. Unknown agent id is a hard error.
StepResult step(const GridState& state, const std::string& agent_id, Action action);

// Traces mix plain actions with scripted displacement events (Task 9's push
// and pull), which are exempt from normal movement rules.
struct ActionStep {
    std::string agent;
    Action action = Action::Stay;

    friend bool operator==(const ActionStep&, const ActionStep&) = default;
};

struct ScriptedEvent {
    enum class Kind : uint8_t { Push, Pull };
    Kind kind = Kind::Push;
    std::string actor;
    std::string patient;
    Coord patient_to;

    friend bool operator==(const ScriptedEvent&, const ScriptedEvent&) = default;
};

using TraceStep = std::variant<ActionStep, ScriptedEvent>;

struct ActionTrace {
    std::vector<TraceStep> steps;

    friend bool operator==(const ActionTrace&, const ActionTrace&) = default;
};

StepResult apply_trace_step(const GridState& state, const TraceStep& ts);

// states[0] = start, states[i] = after step i. Throws on unknown agents.
std::vector<GridState> replay_states(const GridState& start, const ActionTrace& trace);

// True when no action step in the trace was a flagged no-op (random walks
// legitimately bump into walls; planner output must replay cleanly).
bool trace_replays_cleanly(const GridState& start, const ActionTrace& trace);

// Board text: column-index header, "r | " row prefixes, cells separated by
// single spaces with a trailing space per line. W walls, O floor, object
// labels, agent pose glyphs.
std::string render_board(const GridState& state);

struct ParsedBoard {
    int width = 0;
    int height = 0;
    std::set<Coord> walls;
    std::map<char, Coord> labels;  // object label -> cell
    std::vector<std::pair<Coord, Direction>> agents;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ParsedBoard parse_board(const std::string& text);

}  // namespace atoms
