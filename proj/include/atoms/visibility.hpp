#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "atoms/gridworld.hpp"

namespace atoms {

enum class VisibilityKind : uint8_t { FullView, FrontalBox, RoomVisibility };

struct ObservabilityModel {
    VisibilityKind kind = VisibilityKind::FullView;
    int box_size = 0;  // FrontalBox only; odd

    static ObservabilityModel full() { return {VisibilityKind::FullView, 0}; }
    static ObservabilityModel frontal(int k) { return {VisibilityKind::FrontalBox, k}; }
    static ObservabilityModel rooms() { return {VisibilityKind::RoomVisibility, 0}; }
};

using ModelMap = std::map<std::string, ObservabilityModel>;

// Cells the agent currently sees.
//   FullView: every non-wall cell.
//   RoomVisibility: the agent's room(s), their boundary door cells, and — one
//   hop only — rooms behind open boundary doors.
//   FrontalBox(k): the k x k box with the agent centered on its near edge,
//   occluded by flood fill from the agent cell (walls and shut doors block
//   sight but are themselves visible).
std::set<Coord> visible_cells(const GridState& state, const std::string& agent_id,
                              const ObservabilityModel& model);

struct ObservationEvent {
    enum class Fact : uint8_t { ObjectAt, AgentAt, AgentAction };

    int time = 0;         // 0 = initial state, i = after trace step i
    std::string observer;
    Fact fact = Fact::ObjectAt;
    std::string subject;  // object label as 1-char string, or agent id
    Coord where;
    std::optional<Action> action;  // AgentAction only

    friend bool operator==(const ObservationEvent&, const ObservationEvent&) = default;
};

// Replays the trace and records, per step and per observer, every visible
// fact. Carried objects count as located at their carrier's cell. Ordering is
// deterministic: (time, observer id, fact kind, subject).
std::vector<ObservationEvent> observe_trace(const GridState& start, const ActionTrace& trace,
                                            const ModelMap& models);

// Location of the most recent observation of the object by the agent.
std::optional<Coord> first_order_belief(const std::vector<ObservationEvent>& events,
                                        const std::string& agent, char object_label);

// What observer_g thinks other_r believes: the location L of the latest step
// at which g saw r, g saw the object at L, and r itself saw the object at L
// (strictest witnessing rule).
std::optional<Coord> second_order_belief(const std::vector<ObservationEvent>& events,
                                         const std::string& observer_g,
                                         const std::string& other_r, char object_label);

// Task 8 semantics: prior knowledge, i.e. the object was observed at trace
// start (initial visibility or an injected informed observation).
bool knows_location(const std::vector<ObservationEvent>& events, const std::string& agent,
                    char object_label);

// Knowledge as of time t (inclusive); monotone in t.
bool knows_location_by(const std::vector<ObservationEvent>& events, const std::string& agent,
                       char object_label, int time);

// Incremental belief/knowledge accumulator over a trace. Queries are
// read-only; a single writer advances the state.
class EpistemicTracker {
public:
    EpistemicTracker(GridState start, ModelMap models);

    // Injects a synthetic time-0 observation of the object's true location
    // (Task 8's "informed" flag). Only valid before any advance().
    void inform(const std::string& agent_id, char object_label);

    void advance(const TraceStep& ts);
    void advance_all(const ActionTrace& trace);

    std::optional<Coord> first_order(const std::string& agent, char object_label) const;
    std::optional<Coord> second_order(const std::string& observer_g, const std::string& other_r,
                                      char object_label) const;
    bool knows(const std::string& agent, char object_label) const;

    const GridState& current() const { return current_; }
    int time() const { return time_; }
    const std::vector<ObservationEvent>& events() const { return events_; }

private:
    void record_observations();

    GridState current_;
    ModelMap models_;
    int time_ = 0;
    bool advanced_ = false;
    std::vector<ObservationEvent> events_;
    std::map<std::pair<std::string, char>, Coord> belief1_;
    std::map<std::pair<std::string, char>, bool> knows0_;
    std::map<std::tuple<std::string, std::string, char>, Coord> belief2_;
};

}  // namespace atoms
