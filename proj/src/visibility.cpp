#include "atoms/visibility.hpp"

#include <algorithm>
#include <deque>

namespace atoms {

namespace {

void add_room_and_doors(const GridState& s, int room, std::set<Coord>& out,
                        std::set<int>& rooms_seen) {
    if (room < 0 || rooms_seen.count(room)) return;
    rooms_seen.insert(room);
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            if (s.room_of[s.cell_index({c, r})] == room) out.insert({c, r});
        }
    }
    for (const auto& o : s.objects) {
        if (o.kind != ObjectKind::Door) continue;
        for (Direction d : {Direction::Left, Direction::Up, Direction::Right, Direction::Down}) {
            Coord n{o.pos.col + dir_delta(d).col, o.pos.row + dir_delta(d).row};
            if (s.room_at(n) == room) {
                out.insert(o.pos);
                break;
            }
        }
    }
}

std::vector<int> rooms_adjacent_to_door(const GridState& s, Coord door) {
    std::vector<int> rooms;
    for (Direction d : {Direction::Left, Direction::Up, Direction::Right, Direction::Down}) {
        Coord n{door.col + dir_delta(d).col, door.row + dir_delta(d).row};
        int room = s.room_at(n);
        if (room >= 0 && std::find(rooms.begin(), rooms.end(), room) == rooms.end())
            rooms.push_back(room);
    }
    return rooms;
}

std::set<Coord> room_visibility(const GridState& s, const AgentState& a) {
    std::set<Coord> out;
    std::set<int> rooms_seen;
    out.insert(a.pos);

    std::vector<int> current;
    int own = s.room_at(a.pos);
    if (own >= 0) {
        current.push_back(own);
    } else {
        // Standing in a doorway: both adjoining rooms count as current.
        current = rooms_adjacent_to_door(s, a.pos);
    }
    for (int room : current) add_room_and_doors(s, room, out, rooms_seen);

    // One hop through open doors on the current rooms' boundaries.
    for (const auto& o : s.objects) {
        if (o.kind != ObjectKind::Door || !o.door_open) continue;
        std::vector<int> adj = rooms_adjacent_to_door(s, o.pos);
        bool on_boundary = std::any_of(adj.begin(), adj.end(), [&](int r) {
            return std::find(current.begin(), current.end(), r) != current.end();
        });
        if (!on_boundary) continue;
        for (int r : adj) add_room_and_doors(s, r, out, rooms_seen);
    }
    return out;
}

std::set<Coord> frontal_box(const GridState& s, const AgentState& a, int k) {
    if (k < 1 || k % 2 == 0) throw GridError("FrontalBox size must be odd and positive");
    int half = k / 2;
    int min_c, max_c, min_r, max_r;
    switch (a.dir) {
        case Direction::Up:
            min_c = a.pos.col - half; max_c = a.pos.col + half;
            min_r = a.pos.row - (k - 1); max_r = a.pos.row;
            break;
        case Direction::Down:
            min_c = a.pos.col - half; max_c = a.pos.col + half;
            min_r = a.pos.row; max_r = a.pos.row + (k - 1);
            break;
        case Direction::Left:
            min_c = a.pos.col - (k - 1); max_c = a.pos.col;
            min_r = a.pos.row - half; max_r = a.pos.row + half;
            break;
        case Direction::Right:
            min_c = a.pos.col; max_c = a.pos.col + (k - 1);
            min_r = a.pos.row - half; max_r = a.pos.row + half;
            break;
        default: throw GridError("bad direction");
    }
    auto in_box = [&](Coord c) {
        return c.col >= min_c && c.col <= max_c && c.row >= min_r && c.row <= max_r;
    };

    std::set<Coord> visible;
    std::deque<Coord> queue;
    visible.insert(a.pos);
    if (s.sight_passable(a.pos)) queue.push_back(a.pos);
    while (!queue.empty()) {
        Coord cur = queue.front();
        queue.pop_front();
        for (Direction d : {Direction::Left, Direction::Up, Direction::Right, Direction::Down}) {
            Coord n{cur.col + dir_delta(d).col, cur.row + dir_delta(d).row};
            if (!s.in_bounds(n) || !in_box(n) || visible.count(n)) continue;
            visible.insert(n);  // blockers are seen but do not propagate
            if (s.sight_passable(n)) queue.push_back(n);
        }
    }
    return visible;
}

}  // namespace

std::set<Coord> visible_cells(const GridState& state, const std::string& agent_id,
                              const ObservabilityModel& model) {
    const AgentState& a = state.agent(agent_id);
    switch (model.kind) {
        case VisibilityKind::FullView: {
            std::set<Coord> out;
            for (int r = 0; r < state.height; ++r) {
                for (int c = 0; c < state.width; ++c) {
                    if (!state.is_wall({c, r})) out.insert({c, r});
                }
            }
            return out;
        }
        case VisibilityKind::RoomVisibility:
            return room_visibility(state, a);
        case VisibilityKind::FrontalBox:
            return frontal_box(state, a, model.box_size);
    }
    throw GridError("bad observability model");
}

namespace {

// Object positions including carried objects (located at their carrier).
std::vector<std::pair<char, Coord>> object_positions(const GridState& s) {
    std::vector<std::pair<char, Coord>> out;
    for (const auto& o : s.objects) out.emplace_back(o.label, o.pos);
    for (const auto& a : s.agents) {
        if (a.carrying.has_value()) out.emplace_back(a.carrying->label, a.pos);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void observe_state(const GridState& s, const ModelMap& models, int time,
                   const std::optional<std::pair<std::string, Action>>& acted,
                   std::vector<ObservationEvent>& out) {
    std::vector<std::string> observers;
    for (const auto& [id, model] : models) observers.push_back(id);
    // std::map iteration is already id-sorted; facts below are emitted in
    // (fact kind, subject) order per observer.
    for (const std::string& id : observers) {
        std::set<Coord> vis = visible_cells(s, id, models.at(id));
        for (const auto& [label, pos] : object_positions(s)) {
            if (vis.count(pos))
                out.push_back({time, id, ObservationEvent::Fact::ObjectAt,
                               std::string(1, label), pos, std::nullopt});
        }
        std::vector<const AgentState*> others;
        for (const auto& b : s.agents) others.push_back(&b);
        std::sort(others.begin(), others.end(),
                  [](const AgentState* x, const AgentState* y) { return x->id < y->id; });
        for (const AgentState* b : others) {
            if (vis.count(b->pos))
                out.push_back({time, id, ObservationEvent::Fact::AgentAt, b->id, b->pos,
                               std::nullopt});
        }
        if (acted.has_value()) {
            const auto& [actor, action] = *acted;
            const AgentState& actor_state = s.agent(actor);
            if (vis.count(actor_state.pos))
                out.push_back({time, id, ObservationEvent::Fact::AgentAction, actor,
                               actor_state.pos, action});
        }
    }
}

}  // namespace

std::vector<ObservationEvent> observe_trace(const GridState& start, const ActionTrace& trace,
                                            const ModelMap& models) {
    std::vector<ObservationEvent> events;
    GridState cur = start;
    observe_state(cur, models, 0, std::nullopt, events);
    int t = 0;
    for (const auto& ts : trace.steps) {
        ++t;
        StepResult r = apply_trace_step(cur, ts);
        cur = std::move(r.state);
        std::optional<std::pair<std::string, Action>> acted;
        if (const auto* as = std::get_if<ActionStep>(&ts)) acted = {as->agent, as->action};
        observe_state(cur, models, t, acted, events);
    }
    return events;
}

std::optional<Coord> first_order_belief(const std::vector<ObservationEvent>& events,
                                        const std::string& agent, char object_label) {
    std::optional<Coord> belief;
    for (const auto& e : events) {
        if (e.observer == agent && e.fact == ObservationEvent::Fact::ObjectAt &&
            e.subject.size() == 1 && e.subject[0] == object_label) {
            belief = e.where;
        }
    }
    return belief;
}

std::optional<Coord> second_order_belief(const std::vector<ObservationEvent>& events,
                                         const std::string& observer_g,
                                         const std::string& other_r, char object_label) {
    const std::string label(1, object_label);
    std::optional<Coord> belief;
    int best_time = -1;
    // Group by time: need g-sees-r, g-sees-object@L, r-sees-object@L in one step.
    std::map<int, std::vector<const ObservationEvent*>> by_time;
    for (const auto& e : events) by_time[e.time].push_back(&e);
    for (const auto& [t, step_events] : by_time) {
        bool g_sees_r = false;
        std::optional<Coord> g_sees_obj;
        std::optional<Coord> r_sees_obj;
        for (const auto* e : step_events) {
            if (e->fact == ObservationEvent::Fact::AgentAt && e->observer == observer_g &&
                e->subject == other_r)
                g_sees_r = true;
            if (e->fact == ObservationEvent::Fact::ObjectAt && e->subject == label) {
                if (e->observer == observer_g) g_sees_obj = e->where;
                if (e->observer == other_r) r_sees_obj = e->where;
            }
        }
        if (g_sees_r && g_sees_obj.has_value() && r_sees_obj.has_value() &&
            *g_sees_obj == *r_sees_obj && t > best_time) {
            best_time = t;
            belief = *g_sees_obj;
        }
    }
    return belief;
}

bool knows_location(const std::vector<ObservationEvent>& events, const std::string& agent,
                    char object_label) {
    return knows_location_by(events, agent, object_label, 0);
}

bool knows_location_by(const std::vector<ObservationEvent>& events, const std::string& agent,
                       char object_label, int time) {
    for (const auto& e : events) {
        if (e.time <= time && e.observer == agent &&
            e.fact == ObservationEvent::Fact::ObjectAt && e.subject.size() == 1 &&
            e.subject[0] == object_label)
            return true;
    }
    return false;
}

EpistemicTracker::EpistemicTracker(GridState start, ModelMap models)
    : current_(std::move(start)), models_(std::move(models)) {
    record_observations();
}

void EpistemicTracker::inform(const std::string& agent_id, char object_label) {
    if (advanced_) throw GridError("inform() is only valid at trace start");
    const ObjectSpec* o = current_.object_with_label(object_label);
    if (o == nullptr) throw GridError(std::string("no such object: ") + object_label);
    ObservationEvent e{0, agent_id, ObservationEvent::Fact::ObjectAt,
                       std::string(1, object_label), o->pos, std::nullopt};
    events_.push_back(e);
    belief1_[{agent_id, object_label}] = o->pos;
    knows0_[{agent_id, object_label}] = true;
}

void EpistemicTracker::advance(const TraceStep& ts) {
    advanced_ = true;
    ++time_;
    StepResult r = apply_trace_step(current_, ts);
    current_ = std::move(r.state);
    size_t first_new = events_.size();
    std::optional<std::pair<std::string, Action>> acted;
    if (const auto* as = std::get_if<ActionStep>(&ts)) acted = {as->agent, as->action};
    observe_state(current_, models_, time_, acted, events_);

    // Incremental belief updates from this step's events only.
    std::map<std::pair<std::string, char>, Coord> seen_obj;
    std::set<std::pair<std::string, std::string>> seen_agent;
    for (size_t i = first_new; i < events_.size(); ++i) {
        const auto& e = events_[i];
        if (e.fact == ObservationEvent::Fact::ObjectAt) {
            char label = e.subject[0];
            belief1_[{e.observer, label}] = e.where;
            seen_obj[{e.observer, label}] = e.where;
        } else if (e.fact == ObservationEvent::Fact::AgentAt) {
            seen_agent.insert({e.observer, e.subject});
        }
    }
    for (const auto& [g_pair, L] : seen_obj) {
        const auto& [g, label] = g_pair;
        for (const auto& r_agent : current_.agents) {
            if (r_agent.id == g) continue;
            if (!seen_agent.count({g, r_agent.id})) continue;
            auto r_sees = seen_obj.find({r_agent.id, label});
            if (r_sees != seen_obj.end() && r_sees->second == L)
                belief2_[{g, r_agent.id, label}] = L;
        }
    }
}

void EpistemicTracker::advance_all(const ActionTrace& trace) {
    for (const auto& ts : trace.steps) advance(ts);
}

void EpistemicTracker::record_observations() {
    size_t first_new = events_.size();
    observe_state(current_, models_, 0, std::nullopt, events_);
    std::map<std::pair<std::string, char>, Coord> seen_obj;
    std::set<std::pair<std::string, std::string>> seen_agent;
    for (size_t i = first_new; i < events_.size(); ++i) {
        const auto& e = events_[i];
        if (e.fact == ObservationEvent::Fact::ObjectAt) {
            char label = e.subject[0];
            belief1_[{e.observer, label}] = e.where;
            knows0_[{e.observer, label}] = true;
            seen_obj[{e.observer, label}] = e.where;
        } else if (e.fact == ObservationEvent::Fact::AgentAt) {
            seen_agent.insert({e.observer, e.subject});
        }
    }
    for (const auto& [g_pair, L] : seen_obj) {
        const auto& [g, label] = g_pair;
        for (const auto& r_agent : current_.agents) {
            if (r_agent.id == g || !seen_agent.count({g, r_agent.id})) continue;
            auto r_sees = seen_obj.find({r_agent.id, label});
            if (r_sees != seen_obj.end() && r_sees->second == L)
                belief2_[{g, r_agent.id, label}] = L;
        }
    }
}

std::optional<Coord> EpistemicTracker::first_order(const std::string& agent,
                                                   char object_label) const {
    auto it = belief1_.find({agent, object_label});
    if (it == belief1_.end()) return std::nullopt;
    return it->second;
}

std::optional<Coord> EpistemicTracker::second_order(const std::string& observer_g,
                                                    const std::string& other_r,
                                                    char object_label) const {
    auto it = belief2_.find({observer_g, other_r, object_label});
    if (it == belief2_.end()) return std::nullopt;
    return it->second;
}

bool EpistemicTracker::knows(const std::string& agent, char object_label) const {
    return knows0_.count({agent, object_label}) != 0;
}

}  // namespace atoms
