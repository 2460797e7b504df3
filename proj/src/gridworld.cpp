#include "atoms/gridworld.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <sstream>

namespace atoms {

std::string coord_text(Coord c) {
    return "(" + std::to_string(c.col) + ", " + std::to_string(c.row) + ")";
}

int manhattan_distance(Coord a, Coord b) {
    return std::abs(a.col - b.col) + std::abs(a.row - b.row);
}

Direction turn_left(Direction d) {
    switch (d) {
        case Direction::Left: return Direction::Down;
        case Direction::Down: return Direction::Right;
        case Direction::Right: return Direction::Up;
        case Direction::Up: return Direction::Left;
    }
    throw GridError("bad direction");
}

Direction turn_right(Direction d) {
    switch (d) {
        case Direction::Left: return Direction::Up;
        case Direction::Up: return Direction::Right;
        case Direction::Right: return Direction::Down;
        case Direction::Down: return Direction::Left;
    }
    throw GridError("bad direction");
}

Coord dir_delta(Direction d) {
    switch (d) {
        case Direction::Left: return {-1, 0};
        case Direction::Up: return {0, -1};
        case Direction::Right: return {1, 0};
        case Direction::Down: return {0, 1};
    }
    throw GridError("bad direction");
}

char dir_glyph(Direction d) {
    switch (d) {
        case Direction::Left: return '<';
        case Direction::Up: return '^';
        case Direction::Right: return '>';
        case Direction::Down: return 'v';
    }
    throw GridError("bad direction");
}

const std::string& dir_name(Direction d) {
    static const std::array<std::string, 4> names = {"left", "up", "right", "down"};
    return names[static_cast<size_t>(d)];
}

const std::string& action_name(Action a) {
    static const std::array<std::string, 7> names = {"left", "right",  "forward", "open",
                                                     "pickup", "drop", "stay"};
    return names[static_cast<size_t>(a)];
}

const std::string& kind_name(ObjectKind k) {
    static const std::array<std::string, 6> names = {"key", "box", "ball", "door", "lake", "goal"};
    return names[static_cast<size_t>(k)];
}

bool kind_pickupable(ObjectKind k) {
    return k == ObjectKind::Key || k == ObjectKind::Box || k == ObjectKind::Ball;
}

const ObjectSpec* GridState::object_at(Coord c) const {
    for (const auto& o : objects) {
        if (o.pos == c) return &o;
    }
    return nullptr;
}

const ObjectSpec* GridState::object_with_label(char label) const {
    for (const auto& o : objects) {
        if (o.label == label) return &o;
    }
    return nullptr;
}

const AgentState* GridState::agent_at(Coord c) const {
    for (const auto& a : agents) {
        if (a.pos == c) return &a;
    }
    return nullptr;
}

const AgentState& GridState::agent(const std::string& id) const {
    for (const auto& a : agents) {
        if (a.id == id) return a;
    }
    throw GridError("unknown agent id: " + id);
}

AgentState& GridState::agent(const std::string& id) {
    for (auto& a : agents) {
        if (a.id == id) return a;
    }
    throw GridError("unknown agent id: " + id);
}

bool GridState::enterable(Coord c) const {
    if (is_wall(c)) return false;
    const ObjectSpec* o = object_at(c);
    if (o == nullptr) return true;
    if (o->kind == ObjectKind::Goal) return true;
    if (o->kind == ObjectKind::Door) return o->door_open;
    return false;  // keys, boxes, balls, lakes block movement
}

bool GridState::sight_passable(Coord c) const {
    if (is_wall(c)) return false;
    const ObjectSpec* o = object_at(c);
    if (o != nullptr && o->kind == ObjectKind::Door && !o->door_open) return false;
    return true;
}

void GridState::recompute_rooms() {
    room_of.assign(static_cast<size_t>(width) * height, -1);
    room_count = 0;
    auto is_boundary = [&](Coord c) {
        if (is_wall(c)) return true;
        const ObjectSpec* o = object_at(c);
        return o != nullptr && o->kind == ObjectKind::Door;
    };
    for (int r = 0; r < height; ++r) {
        for (int cl = 0; cl < width; ++cl) {
            Coord c{cl, r};
            if (is_boundary(c) || room_of[cell_index(c)] >= 0) continue;
            int id = room_count++;
            std::deque<Coord> queue{c};
            room_of[cell_index(c)] = id;
            while (!queue.empty()) {
                Coord cur = queue.front();
                queue.pop_front();
                for (Direction d : {Direction::Left, Direction::Up, Direction::Right,
                                    Direction::Down}) {
                    Coord n{cur.col + dir_delta(d).col, cur.row + dir_delta(d).row};
                    if (!in_bounds(n) || is_boundary(n)) continue;
                    if (room_of[cell_index(n)] >= 0) continue;
                    room_of[cell_index(n)] = id;
                    queue.push_back(n);
                }
            }
        }
    }
}

GridState make_walled_world(int width, int height) {
    if (width < 3 || height < 3) throw GridError("world too small");
    GridState s;
    s.width = width;
    s.height = height;
    s.walls.assign(static_cast<size_t>(width) * height, 0);
    for (int c = 0; c < width; ++c) {
        s.walls[s.cell_index({c, 0})] = 1;
        s.walls[s.cell_index({c, height - 1})] = 1;
    }
    for (int r = 0; r < height; ++r) {
        s.walls[s.cell_index({0, r})] = 1;
        s.walls[s.cell_index({width - 1, r})] = 1;
    }
    s.recompute_rooms();
    return s;
}

namespace {

StepResult no_op(const GridState& s, std::string reason) {
    StepResult r{s, true, std::move(reason)};
    return r;
}

}  // namespace

StepResult step(const GridState& state, const std::string& agent_id, Action action) {
    state.agent(agent_id);  // unknown id -> hard error before copying
    GridState next = state;
    AgentState& a = next.agent(agent_id);

    switch (action) {
        case Action::Stay:
            return {std::move(next), false, {}};
        case Action::Left:
            a.dir = turn_left(a.dir);
            return {std::move(next), false, {}};
        case Action::Right:
            a.dir = turn_right(a.dir);
            return {std::move(next), false, {}};
        case Action::Forward: {
            Coord t{a.pos.col + dir_delta(a.dir).col, a.pos.row + dir_delta(a.dir).row};
            if (next.is_wall(t)) return no_op(state, "blocked by wall");
            if (const ObjectSpec* o = next.object_at(t)) {
                if (o->kind == ObjectKind::Door && !o->door_open)
                    return no_op(state, "blocked by closed door");
                if (o->kind == ObjectKind::Lake) return no_op(state, "blocked by lake");
                if (o->kind != ObjectKind::Goal && o->kind != ObjectKind::Door)
                    return no_op(state, "blocked by object");
            }
            if (next.agent_at(t) != nullptr) return no_op(state, "blocked by agent");
            a.pos = t;
            return {std::move(next), false, {}};
        }
        case Action::Open: {
            Coord t{a.pos.col + dir_delta(a.dir).col, a.pos.row + dir_delta(a.dir).row};
            ObjectSpec* door = nullptr;
            for (auto& o : next.objects) {
                if (o.pos == t && o.kind == ObjectKind::Door) door = &o;
            }
            if (door == nullptr) return no_op(state, "no door to open");
            if (door->door_locked) {
                bool has_key = a.carrying.has_value() &&
                               a.carrying->kind == ObjectKind::Key &&
                               a.carrying->color == door->color;
                if (!has_key) return no_op(state, "door is locked");
                door->door_locked = false;
                door->door_open = true;
            } else {
                door->door_open = !door->door_open;
            }
            return {std::move(next), false, {}};
        }
        case Action::Pickup: {
            Coord t{a.pos.col + dir_delta(a.dir).col, a.pos.row + dir_delta(a.dir).row};
            auto it = std::find_if(next.objects.begin(), next.objects.end(),
                                   [&](const ObjectSpec& o) { return o.pos == t; });
            if (it == next.objects.end() || !kind_pickupable(it->kind))
                return no_op(state, "nothing to pick up");
            if (next.pickup_consumes) {
                next.objects.erase(it);
            } else {
                if (a.carrying.has_value()) return no_op(state, "inventory full");
                a.carrying = *it;
                next.objects.erase(it);
            }
            return {std::move(next), false, {}};
        }
        case Action::Drop: {
            if (!a.carrying.has_value()) return no_op(state, "nothing to drop");
            Coord t{a.pos.col + dir_delta(a.dir).col, a.pos.row + dir_delta(a.dir).row};
            if (next.is_wall(t)) return no_op(state, "drop blocked by wall");
            if (next.object_at(t) != nullptr) return no_op(state, "drop cell occupied");
            if (next.agent_at(t) != nullptr) return no_op(state, "drop blocked by agent");
            ObjectSpec dropped = *a.carrying;
            dropped.pos = t;
            a.carrying.reset();
            next.objects.push_back(dropped);
            return {std::move(next), false, {}};
        }
    }
    throw GridError("bad action");
}

StepResult apply_trace_step(const GridState& state, const TraceStep& ts) {
    if (const auto* as = std::get_if<ActionStep>(&ts)) {
        return step(state, as->agent, as->action);
    }
    const auto& ev = std::get<ScriptedEvent>(ts);
    state.agent(ev.actor);
    GridState next = state;
    AgentState& patient = next.agent(ev.patient);
    patient.pos = ev.patient_to;  // scripted displacement, exempt from terrain rules
    return {std::move(next), false, {}};
}

std::vector<GridState> replay_states(const GridState& start, const ActionTrace& trace) {
    std::vector<GridState> states;
    states.reserve(trace.steps.size() + 1);
    states.push_back(start);
    for (const auto& ts : trace.steps) {
        states.push_back(apply_trace_step(states.back(), ts).state);
    }
    return states;
}

bool trace_replays_cleanly(const GridState& start, const ActionTrace& trace) {
    GridState cur = start;
    for (const auto& ts : trace.steps) {
        StepResult r = apply_trace_step(cur, ts);
        if (r.no_op) return false;
        cur = std::move(r.state);
    }
    return true;
}

std::string render_board(const GridState& state) {
    std::string out;
    out += "    ";
    for (int c = 0; c < state.width; ++c) {
        out += std::to_string(c);
        out += ' ';
    }
    for (int r = 0; r < state.height; ++r) {
        out += '\n';
        out += std::to_string(r);
        out += " | ";
        for (int c = 0; c < state.width; ++c) {
            Coord cell{c, r};
            char glyph = 'O';
            if (state.is_wall(cell)) glyph = 'W';
            if (const ObjectSpec* o = state.object_at(cell)) glyph = o->label;
            if (const AgentState* a = state.agent_at(cell)) glyph = dir_glyph(a->dir);
            out += glyph;
            out += ' ';
        }
    }
    return out;
}

ParsedBoard parse_board(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
        if (!tokens.empty()) rows.push_back(std::move(tokens));
    }
    if (rows.size() < 2) throw ParseError("board text too short");

    ParsedBoard board;
    board.width = static_cast<int>(rows[0].size());
    board.height = static_cast<int>(rows.size()) - 1;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < 2 || row[1] != "|")
            throw ParseError("row " + std::to_string(i - 1) + ": missing row prefix");
        int r = std::stoi(row[0]);
        int cells = static_cast<int>(row.size()) - 2;
        if (cells != board.width)
            throw ParseError("row " + std::to_string(r) + ": expected " +
                             std::to_string(board.width) + " cells, got " + std::to_string(cells));
        for (int c = 0; c < cells; ++c) {
            const std::string& t = row[static_cast<size_t>(c) + 2];
            if (t.size() != 1)
                throw ParseError("row " + std::to_string(r) + ": bad cell token '" + t + "'");
            char g = t[0];
            Coord cell{c, r};
            switch (g) {
                case 'O': break;
                case 'W': board.walls.insert(cell); break;
                case '<': board.agents.emplace_back(cell, Direction::Left); break;
                case '^': board.agents.emplace_back(cell, Direction::Up); break;
                case '>': board.agents.emplace_back(cell, Direction::Right); break;
                case 'v': board.agents.emplace_back(cell, Direction::Down); break;
                default: board.labels[g] = cell; break;
            }
        }
    }
    return board;
}

}  // namespace atoms
