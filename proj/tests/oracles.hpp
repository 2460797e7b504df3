#pragma once

// Independent brute-force oracles for the test suite. These deliberately
// re-derive results from first principles instead of calling the library's
// search/tracking code paths.

#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "atoms/gridworld.hpp"
#include "atoms/visibility.hpp"

namespace atoms::oracle {

// Plan length (actions, turns cost 1) to stand 4-adjacent to `target` facing
// it; -1 if unreachable. Plain layered BFS over (col, row, dir) with no
// successor ordering or path reconstruction.
inline long plan_length(const GridState& s, const std::string& agent_id, Coord target) {
    const AgentState& a = s.agent(agent_id);
    auto blocked = [&](Coord c) {
        if (!s.enterable(c)) return true;
        const AgentState* other = s.agent_at(c);
        return other != nullptr && other->id != agent_id;
    };
    auto accepting = [&](Coord pos, Direction d) {
        return Coord{pos.col + dir_delta(d).col, pos.row + dir_delta(d).row} == target;
    };

    std::vector<long> dist(static_cast<size_t>(s.width) * s.height * 4, -1);
    auto key = [&](Coord pos, Direction d) {
        return static_cast<size_t>(s.cell_index(pos)) * 4 + static_cast<size_t>(d);
    };
    std::queue<std::pair<Coord, Direction>> frontier;
    dist[key(a.pos, a.dir)] = 0;
    frontier.push({a.pos, a.dir});
    if (accepting(a.pos, a.dir)) return 0;
    while (!frontier.empty()) {
        auto [pos, d] = frontier.front();
        frontier.pop();
        long base = dist[key(pos, d)];
        std::vector<std::pair<Coord, Direction>> succ = {{pos, turn_left(d)},
                                                         {pos, turn_right(d)}};
        Coord fwd{pos.col + dir_delta(d).col, pos.row + dir_delta(d).row};
        if (s.in_bounds(fwd) && !blocked(fwd)) succ.push_back({fwd, d});
        for (auto& [np, nd] : succ) {
            if (dist[key(np, nd)] >= 0) continue;
            dist[key(np, nd)] = base + 1;
            if (accepting(np, nd)) return base + 1;
            frontier.push({np, nd});
        }
    }
    return -1;
}

// BFS hop distance between cells on an obstacle-free board (orientation-free).
inline long hop_distance(const GridState& s, Coord from, Coord to) {
    std::vector<long> dist(static_cast<size_t>(s.width) * s.height, -1);
    std::queue<Coord> frontier;
    dist[static_cast<size_t>(s.cell_index(from))] = 0;
    frontier.push(from);
    while (!frontier.empty()) {
        Coord cur = frontier.front();
        frontier.pop();
        if (cur == to) return dist[static_cast<size_t>(s.cell_index(cur))];
        for (Direction d : {Direction::Left, Direction::Up, Direction::Right, Direction::Down}) {
            Coord n{cur.col + dir_delta(d).col, cur.row + dir_delta(d).row};
            if (s.is_wall(n)) continue;
            auto& slot = dist[static_cast<size_t>(s.cell_index(n))];
            if (slot >= 0) continue;
            slot = dist[static_cast<size_t>(s.cell_index(cur))] + 1;
            frontier.push(n);
        }
    }
    return -1;
}

// Recursive flood occlusion oracle for the frontal box, written independently
// of the library's BFS version.
inline std::set<Coord> frontal_visibility(const GridState& s, Coord agent_pos, Direction dir,
                                          int k) {
    int half = k / 2;
    int min_c = 0, max_c = 0, min_r = 0, max_r = 0;
    switch (dir) {
        case Direction::Up:
            min_c = agent_pos.col - half; max_c = agent_pos.col + half;
            min_r = agent_pos.row - (k - 1); max_r = agent_pos.row;
            break;
        case Direction::Down:
            min_c = agent_pos.col - half; max_c = agent_pos.col + half;
            min_r = agent_pos.row; max_r = agent_pos.row + (k - 1);
            break;
        case Direction::Left:
            min_c = agent_pos.col - (k - 1); max_c = agent_pos.col;
            min_r = agent_pos.row - half; max_r = agent_pos.row + half;
            break;
        case Direction::Right:
            min_c = agent_pos.col; max_c = agent_pos.col + (k - 1);
            min_r = agent_pos.row - half; max_r = agent_pos.row + half;
            break;
    }
    std::set<Coord> visible{agent_pos};
    std::set<Coord> expanded;
    std::function<void(Coord)> expand = [&](Coord c) {
        if (expanded.count(c)) return;
        expanded.insert(c);
        if (!s.sight_passable(c)) return;
        for (Direction d : {Direction::Left, Direction::Up, Direction::Right, Direction::Down}) {
            Coord n{c.col + dir_delta(d).col, c.row + dir_delta(d).row};
            if (!s.in_bounds(n)) continue;
            if (n.col < min_c || n.col > max_c || n.row < min_r || n.row > max_r) continue;
            visible.insert(n);
            expand(n);
        }
    };
    expand(agent_pos);
    return visible;
}

// All (observer, object label, position) sightings at one instant, re-scanned
// from the state rather than accumulated.
inline std::map<std::pair<std::string, char>, Coord> sightings(const GridState& s,
                                                               const ModelMap& models) {
    std::map<std::pair<std::string, char>, Coord> out;
    for (const auto& [id, model] : models) {
        std::set<Coord> vis = visible_cells(s, id, model);
        for (const auto& o : s.objects) {
            if (vis.count(o.pos)) out[{id, o.label}] = o.pos;
        }
        for (const auto& carrier : s.agents) {
            if (carrier.carrying.has_value() && vis.count(carrier.pos))
                out[{id, carrier.carrying->label}] = carrier.pos;
        }
    }
    return out;
}

// Last-seen scan: replay the trace and keep the most recent sighting per
// (observer, object).
inline std::optional<Coord> last_seen(const GridState& start, const ActionTrace& trace,
                                      const ModelMap& models, const std::string& observer,
                                      char label) {
    std::optional<Coord> belief;
    GridState cur = start;
    auto scan = [&]() {
        auto seen = sightings(cur, models);
        auto it = seen.find({observer, label});
        if (it != seen.end()) belief = it->second;
    };
    scan();
    for (const auto& ts : trace.steps) {
        cur = apply_trace_step(cur, ts).state;
        scan();
    }
    return belief;
}

// Nested replay: at each step, g's attribution updates when g sees r, g sees
// the object at L, and r sees the object at L.
inline std::optional<Coord> nested_last_seen(const GridState& start, const ActionTrace& trace,
                                             const ModelMap& models, const std::string& g,
                                             const std::string& r, char label) {
    std::optional<Coord> belief;
    GridState cur = start;
    auto scan = [&]() {
        std::set<Coord> g_vis = visible_cells(cur, g, models.at(g));
        if (!g_vis.count(cur.agent(r).pos)) return;
        auto seen = sightings(cur, models);
        auto g_obj = seen.find({g, label});
        auto r_obj = seen.find({r, label});
        if (g_obj != seen.end() && r_obj != seen.end() && g_obj->second == r_obj->second)
            belief = g_obj->second;
    };
    scan();
    for (const auto& ts : trace.steps) {
        cur = apply_trace_step(cur, ts).state;
        scan();
    }
    return belief;
}

// Whether the observer had seen the object by step `until` (inclusive;
// -1 scans the whole trace).
inline bool seen_by(const GridState& start, const ActionTrace& trace, const ModelMap& models,
                    const std::string& observer, char label, int until) {
    GridState cur = start;
    auto sees_now = [&]() {
        auto seen = sightings(cur, models);
        return seen.count({observer, label}) != 0;
    };
    if (sees_now()) return true;
    int t = 0;
    for (const auto& ts : trace.steps) {
        ++t;
        if (until >= 0 && t > until) break;
        cur = apply_trace_step(cur, ts).state;
        if (sees_now()) return true;
    }
    return false;
}

}  // namespace atoms::oracle
