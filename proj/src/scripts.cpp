#include <algorithm>

#include "atoms/planners.hpp"
#include "atoms/visibility.hpp"

namespace atoms {

namespace {

Direction random_dir(Rng& rng) { return static_cast<Direction>(rng.range(0, 3)); }

Coord random_free_cell(const GridState& s, Rng& rng, const std::vector<Coord>& avoid = {}) {
    std::vector<Coord> free;
    for (int r = 1; r < s.height - 1; ++r) {
        for (int c = 1; c < s.width - 1; ++c) {
            Coord cell{c, r};
            if (!s.enterable(cell) || s.agent_at(cell) != nullptr) continue;
            if (std::find(avoid.begin(), avoid.end(), cell) != avoid.end()) continue;
            free.push_back(cell);
        }
    }
    if (free.empty()) throw PlanningError("no free cell left");
    return free[rng.index(free.size())];
}

constexpr int kBeliefSize = 13;
constexpr int kDividerCol = 7;
const int kDoorRows[3] = {2, 6, 10};

// Main room on the left, three stacked side rooms on the right, one door each.
GridState belief_layout(Rng& rng, char* ball_label_out) {
    GridState s = make_walled_world(kBeliefSize, kBeliefSize);
    for (int r = 1; r < kBeliefSize - 1; ++r) s.walls[s.cell_index({kDividerCol, r})] = 1;
    for (int c = kDividerCol; c < kBeliefSize - 1; ++c) {
        s.walls[s.cell_index({c, 4})] = 1;
        s.walls[s.cell_index({c, 8})] = 1;
    }
    std::vector<std::string> door_colors = {"grey", "yellow", "purple"};
    rng.shuffle(door_colors);
    char label = 'G';
    for (int i = 0; i < 3; ++i) {
        Coord pos{kDividerCol, kDoorRows[i]};
        s.walls[s.cell_index(pos)] = 0;
        s.objects.push_back({ObjectKind::Door, door_colors[i], label++, pos, true, false});
    }
    s.recompute_rooms();

    std::vector<std::string> ball_colors = {"blue", "purple", "yellow", "grey"};
    Coord ball_pos = random_free_cell(s, rng);
    while (ball_pos.col >= kDividerCol) ball_pos = random_free_cell(s, rng);  // main room only
    s.objects.push_back({ObjectKind::Ball, ball_colors[rng.index(ball_colors.size())], label,
                         ball_pos, false, false});
    *ball_label_out = label;
    return s;
}

std::vector<Coord> room_cells(const GridState& s, int room) {
    std::vector<Coord> cells;
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            if (s.room_at({c, r}) == room) cells.push_back({c, r});
        }
    }
    return cells;
}

}  // namespace

BeliefScenario belief_transfer_script(BeliefOrder order, Rng& rng, bool include_transfer) {
    BeliefScenario sc;
    sc.start = belief_layout(rng, &sc.ball_label);
    GridState& s = sc.start;

    // Side room roles; side room i sits behind the door at kDoorRows[i].
    std::vector<int> side = {0, 1, 2};
    rng.shuffle(side);
    const int original = side[0], destination = side[1], hide = side[2];
    auto side_room_id = [&](int i) { return s.room_at({kDividerCol + 1, kDoorRows[i]}); };
    sc.original_room = side_room_id(original);
    sc.destination_room = side_room_id(destination);
    sc.hide_room = side_room_id(hide);
    auto inside_door_cell = [&](int i) { return Coord{kDividerCol + 1, kDoorRows[i]}; };

    // Both agents start in the main room.
    Coord red_pos = random_free_cell(s, rng);
    while (red_pos.col >= kDividerCol) red_pos = random_free_cell(s, rng);
    s.agents.push_back({sc.watcher, red_pos, random_dir(rng), std::nullopt});
    Coord green_pos = random_free_cell(s, rng);
    while (green_pos.col >= kDividerCol) green_pos = random_free_cell(s, rng);
    s.agents.push_back({sc.mover, green_pos, random_dir(rng), std::nullopt});

    auto drop_cell_in = [&](int side_index) {
        std::vector<Coord> cells = room_cells(s, side_room_id(side_index));
        cells.erase(std::remove(cells.begin(), cells.end(), inside_door_cell(side_index)),
                    cells.end());
        return cells[rng.index(cells.size())];
    };
    sc.placed_cell = drop_cell_in(original);
    Coord drop2 = drop_cell_in(destination);
    sc.final_cell = include_transfer ? drop2 : sc.placed_cell;

    ScriptBuilder script;
    script.cur = s;
    const Coord ball_start = s.object_with_label(sc.ball_label)->pos;

    // The mover places the ball in the original room while the watcher looks on.
    script.plan_face(sc.mover, ball_start);
    script.act(sc.mover, Action::Pickup);
    script.plan_face(sc.mover, sc.placed_cell);
    script.act(sc.mover, Action::Drop);

    // The watcher shuts itself into its own side room.
    script.plan_reach(sc.watcher, inside_door_cell(hide));
    script.face(sc.watcher, Direction::Left);
    script.act(sc.watcher, Action::Open);  // toggles the open door shut

    if (include_transfer) {
        // Unobserved transfer to the destination room.
        script.plan_face(sc.mover, sc.placed_cell);
        script.act(sc.mover, Action::Pickup);
        script.plan_face(sc.mover, drop2);
        script.act(sc.mover, Action::Drop);
    }

    if (order == BeliefOrder::Second) {
        // The mover shuts itself in the originally ball-containing room, then
        // the watcher comes out and finds the ball's true location.
        script.plan_reach(sc.mover, inside_door_cell(original));
        script.face(sc.mover, Direction::Left);
        script.act(sc.mover, Action::Open);

        script.act(sc.watcher, Action::Open);  // re-open the hide-room door
        script.act(sc.watcher, Action::Forward);
        script.plan_reach(sc.watcher, inside_door_cell(destination));
    }

    sc.trace = std::move(script.trace);
    return sc;
}

namespace {

Direction dominant_axis_dir(Coord from, Coord to) {
    int dx = to.col - from.col;
    int dy = to.row - from.row;
    if (std::abs(dx) >= std::abs(dy)) return dx >= 0 ? Direction::Right : Direction::Left;
    return dy >= 0 ? Direction::Down : Direction::Up;
}

Direction opposite(Direction d) { return turn_left(turn_left(d)); }

}  // namespace

EmotionScenario emotion_script(bool witness, bool rescued, Rng& rng) {
    EmotionScenario sc;
    sc.witness = witness;
    sc.rescued = rescued;
    sc.observer = "White";
    std::vector<std::string> names = {"Red", "Green", "Blue"};
    rng.shuffle(names);
    sc.pusher = names[0];
    sc.victim = names[1];
    if (rescued) sc.helper = names[2];

    const int width = rng.range(8, 11);
    const int height = rng.range(8, 11);
    GridState s = make_walled_world(width, height);

    sc.lake_cell = {rng.range(3, width - 4), rng.range(3, height - 4)};
    Direction push_dir = random_dir(rng);
    Coord victim_cell{sc.lake_cell.col - dir_delta(push_dir).col,
                      sc.lake_cell.row - dir_delta(push_dir).row};
    Coord push_from{victim_cell.col - dir_delta(push_dir).col,
                    victim_cell.row - dir_delta(push_dir).row};

    s.objects.push_back({ObjectKind::Lake, "blue", 'G', sc.lake_cell, false, false});
    s.recompute_rooms();
    s.agents.push_back({sc.victim, victim_cell, random_dir(rng), std::nullopt});
    s.agents.push_back({sc.pusher, random_free_cell(s, rng, {push_from}), random_dir(rng),
                        std::nullopt});

    // Place the observer so that the lake and every cell the victim can occupy
    // around it are provably inside (witness) or outside (ignorant) its frontal
    // view; it never moves and the walls are static, so one check suffices.
    std::vector<Coord> event_cells = {sc.lake_cell};
    for (Direction d : {Direction::Left, Direction::Up, Direction::Right, Direction::Down}) {
        Coord c{sc.lake_cell.col + dir_delta(d).col, sc.lake_cell.row + dir_delta(d).row};
        if (!s.is_wall(c)) event_cells.push_back(c);
    }
    const ObservabilityModel frontal = ObservabilityModel::frontal(101);
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
        Coord obs = random_free_cell(s, rng, {push_from});
        Direction facing = dominant_axis_dir(obs, sc.lake_cell);
        if (!witness) facing = opposite(facing);
        GridState probe = s;
        probe.agents.push_back({sc.observer, obs, facing, std::nullopt});
        std::set<Coord> vis = visible_cells(probe, sc.observer, frontal);
        size_t seen = 0;
        for (Coord c : event_cells) seen += vis.count(c);
        if (witness ? seen == event_cells.size() : seen == 0) {
            s = std::move(probe);
            placed = true;
        }
    }
    if (!placed) throw PlanningError("could not place the observer");

    if (rescued) {
        s.agents.push_back({sc.helper, random_free_cell(s, rng, {push_from}), random_dir(rng),
                            std::nullopt});
    }

    ScriptBuilder script;
    script.cur = s;
    script.plan_reach(sc.pusher, push_from);
    script.face(sc.pusher, push_dir);
    script.event({ScriptedEvent::Kind::Push, sc.pusher, sc.victim, sc.lake_cell});
    sc.push_step = static_cast<int>(script.trace.steps.size());

    if (rescued) {
        script.plan_face(sc.helper, sc.lake_cell);
        // First free lake neighbor in up/right/down/left order.
        Coord rescue{-1, -1};
        for (Direction d : {Direction::Up, Direction::Right, Direction::Down, Direction::Left}) {
            Coord c{sc.lake_cell.col + dir_delta(d).col, sc.lake_cell.row + dir_delta(d).row};
            if (script.cur.enterable(c) && script.cur.agent_at(c) == nullptr) {
                rescue = c;
                break;
            }
        }
        if (rescue.col < 0) throw PlanningError("no free cell to pull the victim onto");
        sc.rescue_cell = rescue;
        script.event({ScriptedEvent::Kind::Pull, sc.helper, sc.victim, rescue});
        sc.pull_step = static_cast<int>(script.trace.steps.size());

        // Placement already pinned every lake-adjacent cell, so the rescue cell
        // is covered; keep a hard check anyway.
        std::set<Coord> vis = visible_cells(s, sc.observer, frontal);
        if (witness != (vis.count(sc.rescue_cell) != 0))
            throw PlanningError("observer placement inconsistent with the rescue cell");
    }

    sc.start = std::move(s);
    sc.trace = std::move(script.trace);
    return sc;
}

}  // namespace atoms
