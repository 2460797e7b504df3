#include "atoms/verbalizer.hpp"

#include <array>

namespace atoms {

namespace {

const char* kLetterTail =
    "Please ONLY respond using the letter corresponding to your answer\n"
    "Do not generate any text other than the letter";

const char* kCotTail =
    "Please think step by step about the world, the agents, and their actions before answering\n"
    "End your response with one final line of the form Answer: X, where X is the letter "
    "corresponding to your answer";

const char* kOneShotDelimiter = "---";

const std::array<std::pair<const char*, const char*>, 7> kActionGlossary = {{
    {"left", "makes the agent face left of where it is currently facing"},
    {"right", "makes the agent face right of where it is currently facing"},
    {"forward", "makes the agent move one step in the direction it is currently facing"},
    {"open", "makes the agent open a door that it is in front of"},
    {"pickup", "makes the agent pick up the object that it is in front of"},
    {"drop", "makes the agent drop an item that it is holding"},
    {"stay", "makes the agent stay where it currently is for a timestep"},
}};

bool single_agent(const TaskInstance& inst) {
    return inst.start.agents.size() == 1 && inst.start.agents[0].id == "agent";
}

std::string object_attribute_line(const ObjectSpec& o) {
    std::string attrs = kind_name(o.kind) + ", " + o.color;
    if (o.kind == ObjectKind::Door) {
        attrs += o.door_locked ? ", locked" : (o.door_open ? ", open" : ", closed");
    }
    return coord_text(o.pos) + ": " + attrs + "; represented by this label: " +
           std::string(1, o.label);
}

std::string environment_section(const GridState& s) {
    std::string out;
    out += "This is a grid-like 2D world\n";
    out += "The grid world consists of " + std::to_string(s.height) + " rows and " +
           std::to_string(s.width) + " columns, 0-based\n";
    out += "We use (i,j) to represent the i-th column (from left to right) and j-th row (from "
           "top to bottom).\n\n";
    if (s.objects.empty()) {
        out += "There are no objects in this world\n\n";
    } else {
        out += "The following is a list of objects in this world. Each line starts with the "
               "object's position and is followed by its attributes\n";
        for (const auto& o : s.objects) out += object_attribute_line(o) + "\n";
        out += "\n";
    }
    out += "Walls are depicted using the symbol W";
    return out;
}

std::string agent_section(const TaskInstance& inst) {
    const bool single = single_agent(inst);
    const bool restricted = inst.task_id == "reality";  // forward/turns only
    std::string out;
    if (single) {
        const AgentState& a = inst.start.agents[0];
        out += "There is an agent at " + coord_text(a.pos) + " facing " + dir_name(a.dir) +
               "\n\n";
        out += "The agent can take the following actions:\n";
    } else {
        for (const auto& a : inst.start.agents) {
            out += "There is an agent named " + a.id + " at " + coord_text(a.pos) + " facing " +
                   dir_name(a.dir) + "\n";
        }
        out += "\nEach agent can take the following actions:\n";
    }
    size_t glossary_size = restricted ? 3 : kActionGlossary.size();
    for (size_t i = 0; i < glossary_size; ++i) {
        out += std::string("- ") + kActionGlossary[i].first + ": " + kActionGlossary[i].second +
               "\n";
    }
    out += "\n";
    out += single ? "The agent is" : "Each agent is";
    out += " represented by the following labels depending on which direction it is facing:\n";
    out += "- Facing left: <\n- Facing up: ^\n- Facing right: >\n- Facing down: v";
    return out;
}

std::string observability_section(const TaskInstance& inst) {
    const std::string& t = inst.task_id;
    if (t == "percept") return "";  // the prompt must not hint at the view range
    if (t == "belief1" || t == "belief2")
        return "Each agent can see everything inside the room it is currently in, and can see "
               "into other rooms through a door if that door is open";
    if (t == "knowledge")
        return "The agent can see everything inside the room it is currently in, and can see "
               "into other rooms through a door if that door is open";
    if (t == "emotion")
        return "Each agent can only see the cells in front of it, in the direction it is "
               "currently facing; it cannot see cells behind itself";
    return "The agent has full observability, meaning it can see the entire world";
}

std::string task_section(const TaskInstance& inst) {
    const std::string& t = inst.task_id;
    if (t == "reality")
        return "The agent has been instructed to visit between zero and two of the objects in "
               "the environment, although you do not know which ones";
    if (t == "intent_short")
        return "The agent has been instructed to navigate to one of the two objects in the "
               "environment, although you do not know which";
    if (t == "intent_long")
        return "The agent needs to complete the following subgoals in as few steps as possible: "
               "1) Locate and pick up a key; 2) Locate and go through a door; 3) Navigate to "
               "the object in the new room";
    if (t == "desire")
        return "The agent has been instructed to pick up three objects as soon as possible";
    if (t == "percept")
        return "The agent has been instructed to navigate to the goal in the other room as fast "
               "as possible";
    if (t == "belief1" || t == "belief2")
        return "The agents move around the rooms, and may open or shut doors and pick up, "
               "carry, and drop objects";
    if (t == "nonliteral")
        return "The agent has been tasked with navigating to all of the objects in the world\n"
               "After taking its actions, the agent claims the following: \"I have visited the " +
               inst.latent.at("claim_descriptor").get<std::string>() + "\"";
    if (t == "knowledge")
        return "The agent must pick up two objects in a fixed order: first the " +
               inst.latent.at("first_descriptor").get<std::string>() + ", then the " +
               inst.latent.at("second_descriptor").get<std::string>() +
               "\nThe two objects are placed separately in two of the four rooms";
    if (t == "emotion")
        return "The agents move around the world and may interact with one another";
    throw GenerationError("no task statement for task " + t);
}

std::string subject_name(const std::string& agent_id, bool named) {
    return named ? agent_id : "The agent";
}

std::string pose_clause(const AgentState& a) {
    return "is now at " + coord_text(a.pos) + " facing " + dir_name(a.dir);
}

// Outcome clauses for state-changing actions; without them door toggles and
// pickups would be unrecoverable from the narration.
std::string outcome_clause(const GridState& before, const GridState& after,
                           const ActionStep& as, bool named) {
    const AgentState& pre = before.agent(as.agent);
    Coord front{pre.pos.col + dir_delta(pre.dir).col, pre.pos.row + dir_delta(pre.dir).row};
    switch (as.action) {
        case Action::Open: {
            const ObjectSpec* pre_door = before.object_at(front);
            const ObjectSpec* post_door = after.object_at(front);
            if (pre_door == nullptr || post_door == nullptr ||
                post_door->kind != ObjectKind::Door)
                return "";
            std::string state = post_door->door_open
                                    ? (pre_door->door_locked ? "unlocked and open" : "open")
                                    : "closed";
            return ". The " + post_door->color + " door at " + coord_text(front) + " is now " +
                   state;
        }
        case Action::Pickup: {
            const ObjectSpec* target = before.object_at(front);
            if (target == nullptr) return "";
            if (before.pickup_consumes)
                return ". " + subject_name(as.agent, named) + " has picked up the " +
                       target->descriptor();
            return ". " + subject_name(as.agent, named) + " is now carrying the " +
                   target->descriptor();
        }
        case Action::Drop: {
            const ObjectSpec* dropped = after.object_at(front);
            if (dropped == nullptr) return "";
            return ". The " + dropped->descriptor() + " is now at " + coord_text(front);
        }
        default:
            return "";
    }
}

}  // namespace

std::vector<std::string> narrate_trace(const GridState& start, const ActionTrace& trace,
                                       bool named_agents) {
    std::vector<std::string> lines;
    GridState cur = start;
    int n = 0;
    for (const auto& ts : trace.steps) {
        ++n;
        GridState next = apply_trace_step(cur, ts).state;
        std::string line = "(Step " + std::to_string(n) + ") ";
        if (const auto* as = std::get_if<ActionStep>(&ts)) {
            const AgentState& a = next.agent(as->agent);
            line += subject_name(as->agent, named_agents) + " took action " +
                    action_name(as->action) + " and " + pose_clause(a);
            line += outcome_clause(cur, next, *as, named_agents);
        } else {
            const auto& ev = std::get<ScriptedEvent>(ts);
            const AgentState& patient = next.agent(ev.patient);
            const char* verb =
                ev.kind == ScriptedEvent::Kind::Push ? " pushed " : " pulled ";
            const char* where =
                ev.kind == ScriptedEvent::Kind::Push ? " into the lake. " : " out of the lake. ";
            line += ev.actor + verb + ev.patient + where + ev.patient + " " +
                    pose_clause(patient);
        }
        lines.push_back(std::move(line));
        cur = std::move(next);
    }
    return lines;
}

namespace {

std::string actions_section(const TaskInstance& inst) {
    const bool named = !single_agent(inst);
    std::string out = "This is the starting state of the board:\n```\n";
    out += render_board(inst.start);
    out += "\n```\n";
    if (inst.trace.steps.empty()) {
        out += named ? "The agents have not taken any actions yet"
                     : "The agent has not taken any actions yet";
        return out;
    }
    out += named ? "This list contains a sequence of actions taken by the agents"
                 : "This list contains a sequence of actions taken by the agent";
    for (const auto& line : narrate_trace(inst.start, inst.trace, named)) {
        out += "\n" + line;
    }
    return out;
}

std::string qa_section(const TaskInstance& inst) {
    std::string out = inst.question + "\n";
    for (const auto& o : inst.options) {
        if (o.is_board) {
            out += std::string(1, o.letter) + ":\n```\n" + o.text + "\n```\n";
        } else {
            out += std::string(1, o.letter) + ": " + o.text + "\n";
        }
    }
    out += "\n";
    out += kLetterTail;
    return out;
}

}  // namespace

const std::string& mode_name(PromptMode m) {
    static const std::array<std::string, 3> names = {"zero", "oneshot", "cot"};
    return names[static_cast<size_t>(m)];
}

PromptMode mode_from_name(const std::string& name) {
    if (name == "zero") return PromptMode::Zero;
    if (name == "oneshot") return PromptMode::OneShot;
    if (name == "cot") return PromptMode::Cot;
    throw std::invalid_argument("unknown prompt mode: " + name);
}

Json PromptSections::to_json() const {
    return Json{{"environment", environment}, {"agent", agent},
                {"observability", observability}, {"task", task},
                {"actions", actions},          {"qa", qa}};
}

PromptSections PromptSections::from_json(const Json& j) {
    PromptSections s;
    s.environment = j.at("environment").get<std::string>();
    s.agent = j.at("agent").get<std::string>();
    s.observability = j.at("observability").get<std::string>();
    s.task = j.at("task").get<std::string>();
    s.actions = j.at("actions").get<std::string>();
    s.qa = j.at("qa").get<std::string>();
    return s;
}

PromptSections render_sections(const TaskInstance& inst) {
    PromptSections s;
    s.environment = environment_section(inst.start);
    s.agent = agent_section(inst);
    s.observability = observability_section(inst);
    s.task = task_section(inst);
    s.actions = actions_section(inst);
    s.qa = qa_section(inst);
    return s;
}

std::string compose_sections(const PromptSections& s) {
    std::string out;
    for (const std::string* part :
         {&s.environment, &s.agent, &s.observability, &s.task, &s.actions, &s.qa}) {
        if (part->empty()) continue;
        if (!out.empty()) out += "\n\n";
        out += *part;
    }
    return out;
}

std::string cot_qa(const std::string& zero_qa, const std::string& tail_override) {
    const std::string tail = kLetterTail;
    if (zero_qa.size() < tail.size() ||
        zero_qa.compare(zero_qa.size() - tail.size(), tail.size(), tail) != 0)
        throw std::invalid_argument("qa section does not end with the letter instruction");
    return zero_qa.substr(0, zero_qa.size() - tail.size()) +
           (tail_override.empty() ? std::string(kCotTail) : tail_override);
}

PromptBundle render_prompt(const TaskInstance& inst, PromptMode mode) {
    PromptBundle b;
    b.sections = render_sections(inst);
    b.mode = mode;
    if (mode == PromptMode::Cot) {
        b.sections.qa = cot_qa(b.sections.qa);
        b.extraction = ExtractionMode::FinalLine;
    }
    b.full_text = compose_sections(b.sections);
    return b;
}

std::string wrap_oneshot_text(const std::string& exemplar_text, char exemplar_gold,
                              const std::string& query_text) {
    if (exemplar_text == query_text)
        throw std::invalid_argument("one-shot exemplar equals the query prompt");
    return exemplar_text + "\n" + std::string(1, exemplar_gold) + "\n\n" + kOneShotDelimiter +
           "\n\n" + query_text;
}

std::string wrap_oneshot(const TaskInstance& query, const TaskInstance& exemplar) {
    if (query.task_id != exemplar.task_id)
        throw std::invalid_argument("one-shot exemplar task mismatch: " + exemplar.task_id +
                                    " vs " + query.task_id);
    return wrap_oneshot_text(render_prompt(exemplar, PromptMode::Zero).full_text, exemplar.gold,
                             render_prompt(query, PromptMode::Zero).full_text);
}

std::pair<std::string, ExtractionMode> wrap_cot(const PromptBundle& bundle) {
    PromptSections s = bundle.sections;
    if (bundle.extraction == ExtractionMode::LetterOnly) s.qa = cot_qa(s.qa);
    return {compose_sections(s), ExtractionMode::FinalLine};
}

}  // namespace atoms
