#pragma once

#include <string>

#include "atoms/taskgen.hpp"

namespace atoms {

// All wording that the source paper sample does not pin down is fixed under
// this template version tag and recorded in run manifests.
inline constexpr const char* kTemplateVersion = "atoms-tmpl-1";

enum class PromptMode { Zero, OneShot, Cot };

const std::string& mode_name(PromptMode m);
PromptMode mode_from_name(const std::string& name);

enum class ExtractionMode { LetterOnly, FinalLine };

struct PromptSections {
    std::string environment;
    std::string agent;
    std::string observability;  // empty = omitted (percept task)
    std::string task;
    std::string actions;
    std::string qa;

    Json to_json() const;
    static PromptSections from_json(const Json& j);
};

struct PromptBundle {
    PromptSections sections;
    PromptMode mode = PromptMode::Zero;
    ExtractionMode extraction = ExtractionMode::LetterOnly;
    std::string full_text;
};

// Renders the instance into the fixed section template. The qa section ends
// with the letter-only instruction.
PromptSections render_sections(const TaskInstance& inst);

// Non-empty sections joined by blank lines.
std::string compose_sections(const PromptSections& s);

// Zero-shot and CoT bundles; one-shot texts come from wrap_oneshot.
PromptBundle render_prompt(const TaskInstance& inst, PromptMode mode);

// CoT variant of a zero-shot qa section (letter tail swapped for the
// reason-then-answer tail). Throws if the qa does not end with the letter
// tail. A non-empty `tail_override` replaces the built-in CoT elicitation;
// extraction stays in final-line mode, so overrides should keep the
// "Answer: <letter>" convention.
std::string cot_qa(const std::string& zero_qa, const std::string& tail_override = {});

// Exemplar episode with its gold letter shown, a delimiter line, then the
// query. The exemplar must be the same task and a different instance.
std::string wrap_oneshot_text(const std::string& exemplar_text, char exemplar_gold,
                              const std::string& query_text);
std::string wrap_oneshot(const TaskInstance& query, const TaskInstance& exemplar);

std::pair<std::string, ExtractionMode> wrap_cot(const PromptBundle& bundle);

// One narration line per trace step ("(Step n) ... and is now at (i, j)
// facing d"), exposed for the inspect command and tests.
std::vector<std::string> narrate_trace(const GridState& start, const ActionTrace& trace,
                                       bool named_agents);

}  // namespace atoms
