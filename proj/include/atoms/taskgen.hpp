#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "atoms/planners.hpp"
#include "atoms/visibility.hpp"

namespace atoms {

using Json = nlohmann::ordered_json;

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kGeneratorVersion = "atoms-gen-1";

// Canonical task order: reality check plus the nine mental-state tasks.
const std::vector<std::string>& task_ids();
bool task_is_stratified(const std::string& task_id);

struct OptionItem {
    char letter = 'A';
    std::string text;
    bool is_board = false;  // multi-line board render instead of a phrase
};

struct TaskInstance {
    std::string task_id;
    uint64_t seed = 0;
    GridState start;
    ActionTrace trace;
    std::string question;
    std::vector<OptionItem> options;
    char gold = '?';
    Json latent;      // task-specific ground truth, enough to recompute gold
    ModelMap models;  // observability model per agent

    std::string id() const { return task_id + "-" + std::to_string(seed); }
    const OptionItem& option(char letter) const;
};

TaskInstance gen_reality(uint64_t seed);
TaskInstance gen_intent_short(uint64_t seed);
TaskInstance gen_intent_long(uint64_t seed);
TaskInstance gen_desire(uint64_t seed, bool has_preference);
TaskInstance gen_percept(uint64_t seed, bool limited_view);
TaskInstance gen_belief(BeliefOrder order, uint64_t seed);
TaskInstance gen_nonliteral(uint64_t seed, bool truthful);
TaskInstance gen_knowledge(uint64_t seed, bool ask_informed);
TaskInstance gen_emotion(uint64_t seed, bool witness);

// Dispatch by task id; `condition` is the stratified latent condition and is
// ignored by unstratified tasks.
TaskInstance gen_task(const std::string& task_id, uint64_t seed, bool condition = true);

struct SuiteManifest {
    uint64_t suite_seed = 0;
    std::vector<std::pair<std::string, int>> counts;  // canonical task order
    std::string version = kGeneratorVersion;

    static SuiteManifest defaults(uint64_t suite_seed, int per_task = 100);
    Json to_json() const;
    static SuiteManifest from_json(const Json& j);
};

struct SuiteResult {
    std::vector<TaskInstance> instances;
    std::vector<std::string> failures;  // "{task} seed={seed}: {error}"
};

// Deterministic: instance i of a task uses child_seed(suite, task, i), and
// stratified conditions are an exactly-quota'd shuffle per task.
SuiteResult gen_suite(const SuiteManifest& manifest);

}  // namespace atoms
