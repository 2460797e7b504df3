#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "atoms/jsonio.hpp"

namespace atoms {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AuthError : public EvalError {
public:
    using EvalError::EvalError;
};

class TransientError : public EvalError {
public:
    using EvalError::EvalError;
};

struct CompletionParams {
    double temperature = 0.0;
    int max_tokens = 512;
};

struct CompletionRequest {
    std::string prompt;
    CompletionParams params;
    // Opaque harness bookkeeping tag (the instance id). Remote clients ignore
    // it; the scripted oracle resolves it to the gold letter.
    std::string instance_ref;
};

class ModelClient {
public:
    virtual ~ModelClient() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
    virtual std::string name() const = 0;
};

// Answers every instance with its gold letter; the only client allowed to see
// gold. Closes the loop that every emitted instance is answerable.
class ScriptedOracleClient : public ModelClient {
public:
    explicit ScriptedOracleClient(const std::vector<DatasetRecord>& records);
    std::string complete(const CompletionRequest& request) override;
    std::string name() const override { return "scripted-oracle"; }

private:
    std::map<std::string, char> gold_by_id_;
};

// Picks a letter uniformly among the instance's options; seeded and
// scheduling-independent (the draw depends only on seed, instance and prompt).
class UniformRandomClient : public ModelClient {
public:
    UniformRandomClient(const std::vector<DatasetRecord>& records, uint64_t seed);
    std::string complete(const CompletionRequest& request) override;
    std::string name() const override { return "uniform-random"; }

private:
    std::map<std::string, std::vector<char>> letters_by_id_;
    uint64_t seed_;
};

// Chat-completions endpoint over HTTP(S): message-list request, choice-list
// response. The API key comes from the ATOMS_API_KEY environment variable.
class ChatCompletionsClient : public ModelClient {
public:
    ChatCompletionsClient(std::string endpoint, std::string model, std::string api_key);
    std::string complete(const CompletionRequest& request) override;
    std::string name() const override { return model_; }

private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_;
};

// MC-probing extraction. LetterOnly: first standalone option letter
// (optionally followed by . : or )). FinalLine: the letter after the last
// "Answer:" marker. Case-insensitive; '\0' means unparseable.
char extract_answer(const std::string& response, const std::vector<char>& option_letters,
                    ExtractionMode mode);

struct EvalRecord {
    std::string instance_id;
    std::string mode;
    std::string model;
    std::string prompt_digest;
    std::string response;
    std::string extracted;  // "" when unparseable
    bool correct = false;
    long latency_ms = 0;
    int attempts = 0;

    Json to_json() const;
    static EvalRecord from_json(const Json& j);
};

std::vector<EvalRecord> read_records(const std::string& path);
void write_records(const std::string& path, const std::vector<EvalRecord>& records);

struct EvalOptions {
    PromptMode mode = PromptMode::Zero;
    int max_in_flight = 4;
    CompletionParams params;
    std::string out_path;        // append-persisted record file; "" = in-memory only
    bool resume = true;          // skip ids already present in out_path
    size_t limit = 0;            // stop after N new records (0 = no limit); for testing
    int max_attempts = 3;        // transient-failure retries
    long backoff_base_ms = 250;  // exponential backoff base
    std::string cot_tail;        // non-empty: overrides the built-in CoT elicitation
    // One-shot exemplars are generated from this suite seed at an index offset
    // of 10^6, guaranteeing disjointness from any evaluation instance.
    uint64_t exemplar_suite_seed = 0;
};

inline constexpr uint64_t kExemplarIndexOffset = 1000000;

// Renders prompts per mode, dispatches with bounded parallelism, retries
// transient failures with exponential backoff, persists records incrementally
// (a killed run resumes by skipping completed ids). Persisted runs also write
// `<out>.manifest.json` documenting the sampling and retry policy.
std::vector<EvalRecord> evaluate(const std::vector<DatasetRecord>& dataset, ModelClient& client,
                                 const EvalOptions& options);

// The run-policy manifest for an evaluation, as persisted next to records.
Json eval_run_manifest(const ModelClient& client, const EvalOptions& options);

}  // namespace atoms
