#include "atoms/evalharness.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "httplib.h"

namespace atoms {

ScriptedOracleClient::ScriptedOracleClient(const std::vector<DatasetRecord>& records) {
    for (const auto& r : records) gold_by_id_[r.id()] = r.gold;
}

std::string ScriptedOracleClient::complete(const CompletionRequest& request) {
    auto it = gold_by_id_.find(request.instance_ref);
    if (it == gold_by_id_.end())
        throw EvalError("scripted oracle has no instance " + request.instance_ref);
    // Parses under both letter-only and final-line extraction.
    return "Answer: " + std::string(1, it->second);
}

UniformRandomClient::UniformRandomClient(const std::vector<DatasetRecord>& records, uint64_t seed)
    : seed_(seed) {
    for (const auto& r : records) letters_by_id_[r.id()] = r.option_letters();
}

std::string UniformRandomClient::complete(const CompletionRequest& request) {
    auto it = letters_by_id_.find(request.instance_ref);
    if (it == letters_by_id_.end())
        throw EvalError("random client has no instance " + request.instance_ref);
    // Draw depends only on (seed, instance, prompt), not on scheduling order.
    uint64_t draw = splitmix64(seed_ ^ fnv1a64(request.instance_ref) ^ fnv1a64(request.prompt));
    return std::string(1, it->second[draw % it->second.size()]);
}

namespace {

// Splits "https://host[:port]/path" into (scheme://host[:port], /path).
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw EvalError("endpoint must include a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ChatCompletionsClient::ChatCompletionsClient(std::string endpoint, std::string model,
                                             std::string api_key)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), api_key_(std::move(api_key)) {}

std::string ChatCompletionsClient::complete(const CompletionRequest& request) {
    auto [base, path] = split_url(endpoint_);
    httplib::Client client(base);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(120, 0);

    Json body{{"model", model_},
              {"messages", Json::array({Json{{"role", "user"}, {"content", request.prompt}}})},
              {"temperature", request.params.temperature},
              {"max_tokens", request.params.max_tokens}};
    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw TransientError("no response from " + endpoint_);
    if (res->status == 401 || res->status == 403)
        throw AuthError("authentication failed (" + std::to_string(res->status) +
                        "); check ATOMS_API_KEY");
    if (res->status == 429 || res->status >= 500)
        throw TransientError("endpoint returned " + std::to_string(res->status));
    if (res->status != 200)
        throw EvalError("endpoint returned " + std::to_string(res->status) + ": " + res->body);
    try {
        Json parsed = Json::parse(res->body);
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
        throw EvalError(std::string("malformed completion response: ") + e.what());
    }
}

namespace {

bool is_boundary(const std::string& s, size_t i) {
    return i >= s.size() || !std::isalnum(static_cast<unsigned char>(s[i]));
}

char match_letter_at(const std::string& s, size_t i, const std::vector<char>& letters) {
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[i])));
    bool is_option = false;
    for (char l : letters) {
        if (std::toupper(static_cast<unsigned char>(l)) == c) is_option = true;
    }
    if (!is_option) return '\0';
    if (i > 0 && !is_boundary(s, i - 1)) return '\0';
    size_t next = i + 1;
    if (next < s.size() && (s[next] == '.' || s[next] == ':' || s[next] == ')')) ++next;
    if (!is_boundary(s, next)) return '\0';
    return c;
}

char first_standalone_letter(const std::string& s, const std::vector<char>& letters) {
    for (size_t i = 0; i < s.size(); ++i) {
        if (!std::isalpha(static_cast<unsigned char>(s[i]))) continue;
        char c = match_letter_at(s, i, letters);
        if (c != '\0') return c;
    }
    return '\0';
}

size_t find_last_marker(const std::string& s, const std::string& marker) {
    size_t best = std::string::npos;
    for (size_t i = 0; i + marker.size() <= s.size(); ++i) {
        bool match = true;
        for (size_t k = 0; k < marker.size(); ++k) {
            if (std::tolower(static_cast<unsigned char>(s[i + k])) !=
                std::tolower(static_cast<unsigned char>(marker[k]))) {
                match = false;
                break;
            }
        }
        if (match) best = i;
    }
    return best;
}

}  // namespace

char extract_answer(const std::string& response, const std::vector<char>& option_letters,
                    ExtractionMode mode) {
    if (option_letters.empty()) throw EvalError("extract_answer: no options");
    if (mode == ExtractionMode::LetterOnly) {
        return first_standalone_letter(response, option_letters);
    }
    size_t marker = find_last_marker(response, "answer:");
    if (marker == std::string::npos) return '\0';
    return first_standalone_letter(response.substr(marker + 7), option_letters);
}

Json EvalRecord::to_json() const {
    return Json{{"instance_id", instance_id},
                {"mode", mode},
                {"model", model},
                {"prompt_digest", prompt_digest},
                {"response", response},
                {"extracted", extracted},
                {"correct", correct},
                {"latency_ms", latency_ms},
                {"attempts", attempts}};
}

EvalRecord EvalRecord::from_json(const Json& j) {
    EvalRecord r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.prompt_digest = j.at("prompt_digest").get<std::string>();
    r.response = j.at("response").get<std::string>();
    r.extracted = j.at("extracted").get<std::string>();
    r.correct = j.at("correct").get<bool>();
    r.latency_ms = j.at("latency_ms").get<long>();
    r.attempts = j.at("attempts").get<int>();
    return r;
}

std::vector<EvalRecord> read_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::vector<EvalRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(EvalRecord::from_json(Json::parse(line)));
    }
    return records;
}

void write_records(const std::string& path, const std::vector<EvalRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EvalError("cannot write " + path);
    for (const auto& r : records) out << r.to_json().dump() << "\n";
}

namespace {

// One exemplar per task, generated from the reserved seed pool (index offset
// 10^6 from the evaluation set).
std::map<std::string, TaskInstance> build_exemplars(const std::vector<DatasetRecord>& dataset,
                                                    uint64_t suite_seed) {
    std::set<std::string> tasks;
    for (const auto& r : dataset) tasks.insert(r.task_id);
    std::map<std::string, TaskInstance> exemplars;
    for (const auto& task : tasks) {
        for (uint64_t attempt = 0; attempt < 20; ++attempt) {
            uint64_t seed = child_seed(suite_seed, task, kExemplarIndexOffset + attempt);
            try {
                exemplars.emplace(task, gen_task(task, seed, attempt % 2 == 0));
                break;
            } catch (const std::exception&) {
                continue;
            }
        }
        if (!exemplars.count(task)) throw EvalError("cannot generate an exemplar for " + task);
    }
    return exemplars;
}

struct WorkItem {
    const DatasetRecord* record;
    std::string prompt;
    ExtractionMode extraction;
};

const char* kUnparseableReminder =
    "\n\nReminder: respond with ONLY the letter corresponding to your answer";

}  // namespace

std::vector<EvalRecord> evaluate(const std::vector<DatasetRecord>& dataset, ModelClient& client,
                                 const EvalOptions& options) {
    // Resume: skip (instance, mode, model) triples already persisted.
    std::vector<EvalRecord> done;
    std::set<std::string> done_ids;
    if (!options.out_path.empty() && options.resume) {
        for (auto& r : read_records(options.out_path)) {
            if (r.mode == mode_name(options.mode) && r.model == client.name()) {
                done_ids.insert(r.instance_id);
                done.push_back(std::move(r));
            }
        }
    }

    std::map<std::string, TaskInstance> exemplars;
    if (options.mode == PromptMode::OneShot)
        exemplars = build_exemplars(dataset, options.exemplar_suite_seed);

    std::vector<WorkItem> work;
    for (const auto& record : dataset) {
        if (done_ids.count(record.id())) continue;
        if (options.limit > 0 && work.size() >= options.limit) break;
        WorkItem item{&record, {}, ExtractionMode::LetterOnly};
        switch (options.mode) {
            case PromptMode::Zero:
                item.prompt = compose_sections(record.sections);
                break;
            case PromptMode::OneShot: {
                const TaskInstance& ex = exemplars.at(record.task_id);
                if (ex.id() == record.id()) throw EvalError("exemplar leaked into evaluation");
                item.prompt =
                    wrap_oneshot_text(render_prompt(ex, PromptMode::Zero).full_text, ex.gold,
                                      compose_sections(record.sections));
                break;
            }
            case PromptMode::Cot: {
                PromptSections s = record.sections;
                s.qa = cot_qa(s.qa, options.cot_tail);
                item.prompt = compose_sections(s);
                item.extraction = ExtractionMode::FinalLine;
                break;
            }
        }
        work.push_back(std::move(item));
    }

    std::vector<EvalRecord> fresh(work.size());
    std::mutex write_mutex;
    std::ofstream sink;
    if (!options.out_path.empty()) {
        sink.open(options.out_path, options.resume ? std::ios::app : std::ios::trunc);
        if (!sink) throw EvalError("cannot open " + options.out_path);
        std::ofstream manifest(options.out_path + ".manifest.json");
        manifest << eval_run_manifest(client, options).dump(2) << "\n";
    }

    std::atomic<size_t> next{0};
    std::atomic<bool> aborted{false};
    std::string abort_reason;

    auto run_one = [&](const WorkItem& item) {
        auto started = std::chrono::steady_clock::now();
        EvalRecord rec;
        rec.instance_id = item.record->id();
        rec.mode = mode_name(options.mode);
        rec.model = client.name();
        rec.prompt_digest = text_digest(item.prompt);

        std::string response;
        bool got_response = false;
        for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
            rec.attempts = attempt;
            try {
                response = client.complete({item.prompt, options.params, item.record->id()});
                got_response = true;
                break;
            } catch (const TransientError&) {
                if (attempt == options.max_attempts) break;
                std::this_thread::sleep_for(std::chrono::milliseconds(
                    options.backoff_base_ms * (1L << (attempt - 1))));
            }
        }
        if (got_response) {
            char letter = extract_answer(response, item.record->option_letters(), item.extraction);
            if (letter == '\0') {
                // One reminder retry before scoring the answer as unparseable.
                try {
                    response = client.complete(
                        {item.prompt + kUnparseableReminder, options.params, item.record->id()});
                    rec.attempts += 1;
                    letter = extract_answer(response, item.record->option_letters(),
                                            item.extraction);
                } catch (const EvalError&) {
                }
            }
            rec.response = response;
            if (letter != '\0') rec.extracted = std::string(1, letter);
            rec.correct = letter == item.record->gold;
        } else {
            rec.response = "";
            rec.correct = false;
        }
        rec.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
        return rec;
    };

    auto worker = [&]() {
        while (!aborted.load()) {
            size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            try {
                EvalRecord rec = run_one(work[i]);
                std::lock_guard<std::mutex> lock(write_mutex);
                fresh[i] = rec;
                if (sink.is_open()) {
                    sink << rec.to_json().dump() << "\n";
                    sink.flush();
                }
            } catch (const AuthError& e) {
                std::lock_guard<std::mutex> lock(write_mutex);
                aborted.store(true);
                abort_reason = e.what();
            } catch (const std::exception& e) {
                EvalRecord rec;
                rec.instance_id = work[i].record->id();
                rec.mode = mode_name(options.mode);
                rec.model = client.name();
                rec.prompt_digest = text_digest(work[i].prompt);
                rec.response = std::string("error: ") + e.what();
                rec.correct = false;
                rec.attempts = options.max_attempts;
                std::lock_guard<std::mutex> lock(write_mutex);
                fresh[i] = rec;
                if (sink.is_open()) {
                    sink << rec.to_json().dump() << "\n";
                    sink.flush();
                }
            }
        }
    };

    size_t n_threads = std::min<size_t>(std::max(1, options.max_in_flight), work.size());
    std::vector<std::thread> pool;
    for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (aborted.load()) throw AuthError(abort_reason);

    for (auto& rec : fresh) {
        if (!rec.instance_id.empty()) done.push_back(std::move(rec));
    }
    return done;
}

Json eval_run_manifest(const ModelClient& client, const EvalOptions& options) {
    return Json{{"model", client.name()},
                {"mode", mode_name(options.mode)},
                {"temperature", options.params.temperature},
                {"max_tokens", options.params.max_tokens},
                {"max_in_flight", options.max_in_flight},
                {"max_attempts", options.max_attempts},
                {"backoff_base_ms", options.backoff_base_ms},
                {"unparseable_policy", "one reminder retry, then scored incorrect"},
                {"template_version", kTemplateVersion},
                {"cot_tail_override", options.cot_tail.empty() ? Json(nullptr)
                                                               : Json(options.cot_tail)}};
}

}  // namespace atoms
