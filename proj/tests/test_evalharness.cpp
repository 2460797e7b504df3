#include "doctest.h"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "httplib.h"

#include "atoms/evalharness.hpp"

using namespace atoms;

namespace {

std::vector<DatasetRecord> small_dataset(uint64_t suite_seed, int per_task = 3) {
    SuiteManifest manifest = SuiteManifest::defaults(suite_seed, per_task);
    SuiteResult result = gen_suite(manifest);
    REQUIRE(result.failures.empty());
    std::vector<DatasetRecord> records;
    for (const auto& inst : result.instances) records.push_back(record_from_instance(inst));
    return records;
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) { std::remove(path.c_str()); }
    ~TempFile() { std::remove(path.c_str()); }
};

// Flaky mock: fails transiently a fixed number of times per instance, then
// answers with a fixed letter. Counts every request it sees.
class FlakyClient : public ModelClient {
public:
    FlakyClient(int failures_before_success, std::string reply)
        : failures_(failures_before_success), reply_(std::move(reply)) {}

    std::string complete(const CompletionRequest& request) override {
        ++calls_;
        std::lock_guard<std::mutex> lock(mutex_);
        auto [it, inserted] = remaining_.emplace(request.instance_ref, failures_);
        if (it->second > 0) {
            --it->second;
            throw TransientError("synthetic outage");
        }
        return reply_;
    }
    std::string name() const override { return "flaky-mock"; }

    int calls() const { return calls_; }

private:
    int failures_;
    std::string reply_;
    std::mutex mutex_;
    std::map<std::string, int> remaining_;
    std::atomic<int> calls_{0};
};

}  // namespace

TEST_CASE("extract_answer: letter-only mode") {
    std::vector<char> ab = {'A', 'B'};
    std::vector<char> abc = {'A', 'B', 'C'};
    CHECK(extract_answer("B", ab, ExtractionMode::LetterOnly) == 'B');
    CHECK(extract_answer("b", ab, ExtractionMode::LetterOnly) == 'B');
    CHECK(extract_answer("B.", ab, ExtractionMode::LetterOnly) == 'B');
    CHECK(extract_answer("(B)", ab, ExtractionMode::LetterOnly) == 'B');
    CHECK(extract_answer("A: left", abc, ExtractionMode::LetterOnly) == 'A');
    CHECK(extract_answer("The answer is C.", abc, ExtractionMode::LetterOnly) == 'C');
    CHECK(extract_answer("", ab, ExtractionMode::LetterOnly) == '\0');
    CHECK(extract_answer("maybe", ab, ExtractionMode::LetterOnly) == '\0');
    // Letters embedded in words don't count.
    CHECK(extract_answer("cab", abc, ExtractionMode::LetterOnly) == '\0');
    // 'D' is not an option here.
    CHECK(extract_answer("D", abc, ExtractionMode::LetterOnly) == '\0');
}

TEST_CASE("extract_answer: final-line mode") {
    std::vector<char> abc = {'A', 'B', 'C'};
    CHECK(extract_answer("step by step reasoning... Answer: C", abc,
                         ExtractionMode::FinalLine) == 'C');
    CHECK(extract_answer("Answer: A\nwait no\nAnswer: B", abc, ExtractionMode::FinalLine) == 'B');
    CHECK(extract_answer("answer: b.", abc, ExtractionMode::FinalLine) == 'B');
    CHECK(extract_answer("no marker, just B", abc, ExtractionMode::FinalLine) == '\0');
    CHECK(extract_answer("Answer: maybe", abc, ExtractionMode::FinalLine) == '\0');
}

TEST_CASE("scripted oracle scores 100% in every mode") {
    auto dataset = small_dataset(21);
    ScriptedOracleClient oracle(dataset);
    for (PromptMode mode : {PromptMode::Zero, PromptMode::OneShot, PromptMode::Cot}) {
        EvalOptions options;
        options.mode = mode;
        options.max_in_flight = 3;
        options.exemplar_suite_seed = 21;
        auto records = evaluate(dataset, oracle, options);
        REQUIRE(records.size() == dataset.size());
        for (const auto& r : records) {
            CHECK(r.correct);
            CHECK(r.mode == mode_name(mode));
        }
    }
}

TEST_CASE("cot responses from the oracle parse under final-line extraction") {
    // The oracle replies with the bare letter; CoT extraction needs the
    // "Answer:" marker, so the harness's reminder retry keeps it parseable.
    auto dataset = small_dataset(22, 2);
    class CotOracle : public ModelClient {
    public:
        explicit CotOracle(const std::vector<DatasetRecord>& records) {
            for (const auto& r : records) gold_[r.id()] = r.gold;
        }
        std::string complete(const CompletionRequest& request) override {
            return "Let me think about the trace step by step. Answer: " +
                   std::string(1, gold_.at(request.instance_ref));
        }
        std::string name() const override { return "cot-oracle"; }

    private:
        std::map<std::string, char> gold_;
    };
    CotOracle oracle(dataset);
    EvalOptions options;
    options.mode = PromptMode::Cot;
    auto records = evaluate(dataset, oracle, options);
    for (const auto& r : records) CHECK(r.correct);
}

TEST_CASE("empty dataset evaluates to an empty record list") {
    std::vector<DatasetRecord> none;
    ScriptedOracleClient oracle(none);
    EvalOptions options;
    CHECK(evaluate(none, oracle, options).empty());
}

TEST_CASE("uniform random stays near the chance floor") {
    auto dataset = small_dataset(23, 20);  // 200 instances
    UniformRandomClient random_client(dataset, 99);
    EvalOptions options;
    options.max_in_flight = 4;
    auto records = evaluate(dataset, random_client, options);
    std::map<std::string, std::pair<int, int>> per_size;  // options -> (correct, n)
    std::map<std::string, const DatasetRecord*> by_id;
    for (const auto& r : dataset) by_id[r.id()] = &r;
    for (const auto& rec : records) {
        const DatasetRecord& d = *by_id.at(rec.instance_id);
        auto& [correct, n] = per_size[std::to_string(d.options.size())];
        correct += rec.correct ? 1 : 0;
        n += 1;
    }
    for (const auto& [k, stats] : per_size) {
        double p = 1.0 / std::stod(k);
        double acc = static_cast<double>(stats.first) / stats.second;
        double half = 1.96 * std::sqrt(p * (1 - p) / stats.second);
        CHECK(acc > p - half - 1e-9);
        CHECK(acc < p + half + 1e-9);
    }
}

TEST_CASE("transient failures are retried with backoff") {
    auto dataset = small_dataset(24, 1);
    FlakyClient flaky(2, "A");  // two outages per instance, then an answer
    EvalOptions options;
    options.max_attempts = 3;
    options.backoff_base_ms = 1;
    auto records = evaluate(dataset, flaky, options);
    REQUIRE(records.size() == dataset.size());
    for (const auto& r : records) {
        CHECK(r.attempts >= 3);
        CHECK_FALSE(r.response.empty());
    }
}

TEST_CASE("exhausted retries mark the record failed but the run continues") {
    auto dataset = small_dataset(25, 1);
    FlakyClient dead(100, "A");
    EvalOptions options;
    options.max_attempts = 2;
    options.backoff_base_ms = 1;
    auto records = evaluate(dataset, dead, options);
    REQUIRE(records.size() == dataset.size());
    for (const auto& r : records) {
        CHECK_FALSE(r.correct);
        CHECK(r.extracted.empty());
    }
}

TEST_CASE("auth failures abort the run with a diagnostic") {
    auto dataset = small_dataset(26, 1);
    class DeniedClient : public ModelClient {
    public:
        std::string complete(const CompletionRequest&) override {
            throw AuthError("authentication failed (401); check ATOMS_API_KEY");
        }
        std::string name() const override { return "denied"; }
    };
    DeniedClient denied;
    EvalOptions options;
    CHECK_THROWS_AS(evaluate(dataset, denied, options), AuthError);
}

TEST_CASE("interrupted runs resume to an identical record set") {
    auto dataset = small_dataset(27, 4);  // 40 instances
    TempFile partial("test_records_partial.jsonl");
    TempFile full("test_records_full.jsonl");
    TempFile partial_manifest(partial.path + ".manifest.json");
    TempFile full_manifest(full.path + ".manifest.json");

    ScriptedOracleClient oracle(dataset);
    EvalOptions half_options;
    half_options.out_path = partial.path;
    half_options.limit = dataset.size() / 2;  // killed at 50%
    evaluate(dataset, oracle, half_options);
    CHECK(read_records(partial.path).size() == dataset.size() / 2);

    EvalOptions resume_options;
    resume_options.out_path = partial.path;  // resume appends the rest
    auto resumed = evaluate(dataset, oracle, resume_options);

    EvalOptions straight_options;
    straight_options.out_path = full.path;
    auto straight = evaluate(dataset, oracle, straight_options);

    REQUIRE(resumed.size() == dataset.size());
    REQUIRE(straight.size() == dataset.size());
    std::map<std::string, Json> by_id;
    for (const auto& r : straight) {
        Json j = r.to_json();
        j.erase("latency_ms");  // timing differs run to run
        by_id[r.instance_id] = j;
    }
    for (const auto& r : resumed) {
        Json j = r.to_json();
        j.erase("latency_ms");
        CHECK(j == by_id.at(r.instance_id));
    }
}

TEST_CASE("no prompt is sent twice for the same instance and mode in one run") {
    auto dataset = small_dataset(28, 2);
    FlakyClient counting(0, "A");
    EvalOptions options;
    options.max_in_flight = 4;
    evaluate(dataset, counting, options);
    // "A" answers parse, so there are no reminder retries: exactly one request
    // per instance.
    CHECK(counting.calls() == static_cast<int>(dataset.size()));
}

TEST_CASE("a cot tail override reshapes the prompt and lands in the run manifest") {
    auto dataset = small_dataset(29, 1);
    TempFile out("test_records_cot_override.jsonl");
    TempFile manifest(out.path + ".manifest.json");

    class EchoClient : public ModelClient {
    public:
        std::string complete(const CompletionRequest& request) override {
            last_prompt = request.prompt;
            return "Answer: A";
        }
        std::string name() const override { return "echo"; }
        std::string last_prompt;
    };
    EchoClient echo;
    EvalOptions options;
    options.mode = PromptMode::Cot;
    options.max_in_flight = 1;
    options.limit = 1;
    options.out_path = out.path;
    options.cot_tail = "Reason carefully, then end with Answer: <letter>";
    evaluate(dataset, echo, options);
    CHECK(echo.last_prompt.find(options.cot_tail) != std::string::npos);
    CHECK(echo.last_prompt.find("Please ONLY respond") == std::string::npos);

    std::ifstream in(manifest.path);
    REQUIRE(in);
    Json j;
    in >> j;
    CHECK(j.at("model") == "echo");
    CHECK(j.at("mode") == "cot");
    CHECK(j.at("temperature") == 0.0);
    CHECK(j.at("cot_tail_override") == options.cot_tail);
    CHECK(j.at("template_version") == kTemplateVersion);
}

TEST_CASE("chat-completions client speaks the wire protocol") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        if (req.get_header_value("Authorization") != "Bearer sk-test") {
            res.status = 401;
            return;
        }
        Json body = Json::parse(req.body);
        if (hits.load() == 1) {
            res.status = 500;  // first request: transient outage
            return;
        }
        std::string content = "echo:" + body.at("model").get<std::string>() + ":" +
                              std::to_string(body.at("messages").size());
        Json reply{{"choices",
                    Json::array({Json{{"message", Json{{"role", "assistant"},
                                                       {"content", content}}}}})}};
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    std::string endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";

    // Transient 500 then success.
    ChatCompletionsClient client(endpoint, "test-model", "sk-test");
    CHECK_THROWS_AS(client.complete({"hello", {}, "ref"}), TransientError);
    CHECK(client.complete({"hello", {}, "ref"}) == "echo:test-model:1");

    // Bad key aborts with an auth diagnostic.
    ChatCompletionsClient denied(endpoint, "test-model", "sk-wrong");
    CHECK_THROWS_AS(denied.complete({"hello", {}, "ref"}), AuthError);

    server.stop();
    server_thread.join();
}

TEST_CASE("eval records survive a file round trip") {
    TempFile f("test_records_roundtrip.jsonl");
    EvalRecord r;
    r.instance_id = "reality-12";
    r.mode = "zero";
    r.model = "scripted-oracle";
    r.prompt_digest = "00ff";
    r.response = "A";
    r.extracted = "A";
    r.correct = true;
    r.latency_ms = 3;
    r.attempts = 1;
    write_records(f.path, {r});
    auto back = read_records(f.path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].to_json() == r.to_json());
}
