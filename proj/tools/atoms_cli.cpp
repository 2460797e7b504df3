#include <clocale>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "atoms/evalharness.hpp"
#include "atoms/scoring.hpp"

namespace {

using namespace atoms;

std::vector<std::string> parse_task_list(const std::string& csv) {
    if (csv.empty()) return task_ids();
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= csv.size()) {
        size_t comma = csv.find(',', start);
        std::string token = csv.substr(start, comma - start);
        if (!token.empty()) {
            if (std::find(task_ids().begin(), task_ids().end(), token) == task_ids().end())
                throw CLI::ValidationError("--tasks", "unknown task id: " + token);
            out.push_back(token);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

int cmd_generate(uint64_t seed, int count, const std::string& tasks_csv,
                 const std::string& out_path) {
    SuiteManifest manifest;
    manifest.suite_seed = seed;
    for (const auto& task : parse_task_list(tasks_csv)) manifest.counts.emplace_back(task, count);

    SuiteResult result = gen_suite(manifest);
    write_dataset(out_path, result.instances);
    write_manifest(manifest_path_for(out_path), manifest);

    std::cout << "wrote " << result.instances.size() << " instances to " << out_path << "\n";
    std::cout << "manifest: " << manifest_path_for(out_path) << "\n";
    std::cout << "digest: " << file_digest(out_path) << "\n";
    for (const auto& failure : result.failures) std::cerr << "generation failure: " << failure << "\n";
    return result.failures.empty() ? 0 : 1;
}

const DatasetRecord& find_record(const std::vector<DatasetRecord>& dataset,
                                 const std::string& id) {
    for (const auto& r : dataset) {
        if (r.id() == id) return r;
    }
    throw std::runtime_error("no instance with id " + id);
}

std::string read_template_file(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read template file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    while (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

int cmd_render(const std::string& data_path, const std::string& id, const std::string& mode_str,
               const std::string& cot_template_path) {
    auto dataset = read_dataset(data_path);
    const DatasetRecord& record = find_record(dataset, id);
    PromptMode mode = mode_from_name(mode_str);
    switch (mode) {
        case PromptMode::Zero:
            std::cout << compose_sections(record.sections) << "\n";
            break;
        case PromptMode::Cot: {
            PromptSections s = record.sections;
            s.qa = cot_qa(s.qa, read_template_file(cot_template_path));
            std::cout << compose_sections(s) << "\n";
            break;
        }
        case PromptMode::OneShot: {
            SuiteManifest manifest = read_manifest(manifest_path_for(data_path));
            uint64_t seed = child_seed(manifest.suite_seed, record.task_id, kExemplarIndexOffset);
            TaskInstance exemplar = gen_task(record.task_id, seed);
            std::cout << wrap_oneshot_text(render_prompt(exemplar, PromptMode::Zero).full_text,
                                           exemplar.gold, compose_sections(record.sections))
                      << "\n";
            break;
        }
    }
    return 0;
}

// Stratified condition recovered from latent truth, so instances can be
// regenerated from (task, seed) alone.
bool condition_from_latent(const DatasetRecord& record) {
    const Json& l = record.latent;
    if (record.task_id == "desire") return l.at("has_preference").get<bool>();
    if (record.task_id == "percept") return l.at("view_range").get<int>() == 3;
    if (record.task_id == "nonliteral") return l.at("truthful").get<bool>();
    if (record.task_id == "knowledge") return l.at("ask_informed").get<bool>();
    if (record.task_id == "emotion") return l.at("witness").get<bool>();
    return true;
}

int cmd_inspect(const std::string& data_path, const std::string& id) {
    auto dataset = read_dataset(data_path);
    const DatasetRecord& record = find_record(dataset, id);
    TaskInstance inst = gen_task(record.task_id, record.seed, condition_from_latent(record));
    if (record_from_instance(inst).sections.actions != record.sections.actions)
        std::cerr << "warning: regenerated instance differs from the dataset record\n";

    std::vector<GridState> states = replay_states(inst.start, inst.trace);
    bool named = !(inst.start.agents.size() == 1 && inst.start.agents[0].id == "agent");
    std::vector<std::string> lines = narrate_trace(inst.start, inst.trace, named);
    std::cout << "instance " << record.id() << "\n\n";
    std::cout << "frame 0 (start)\n" << render_board(states[0]) << "\n";
    for (size_t i = 0; i < lines.size(); ++i) {
        std::cout << "\n" << lines[i] << "\n" << render_board(states[i + 1]) << "\n";
    }
    std::cout << "\nquestion: " << record.question << "\n";
    for (const auto& o : record.options) {
        if (o.is_board) {
            std::cout << o.letter << ":\n" << o.text << "\n";
        } else {
            std::cout << o.letter << ": " << o.text << "\n";
        }
    }
    std::cout << "gold: " << record.gold << "\n";
    std::cout << "latent: " << record.latent.dump(2) << "\n";
    return 0;
}

int cmd_eval(const std::string& data_path, const std::string& model,
             const std::string& endpoint, const std::string& mode_str, int concurrency,
             const std::string& out_path, uint64_t seed, size_t limit, double temperature,
             int max_tokens, bool no_resume, const std::string& cot_template_path) {
    auto dataset = read_dataset(data_path);
    EvalOptions options;
    options.mode = mode_from_name(mode_str);
    options.max_in_flight = concurrency;
    options.out_path = out_path;
    options.resume = !no_resume;
    options.limit = limit;
    options.params.temperature = temperature;
    options.params.max_tokens = max_tokens;
    options.cot_tail = read_template_file(cot_template_path);
    try {
        options.exemplar_suite_seed = read_manifest(manifest_path_for(data_path)).suite_seed;
    } catch (const std::exception&) {
        options.exemplar_suite_seed = seed;
    }

    std::unique_ptr<ModelClient> client;
    if (model == "scripted-oracle") {
        client = std::make_unique<ScriptedOracleClient>(dataset);
    } else if (model == "uniform-random") {
        client = std::make_unique<UniformRandomClient>(dataset, seed);
    } else {
        const char* key = std::getenv("ATOMS_API_KEY");
        if (key == nullptr || *key == '\0') {
            std::cerr << "error: ATOMS_API_KEY is not set\n";
            return 2;
        }
        client = std::make_unique<ChatCompletionsClient>(endpoint, model, key);
    }

    auto records = evaluate(dataset, *client, options);
    int correct = 0;
    for (const auto& r : records) correct += r.correct ? 1 : 0;
    std::cout << "evaluated " << records.size() << " instances (" << correct << " correct)\n";
    if (!out_path.empty()) std::cout << "records: " << out_path << "\n";
    return 0;
}

int cmd_score(const std::string& records_path, const std::string& data_path,
              const std::string& out_prefix) {
    auto dataset = read_dataset(data_path);
    auto records = read_records(records_path);
    ScoreTable table = score(records, dataset);
    std::cout << table.to_text();
    if (!out_prefix.empty()) {
        std::ofstream(out_prefix + ".txt") << table.to_text();
        std::ofstream(out_prefix + ".csv") << table.to_csv();
        std::ofstream(out_prefix + ".json") << table.to_json().dump(2) << "\n";
        std::cout << "wrote " << out_prefix << ".{txt,csv,json}\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"Grid-world theory-of-mind benchmark: generation, prompting, evaluation"};
    app.set_config("--config", "", "Read defaults from an INI config file");
    app.require_subcommand(1);

    uint64_t seed = 7;
    int count = 100;
    std::string tasks_csv;
    std::string out_path = "dataset.jsonl";
    std::string data_path;
    std::string id;
    std::string mode_str = "zero";
    std::string model = "scripted-oracle";
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string records_path = "records.jsonl";
    std::string score_out;
    int concurrency = 4;
    size_t limit = 0;
    double temperature = 0.0;
    int max_tokens = 512;
    bool no_resume = false;
    std::string cot_template_path;

    auto* generate = app.add_subcommand("generate", "Generate a task-instance dataset");
    generate->add_option("--seed", seed, "Suite seed");
    generate->add_option("--count", count, "Instances per task");
    generate->add_option("--tasks", tasks_csv, "Comma-separated task ids (default: all ten)");
    generate->add_option("--out", out_path, "Dataset path (JSONL)");

    auto* render = app.add_subcommand("render", "Print one instance's prompt");
    render->add_option("--data", data_path, "Dataset path")->required();
    render->add_option("--id", id, "Instance id (task-seed)")->required();
    render->add_option("--mode", mode_str, "zero|oneshot|cot");
    render->add_option("--cot-template", cot_template_path,
                       "File whose contents replace the built-in CoT instruction");

    auto* inspect = app.add_subcommand("inspect", "Replay an instance as text frames");
    inspect->add_option("--data", data_path, "Dataset path")->required();
    inspect->add_option("--id", id, "Instance id (task-seed)")->required();

    auto* eval = app.add_subcommand("eval", "Evaluate a model on a dataset");
    eval->add_option("--data", data_path, "Dataset path")->required();
    eval->add_option("--model", model,
                     "scripted-oracle | uniform-random | remote model name");
    eval->add_option("--endpoint", endpoint, "Chat-completions endpoint URL");
    eval->add_option("--mode", mode_str, "zero|oneshot|cot");
    eval->add_option("--concurrency", concurrency, "Max in-flight requests");
    eval->add_option("--out", records_path, "Record file (JSONL, appended for resume)");
    eval->add_option("--seed", seed, "Seed for the uniform-random client");
    eval->add_option("--limit", limit, "Stop after N new records (0 = all)");
    eval->add_option("--temperature", temperature, "Sampling temperature");
    eval->add_option("--max-tokens", max_tokens, "Completion token cap");
    eval->add_flag("--no-resume", no_resume, "Start fresh instead of resuming");
    eval->add_option("--cot-template", cot_template_path,
                     "File whose contents replace the built-in CoT instruction");

    auto* score_cmd = app.add_subcommand("score", "Score records into accuracy tables");
    score_cmd->add_option("--records", records_path, "Record file")->required();
    score_cmd->add_option("--data", data_path, "Dataset path")->required();
    score_cmd->add_option("--out", score_out, "Output prefix for .txt/.csv/.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(seed, count, tasks_csv, out_path);
        if (render->parsed()) return cmd_render(data_path, id, mode_str, cot_template_path);
        if (inspect->parsed()) return cmd_inspect(data_path, id);
        if (eval->parsed())
            return cmd_eval(data_path, model, endpoint, mode_str, concurrency, records_path,
                            seed, limit, temperature, max_tokens, no_resume, cot_template_path);
        if (score_cmd->parsed()) return cmd_score(records_path, data_path, score_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
