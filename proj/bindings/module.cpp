#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "atoms/evalharness.hpp"
#include "atoms/scoring.hpp"

namespace py = pybind11;
using namespace atoms;

namespace {

SuiteManifest manifest_for(uint64_t seed, int count,
                           const std::optional<std::vector<std::string>>& tasks) {
    SuiteManifest m;
    m.suite_seed = seed;
    for (const auto& task : tasks.value_or(task_ids())) m.counts.emplace_back(task, count);
    return m;
}

std::vector<std::string> generate_lines(uint64_t seed, int count,
                                        const std::optional<std::vector<std::string>>& tasks) {
    SuiteResult result = gen_suite(manifest_for(seed, count, tasks));
    if (!result.failures.empty())
        throw std::runtime_error("generation failures: " + result.failures.front());
    std::vector<std::string> lines;
    lines.reserve(result.instances.size());
    for (const auto& inst : result.instances) lines.push_back(instance_to_json(inst).dump());
    return lines;
}

std::vector<DatasetRecord> records_from_lines(const std::vector<std::string>& lines) {
    std::vector<DatasetRecord> records;
    records.reserve(lines.size());
    for (const auto& line : lines) records.push_back(record_from_json(Json::parse(line)));
    return records;
}

std::string render_line(const std::string& record_line, const std::string& mode) {
    DatasetRecord record = record_from_json(Json::parse(record_line));
    PromptMode m = mode_from_name(mode);
    if (m == PromptMode::OneShot)
        throw std::invalid_argument("use oneshot_prompt(record_line, suite_seed)");
    PromptSections s = record.sections;
    if (m == PromptMode::Cot) s.qa = cot_qa(s.qa);
    return compose_sections(s);
}

std::string oneshot_prompt(const std::string& record_line, uint64_t suite_seed) {
    DatasetRecord record = record_from_json(Json::parse(record_line));
    uint64_t seed = child_seed(suite_seed, record.task_id, kExemplarIndexOffset);
    TaskInstance exemplar = gen_task(record.task_id, seed);
    return wrap_oneshot_text(render_prompt(exemplar, PromptMode::Zero).full_text, exemplar.gold,
                             compose_sections(record.sections));
}

std::string extract(const std::string& response, const std::string& letters,
                    const std::string& mode) {
    std::vector<char> opts(letters.begin(), letters.end());
    ExtractionMode m = mode == "final_line" ? ExtractionMode::FinalLine
                                            : ExtractionMode::LetterOnly;
    char c = extract_answer(response, opts, m);
    return c == '\0' ? std::string() : std::string(1, c);
}

double oracle_accuracy(const std::vector<std::string>& dataset_lines, const std::string& mode) {
    auto dataset = records_from_lines(dataset_lines);
    ScriptedOracleClient client(dataset);
    EvalOptions options;
    options.mode = mode_from_name(mode);
    options.max_in_flight = 2;
    auto records = evaluate(dataset, client, options);
    if (records.empty()) return 0.0;
    int correct = 0;
    for (const auto& r : records) correct += r.correct ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

std::string score_csv(const std::vector<std::string>& record_lines,
                      const std::vector<std::string>& dataset_lines) {
    auto dataset = records_from_lines(dataset_lines);
    std::vector<EvalRecord> records;
    for (const auto& line : record_lines) records.push_back(EvalRecord::from_json(Json::parse(line)));
    return score(records, dataset).to_csv();
}

}  // namespace

PYBIND11_MODULE(_atoms, m) {
    m.doc() = "Grid-world theory-of-mind benchmark core (instance generation, prompt "
              "rendering, answer extraction, scoring)";
    m.attr("__version__") = kGeneratorVersion;
    m.attr("template_version") = kTemplateVersion;
    m.attr("task_ids") = task_ids();

    m.def("generate", &generate_lines, py::arg("seed"), py::arg("count") = 100,
          py::arg("tasks") = std::nullopt,
          "Generate a dataset as JSONL lines (one instance per line).");
    m.def("manifest_json",
          [](uint64_t seed, int count, const std::optional<std::vector<std::string>>& tasks) {
              return manifest_for(seed, count, tasks).to_json().dump(2);
          },
          py::arg("seed"), py::arg("count") = 100, py::arg("tasks") = std::nullopt);
    m.def("render_prompt", &render_line, py::arg("record_line"), py::arg("mode") = "zero",
          "Render a dataset record into its zero-shot or CoT prompt text.");
    m.def("oneshot_prompt", &oneshot_prompt, py::arg("record_line"), py::arg("suite_seed"),
          "Render the one-shot prompt (exemplar episode plus the query).");
    m.def("extract_answer", &extract, py::arg("response"), py::arg("letters"),
          py::arg("mode") = "letter_only",
          "MC-probing extraction; returns '' when unparseable.");
    m.def("oracle_accuracy", &oracle_accuracy, py::arg("dataset_lines"),
          py::arg("mode") = "zero",
          "Run the scripted oracle over in-memory dataset lines; returns accuracy.");
    m.def("score_csv", &score_csv, py::arg("record_lines"), py::arg("dataset_lines"),
          "Score eval records against a dataset; returns the CSV table.");
}
