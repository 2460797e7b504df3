#include "atoms/jsonio.hpp"

#include <fstream>
#include <sstream>

namespace atoms {

std::vector<char> DatasetRecord::option_letters() const {
    std::vector<char> letters;
    for (const auto& o : options) letters.push_back(o.letter);
    return letters;
}

namespace {

Json options_to_json(const std::vector<OptionItem>& options) {
    Json arr = Json::array();
    for (const auto& o : options) {
        arr.push_back(Json{{"letter", std::string(1, o.letter)}, {"text", o.text}});
    }
    return arr;
}

std::vector<OptionItem> options_from_json(const Json& arr) {
    std::vector<OptionItem> out;
    for (const auto& j : arr) {
        OptionItem o;
        o.letter = j.at("letter").get<std::string>().at(0);
        o.text = j.at("text").get<std::string>();
        o.is_board = o.text.find('\n') != std::string::npos;
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace

Json instance_to_json(const TaskInstance& inst) {
    PromptSections sections = render_sections(inst);
    Json boards = Json::array();
    boards.push_back(render_board(inst.start));
    for (const auto& o : inst.options) {
        if (o.is_board) boards.push_back(o.text);
    }
    return Json{{"task_id", inst.task_id},
                {"seed", inst.seed},
                {"question", inst.question},
                {"options", options_to_json(inst.options)},
                {"gold", std::string(1, inst.gold)},
                {"prompt_sections", sections.to_json()},
                {"latent", inst.latent},
                {"board_renders", boards}};
}

DatasetRecord record_from_json(const Json& j) {
    DatasetRecord r;
    r.task_id = j.at("task_id").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.question = j.at("question").get<std::string>();
    r.options = options_from_json(j.at("options"));
    r.gold = j.at("gold").get<std::string>().at(0);
    r.sections = PromptSections::from_json(j.at("prompt_sections"));
    r.latent = j.at("latent");
    for (const auto& b : j.at("board_renders")) r.board_renders.push_back(b.get<std::string>());
    return r;
}

DatasetRecord record_from_instance(const TaskInstance& inst) {
    return record_from_json(instance_to_json(inst));
}

void write_dataset(const std::string& path, const std::vector<TaskInstance>& instances) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& inst : instances) {
        out << instance_to_json(inst).dump() << "\n";
    }
}

std::vector<DatasetRecord> read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<DatasetRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

void write_manifest(const std::string& path, const SuiteManifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << manifest.to_json().dump(2) << "\n";
}

SuiteManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    Json j;
    in >> j;
    return SuiteManifest::from_json(j);
}

std::string manifest_path_for(const std::string& dataset_path) {
    return dataset_path + ".manifest.json";
}

std::string text_digest(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return text_digest(buf.str());
}

}  // namespace atoms
