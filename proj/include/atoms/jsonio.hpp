#pragma once

#include <string>
#include <vector>

#include "atoms/taskgen.hpp"
#include "atoms/verbalizer.hpp"

namespace atoms {

// One dataset line, as persisted: everything the harness needs without
// re-running the generators.
struct DatasetRecord {
    std::string task_id;
    uint64_t seed = 0;
    std::string question;
    std::vector<OptionItem> options;
    char gold = '?';
    PromptSections sections;
    Json latent;
    std::vector<std::string> board_renders;

    std::string id() const { return task_id + "-" + std::to_string(seed); }
    std::vector<char> option_letters() const;
};

Json instance_to_json(const TaskInstance& inst);
DatasetRecord record_from_json(const Json& j);
DatasetRecord record_from_instance(const TaskInstance& inst);

void write_dataset(const std::string& path, const std::vector<TaskInstance>& instances);
std::vector<DatasetRecord> read_dataset(const std::string& path);

void write_manifest(const std::string& path, const SuiteManifest& manifest);
SuiteManifest read_manifest(const std::string& path);

// Conventional manifest path alongside a dataset file.
std::string manifest_path_for(const std::string& dataset_path);

// FNV-1a content digest of a file, as a fixed-width hex string.
std::string file_digest(const std::string& path);
std::string text_digest(const std::string& text);

}  // namespace atoms
